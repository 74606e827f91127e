from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .weights import NormalWeight


def _is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


def encode_complex(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


@dataclass(frozen=True)
class QuadratureConfig:
    circle_points: int = 64
    circle_cap: int = 2**16
    radial_levels: int = 40
    gauss_order: int = 16
    tol: float = 1e-10
    parseval: bool = True
    parseval_cap: int = 2**20
    panel_doublings: int = 6
    divergence_ratio: float = 1e-2
    sup_radii: int = 64
    sup_angles: int = 256
    refine_seeds: int = 4
    growth_threshold: float = 0.01
    growth_levels: int = 8

    def __post_init__(self) -> None:
        if self.circle_points < 64 or not _is_power_of_two(self.circle_points):
            raise ValueError("circle_points must be a power of two and at least 64.")
        if self.circle_cap < self.circle_points:
            raise ValueError("circle_cap must be at least circle_points.")
        if not 8 <= self.radial_levels <= 48:
            raise ValueError("radial_levels must lie between 8 and 48.")
        if not 0.0 < self.divergence_ratio < 1.0:
            raise ValueError("divergence_ratio must lie in (0, 1).")
        if self.gauss_order < 2:
            raise ValueError("gauss_order must be at least 2.")
        if not self.tol > 0:
            raise ValueError("tol must be positive.")
        if self.sup_radii < 16 or self.sup_angles < 16:
            raise ValueError("The supremum grid needs at least 16 radii and 16 angles.")
        if self.refine_seeds < 1:
            raise ValueError("refine_seeds must be at least 1.")
        if not 1 < self.growth_levels < self.radial_levels:
            raise ValueError("growth_levels must lie between 2 and radial_levels - 1.")

    @property
    def tail_cut(self) -> float:
        return 1.0 - 2.0 ** (-self.radial_levels)


@dataclass(frozen=True)
class MixedNormParams:
    p: float
    q: float
    w: NormalWeight

    def __post_init__(self) -> None:
        for name in ("p", "q"):
            value = getattr(self, name)
            if not (0.0 < value < math.inf):
                raise ValueError(f"{name} must be finite and positive, got {value!r}.")


@dataclass(frozen=True)
class SamplerConfig:
    interior_radii: int = 32
    boundary_levels: int = 40
    level_subdivisions: int = 4
    angles: int = 256
    refine_seeds: int = 3
    budget: int = 2_000_000
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.interior_radii < 2:
            raise ValueError("interior_radii must be at least 2.")
        if not 1 <= self.boundary_levels <= 48:
            raise ValueError("boundary_levels must lie between 1 and 48.")
        if self.level_subdivisions < 1:
            raise ValueError("level_subdivisions must be at least 1.")
        if self.angles < 8:
            raise ValueError("angles must be at least 8.")
        if self.refine_seeds < 0:
            raise ValueError("refine_seeds must be nonnegative.")
        if self.sample_count > self.budget:
            raise ValueError(
                f"The sampler grid has {self.sample_count} points, over the budget {self.budget}."
            )

    @property
    def radius_count(self) -> int:
        return self.interior_radii + (self.boundary_levels - 1) * self.level_subdivisions + 1

    @property
    def sample_count(self) -> int:
        return self.radius_count * self.angles


DEFAULT_DELTAS = (0.5, 0.9, 0.99, 0.999, 0.9999)


@dataclass(frozen=True)
class LadderConfig:
    deltas: tuple[float, ...] = DEFAULT_DELTAS
    tol: float = 1e-3
    stable_ratio: float = 0.9

    def __post_init__(self) -> None:
        deltas = tuple(float(d) for d in self.deltas)
        if not deltas:
            raise ValueError("The delta ladder must have at least one rung.")
        if any(not 0.0 < d < 1.0 for d in deltas):
            raise ValueError("Every delta must lie in (0, 1).")
        if any(later <= earlier for earlier, later in zip(deltas, deltas[1:])):
            raise ValueError("Deltas must be strictly increasing.")
        if not self.tol > 0:
            raise ValueError("tol must be positive.")
        object.__setattr__(self, "deltas", deltas)


@dataclass(frozen=True)
class NormalityReport:
    grid: tuple[float, ...]
    r0: float
    a: float
    b: float
    ratio_a_nonincreasing: bool
    ratio_a_vanishes: bool
    ratio_b_nondecreasing: bool
    ratio_b_blows_up: bool
    epsilon: float
    blowup: float
    ignored: tuple[float, ...] = ()

    @property
    def passed(self) -> bool:
        return (
            self.ratio_a_nonincreasing
            and self.ratio_a_vanishes
            and self.ratio_b_nondecreasing
            and self.ratio_b_blows_up
        )

    def to_dict(self) -> dict:
        data = asdict(self)
        data["grid"] = list(self.grid)
        data["ignored"] = list(self.ignored)
        data["passed"] = self.passed
        return data


@dataclass(frozen=True)
class NormResult:
    space: str
    value: float
    error_estimate: float
    evaluations: int
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SupremumResult:
    value: float
    argmax: complex
    grid_value: float
    level_maxima: tuple[float, ...]
    growing: bool
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": encode_complex(self.argmax),
            "grid_value": self.grid_value,
            "level_maxima": list(self.level_maxima),
            "growing": self.growing,
            "evaluations": self.evaluations,
        }


COMPACT = "compact"
NON_COMPACT = "non-compact"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class EssNormReport:
    target: str
    deltas: tuple[float, ...]
    sup_a: tuple[float, ...]
    sup_b: tuple[float, ...]
    limsup_a: float
    limsup_b: float
    estimate: float
    verdict: str
    samples_used: int
    empty_levels: tuple[float, ...]
    trend: str = "decreasing"
    boundary_trend: str = "decreasing"
    extrapolated_a: float = 0.0
    extrapolated_b: float = 0.0
    strict_symbol: bool = False
    symbol_supnorm: float = 1.0
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        data = asdict(self)
        for key in ("deltas", "sup_a", "sup_b", "empty_levels", "notes"):
            data[key] = list(data[key])
        data["label"] = "equivalence-class representative"
        return data


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    computed: complex
    expected: complex
    residual: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "computed": encode_complex(self.computed),
            "expected": encode_complex(self.expected),
            "residual": self.residual,
        }


@dataclass(frozen=True)
class IdentityReport:
    w: complex
    n: int
    alpha: float
    checks: tuple[IdentityCheck, ...]
    tol: float

    @property
    def violated(self) -> bool:
        return any(not check.residual <= self.tol for check in self.checks)

    @property
    def max_residual(self) -> float:
        return max((check.residual for check in self.checks), default=0.0)

    def to_dict(self) -> dict:
        return {
            "w": encode_complex(self.w),
            "n": self.n,
            "alpha": self.alpha,
            "tol": self.tol,
            "violated": self.violated,
            "checks": [check.to_dict() for check in self.checks],
        }


@dataclass(frozen=True)
class BoundRow:
    label: str
    modulus: float
    value: float
    extra: float = 0.0


@dataclass(frozen=True)
class BoundReport:
    kind: str
    rows: tuple[BoundRow, ...]
    ratio: float
    limit: float
    failed: bool

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "ratio": self.ratio,
            "limit": self.limit,
            "failed": self.failed,
            "rows": [asdict(row) for row in self.rows],
        }
