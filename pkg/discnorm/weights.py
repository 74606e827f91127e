"""Radial weights on [0, 1) and the normality checks of the source-space weight."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError
from .models import NormalityReport

logger = logging.getLogger(__name__)

_PARAMETER_COUNTS = {"power": 1, "logpower": 2, "disk_power": 1, "table": 0}
_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class RadialWeight:
    """A positive continuous function of r = |z| on [0, 1).

    kinds:
        power(s)       r -> (1 - r)^s
        logpower(s, t) r -> (1 - r)^s log(e / (1 - r))^t
        disk_power(s)  r -> (1 - r^2)^s
        table          monotone-cubic interpolation of (radii, values), continued past the
                       last sample as the power law fitted to the last two samples
    """

    kind: str
    params: tuple[float, ...] = ()
    radii: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _PARAMETER_COUNTS:
            raise ValueError(f"Unknown weight kind {self.kind!r}.")
        params = tuple(float(p) for p in self.params)
        if len(params) != _PARAMETER_COUNTS[self.kind]:
            raise ValueError(
                f"Weight kind {self.kind!r} takes {_PARAMETER_COUNTS[self.kind]} parameter(s)."
            )
        object.__setattr__(self, "params", params)
        if self.kind == "table":
            radii = tuple(float(r) for r in self.radii)
            values = tuple(float(v) for v in self.values)
            if len(radii) < 2 or len(radii) != len(values):
                raise ValueError("A weight table needs at least two (radius, value) samples.")
            if radii[0] != 0.0 or radii[-1] >= 1.0:
                raise ValueError("Table radii must start at 0 and stay below 1.")
            if any(later <= earlier for earlier, later in zip(radii, radii[1:])):
                raise ValueError("Table radii must be strictly increasing.")
            if any(not v > 0 for v in values):
                raise ValueError("Table values must be positive.")
            object.__setattr__(self, "radii", radii)
            object.__setattr__(self, "values", values)

    def __call__(self, r):
        return weight_eval(self, r)

    @cached_property
    def _interpolator(self) -> PchipInterpolator:
        return PchipInterpolator(np.asarray(self.radii), np.log(np.asarray(self.values)))

    @cached_property
    def _tail_exponent(self) -> float:
        (r1, r2), (v1, v2) = self.radii[-2:], self.values[-2:]
        return math.log(v2 / v1) / math.log((1.0 - r2) / (1.0 - r1))

    def _values(self, r: np.ndarray, gap: np.ndarray | None = None) -> np.ndarray:
        # gap = 1 - r, passed in exactly where r is too close to 1 to subtract
        if gap is None:
            gap = 1.0 - r
        if self.kind == "power":
            return gap ** self.params[0]
        if self.kind == "logpower":
            s, t = self.params
            return gap**s * (1.0 - np.log(gap)) ** t
        if self.kind == "disk_power":
            s = self.params[0]
            return gap**s * (1.0 + r) ** s
        last = self.radii[-1]
        inside = np.exp(self._interpolator(np.minimum(r, last)))
        outside = self.values[-1] * (gap / (1.0 - last)) ** self._tail_exponent
        return np.where(r <= last, inside, outside)

    def as_normal(self, a: float, b: float) -> NormalWeight:
        return NormalWeight(self, a, b)

    def to_dict(self) -> dict:
        data: dict = {"kind": self.kind, "parameters": list(self.params)}
        if self.kind == "table":
            data["radii"] = list(self.radii)
            data["values"] = list(self.values)
        return data


@dataclass(frozen=True)
class NormalWeight:
    """A radial weight together with the exponents 0 < a < b of the normality conditions."""

    profile: RadialWeight
    a: float
    b: float

    def __post_init__(self) -> None:
        if not 0.0 < self.a < self.b:
            raise ValueError(f"Normal weights need 0 < a < b, got a={self.a!r}, b={self.b!r}.")

    @property
    def kind(self) -> str:
        return self.profile.kind

    def __call__(self, r):
        return weight_eval(self, r)

    def _values(self, r: np.ndarray, gap: np.ndarray | None = None) -> np.ndarray:
        return self.profile._values(r, gap)

    def to_dict(self) -> dict:
        data = self.profile.to_dict()
        data.update(a=self.a, b=self.b)
        return data


def power(s: float) -> RadialWeight:
    return RadialWeight("power", (s,))


def logpower(s: float, t: float) -> RadialWeight:
    return RadialWeight("logpower", (s, t))


def disk_power(s: float) -> RadialWeight:
    return RadialWeight("disk_power", (s,))


def table(radii: Sequence[float], values: Sequence[float]) -> RadialWeight:
    return RadialWeight("table", radii=tuple(radii), values=tuple(values))


def weight_eval(w: RadialWeight | NormalWeight, r):
    """Value of the weight at r (scalar or array) in [0, 1)."""
    radii = np.asarray(r, dtype=float)
    if np.any(radii < 0.0) or np.any(radii >= 1.0):
        raise DomainError("Weights are defined for 0 <= r < 1.")
    values = w._values(radii)
    if values.ndim == 0:
        return float(values)
    return values


def geometric_grid(levels: int = 80) -> np.ndarray:
    """r_i = 1 - 2^(-i/2), i = 0 .. levels."""
    return 1.0 - 2.0 ** (-np.arange(levels + 1) / 2.0)


def check_normal(
    w: NormalWeight,
    grid: Sequence[float] | None = None,
    r0: float = 0.75,
    epsilon: float = 1e-3,
    blowup: float = 1e3,
) -> NormalityReport:
    """Judge the two normality clauses of w on a finite grid.

    Monotonicity is judged on the grid points with r >= r0. The limit clauses compare the
    last decile of that sub-grid with its first decile: ratio (i) must fall below
    epsilon times its early value and ratio (ii) must exceed blowup times its early value.
    """
    radii = geometric_grid() if grid is None else np.asarray(grid, dtype=float)
    if radii.ndim != 1 or radii.size < 17:
        raise ValueError("The normality grid needs at least 17 radii.")
    if np.any(np.diff(radii) <= 0) or radii[0] < 0.0 or radii[-1] >= 1.0:
        raise ValueError("The normality grid must increase within [0, 1).")
    window = radii[radii >= r0]
    ignored = radii[radii < r0]
    if grid is not None and ignored.size:
        logger.debug("normality check ignores %d grid radii below r0 = %s", ignored.size, r0)
    if window.size < 10:
        raise ValueError(f"Fewer than 10 grid radii lie beyond r0 = {r0}.")

    values = w._values(window)
    gap = 1.0 - window
    ratio_a = values / gap**w.a
    ratio_b = values / gap**w.b
    decile = max(1, window.size // 10)

    report = NormalityReport(
        grid=tuple(float(r) for r in radii),
        r0=float(r0),
        a=w.a,
        b=w.b,
        ratio_a_nonincreasing=bool(
            np.all(np.diff(ratio_a) <= _MONOTONE_SLACK * np.abs(ratio_a[:-1]))
        ),
        ratio_a_vanishes=bool(np.max(ratio_a[-decile:]) <= epsilon * np.max(ratio_a[:decile])),
        ratio_b_nondecreasing=bool(
            np.all(np.diff(ratio_b) >= -_MONOTONE_SLACK * np.abs(ratio_b[:-1]))
        ),
        ratio_b_blows_up=bool(np.min(ratio_b[-decile:]) >= blowup * np.max(ratio_b[:decile])),
        epsilon=epsilon,
        blowup=blowup,
        ignored=tuple(float(r) for r in ignored),
    )
    if not report.passed:
        logger.info("weight %s failed normality with a=%s, b=%s", w.kind, w.a, w.b)
    return report
