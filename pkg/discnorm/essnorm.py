"""Boundary quantities whose limsups estimate the essential norm of C^n_{phi,g}.

For a Zygmund target the estimate is max(limsup A, limsup B) as |phi(z)| -> 1; for a
Bloch target it is the single Bloch quantity. Neither is the essential norm itself: both
are representatives of its equivalence class, with unknown two-sided constants.

The limsup is approached through a delta ladder S(delta) = sup {Q(z) : |phi(z)| > delta}.
Each rung is the maximum of three searches: a polar sample grid refined geometrically
towards the circle, points on the level set |phi| = delta found by bisection along rays,
and Nelder-Mead restarts from the best feasible samples.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, InconclusiveError, UnboundedError
from .extremals import ExtremalParams, make_fk, make_hk
from .fnspec import Scale, SelfMap, derivative
from .grid_engine import evaluate_on_grid
from .integop import OperatorSpec, _first_values, _second_values, image_zygmund_norm
from .models import (
    COMPACT,
    INCONCLUSIVE,
    NON_COMPACT,
    BoundReport,
    BoundRow,
    EssNormReport,
    LadderConfig,
    QuadratureConfig,
    SamplerConfig,
)
from .norms import DEFAULT_CONFIG, _radius_from_level, weighted_supremum
from .weights import NormalWeight, RadialWeight

logger = logging.getLogger(__name__)

TARGETS = ("zygmund", "bloch")

_EDGE = 1.0 - np.finfo(float).eps
_BISECTIONS = 60
_GROWTH = 1.01
_REACH_SLACK = 1e-6

NOTE_G_PRIME = (
    "B uses |g'(z)| as in the boundedness criterion; the Bloch quantity uses |g(z)|. "
    "One lower-bound display writes |g(z_k)| where B has |g'|."
)
NOTE_EXPONENT = "The exponent printed as '1/q + n+' in one lower-bound display is read as 1/q + n."


@dataclass(frozen=True)
class ProxyContext:
    spec: OperatorSpec
    mu: RadialWeight | NormalWeight
    w: NormalWeight
    q: float

    def __post_init__(self) -> None:
        if not 0.0 < self.q < math.inf:
            raise ValueError(f"q must be finite and positive, got {self.q!r}.")
        if not isinstance(self.w, NormalWeight):
            raise TypeError("The source-space weight must be a NormalWeight.")


def _proxy_values(ctx: ProxyContext, kind: str, z: np.ndarray) -> np.ndarray:
    spec = ctx.spec
    rho = np.abs(spec.phi.fn._values(z))
    if kind == "A":
        numerator = np.abs(derivative(spec.phi.fn, 1)._values(z) * spec.g._values(z))
        exponent = 1.0 / ctx.q + spec.n + 1
    elif kind == "B":
        numerator = np.abs(derivative(spec.g, 1)._values(z))
        exponent = 1.0 / ctx.q + spec.n
    elif kind == "bloch":
        numerator = np.abs(spec.g._values(z))
        exponent = 1.0 / ctx.q + spec.n
    else:
        raise ValueError(f"Unknown quantity {kind!r}.")
    numerator = ctx.mu._values(np.abs(z)) * numerator

    inside = rho < _EDGE
    safe = np.where(inside, rho, 0.0)
    denominator = ctx.w._values(safe) * ((1.0 - safe) * (1.0 + safe)) ** exponent
    edge_value = np.where(numerator == 0.0, 0.0, np.inf)
    return np.where(inside, numerator / denominator, edge_value)


def _quantity(ctx: ProxyContext, kind: str, z):
    points = np.asarray(z, dtype=complex)
    if np.any(np.abs(points) >= 1.0):
        raise DomainError("Boundary quantities are evaluated at points with |z| < 1.")
    values = _proxy_values(ctx, kind, points)
    if values.ndim == 0:
        return float(values)
    return values


def quantity_A(ctx: ProxyContext, z):
    """mu(|z|) |phi'(z) g(z)| / (w(|phi(z)|) (1 - |phi(z)|^2)^(1/q + n + 1))."""
    return _quantity(ctx, "A", z)


def quantity_B(ctx: ProxyContext, z):
    """mu(|z|) |g'(z)| / (w(|phi(z)|) (1 - |phi(z)|^2)^(1/q + n))."""
    return _quantity(ctx, "B", z)


def quantity_bloch(ctx: ProxyContext, z):
    """mu(|z|) |g(z)| / (w(|phi(z)|) (1 - |phi(z)|^2)^(1/q + n))."""
    return _quantity(ctx, "bloch", z)


# --- the delta ladder -----------------------------------------------------------------


@dataclass(frozen=True)
class _SampleGrid:
    radii: np.ndarray
    angles: np.ndarray
    points: np.ndarray
    rho: np.ndarray


def _sample_grid(ctx: ProxyContext, sampler: SamplerConfig) -> _SampleGrid:
    inner = np.linspace(0.0, 0.5, sampler.interior_radii, endpoint=False)
    boundary = np.linspace(
        1.0, float(sampler.boundary_levels), sampler.radius_count - sampler.interior_radii
    )
    radii = np.concatenate((inner, _radius_from_level(boundary)))
    angles = 2.0 * math.pi * np.arange(sampler.angles) / sampler.angles
    if sampler.seed is not None:
        rng = np.random.default_rng(sampler.seed)
        angles = angles + rng.uniform(0.0, 2.0 * math.pi / sampler.angles, size=sampler.angles)
    points = radii[:, None] * np.exp(1j * angles)[None, :]
    phi = ctx.spec.phi.fn
    rho = evaluate_on_grid(lambda chunk: np.abs(phi._values(chunk)), points)
    return _SampleGrid(radii, angles, points, rho)


def _level_crossings(ctx: ProxyContext, grid: _SampleGrid, delta: float) -> np.ndarray:
    """Points just inside {|phi| > delta} where a ray leaves or enters the set."""
    feasible = grid.rho > delta
    rows, cols = np.nonzero(feasible[:-1] != feasible[1:])
    if rows.size == 0:
        return np.empty(0, dtype=complex)
    inside_first = feasible[rows, cols]
    good = np.where(inside_first, grid.radii[rows], grid.radii[rows + 1])
    bad = np.where(inside_first, grid.radii[rows + 1], grid.radii[rows])
    turn = np.exp(1j * grid.angles[cols])
    phi = ctx.spec.phi.fn
    for _ in range(_BISECTIONS):
        middle = 0.5 * (good + bad)
        inside = np.abs(phi._values(middle * turn)) > delta
        good = np.where(inside, middle, good)
        bad = np.where(inside, bad, middle)
    return good * turn


def _refine(
    ctx: ProxyContext,
    kind: str,
    delta: float,
    seeds: Sequence[complex],
    sampler: SamplerConfig,
) -> tuple[float, int]:
    phi = ctx.spec.phi.fn
    upper = float(sampler.boundary_levels)

    def point(x: np.ndarray) -> np.ndarray:
        t = min(max(float(x[0]), 0.0), upper)
        return np.asarray([float(_radius_from_level(t)) * np.exp(1j * float(x[1]))])

    def objective(x: np.ndarray) -> float:
        z = point(x)
        if not abs(phi._values(z)[0]) > delta:
            return 0.0
        return -float(_proxy_values(ctx, kind, z)[0])

    best = 0.0
    evaluations = 0
    d_t = 1.0 / sampler.level_subdivisions
    d_theta = 2.0 * math.pi / sampler.angles
    for seed in seeds:
        start = np.array([float(-np.log2(1.0 - abs(seed))), float(np.angle(seed))])
        seed_value = -objective(start)
        if not math.isfinite(seed_value) or seed_value <= 0.0:
            continue
        simplex = np.array([start, start + [d_t, 0.0], start + [0.0, d_theta]])
        result = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": 1e-10,
                "fatol": 1e-14 * seed_value,
                "maxiter": 400,
            },
        )
        evaluations += int(result.nfev)
        best = max(best, float(-result.fun))
    return best, evaluations


def _rung(
    ctx: ProxyContext,
    kind: str,
    delta: float,
    grid: _SampleGrid,
    values: np.ndarray,
    sampler: SamplerConfig,
) -> tuple[float, int, bool]:
    feasible = grid.rho > delta
    if not feasible.any():
        return 0.0, 0, True
    candidates = grid.points[feasible]
    candidate_values = values[feasible]
    crossings = _level_crossings(ctx, grid, delta)
    if crossings.size:
        candidates = np.concatenate((candidates, crossings))
        candidate_values = np.concatenate((candidate_values, _proxy_values(ctx, kind, crossings)))
    best = float(np.max(candidate_values))
    evaluations = int(crossings.size) * (_BISECTIONS + 1)
    if sampler.refine_seeds and math.isfinite(best):
        order = np.argsort(candidate_values)[::-1][: sampler.refine_seeds]
        refined, used = _refine(ctx, kind, delta, candidates[order], sampler)
        best = max(best, refined)
        evaluations += used
    return best, evaluations, False


def _aitken(values: Sequence[float]) -> float:
    if len(values) < 3:
        return float(values[-1]) if values else 0.0
    x0, x1, x2 = (float(v) for v in values[-3:])
    denominator = x2 - 2.0 * x1 + x0
    if denominator == 0.0 or not math.isfinite(denominator):
        return x2
    return min(max(x2 - (x2 - x1) ** 2 / denominator, 0.0), x2)


def _trend(values: Sequence[float], stable_ratio: float) -> str:
    if len(values) < 2:
        return "stable"
    last, previous = values[-1], values[-2]
    if previous == 0.0:
        return "stable" if last == 0.0 else "increasing"
    return "stable" if last >= stable_ratio * previous else "decreasing"


def _boundary_trend(surfaces: Sequence[np.ndarray], sampler: SamplerConfig) -> str:
    row_maxima = np.max([np.max(surface, axis=1) for surface in surfaces], axis=0)
    window = row_maxima[-max(8, 2 * sampler.level_subdivisions) :]
    if not np.all(np.isfinite(window)):
        return "increasing"
    if np.all(np.diff(window) > 0) and window[-1] >= _GROWTH * window[0]:
        return "increasing"
    if window[-1] * _GROWTH <= window[0]:
        return "decreasing"
    return "stable"


def limsup_ladder(
    ctx: ProxyContext,
    deltas: Sequence[float] | None = None,
    sampler: SamplerConfig | None = None,
    *,
    target: str = "zygmund",
    ladder: LadderConfig | None = None,
) -> EssNormReport:
    if target not in TARGETS:
        raise ValueError(f"Unknown target {target!r}; expected one of {', '.join(TARGETS)}.")
    ladder = ladder or LadderConfig()
    if deltas is not None:
        ladder = dataclasses.replace(ladder, deltas=tuple(deltas))
    sampler = sampler or SamplerConfig()
    kinds = ("A", "B") if target == "zygmund" else ("bloch",)

    grid = _sample_grid(ctx, sampler)
    samples_used = grid.points.size
    surfaces = []
    rungs: dict[str, list[float]] = {}
    empty: set[float] = set()
    for kind in kinds:
        values = evaluate_on_grid(
            lambda chunk, kind=kind: _proxy_values(ctx, kind, chunk), grid.points
        )
        surfaces.append(values)
        samples_used += values.size
        rungs[kind] = []
        for delta in ladder.deltas:
            value, used, is_empty = _rung(ctx, kind, delta, grid, values, sampler)
            rungs[kind].append(value)
            samples_used += used
            if is_empty:
                empty.add(delta)
        # Nested sets: a larger delta can never see a larger supremum.
        rungs[kind] = list(np.maximum.accumulate(np.asarray(rungs[kind])[::-1])[::-1])
        logger.info("%s ladder %s", kind, ", ".join(f"{v:.6g}" for v in rungs[kind]))

    primary = rungs[kinds[0]]
    secondary = rungs["B"] if target == "zygmund" else []
    combined = [max(a, b) for a, b in zip(primary, secondary)] if secondary else list(primary)
    strict = ctx.spec.phi.is_strict
    notes = [NOTE_G_PRIME, NOTE_EXPONENT]
    if strict:
        notes.append(
            f"Symbol sup-norm is bounded below 1 (<= {ctx.spec.phi.upper_bound:.6g}); "
            "the boundary set |phi| -> 1 is empty."
        )
        limsup_a = limsup_b = extrapolated_a = extrapolated_b = 0.0
    else:
        limsup_a = float(primary[-1])
        limsup_b = float(secondary[-1]) if secondary else 0.0
        extrapolated_a = _aitken(primary)
        extrapolated_b = _aitken(secondary) if secondary else 0.0

    report = EssNormReport(
        target=target,
        deltas=ladder.deltas,
        sup_a=tuple(float(v) for v in primary),
        sup_b=tuple(float(v) for v in secondary),
        limsup_a=limsup_a,
        limsup_b=limsup_b,
        estimate=max(limsup_a, limsup_b),
        verdict=INCONCLUSIVE,
        samples_used=int(samples_used),
        empty_levels=tuple(d for d in ladder.deltas if d in empty),
        trend=_trend(combined, ladder.stable_ratio),
        boundary_trend=_boundary_trend(surfaces, sampler),
        extrapolated_a=extrapolated_a,
        extrapolated_b=extrapolated_b,
        strict_symbol=strict,
        symbol_supnorm=ctx.spec.phi.supnorm,
        notes=tuple(notes),
    )
    verdict = compactness_verdict(report, ladder.tol, ladder.stable_ratio)
    if verdict == INCONCLUSIVE:
        logger.warning("delta ladder did not settle: %s", report.sup_a)
    return dataclasses.replace(report, verdict=verdict)


def essential_norm_estimate(report: EssNormReport) -> float:
    """max(limsup A, limsup B), or the Bloch limsup for a Bloch target."""
    if report.verdict == INCONCLUSIVE:
        raise InconclusiveError("The delta ladder is inconclusive; no estimate is available.")
    return max(report.limsup_a, report.limsup_b)


def _beyond_reach(report: EssNormReport) -> bool:
    """True when every trailing empty level lies above the symbol's boundary maximum."""
    reach = None
    for delta in reversed(report.deltas):
        if delta not in report.empty_levels:
            break
        reach = delta
    return reach is not None and report.symbol_supnorm + _REACH_SLACK < reach


def compactness_verdict(
    report: EssNormReport, tol: float = 1e-3, stable_ratio: float = 0.9
) -> str:
    """compact, non-compact or inconclusive; tol is relative to the first-rung values.

    Empty deepest levels mean the symbol never reaches them: compact when its sup-norm
    stays below them, inconclusive when the sampler was merely too shallow.
    """
    if report.strict_symbol:
        return COMPACT
    if report.deltas and report.deltas[-1] in report.empty_levels:
        return COMPACT if _beyond_reach(report) else INCONCLUSIVE
    first = [rungs[0] for rungs in (report.sup_a, report.sup_b) if rungs]
    scale = max(first, default=0.0)
    if scale == 0.0 or report.estimate <= tol * scale:
        return COMPACT
    if not math.isfinite(report.estimate):
        return NON_COMPACT
    if report.trend == "stable" or report.boundary_trend == "increasing":
        return NON_COMPACT
    return INCONCLUSIVE


# --- diagnostics from the bounded/compact arguments -----------------------------------


def boundedness_suprema(
    ctx: ProxyContext, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> BoundReport:
    """Suprema that must be finite for C to be bounded into the target space.

    mu|g'| is the Zygmund norm of C applied to z^n/n!, mu|phi' g| comes from z^(n+1)/(n+1)!,
    and mu|g| is the Bloch norm of C applied to z^n/n!.
    """
    spec = ctx.spec
    phi_prime = derivative(spec.phi.fn, 1)
    g_prime = derivative(spec.g, 1)
    quantities = (
        ("mu|g'|", g_prime._values),
        ("mu|phi' g|", lambda z: phi_prime._values(z) * spec.g._values(z)),
        ("mu|g|", spec.g._values),
    )
    rows = []
    for label, values_fn in quantities:
        sup = weighted_supremum(values_fn, ctx.mu, cfg)
        value = math.inf if sup.growing else sup.value
        rows.append(BoundRow(label=label, modulus=abs(sup.argmax), value=value))
    unbounded = any(math.isinf(row.value) for row in rows)
    return BoundReport(
        kind="boundedness",
        rows=tuple(rows),
        ratio=max(row.value for row in rows),
        limit=math.inf,
        failed=unbounded,
    )


def _dilated(spec: OperatorSpec, r: float) -> OperatorSpec:
    phi = spec.phi
    dilated = SelfMap(
        Scale(r, phi.fn),
        supnorm=r * phi.supnorm,
        certified=phi.certified,
        upper_bound=r * phi.upper_bound,
    )
    return OperatorSpec(spec.n, dilated, spec.g)


def dilation_gap(
    ctx: ProxyContext, f, r: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """Zygmund norm of (C_{phi,g} - C_{r phi,g}) f."""
    if not 0.0 < r <= 1.0:
        raise ValueError(f"The dilation radius must lie in (0, 1], got {r!r}.")
    spec = ctx.spec
    shrunk = _dilated(spec, r)
    sup = weighted_supremum(
        lambda z: _second_values(spec, f, z) - _second_values(shrunk, f, z), ctx.mu, cfg
    )
    if sup.growing:
        raise UnboundedError("The dilation gap keeps growing towards the boundary.")
    origin = np.asarray(0j)
    head = abs(complex(_first_values(spec, f, origin) - _first_values(shrunk, f, origin)))
    return head + sup.value


def lower_bound_witness(
    ctx: ProxyContext, points: Sequence[complex], cfg: QuadratureConfig = DEFAULT_CONFIG
) -> BoundReport:
    """Zygmund norms of C f_k and C h_k next to mu |(C f_k)''(z_k)| and mu |(C h_k)''(z_k)|.

    The point value never exceeds the supremum, so ratio (point / norm) must stay <= 1.
    """
    spec = ctx.spec
    rows = []
    for z_k in points:
        z = np.asarray(complex(z_k))
        if not abs(z) < 1.0:
            raise DomainError(f"Witness points must lie in the disk, got {complex(z_k)!r}.")
        w_k = complex(spec.phi.fn._values(z))
        if not abs(w_k) < 1.0:
            raise DomainError(f"phi({complex(z_k)!r}) lies on the circle; no extremal exists.")
        prm = ExtremalParams(w=w_k, q=ctx.q, b=ctx.w.b, n=spec.n)
        weight_at_z = float(ctx.mu._values(np.asarray(abs(z))))
        for label, family in (("f_k", make_fk), ("h_k", make_hk)):
            f = family(prm, ctx.w)
            norm = image_zygmund_norm(spec, f, ctx.mu, cfg)
            point_value = weight_at_z * abs(complex(_second_values(spec, f, z)))
            rows.append(BoundRow(label=label, modulus=abs(w_k), value=norm, extra=point_value))
    ratio = max((row.extra / row.value for row in rows if row.value > 0), default=0.0)
    return BoundReport(
        kind="lower_bound", rows=tuple(rows), ratio=ratio, limit=1.0, failed=ratio > 1.0 + 1e-3
    )
