"""Integral means, radial quadrature and weighted suprema for the disk norms.

Radial integrals use the substitution r = 1 - 2^(-t), under which dr / (1 - r) = ln 2 dt,
so the boundary concentration of the mixed-norm measure becomes a uniform t-grid covered
by Gauss-Legendre panels. Suprema are searched on a polar grid whose radii are
geometrically refined towards the circle, then sharpened by Nelder-Mead in (t, theta).

All areas use the normalised measure dA = r dr dtheta / pi, which has total mass 1.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre, polynomial
from scipy.optimize import minimize

from .errors import DivergenceError, DomainError, ToleranceNotReachedError, UnboundedError
from .fnspec import AnalyticFunction, derivative, taylor_coeffs
from .grid_engine import evaluate_on_grid
from .models import MixedNormParams, NormResult, QuadratureConfig, SupremumResult
from .weights import NormalWeight, RadialWeight

logger = logging.getLogger(__name__)

_LN2 = math.log(2.0)
_TWO_PI = 2.0 * math.pi
_RADIAL_TOL = 1e-9
_PARSEVAL_START = 256
_MIN_DECAY = 1e-9

DEFAULT_CONFIG = QuadratureConfig()


def _radius_from_level(t):
    return -np.expm1(-_LN2 * np.asarray(t, dtype=float))


def _level_from_radius(r):
    return -np.log2(1.0 - np.asarray(r, dtype=float))


@lru_cache(maxsize=16)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    return legendre.leggauss(order)


def _panel_rule(upper: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = _gauss_legendre(order)
    edges = np.linspace(0.0, upper, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    t = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return t, w


# --- integral means -------------------------------------------------------------------


def _circle_power_mean(f: AnalyticFunction, r: float, q: float, cfg: QuadratureConfig) -> float:
    """(1/2pi) int |f(r e^{i theta})|^q d theta by trapezoidal doubling."""
    if r == 0.0:
        return float(abs(f._values(np.asarray(0j)))) ** q
    points = cfg.circle_points
    theta = _TWO_PI * np.arange(points) / points
    total = float(np.sum(np.abs(f._values(r * np.exp(1j * theta))) ** q))
    mean = total / points
    while True:
        offsets = _TWO_PI * (np.arange(points) + 0.5) / points
        total += float(np.sum(np.abs(f._values(r * np.exp(1j * offsets))) ** q))
        points *= 2
        refined = total / points
        if abs(refined - mean) <= cfg.tol * refined:
            return refined
        if points * 2 > cfg.circle_cap:
            raise ToleranceNotReachedError(
                f"Integral mean at r={r!r} did not settle within {cfg.circle_cap} points."
            )
        mean = refined


def integral_mean(
    f: AnalyticFunction, r: float, q: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """M_q(f, r), the L^q mean of |f| over the circle of radius r."""
    if not 0.0 <= r < 1.0:
        raise DomainError(f"Integral means need 0 <= r < 1, got r={r!r}.")
    if not q > 0:
        raise ValueError("q must be positive.")
    return _circle_power_mean(f, float(r), float(q), cfg) ** (1.0 / q)


def _parseval_energies(f: AnalyticFunction, cfg: QuadratureConfig) -> np.ndarray | None:
    """|a_k|^2 up to a degree whose upper half carries a negligible share of the energy."""
    degree = _PARSEVAL_START
    while degree <= cfg.parseval_cap:
        energies = np.abs(taylor_coeffs(f, 2 * degree - 1)) ** 2
        total = float(np.sum(energies))
        if total == 0.0:
            return energies[:1]
        if float(np.sum(energies[degree:])) <= cfg.tol * total:
            tail = np.cumsum(energies[::-1])[::-1]
            return energies[: int(np.count_nonzero(tail > 1e-3 * cfg.tol * total))]
        degree *= 2
    return None


def _power_mean_profile(
    f: AnalyticFunction, q: float, cfg: QuadratureConfig
) -> Callable[[np.ndarray], np.ndarray]:
    """r -> M_q(f, r)^q, vectorised over radii."""
    if q == 2.0 and cfg.parseval:
        energies = _parseval_energies(f, cfg)
        if energies is not None:
            return lambda radii: polynomial.polyval(radii**2, energies)
        logger.debug("Taylor energies did not settle; falling back to circle quadrature.")

    def chunk_means(chunk: np.ndarray) -> np.ndarray:
        return np.array([_circle_power_mean(f, float(r), q, cfg) for r in chunk])

    return lambda radii: evaluate_on_grid(chunk_means, radii, chunk_size=8)


def mean_profile(
    f: AnalyticFunction, q: float, radii, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """M_q(f, r) on an array of radii in [0, 1)."""
    radii = np.asarray(radii, dtype=float)
    if np.any(radii < 0.0) or np.any(radii >= 1.0):
        raise DomainError("Integral means need 0 <= r < 1.")
    return _power_mean_profile(f, q, cfg)(radii) ** (1.0 / q)


# --- radial quadrature ----------------------------------------------------------------


def _geometric_tail(edge: np.ndarray) -> tuple[float, float]:
    """Tail beyond the last of three unit-spaced samples, and the same from the previous pair.

    Past the last level the integrand is continued as c 2^(-kappa t), with kappa measured
    from the last two samples; integrating that gives integrand(T) / (kappa ln 2).
    """
    if edge[-1] == 0.0:
        return 0.0, 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        rates = np.log2(edge[:-1] / edge[1:])
    if not np.all(np.isfinite(rates)) or rates[-1] <= _MIN_DECAY:
        return math.inf, math.inf
    earlier = edge[-1] / (rates[-2] * _LN2) if rates[-2] > _MIN_DECAY else math.inf
    return float(edge[-1] / (rates[-1] * _LN2)), float(earlier)


def _radial_quadrature(
    integrand: Callable[[np.ndarray], np.ndarray],
    cfg: QuadratureConfig,
    space: str,
) -> NormResult:
    """int_0^infinity integrand(t) dt: Gauss-Legendre panels on [0, T] plus a closed-form tail.

    The same estimate cut at 3T / 4 must agree with the full one to within divergence_ratio;
    an integrand that has stopped decaying, or whose estimate keeps moving, is divergent.
    """
    levels = cfg.radial_levels
    upper = float(levels)
    panels = levels
    previous = None
    evaluations = 0
    for _ in range(cfg.panel_doublings + 1):
        t, weights = _panel_rule(upper, panels, cfg.gauss_order)
        values = integrand(t)
        evaluations += t.size
        total = float(np.dot(weights, values))
        if previous is not None and abs(total - previous) <= _RADIAL_TOL * abs(total):
            break
        previous = total
        panels *= 2
    else:
        raise ToleranceNotReachedError(f"The {space} radial quadrature did not settle.")

    # panel edges sit on every integer level, so the partial sum up to cut is exact
    cut = 3 * levels // 4
    sample_levels = np.asarray([cut - 2, cut - 1, cut, levels - 2, levels - 1, levels], dtype=float)
    edge = np.asarray(integrand(sample_levels), dtype=float)
    evaluations += sample_levels.size
    tail, earlier_tail = _geometric_tail(edge[3:])
    cut_tail, _ = _geometric_tail(edge[:3])
    value = total + tail
    cut_value = float(np.dot(weights[t < cut], values[t < cut])) + cut_tail
    drift = abs(value - cut_value)
    if not math.isfinite(value) or drift > cfg.divergence_ratio * abs(value):
        logger.warning("%s integral still moving at r = 1 - 2^-%d", space, levels)
        raise DivergenceError(
            f"The {space} integral did not stabilise: estimate {value:.6e} at level {levels} "
            f"vs {cut_value:.6e} at level {cut}."
        )
    return NormResult(
        space=space,
        value=value,
        error_estimate=abs(total - previous) + abs(earlier_tail - tail),
        evaluations=evaluations,
        details={"panels": panels, "tail_cut": cfg.tail_cut, "tail": tail, "drift": drift},
    )


def mixed_norm_result(
    f: AnalyticFunction, prm: MixedNormParams, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> NormResult:
    p, q, w = prm.p, prm.q, prm.w
    profile = _power_mean_profile(f, q, cfg)

    def integrand(t: np.ndarray) -> np.ndarray:
        r = _radius_from_level(t)
        means = profile(r)
        return _LN2 * means ** (p / q) * w._values(r, np.exp2(-t)) ** p

    raw = _radial_quadrature(integrand, cfg, "mixed")
    value = raw.value ** (1.0 / p)
    return NormResult(
        space="mixed",
        value=value,
        error_estimate=_root_error(raw.value, raw.error_estimate, p),
        evaluations=raw.evaluations,
        details={**raw.details, "p": p, "q": q, "norm_power": raw.value},
    )


def mixed_norm(
    f: AnalyticFunction, prm: MixedNormParams, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """(int_0^1 M_q^p(f, r) w(r)^p / (1 - r) dr)^(1/p)."""
    return mixed_norm_result(f, prm, cfg).value


def bergman_norm_result(
    f: AnalyticFunction, p: float, alpha: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> NormResult:
    if not alpha > -1.0:
        raise ValueError(f"Bergman weights need alpha > -1, got {alpha!r}.")
    if not p > 0:
        raise ValueError("p must be positive.")
    profile = _power_mean_profile(f, p, cfg)

    def integrand(t: np.ndarray) -> np.ndarray:
        r = _radius_from_level(t)
        gap = np.exp2(-t)
        means = profile(r)
        return _LN2 * gap * 2.0 * r * means * (gap * (1.0 + r)) ** alpha

    raw = _radial_quadrature(integrand, cfg, "bergman")
    return NormResult(
        space="bergman",
        value=raw.value ** (1.0 / p),
        error_estimate=_root_error(raw.value, raw.error_estimate, p),
        evaluations=raw.evaluations,
        details={**raw.details, "p": p, "alpha": alpha, "norm_power": raw.value},
    )


def bergman_norm(
    f: AnalyticFunction, p: float, alpha: float, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """(int_D |f|^p (1 - |z|^2)^alpha dA)^(1/p) with normalised area measure."""
    return bergman_norm_result(f, p, alpha, cfg).value


def _root_error(power_value: float, power_error: float, p: float) -> float:
    if power_value <= 0.0:
        return power_error ** (1.0 / p)
    return power_value ** (1.0 / p - 1.0) * power_error / p


# --- weighted suprema -----------------------------------------------------------------


def _supremum_radii(cfg: QuadratureConfig) -> np.ndarray:
    interior = cfg.sup_radii // 4
    inner = np.linspace(0.0, 1.0 - 2.0**-4, interior, endpoint=False)
    levels = np.linspace(4.0, float(cfg.radial_levels), cfg.sup_radii - interior)
    return np.concatenate((inner, _radius_from_level(levels)))


def supremum_surface(
    values_fn: Callable[[np.ndarray], np.ndarray],
    mu: RadialWeight | NormalWeight,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """mu(r) |F(r e^{i theta})| on the polar grid; returns (radii, angles, values[r, theta])."""
    radii = _supremum_radii(cfg)
    angles = _TWO_PI * np.arange(cfg.sup_angles) / cfg.sup_angles
    z = radii[:, None] * np.exp(1j * angles)[None, :]
    moduli = evaluate_on_grid(lambda chunk: np.abs(values_fn(chunk)), z)
    return radii, angles, mu._values(radii)[:, None] * moduli


def weighted_supremum(
    values_fn: Callable[[np.ndarray], np.ndarray],
    mu: RadialWeight | NormalWeight,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> SupremumResult:
    """Estimate sup over the disk of mu(|z|) |F(z)| for a vectorised F."""
    radii, angles, surface = supremum_surface(values_fn, mu, cfg)
    evaluations = surface.size
    best_row, best_col = divmod(int(np.argmax(surface)), surface.shape[1])
    grid_value = float(surface[best_row, best_col])
    best_value = grid_value
    best_z = complex(radii[best_row] * np.exp(1j * angles[best_col]))

    upper = float(cfg.radial_levels)

    def objective(x: np.ndarray) -> float:
        t = min(max(float(x[0]), 0.0), upper)
        r = float(_radius_from_level(t))
        z = np.asarray([r * np.exp(1j * float(x[1]))])
        return -float(mu._values(np.asarray(r)) * np.abs(values_fn(z))[0])

    levels = _level_from_radius(radii)
    d_theta = _TWO_PI / cfg.sup_angles
    # A vanishing surface has nothing to refine.
    seeds = cfg.refine_seeds if grid_value > 0.0 else 0
    for index in np.argsort(surface, axis=None)[::-1][:seeds]:
        row, col = divmod(int(index), surface.shape[1])
        start = np.array([levels[row], angles[col]])
        d_t = float(levels[min(row + 1, len(levels) - 1)] - levels[max(row - 1, 0)]) / 2.0 or 0.5
        simplex = np.array([start, start + [d_t, 0.0], start + [0.0, d_theta]])
        result = minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": 1e-11,
                "fatol": 1e-14 * grid_value,
                "maxiter": 600,
            },
        )
        evaluations += int(result.nfev)
        if -result.fun > best_value:
            best_value = float(-result.fun)
            t = min(max(float(result.x[0]), 0.0), upper)
            best_z = complex(float(_radius_from_level(t)) * np.exp(1j * float(result.x[1])))

    boundary_rows = surface[cfg.sup_radii // 4 :].max(axis=1)
    tail = boundary_rows[-cfg.growth_levels :]
    growing = bool(
        np.all(np.diff(tail) > 0) and tail[-1] >= (1.0 + cfg.growth_threshold) * tail[0]
    )
    return SupremumResult(
        value=best_value,
        argmax=best_z,
        grid_value=grid_value,
        level_maxima=tuple(float(v) for v in boundary_rows),
        growing=growing,
        evaluations=evaluations,
    )


def _derivative_supremum(
    f: AnalyticFunction,
    order: int,
    mu: RadialWeight | NormalWeight,
    cfg: QuadratureConfig,
    space: str,
) -> SupremumResult:
    tree = derivative(f, order)
    sup = weighted_supremum(tree._values, mu, cfg)
    if sup.growing:
        logger.warning("%s supremum grows at every boundary level", space)
        raise UnboundedError(f"The {space} supremum keeps growing towards the boundary.")
    return sup


def zygmund_norm_result(
    f: AnalyticFunction, mu: RadialWeight | NormalWeight, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> NormResult:
    sup = _derivative_supremum(f, 2, mu, cfg, "zygmund")
    origin = np.asarray(0j)
    head = abs(complex(f._values(origin))) + abs(complex(derivative(f, 1)._values(origin)))
    return _supremum_norm("zygmund", head, sup)


def zygmund_norm(
    f: AnalyticFunction, mu: RadialWeight | NormalWeight, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """|f(0)| + |f'(0)| + sup mu(|z|) |f''(z)|."""
    return zygmund_norm_result(f, mu, cfg).value


def bloch_norm_result(
    f: AnalyticFunction, mu: RadialWeight | NormalWeight, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> NormResult:
    sup = _derivative_supremum(f, 1, mu, cfg, "bloch")
    head = abs(complex(f._values(np.asarray(0j))))
    return _supremum_norm("bloch", head, sup)


def bloch_norm(
    f: AnalyticFunction, mu: RadialWeight | NormalWeight, cfg: QuadratureConfig = DEFAULT_CONFIG
) -> float:
    """|f(0)| + sup mu(|z|) |f'(z)|."""
    return bloch_norm_result(f, mu, cfg).value


def _supremum_norm(space: str, head: float, sup: SupremumResult) -> NormResult:
    return NormResult(
        space=space,
        value=head + sup.value,
        error_estimate=sup.value - sup.grid_value,
        evaluations=sup.evaluations,
        details={
            "head": head,
            "supremum": sup.value,
            "grid_supremum": sup.grid_value,
            "search": sup.to_dict(),
        },
    )
