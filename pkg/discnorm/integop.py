"""The generalized integration operator (C f)(z) = int_0^z f^(n)(phi(xi)) g(xi) d xi."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ToleranceNotReachedError, UnboundedError
from .fnspec import AnalyticFunction, SelfMap, derivative, identity
from .models import NormResult, QuadratureConfig
from .norms import DEFAULT_CONFIG, _gauss_legendre, _supremum_norm, weighted_supremum
from .weights import NormalWeight, RadialWeight

logger = logging.getLogger(__name__)

PRESETS = ("volterra", "composition", "generalized_composition")

_PATH_ORDER = 8
_PATH_TOL = 1e-10
_PATH_PANEL_CAP = 2**12
_CLOSED_SLACK = 1e-12


@dataclass(frozen=True)
class OperatorSpec:
    n: int
    phi: SelfMap
    g: AnalyticFunction

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"Operator order n must be a nonnegative integer, got {self.n!r}.")
        if not isinstance(self.phi, SelfMap):
            raise TypeError("phi must be a SelfMap; build it with make_self_map().")
        object.__setattr__(self, "n", int(self.n))


def identity_map() -> SelfMap:
    return SelfMap(identity(), 1.0, certified=True, upper_bound=1.0)


def volterra(g: AnalyticFunction) -> OperatorSpec:
    """n = 0 and phi = id, so (C f)(z) = int_0^z f(xi) g(xi) d xi."""
    return OperatorSpec(0, identity_map(), g)


def volterra_symbol(h: AnalyticFunction) -> OperatorSpec:
    """The Volterra-type operator f -> int_0^z f(w) h'(w) dw."""
    return volterra(derivative(h, 1))


def composition(phi: SelfMap) -> OperatorSpec:
    """n = 1 and g = phi', so (C f)' = (f o phi)'."""
    return OperatorSpec(1, phi, derivative(phi.fn, 1))


def generalized_composition(phi: SelfMap, g: AnalyticFunction) -> OperatorSpec:
    return OperatorSpec(1, phi, g)


def _check_points(z) -> np.ndarray:
    points = np.asarray(z, dtype=complex)
    if np.any(np.abs(points) >= 1.0):
        raise DomainError("Operator images are evaluated at points with |z| < 1.")
    return points


def _symbol_values(spec: OperatorSpec, z: np.ndarray) -> np.ndarray:
    values = spec.phi.fn._values(z)
    if np.any(np.abs(values) > 1.0 + _CLOSED_SLACK):
        raise DomainError("The symbol leaves the closed disk; it is not a self-map.")
    return values


def _first_values(spec: OperatorSpec, f: AnalyticFunction, z: np.ndarray) -> np.ndarray:
    inner = _symbol_values(spec, z)
    return derivative(f, spec.n)._values(inner) * spec.g._values(z)


def _second_values(spec: OperatorSpec, f: AnalyticFunction, z: np.ndarray) -> np.ndarray:
    inner = _symbol_values(spec, z)
    chain = derivative(f, spec.n + 1)._values(inner) * derivative(spec.phi.fn, 1)._values(z)
    return chain * spec.g._values(z) + derivative(f, spec.n)._values(inner) * derivative(
        spec.g, 1
    )._values(z)


def _as_output(values: np.ndarray):
    if values.ndim == 0:
        return complex(values)
    return values


def image_first_derivative(spec: OperatorSpec, f: AnalyticFunction, z):
    """(C f)'(z) = f^(n)(phi(z)) g(z)."""
    return _as_output(_first_values(spec, f, _check_points(z)))


def image_second_derivative(spec: OperatorSpec, f: AnalyticFunction, z):
    """(C f)''(z) = f^(n+1)(phi(z)) phi'(z) g(z) + f^(n)(phi(z)) g'(z)."""
    return _as_output(_second_values(spec, f, _check_points(z)))


def apply_operator(
    spec: OperatorSpec, f: AnalyticFunction, z: complex, path_points: int = 32
) -> complex:
    """(C f)(z) by Gauss-Legendre panels along the segment [0, z]."""
    z = complex(_check_points(z))
    if z == 0:
        return 0j
    if path_points < 1:
        raise ValueError("path_points must be at least 1.")
    nodes, weights = _gauss_legendre(_PATH_ORDER)
    panels = int(path_points)
    previous = None
    while panels <= _PATH_PANEL_CAP:
        edges = np.linspace(0.0, 1.0, panels + 1)
        half = 0.5 * np.diff(edges)
        t = ((0.5 * (edges[:-1] + edges[1:]))[:, None] + half[:, None] * nodes[None, :]).ravel()
        w = (half[:, None] * weights[None, :]).ravel()
        value = z * complex(np.dot(w, _first_values(spec, f, t * z)))
        if previous is not None and abs(value - previous) <= _PATH_TOL * max(abs(value), 1.0):
            return value
        previous = value
        panels *= 2
    raise ToleranceNotReachedError(f"Path integral to z={z!r} did not settle.")


def image_zygmund_norm_result(
    spec: OperatorSpec,
    f: AnalyticFunction,
    mu: RadialWeight | NormalWeight,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> NormResult:
    sup = weighted_supremum(lambda z: _second_values(spec, f, z), mu, cfg)
    if sup.growing:
        logger.warning("image supremum grows at every boundary level")
        raise UnboundedError("The image Zygmund supremum keeps growing towards the boundary.")
    head = abs(complex(_first_values(spec, f, np.asarray(0j))))
    return _supremum_norm("zygmund", head, sup)


def image_zygmund_norm(
    spec: OperatorSpec,
    f: AnalyticFunction,
    mu: RadialWeight | NormalWeight,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    """|(Cf)(0)| + |(Cf)'(0)| + sup mu |(Cf)''|, where (Cf)(0) = 0."""
    return image_zygmund_norm_result(spec, f, mu, cfg).value


def image_bloch_norm_result(
    spec: OperatorSpec,
    f: AnalyticFunction,
    mu: RadialWeight | NormalWeight,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> NormResult:
    sup = weighted_supremum(lambda z: _first_values(spec, f, z), mu, cfg)
    if sup.growing:
        logger.warning("image supremum grows at every boundary level")
        raise UnboundedError("The Bloch supremum of the image keeps growing towards the boundary.")
    return _supremum_norm("bloch", 0.0, sup)


def image_bloch_norm(
    spec: OperatorSpec,
    f: AnalyticFunction,
    mu: RadialWeight | NormalWeight,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> float:
    return image_bloch_norm_result(spec, f, mu, cfg).value


def preset(name: str, phi: SelfMap | None, g: AnalyticFunction | None) -> OperatorSpec:
    if name == "volterra":
        if g is None:
            raise ValueError("The volterra preset needs g.")
        return volterra(g)
    if name == "composition":
        if phi is None:
            raise ValueError("The composition preset needs phi.")
        return composition(phi)
    if name == "generalized_composition":
        if phi is None or g is None:
            raise ValueError("The generalized_composition preset needs phi and g.")
        return generalized_composition(phi, g)
    raise ValueError(f"Unknown preset {name!r}; expected one of {', '.join(PRESETS)}.")
