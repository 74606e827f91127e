"""Closed-form analytic functions on the unit disk.

A function is an immutable expression tree built from a handful of node kinds:

    Constant(c)              z -> c
    Monomial(m)              z -> z**m
    BinomialPower(w, alpha)  z -> (1 - conj(w) z) ** (-alpha), principal branch, 1 at z = 0
    Sum(terms)               z -> sum of the terms
    Scale(c, node)           z -> c * node(z)
    Dilate(r, node)          z -> node(r z)
    DerivativeMark(k, node)  z -> node^(k)(z)

Derivatives are returned as trees, never approximated, so n-th derivatives stay exact
close to the boundary where (1 - conj(w) z) ** (-alpha) blows up.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, ToleranceNotReachedError

logger = logging.getLogger(__name__)

_TWO_PI = 2.0 * math.pi
_LIPSCHITZ_TERMS = 4096


def rising_factorial(a: float, n: int) -> float:
    """a (a+1) ... (a+n-1); the empty product is 1."""
    return float(math.prod(a + j for j in range(n)))


class _Node:
    def __call__(self, z):
        return evaluate(self, z)

    def _values(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _derivative(self, n: int) -> "AnalyticFunction":
        raise NotImplementedError

    def _coefficients(self, degree: int) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(_Node):
    c: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", complex(self.c))

    def _values(self, z: np.ndarray) -> np.ndarray:
        return np.full(z.shape, self.c, dtype=complex)

    def _derivative(self, n: int) -> AnalyticFunction:
        return Constant(0)

    def _coefficients(self, degree: int) -> np.ndarray:
        out = np.zeros(degree + 1, dtype=complex)
        out[0] = self.c
        return out


@dataclass(frozen=True)
class Monomial(_Node):
    m: int

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"Monomial degree must be a nonnegative integer, got {self.m!r}.")
        object.__setattr__(self, "m", int(self.m))

    def _values(self, z: np.ndarray) -> np.ndarray:
        return np.power(z, self.m)

    def _derivative(self, n: int) -> AnalyticFunction:
        if n > self.m:
            return Constant(0)
        return Scale(float(math.perm(self.m, n)), Monomial(self.m - n))

    def _coefficients(self, degree: int) -> np.ndarray:
        out = np.zeros(degree + 1, dtype=complex)
        if self.m <= degree:
            out[self.m] = 1.0
        return out


@dataclass(frozen=True)
class BinomialPower(_Node):
    w: complex
    alpha: float

    def __post_init__(self) -> None:
        w = complex(self.w)
        if not abs(w) < 1.0:
            raise ValueError(f"BinomialPower needs |w| < 1, got |w| = {abs(w)!r}.")
        if not self.alpha > 0:
            raise ValueError(f"BinomialPower needs alpha > 0, got {self.alpha!r}.")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "alpha", float(self.alpha))

    def _values(self, z: np.ndarray) -> np.ndarray:
        # Re(1 - conj(w) z) > 0 on the closed disk, so the principal power is single-valued.
        return np.power(1.0 - self.w.conjugate() * z, -self.alpha)

    def _derivative(self, n: int) -> AnalyticFunction:
        coefficient = rising_factorial(self.alpha, n) * self.w.conjugate() ** n
        return Scale(coefficient, BinomialPower(self.w, self.alpha + n))

    def _coefficients(self, degree: int) -> np.ndarray:
        k = np.arange(1, degree + 1, dtype=float)
        ratios = (self.alpha + k - 1.0) / k * self.w.conjugate()
        return np.concatenate(([1.0 + 0.0j], np.cumprod(ratios)))


@dataclass(frozen=True)
class Sum(_Node):
    terms: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))

    def _values(self, z: np.ndarray) -> np.ndarray:
        out = np.zeros(z.shape, dtype=complex)
        for term in self.terms:
            out = out + term._values(z)
        return out

    def _derivative(self, n: int) -> AnalyticFunction:
        return Sum(tuple(derivative(term, n) for term in self.terms))

    def _coefficients(self, degree: int) -> np.ndarray:
        out = np.zeros(degree + 1, dtype=complex)
        for term in self.terms:
            out = out + term._coefficients(degree)
        return out


@dataclass(frozen=True)
class Scale(_Node):
    c: complex
    node: AnalyticFunction

    def __post_init__(self) -> None:
        object.__setattr__(self, "c", complex(self.c))

    def _values(self, z: np.ndarray) -> np.ndarray:
        return self.c * self.node._values(z)

    def _derivative(self, n: int) -> AnalyticFunction:
        return Scale(self.c, derivative(self.node, n))

    def _coefficients(self, degree: int) -> np.ndarray:
        return self.c * self.node._coefficients(degree)


@dataclass(frozen=True)
class Dilate(_Node):
    r: float
    node: AnalyticFunction

    def __post_init__(self) -> None:
        if not 0.0 <= self.r <= 1.0:
            raise ValueError(f"Dilate radius must lie in [0, 1], got {self.r!r}.")
        object.__setattr__(self, "r", float(self.r))

    def _values(self, z: np.ndarray) -> np.ndarray:
        return self.node._values(self.r * z)

    def _derivative(self, n: int) -> AnalyticFunction:
        return Scale(self.r**n, Dilate(self.r, derivative(self.node, n)))

    def _coefficients(self, degree: int) -> np.ndarray:
        return self.node._coefficients(degree) * self.r ** np.arange(degree + 1)


@dataclass(frozen=True)
class DerivativeMark(_Node):
    k: int
    node: AnalyticFunction

    def __post_init__(self) -> None:
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"DerivativeMark order must be a nonnegative integer, got {self.k!r}.")
        object.__setattr__(self, "k", int(self.k))

    @cached_property
    def expanded(self) -> AnalyticFunction:
        return derivative(self.node, self.k)

    def _values(self, z: np.ndarray) -> np.ndarray:
        return self.expanded._values(z)

    def _derivative(self, n: int) -> AnalyticFunction:
        return derivative(self.node, self.k + n)

    def _coefficients(self, degree: int) -> np.ndarray:
        return self.expanded._coefficients(degree)


AnalyticFunction = Union[Constant, Monomial, BinomialPower, Sum, Scale, Dilate, DerivativeMark]


@dataclass(frozen=True)
class SupnormEstimate:
    value: float
    upper_bound: float
    certified: bool
    grid_points: int


@dataclass(frozen=True)
class SelfMap:
    """An analytic self-map of the disk together with its estimated sup-norm."""

    fn: AnalyticFunction
    supnorm: float
    certified: bool = False
    upper_bound: float = math.inf

    def __post_init__(self) -> None:
        if not 0.0 < self.supnorm <= 1.0:
            raise ValueError(f"A self-map needs 0 < supnorm <= 1, got {self.supnorm!r}.")

    @property
    def is_strict(self) -> bool:
        # grid maximum plus Lipschitz margin bounds |phi| whether or not it met tol
        return math.isfinite(self.upper_bound) and self.upper_bound < 1.0


def evaluate(f: AnalyticFunction, z):
    """Evaluate f at a point or an array of points of the open unit disk."""
    points = np.asarray(z, dtype=complex)
    if np.any(np.abs(points) >= 1.0):
        raise DomainError("Evaluation points must satisfy |z| < 1.")
    return _as_output(f._values(points))


def _as_output(values: np.ndarray):
    if values.ndim == 0:
        return complex(values)
    return values


def derivative(f: AnalyticFunction, n: int) -> AnalyticFunction:
    if int(n) != n or n < 0:
        raise ValueError(f"Derivative order must be a nonnegative integer, got {n!r}.")
    if n == 0:
        return f
    return f._derivative(int(n))


def taylor_coeffs(f: AnalyticFunction, degree: int) -> np.ndarray:
    """Maclaurin coefficients a_0 .. a_degree."""
    if degree < 0:
        raise ValueError("Taylor degree must be nonnegative.")
    return f._coefficients(int(degree))


def rotate(f: AnalyticFunction, theta: float) -> AnalyticFunction:
    """Return the tree of z -> f(exp(i theta) z)."""
    turn = cmath.exp(1j * theta)
    if isinstance(f, Constant):
        return f
    if isinstance(f, Monomial):
        return Scale(turn**f.m, f)
    if isinstance(f, BinomialPower):
        # conj(w) e^{i theta} = conj(w e^{-i theta})
        return BinomialPower(f.w * turn.conjugate(), f.alpha)
    if isinstance(f, Sum):
        return Sum(tuple(rotate(term, theta) for term in f.terms))
    if isinstance(f, Scale):
        return Scale(f.c, rotate(f.node, theta))
    if isinstance(f, Dilate):
        return Dilate(f.r, rotate(f.node, theta))
    if isinstance(f, DerivativeMark):
        return Scale(turn ** (-f.k), DerivativeMark(f.k, rotate(f.node, theta)))
    raise TypeError(f"Unsupported node {type(f).__name__}.")


def identity() -> AnalyticFunction:
    return Monomial(1)


def disk_automorphism(a: complex) -> AnalyticFunction:
    """z -> (a - z) / (1 - conj(a) z), as 1/conj(a) - (1 - |a|^2)/conj(a) (1 - conj(a) z)^-1."""
    a = complex(a)
    if not abs(a) < 1.0:
        raise ValueError("Automorphism parameter must satisfy |a| < 1.")
    if a == 0:
        return Scale(-1.0, Monomial(1))
    inverse = 1.0 / a.conjugate()
    return Sum(
        (
            Constant(inverse),
            Scale(-(1.0 - abs(a) ** 2) * inverse, BinomialPower(a, 1.0)),
        )
    )


def polynomial(coefficients: Iterable[complex]) -> AnalyticFunction:
    terms = tuple(
        Scale(c, Monomial(k)) for k, c in enumerate(coefficients) if complex(c) != 0
    )
    return Sum(terms)


def _lipschitz_bound(f: AnalyticFunction) -> float:
    """Bound sup |f'| on the closed disk by the coefficient sum of f' at radius 1."""
    coefficients = np.abs(taylor_coeffs(derivative(f, 1), 2 * _LIPSCHITZ_TERMS - 1))
    head = float(np.sum(coefficients[:_LIPSCHITZ_TERMS]))
    total = float(np.sum(coefficients))
    if total - head > 1e-9 * max(total, 1.0):
        return math.inf
    return total


def _boundary_modulus(f: AnalyticFunction, theta: np.ndarray) -> np.ndarray:
    return np.abs(f._values(np.exp(1j * theta)))


def _polish(f: AnalyticFunction, center: float, half_width: float) -> float:
    result = minimize_scalar(
        lambda t: -float(_boundary_modulus(f, np.asarray(t))),
        bounds=(center - half_width, center + half_width),
        method="bounded",
        options={"xatol": 1e-13},
    )
    return -float(result.fun)


def supnorm_disk(
    f: AnalyticFunction,
    tol: float = 1e-6,
    grid_cap: int = 2**22,
    initial_points: int = 256,
) -> SupnormEstimate:
    """Estimate sup over the disk of |f| as the maximum over the boundary circle.

    The grid doubles (re-using the previous points) until the polished maximum changes by
    less than tol and, where possible, the Lipschitz margin L * pi / N confirms it.
    """
    if tol <= 0:
        raise ValueError("Tolerance must be positive.")
    points = int(initial_points)
    theta = _TWO_PI * np.arange(points) / points
    modulus = _boundary_modulus(f, theta)
    best_index = int(np.argmax(modulus))
    grid_max = float(modulus[best_index])
    estimate = max(grid_max, _polish(f, float(theta[best_index]), _TWO_PI / points))
    lipschitz = _lipschitz_bound(f)

    while True:
        offsets = _TWO_PI * (np.arange(points) + 0.5) / points
        fresh = _boundary_modulus(f, offsets)
        points *= 2
        fresh_index = int(np.argmax(fresh))
        if fresh[fresh_index] > grid_max:
            grid_max = float(fresh[fresh_index])
            center = float(offsets[fresh_index])
        else:
            center = None
        previous = estimate
        if center is not None:
            estimate = max(estimate, grid_max, _polish(f, center, _TWO_PI / points))
        scale = max(1.0, estimate)
        upper_bound = grid_max + lipschitz * math.pi / points
        converged = abs(estimate - previous) <= tol * scale
        certified = upper_bound - estimate <= tol * scale
        if converged and (certified or math.isinf(lipschitz) or points * 2 > grid_cap):
            logger.debug(
                "supnorm %.12g on %d boundary points (certified=%s)", estimate, points, certified
            )
            return SupnormEstimate(
                value=estimate,
                upper_bound=max(upper_bound, estimate),
                certified=certified,
                grid_points=points,
            )
        if points * 2 > grid_cap:
            raise ToleranceNotReachedError(
                f"Boundary maximum did not settle within {grid_cap} grid points."
            )


def make_self_map(fn: AnalyticFunction, tol: float = 1e-6) -> SelfMap:
    estimate = supnorm_disk(fn, tol=tol)
    if estimate.value > 1.0 + tol:
        raise ValueError(
            f"Function is not a self-map of the disk: sup |phi| = {estimate.value:.12g}."
        )
    if estimate.value == 0.0:
        raise ValueError("A constant zero map is not accepted as a symbol.")
    return SelfMap(
        fn=fn,
        supnorm=min(estimate.value, 1.0),
        certified=estimate.certified,
        upper_bound=estimate.upper_bound,
    )


def richardson_derivative(
    fn: Callable[[complex], complex],
    z0: complex,
    order: int,
    step: float,
    levels: int = 4,
) -> complex:
    """Order-k central differences along the real direction with Richardson extrapolation."""
    if order == 0:
        return complex(fn(z0))
    weights = [(-1) ** j * math.comb(order, j) for j in range(order + 1)]

    def central(h: float) -> complex:
        total = sum(
            weight * complex(fn(z0 + (order / 2.0 - j) * h)) for j, weight in enumerate(weights)
        )
        return total / h**order

    table: list[list[complex]] = []
    for level in range(levels):
        row = [central(step / 2**level)]
        for m in range(1, level + 1):
            factor = 4.0**m
            row.append(row[m - 1] + (row[m - 1] - table[level - 1][m - 1]) / (factor - 1.0))
        table.append(row)
    return table[-1][-1]
