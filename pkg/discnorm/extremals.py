"""Extremal test functions f_k, h_k peaking at a point w of the disk.

With s = 1 - |w|^2, c = s^(b+1) / W(|w|) and B_beta(z) = (1 - conj(w) z)^(-beta):

    f_k = c (B_alpha - alpha s / (alpha + n) B_(alpha+1))
    h_k = c ((alpha + n + 1) B_alpha - alpha s B_(alpha+1))

where alpha = 1/q + b + 1. Their n-th and (n+1)-th derivatives at w vanish alternately,
which is what makes them witness the two halves of the lower estimate.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .fnspec import (
    AnalyticFunction,
    BinomialPower,
    Monomial,
    Scale,
    Sum,
    derivative,
    rising_factorial,
)
from .models import (
    BoundReport,
    BoundRow,
    IdentityCheck,
    IdentityReport,
    MixedNormParams,
    QuadratureConfig,
)
from .norms import DEFAULT_CONFIG, mixed_norm
from .weights import NormalWeight

logger = logging.getLogger(__name__)

UNIFORM_RATIO_LIMIT = 4.0
_INNER_DISK = 0.5
_INNER_SAMPLES = 256


@dataclass(frozen=True)
class ExtremalParams:
    w: complex
    q: float
    b: float
    n: int
    alpha_shift: float = 0.0

    def __post_init__(self) -> None:
        w = complex(self.w)
        if not abs(w) < 1.0:
            raise ValueError(f"Extremal peak must satisfy |w| < 1, got |w| = {abs(w)!r}.")
        if not 0.0 < self.q < math.inf:
            raise ValueError(f"q must be finite and positive, got {self.q!r}.")
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a nonnegative integer, got {self.n!r}.")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "n", int(self.n))
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}.")

    @property
    def canonical_alpha(self) -> float:
        return 1.0 / self.q + self.b + 1.0

    @property
    def alpha(self) -> float:
        """The exponent used to build f_k and h_k; alpha_shift != 0 only for negative controls."""
        return self.canonical_alpha + self.alpha_shift

    @property
    def gap(self) -> float:
        """1 - |w|^2."""
        return 1.0 - (self.w.real**2 + self.w.imag**2)


def _scale_factor(prm: ExtremalParams, w_weight: NormalWeight) -> float:
    return prm.gap ** (prm.b + 1.0) / float(w_weight._values(np.asarray(abs(prm.w))))


def make_fk(prm: ExtremalParams, w_weight: NormalWeight) -> AnalyticFunction:
    alpha, n, s = prm.alpha, prm.n, prm.gap
    bracket = Sum(
        (
            BinomialPower(prm.w, alpha),
            Scale(-alpha * s / (alpha + n), BinomialPower(prm.w, alpha + 1.0)),
        )
    )
    return Scale(_scale_factor(prm, w_weight), bracket)


def make_hk(prm: ExtremalParams, w_weight: NormalWeight) -> AnalyticFunction:
    alpha, n, s = prm.alpha, prm.n, prm.gap
    bracket = Sum(
        (
            Scale(alpha + n + 1.0, BinomialPower(prm.w, alpha)),
            Scale(-alpha * s, BinomialPower(prm.w, alpha + 1.0)),
        )
    )
    return Scale(_scale_factor(prm, w_weight), bracket)


def _at_peak(f: AnalyticFunction, order: int, w: complex) -> complex:
    return complex(derivative(f, order)._values(np.asarray(w)))


def verify_identities(
    prm: ExtremalParams, w_weight: NormalWeight, tol: float = 1e-8
) -> IdentityReport:
    """Evaluate the four peak identities with exact derivatives.

    (1) f_k^(n)(w) = 0
    (2) h_k^(n+1)(w) = 0
    (3) f_k^(n+1)(w) = -(alpha)_n conj(w)^(n+1) / (W(|w|) s^(1/q+n+1))
    (4) h_k^(n)(w)   =  (alpha)_n conj(w)^n     / (W(|w|) s^(1/q+n))

    The closed forms use alpha = 1/q + b + 1 regardless of alpha_shift. Residuals are
    relative to (alpha)_(order+1) / (W(|w|) s^(1/q+order)), the size of the individual
    terms that cancel.
    """
    if not tol > 0:
        raise ValueError("tol must be positive.")
    n, s, w = prm.n, prm.gap, prm.w
    alpha = prm.canonical_alpha
    weight = float(w_weight._values(np.asarray(abs(w))))
    pochhammer = rising_factorial(alpha, n)
    conj = w.conjugate()
    fk = make_fk(prm, w_weight)
    hk = make_hk(prm, w_weight)

    def scale(order: int) -> float:
        return rising_factorial(alpha, order + 1) / (weight * s ** (1.0 / prm.q + order))

    expected = (
        ("f_k^(n)(w) = 0", fk, n, 0j),
        ("h_k^(n+1)(w) = 0", hk, n + 1, 0j),
        (
            "f_k^(n+1)(w) closed form",
            fk,
            n + 1,
            -pochhammer * conj ** (n + 1) / (weight * s ** (1.0 / prm.q + n + 1)),
        ),
        (
            "h_k^(n)(w) closed form",
            hk,
            n,
            pochhammer * conj**n / (weight * s ** (1.0 / prm.q + n)),
        ),
    )
    checks = []
    for name, f, order, value in expected:
        computed = _at_peak(f, order, w)
        checks.append(
            IdentityCheck(
                name=name,
                computed=computed,
                expected=complex(value),
                residual=abs(computed - value) / scale(order),
            )
        )
    report = IdentityReport(w=w, n=n, alpha=prm.alpha, checks=tuple(checks), tol=tol)
    if report.violated:
        logger.warning("extremal identities violated at w=%s, n=%d", w, n)
    return report


def rung_family(
    q: float, b: float, n: int, depth: int = 10, argument: float = 0.0
) -> list[ExtremalParams]:
    """Parameters with |w_j| = 1 - 2^(-j), j = 1 .. depth, on the ray of angle argument."""
    turn = complex(math.cos(argument), math.sin(argument))
    return [ExtremalParams(w=(1.0 - 2.0**-j) * turn, q=q, b=b, n=n) for j in range(1, depth + 1)]


def _inner_maximum(f: AnalyticFunction) -> float:
    theta = 2.0 * math.pi * np.arange(_INNER_SAMPLES) / _INNER_SAMPLES
    return float(np.max(np.abs(f._values(_INNER_DISK * np.exp(1j * theta)))))


def _tail_shrinks(maxima: Sequence[float]) -> bool:
    if len(maxima) < 2:
        return True
    outer = maxima[len(maxima) // 2 :]
    falling = all(later < earlier for earlier, later in zip(outer, outer[1:]))
    return falling and maxima[-1] < maxima[0]


def verify_uniform_bound(
    prm_family: Sequence[ExtremalParams],
    w_weight: NormalWeight,
    p: float,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> BoundReport:
    """Mixed norms of f_k and h_k along a |w| ladder; they must stay of one size.

    ratio is the larger of the max/min rung ratios of the two families. Each f_k row also
    carries the maximum of |f_k| on |z| = 1/2. That maximum may rise over the first rungs
    but must fall strictly over the outer half of the ladder and end below its first value.
    """
    if not prm_family:
        raise ValueError("The extremal family needs at least one rung.")
    rows: list[BoundRow] = []
    ratios = []
    inner_maxima = []
    for label, family in (("f_k", make_fk), ("h_k", make_hk)):
        norms = []
        for prm in prm_family:
            f = family(prm, w_weight)
            value = mixed_norm(f, MixedNormParams(p, prm.q, w_weight), cfg)
            inner = _inner_maximum(f)
            norms.append(value)
            if label == "f_k":
                inner_maxima.append(inner)
            rows.append(BoundRow(label=label, modulus=abs(prm.w), value=value, extra=inner))
        positive = [v for v in norms if v > 0]
        ratios.append(max(positive) / min(positive) if positive else 1.0)
    ratio = max(ratios)
    shrinking = _tail_shrinks(inner_maxima)
    failed = not ratio <= UNIFORM_RATIO_LIMIT or not shrinking
    if failed:
        logger.warning("extremal norms not uniformly bounded: ratio %.4g", ratio)
    return BoundReport(
        kind="uniform_bound",
        rows=tuple(rows),
        ratio=ratio,
        limit=UNIFORM_RATIO_LIMIT,
        failed=failed,
    )


def check_pointwise_bound(
    f: AnalyticFunction,
    p: float,
    q: float,
    w_weight: NormalWeight,
    n: int,
    samples: Iterable[complex],
    cfg: QuadratureConfig = DEFAULT_CONFIG,
) -> BoundReport:
    """R(z) = |f^(n)(z)| W(|z|) (1 - |z|^2)^(1/q + n) / ||f||_{p,q,W} over the samples.

    Report only: ratio is sup R, which stays below a constant independent of f.
    """
    points = np.asarray(list(samples), dtype=complex)
    if points.size and np.any(np.abs(points) >= 1.0):
        raise ValueError("Sample points must lie in the open disk.")
    norm = mixed_norm(f, MixedNormParams(p, q, w_weight), cfg)
    moduli = np.abs(points)
    if norm == 0.0:
        ratios = np.zeros(points.shape)
    else:
        gap = (1.0 - moduli) * (1.0 + moduli)
        ratios = (
            np.abs(derivative(f, n)._values(points))
            * w_weight._values(moduli)
            * gap ** (1.0 / q + n)
            / norm
        )
    rows = tuple(
        BoundRow(label=f"z{index}", modulus=float(m), value=float(r))
        for index, (m, r) in enumerate(zip(moduli, ratios))
    )
    return BoundReport(
        kind="pointwise_bound",
        rows=rows,
        ratio=float(np.max(ratios)) if ratios.size else 0.0,
        limit=math.inf,
        failed=False,
    )


def boundary_samples(levels: int = 20, angles: int = 16) -> np.ndarray:
    """Points at radii 1 - 2^(-j/2), j = 0 .. levels, on evenly spaced rays."""
    radii = 1.0 - 2.0 ** (-np.arange(levels + 1) / 2.0)
    theta = 2.0 * math.pi * np.arange(angles) / angles
    return (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()


POINTWISE_SPREAD_LIMIT = 10.0


def pointwise_family(
    q: float, b: float, n: int, w_weight: NormalWeight, depth: int = 4
) -> list[tuple[str, AnalyticFunction]]:
    """Monomials, binomial powers and the f_k and h_k rungs used by the pointwise-bound sweep."""
    family: list[tuple[str, AnalyticFunction]] = [(f"z^{m}", Monomial(m)) for m in range(1, 5)]
    family += [
        ("(1-0.5z)^-1", BinomialPower(0.5, 1.0)),
        ("(1-0.9z)^-2", BinomialPower(0.9, 2.0)),
        ("(1+0.5iz)^-1.5", BinomialPower(0.5j, 1.5)),
        ("(1+0.7z)^-1", BinomialPower(-0.7, 1.0)),
    ]
    for prm in rung_family(q, b, n, depth=depth):
        family.append((f"f_k |w|={abs(prm.w):.4g}", make_fk(prm, w_weight)))
        family.append((f"h_k |w|={abs(prm.w):.4g}", make_hk(prm, w_weight)))
    return family


def pointwise_sweep(
    p: float,
    q: float,
    w_weight: NormalWeight,
    n: int,
    cfg: QuadratureConfig = DEFAULT_CONFIG,
    depth: int = 4,
) -> BoundReport:
    """sup R for every function of the sweep family; ratio is max / median of those sups."""
    family = pointwise_family(q, w_weight.b, n, w_weight, depth=depth)
    peaks = [prm.w for prm in rung_family(q, w_weight.b, n, depth=depth)]
    samples = np.concatenate((boundary_samples(), np.asarray(peaks, dtype=complex)))
    rows = []
    for label, f in family:
        report = check_pointwise_bound(f, p, q, w_weight, n, samples, cfg)
        rows.append(BoundRow(label=label, modulus=0.0, value=report.ratio))
    values = np.array([row.value for row in rows if row.value > 0])
    ratio = float(np.max(values) / np.median(values)) if values.size else 0.0
    return BoundReport(
        kind="pointwise_sweep",
        rows=tuple(rows),
        ratio=ratio,
        limit=POINTWISE_SPREAD_LIMIT,
        failed=not ratio <= POINTWISE_SPREAD_LIMIT,
    )
