from __future__ import annotations

import math

import numpy as np
import pytest

from discnorm.errors import DomainError, InconclusiveError
from discnorm.essnorm import (
    ProxyContext,
    boundedness_suprema,
    compactness_verdict,
    dilation_gap,
    essential_norm_estimate,
    limsup_ladder,
    lower_bound_witness,
    quantity_A,
    quantity_B,
    quantity_bloch,
)
from discnorm.fnspec import (
    BinomialPower,
    Constant,
    Monomial,
    Scale,
    SelfMap,
    disk_automorphism,
    make_self_map,
    polynomial,
    rotate,
)
from discnorm.integop import OperatorSpec, identity_map
from discnorm.models import COMPACT, INCONCLUSIVE, NON_COMPACT, EssNormReport, SamplerConfig
from discnorm.weights import disk_power, power

SOURCE = power(0.5).as_normal(0.1, 1.0)
HALF = SelfMap(Scale(0.5, Monomial(1)), 0.5, certified=True, upper_bound=0.5)


def _context(g, mu_exponent: float, *, phi: SelfMap | None = None, n: int = 0, q: float = 2.0):
    spec = OperatorSpec(n, phi or identity_map(), g)
    return ProxyContext(spec, disk_power(mu_exponent), SOURCE, q)


def _closed_form(r: float) -> float:
    return (1.0 - r) * (1.0 + r) ** 1.5


def _report(**overrides) -> EssNormReport:
    fields = dict(
        target="zygmund",
        deltas=(0.5, 0.9, 0.99),
        sup_a=(1.0, 1.0, 1.0),
        sup_b=(0.0, 0.0, 0.0),
        limsup_a=1.0,
        limsup_b=0.0,
        estimate=1.0,
        verdict=INCONCLUSIVE,
        samples_used=10,
        empty_levels=(),
        trend="stable",
        boundary_trend="stable",
    )
    fields.update(overrides)
    return EssNormReport(**fields)


@pytest.mark.parametrize("r", [0.0, 0.3, 0.7, 0.99])
def test_quantity_a_closed_form(r: float) -> None:
    ctx = _context(Constant(1), 3.0)

    assert quantity_A(ctx, r) == pytest.approx(_closed_form(r), rel=1e-12)


@pytest.mark.parametrize("r", [0.0, 0.5, 0.9])
def test_quantity_b_closed_form(r: float) -> None:
    ctx = _context(Monomial(1), 2.0)

    assert quantity_B(ctx, r * 1j) == pytest.approx(_closed_form(r), rel=1e-12)


def test_bloch_quantity_at_origin() -> None:
    spec = OperatorSpec(0, HALF, Constant(1))
    ctx = ProxyContext(spec, disk_power(1.0), power(1.0).as_normal(0.5, 2.0), 1.0)

    assert quantity_bloch(ctx, 0.0) == pytest.approx(1.0)


def test_zero_multiplier_has_zero_quantities() -> None:
    ctx = _context(Constant(0), 3.0)
    z = np.array([0.0, 0.5j, -0.99])

    assert np.all(quantity_A(ctx, z) == 0.0)
    assert np.all(quantity_B(ctx, z) == 0.0)
    assert np.all(quantity_bloch(ctx, z) == 0.0)


def test_quantities_are_symmetric_for_real_data() -> None:
    ctx = _context(polynomial([1, 0.5]), 2.0, phi=HALF, n=1)
    z = 0.4 + 0.3j

    assert quantity_A(ctx, z) == pytest.approx(quantity_A(ctx, z.conjugate()), rel=1e-14)
    assert quantity_B(ctx, z) == pytest.approx(quantity_B(ctx, z.conjugate()), rel=1e-14)


def test_quantities_reject_points_outside_the_disk() -> None:
    with pytest.raises(DomainError):
        quantity_A(_context(Constant(1), 3.0), 1.0)


def test_ladder_reproduces_closed_form_suprema() -> None:
    report = limsup_ladder(_context(Constant(1), 3.0))

    for delta, rung in zip(report.deltas, report.sup_a):
        assert rung == pytest.approx(_closed_form(delta), rel=0.05)
    assert report.sup_b == (0.0,) * len(report.deltas)
    assert report.verdict == COMPACT
    assert report.estimate == pytest.approx(_closed_form(report.deltas[-1]), rel=0.05)


def test_ladder_flags_divergent_quantity() -> None:
    report = limsup_ladder(_context(Constant(1), 1.5))

    assert report.verdict == NON_COMPACT
    assert report.trend == "stable"
    assert report.sup_a[0] >= 0.95 * 2.0**20


@pytest.mark.parametrize(
    "g",
    [
        Constant(1),
        Monomial(1),
        polynomial([1, 0, 1]),
        BinomialPower(0.5, 1.0),
        Scale(2j, Monomial(3)),
    ],
)
def test_strict_symbol_is_compact(g) -> None:
    ctx = _context(g, 1.0, phi=make_self_map(Scale(0.5, Monomial(1))), n=1)

    report = limsup_ladder(ctx)

    assert report.strict_symbol
    assert report.estimate == 0.0
    assert report.verdict == COMPACT
    assert report.empty_levels == report.deltas
    assert essential_norm_estimate(report) == 0.0


def test_rungs_never_increase() -> None:
    report = limsup_ladder(_context(polynomial([1, 0.5]), 3.0))

    for rungs in (report.sup_a, report.sup_b):
        assert all(later <= earlier for earlier, later in zip(rungs, rungs[1:]))


@pytest.mark.parametrize("c", [2.0, -2j])
def test_ladder_scales_with_multiplier(c: complex) -> None:
    g = polynomial([1, 0.5])
    plain = limsup_ladder(_context(g, 3.0))
    scaled = limsup_ladder(_context(Scale(c, g), 3.0))

    assert scaled.sup_a == pytest.approx([abs(c) * v for v in plain.sup_a], rel=1e-9)
    assert scaled.sup_b == pytest.approx([abs(c) * v for v in plain.sup_b], rel=1e-9)
    assert scaled.verdict == plain.verdict


def test_ladder_is_rotation_invariant() -> None:
    theta = 1.1
    g = polynomial([1, 0.5])
    phi = SelfMap(rotate(Monomial(1), theta), 1.0, certified=True, upper_bound=1.0)

    plain = limsup_ladder(_context(g, 3.0))
    rotated = limsup_ladder(_context(rotate(g, theta), 3.0, phi=phi))

    assert rotated.sup_a == pytest.approx(plain.sup_a, rel=1e-4)
    assert rotated.sup_b == pytest.approx(plain.sup_b, rel=1e-4)


def test_seeded_sampler_is_reproducible() -> None:
    ctx = _context(polynomial([1, 0.5]), 3.0)
    sampler = SamplerConfig(seed=42)

    assert limsup_ladder(ctx, sampler=sampler) == limsup_ladder(ctx, sampler=sampler)


def test_shallow_sampler_is_inconclusive() -> None:
    report = limsup_ladder(_context(Constant(1), 3.0), sampler=SamplerConfig(boundary_levels=8))

    assert report.verdict == INCONCLUSIVE
    assert report.empty_levels == (0.999, 0.9999)
    with pytest.raises(InconclusiveError):
        essential_norm_estimate(report)


@pytest.mark.parametrize(
    "g",
    [
        disk_automorphism(0.3),
        Constant(1),
        polynomial([0.5, -1, 0.25j]),
        BinomialPower(-0.6j, 2.0),
    ],
)
def test_symbol_inside_a_smaller_disk_is_compact(g) -> None:
    phi = make_self_map(Scale(0.8, disk_automorphism(0.9)))
    spec = OperatorSpec(1, phi, g)
    ctx = ProxyContext(spec, disk_power(1.0), power(0.5).as_normal(0.1, 1.0), 2.0)

    report = limsup_ladder(ctx)

    assert phi.supnorm == pytest.approx(0.8, rel=1e-6)
    assert report.symbol_supnorm == phi.supnorm
    assert set(report.deltas) - set(report.empty_levels) <= {d for d in report.deltas if d < 0.8}
    assert report.verdict == COMPACT
    assert essential_norm_estimate(report) == 0.0


def test_selfmap_strictness_follows_the_upper_bound() -> None:
    assert SelfMap(Monomial(1), 0.5, certified=False, upper_bound=0.7).is_strict
    assert not SelfMap(Monomial(1), 0.5, certified=True, upper_bound=1.0).is_strict
    assert not SelfMap(Monomial(1), 0.5).is_strict


def test_bloch_target_uses_single_quantity() -> None:
    spec = OperatorSpec(0, identity_map(), Constant(1))
    ctx = ProxyContext(spec, disk_power(2.0), power(1.0).as_normal(0.5, 2.0), 1.0)

    report = limsup_ladder(ctx, target="bloch")

    assert report.sup_b == ()
    # The Bloch quantity reduces to 1 + |z|.
    assert report.sup_a[-1] == pytest.approx(2.0, rel=1e-3)
    assert report.verdict == NON_COMPACT


def test_unknown_target_is_rejected() -> None:
    with pytest.raises(ValueError):
        limsup_ladder(_context(Constant(1), 3.0), target="hardy")


def test_verdict_rules() -> None:
    assert compactness_verdict(_report(strict_symbol=True)) == COMPACT
    assert compactness_verdict(_report(empty_levels=(0.99,))) == INCONCLUSIVE
    assert compactness_verdict(_report(empty_levels=(0.9, 0.99), symbol_supnorm=0.8)) == COMPACT
    assert (
        compactness_verdict(_report(empty_levels=(0.9, 0.99), symbol_supnorm=0.95))
        == INCONCLUSIVE
    )
    assert compactness_verdict(_report(limsup_a=1e-4, estimate=1e-4)) == COMPACT
    assert compactness_verdict(_report(estimate=math.inf)) == NON_COMPACT
    assert compactness_verdict(_report()) == NON_COMPACT
    assert compactness_verdict(_report(trend="decreasing")) == INCONCLUSIVE
    assert (
        compactness_verdict(_report(trend="decreasing", boundary_trend="increasing"))
        == NON_COMPACT
    )


def test_essential_norm_estimate_takes_larger_limsup() -> None:
    report = _report(limsup_a=2.0, limsup_b=3.0, estimate=3.0, verdict=NON_COMPACT)

    assert essential_norm_estimate(report) == 3.0


def test_boundedness_suprema_of_half_map() -> None:
    report = boundedness_suprema(_context(Monomial(1), 1.0, phi=HALF, n=1))
    values = {row.label: row.value for row in report.rows}
    peak = 2.0 / (3.0 * math.sqrt(3.0))

    assert values["mu|g'|"] == pytest.approx(1.0)
    assert values["mu|phi' g|"] == pytest.approx(0.5 * peak, rel=1e-7)
    assert values["mu|g|"] == pytest.approx(peak, rel=1e-7)
    assert not report.failed


def test_dilation_gap_of_quadratic() -> None:
    ctx = _context(Constant(1), 1.0, phi=HALF, n=1)

    assert dilation_gap(ctx, Monomial(2), 0.5) == pytest.approx(0.5, rel=1e-12)
    assert dilation_gap(ctx, Monomial(2), 1.0) == 0.0


def test_lower_bound_witness_stays_below_norms() -> None:
    report = lower_bound_witness(_context(Constant(1), 3.0), [0.5, 0.9])

    assert len(report.rows) == 4
    assert report.ratio <= 1.0 + 1e-3
    assert not report.failed
