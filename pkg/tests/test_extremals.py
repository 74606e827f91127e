from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from discnorm.extremals import (
    POINTWISE_SPREAD_LIMIT,
    UNIFORM_RATIO_LIMIT,
    ExtremalParams,
    boundary_samples,
    check_pointwise_bound,
    make_fk,
    make_hk,
    pointwise_family,
    pointwise_sweep,
    rung_family,
    verify_identities,
    verify_uniform_bound,
)
from discnorm.fnspec import (
    Constant,
    Scale,
    Sum,
    derivative,
    evaluate,
    richardson_derivative,
    rising_factorial,
)
from discnorm.models import MixedNormParams
from discnorm.norms import mixed_norm
from discnorm.weights import power, weight_eval

SOURCE = power(0.5).as_normal(0.1, 1.0)
WEIGHTS = [
    power(0.25).as_normal(0.1, 0.5),
    SOURCE,
    power(1.0).as_normal(0.5, 2.0),
]
MODULI = [0.5, 0.9, 0.99, 0.999]
ARGUMENTS = [0.0, math.pi / 2, math.pi / 4]


def test_alpha_follows_source_parameters() -> None:
    prm = ExtremalParams(w=0.5, q=2.0, b=1.0, n=1)
    shifted =ExtremalParams(w=0.5, q=2.0, b=1.0, n=1, alpha_shift=-1.0)

    assert prm.alpha == pytest.approx(2.5)
    assert shifted.alpha == pytest.approx(1.5)


def test_extremal_params_validation() -> None:
    with pytest.raises(ValueError):
        ExtremalParams(w=1.0, q=2.0, b=1.0, n=0)
    with pytest.raises(ValueError):
        ExtremalParams(w=0.5, q=2.0, b=1.0, n=-1)
    with pytest.raises(ValueError):
        ExtremalParams(w=0.5, q=2.0, b=1.0, n=0, alpha_shift=-10.0)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_fk_value_at_peak(n: int) -> None:
    prm = ExtremalParams(w=0.6j, q=2.0, b=1.0, n=n)
    s = 1.0 - 0.36
    expected = n / (prm.alpha + n) / (weight_eval(SOURCE, 0.6) * s**0.5)

    value = abs(evaluate(make_fk(prm, SOURCE), 0.6j))

    assert value == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_peak_at_origin() -> None:
    prm = ExtremalParams(w=0.0, q=2.0, b=1.0, n=2)

    assert evaluate(make_fk(prm, SOURCE), 0.0) == pytest.approx(2.0 / (prm.alpha + 2.0))
    assert evaluate(make_hk(prm, SOURCE), 0.0) == pytest.approx(3.0)


@pytest.mark.parametrize("weight", WEIGHTS)
def test_peak_identities_hold(weight) -> None:
    for n in range(4):
        for modulus in MODULI:
            for argument in ARGUMENTS:
                peak = modulus * cmath.exp(1j * argument)
                prm = ExtremalParams(w=peak, q=2.0, b=weight.b, n=n)
                report = verify_identities(prm, weight)

                assert not report.violated, report.to_dict()
                assert report.max_residual < 1e-8


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("modulus", [0.5, 0.9])
def test_peak_derivatives_match_finite_differences(n: int, modulus: float) -> None:
    prm = ExtremalParams(w=modulus, q=2.0, b=SOURCE.b, n=n)
    report = verify_identities(prm, SOURCE)
    step = 0.1 * (1.0 - modulus)
    functions = {"f": make_fk(prm, SOURCE), "h": make_hk(prm, SOURCE)}
    weight = weight_eval(SOURCE, modulus)
    s = 1.0 - modulus**2

    orders = [("f", n), ("h", n + 1), ("f", n + 1), ("h", n)]
    for check, (name, order) in zip(report.checks, orders):
        f = functions[name]
        numeric = richardson_derivative(lambda z: evaluate(f, z), modulus, order, step)
        scale = rising_factorial(prm.alpha, order + 1) / (weight * s ** (0.5 + order))

        assert abs(numeric - check.expected) <= 1e-5 * scale


def test_shifted_alpha_breaks_closed_forms_only() -> None:
    prm = ExtremalParams(w=0.5, q=2.0, b=SOURCE.b, n=1, alpha_shift=-1.0)

    report = verify_identities(prm, SOURCE)
    residuals = [check.residual for check in report.checks]

    assert report.violated
    assert residuals[0] < 1e-8 and residuals[1] < 1e-8
    assert residuals[2] > 1e-8 and residuals[3] > 1e-8


def test_rung_family_approaches_the_circle() -> None:
    family = rung_family(2.0, 1.0, 1, depth=4, argument=math.pi / 2)

    assert [abs(prm.w) for prm in family] == pytest.approx([0.5, 0.75, 0.875, 0.9375])
    assert family[0].w == pytest.approx(0.5j)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_extremal_families_are_uniformly_bounded(n: int) -> None:
    report = verify_uniform_bound(rung_family(2.0, SOURCE.b, n), SOURCE, 2.0)

    assert report.ratio <= UNIFORM_RATIO_LIMIT
    assert not report.failed
    assert all(math.isfinite(row.value) and row.value > 0 for row in report.rows)
    inner = [row.extra for row in report.rows if row.label == "f_k"]
    assert inner[-1] < 1e-2 * inner[0]


def test_doubling_the_scale_doubles_rung_norms() -> None:
    prm = ExtremalParams(w=0.9, q=2.0, b=SOURCE.b, n=1)
    mixed = MixedNormParams(2.0, 2.0, SOURCE)
    f = make_fk(prm, SOURCE)

    doubled = mixed_norm(Scale(2.0, f), mixed)

    assert doubled == pytest.approx(2.0 * mixed_norm(f, mixed), rel=1e-9)


def test_pointwise_bound_of_zero_and_constants() -> None:
    samples = boundary_samples(levels=6, angles=4)

    zero = check_pointwise_bound(Sum(()), 2.0, 2.0, SOURCE, 1, samples)
    constant = check_pointwise_bound(Constant(1), 2.0, 2.0, SOURCE, 1, samples)

    assert zero.ratio == 0.0
    assert constant.ratio == 0.0
    assert len(zero.rows) == samples.size


def test_pointwise_bound_rejects_boundary_samples() -> None:
    with pytest.raises(ValueError):
        check_pointwise_bound(Constant(1), 2.0, 2.0, SOURCE, 1, [1.0])


def test_boundary_samples_layout() -> None:
    samples = boundary_samples(levels=4, angles=8)

    assert samples.shape == (40,)
    assert np.max(np.abs(samples)) == pytest.approx(0.75)


def test_pointwise_family_contents() -> None:
    family = pointwise_family(2.0, SOURCE.b, 1, SOURCE)

    assert len(family) == 16
    assert [label for label, _ in family[:4]] == ["z^1", "z^2", "z^3", "z^4"]
    rungs = [label.split()[0] for label, _ in family[8:]]
    assert rungs == ["f_k", "h_k"] * 4


def test_pointwise_sweep_stays_within_spread() -> None:
    report = pointwise_sweep(2.0, 2.0, SOURCE, 1)

    assert report.ratio <= POINTWISE_SPREAD_LIMIT
    assert not report.failed


def test_extremal_derivative_vanishes_at_peak() -> None:
    prm = ExtremalParams(w=0.3 - 0.4j, q=2.0, b=SOURCE.b, n=2)
    f = make_fk(prm, SOURCE)

    value = evaluate(derivative(f, 2), prm.w)

    assert abs(value) <= 1e-10 * rising_factorial(prm.alpha, 3) / prm.gap ** 2.5
