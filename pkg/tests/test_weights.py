from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from discnorm.errors import DomainError
from discnorm.weights import (
    RadialWeight,
    check_normal,
    disk_power,
    geometric_grid,
    logpower,
    power,
    table,
    weight_eval,
)


@pytest.mark.parametrize(
    ("weight", "r", "expected"),
    [
        (power(0.5), 0.75, 0.5),
        (power(2.0), 0.0, 1.0),
        (disk_power(1.0), 0.5, 0.75),
        (logpower(1.0, 1.0), 1.0 - math.exp(-1.0), math.exp(-1.0) * 2.0),
    ],
)
def test_weight_eval_examples(weight: RadialWeight, r: float, expected: float) -> None:
    assert weight_eval(weight, r) == pytest.approx(expected, rel=1e-14)


def test_weight_eval_keeps_array_shape() -> None:
    radii = np.array([[0.0, 0.5], [0.75, 0.875]])

    values = weight_eval(power(1.0), radii)

    assert values.shape == (2, 2)
    assert values == pytest.approx(1.0 - radii)


@pytest.mark.parametrize("r", [1.0, 1.5, -0.1])
def test_weight_eval_rejects_radii_outside_unit_interval(r: float) -> None:
    with pytest.raises(DomainError):
        weight_eval(power(1.0), r)


def test_weight_constructors_validate_parameters() -> None:
    with pytest.raises(ValueError):
        RadialWeight("cubic", (1.0,))
    with pytest.raises(ValueError):
        RadialWeight("logpower", (1.0,))
    with pytest.raises(ValueError):
        table([0.0, 0.5], [1.0, -1.0])
    with pytest.raises(ValueError):
        table([0.1, 0.5], [1.0, 0.5])


def test_table_reproduces_its_samples() -> None:
    radii = [0.0, 0.5, 0.75, 0.875]
    values = [1.0, 0.5, 0.25, 0.125]
    weight = table(radii, values)

    assert weight_eval(weight, np.array(radii)) == pytest.approx(values, rel=1e-12)


def test_table_continues_as_fitted_power_law() -> None:
    weight = table([0.0, 0.5, 0.75], [1.0, 0.5, 0.25])

    # The last two samples lie on (1 - r)^1.
    assert weight_eval(weight, 0.99) == pytest.approx(0.01, rel=1e-12)


def test_table_interpolation_stays_between_neighbouring_samples() -> None:
    radii = np.array([0.0, 0.3, 0.6, 0.9])
    values = np.array([1.0, 0.8, 0.5, 0.1])
    weight = table(radii, values)

    middle = weight_eval(weight, 0.5 * (radii[:-1] + radii[1:]))

    assert np.all(middle < values[:-1])
    assert np.all(middle > values[1:])


def test_weights_accept_an_exact_gap_near_the_circle() -> None:
    gap = np.asarray(2.0**-40)
    r = np.asarray(1.0 - 2.0**-40)

    assert power(0.5)._values(r, gap) == pytest.approx(2.0**-20, rel=1e-15)
    assert logpower(1.0, 1.0)._values(r, gap) == pytest.approx(
        2.0**-40 * (1.0 + 40.0 * math.log(2.0)), rel=1e-14
    )


def test_normal_weight_needs_ordered_exponents() -> None:
    with pytest.raises(ValueError):
        power(0.5).as_normal(1.0, 0.5)
    with pytest.raises(ValueError):
        power(0.5).as_normal(0.0, 1.0)


def test_geometric_grid_levels() -> None:
    grid = geometric_grid(4)

    assert grid == pytest.approx([0.0, 1 - 2**-0.5, 0.5, 1 - 2**-1.5, 0.75])


@pytest.mark.parametrize(
    ("s", "a", "b"),
    [
        (0.5, 0.1, 1.0),
        (1.0, 0.5, 1.5),
        (2.0, 1.5, 3.0),
    ],
)
def test_power_weights_between_exponents_are_normal(s: float, a: float, b: float) -> None:
    report = check_normal(power(s).as_normal(a, b))

    assert report.passed
    assert report.to_dict()["passed"] is True


def test_logpower_weight_is_normal() -> None:
    assert check_normal(logpower(1.0, 1.0).as_normal(0.5, 2.0)).passed


def test_weight_at_lower_exponent_fails_vanishing_clause() -> None:
    report = check_normal(power(1.0).as_normal(1.0, 2.0))

    assert not report.passed
    assert report.ratio_a_nonincreasing
    assert not report.ratio_a_vanishes


def test_weight_above_upper_exponent_fails_growth_clauses() -> None:
    report = check_normal(power(3.0).as_normal(0.5, 2.0))

    assert not report.ratio_b_nondecreasing
    assert not report.ratio_b_blows_up


def test_check_normal_needs_enough_radii_beyond_r0() -> None:
    with pytest.raises(ValueError):
        check_normal(power(1.0).as_normal(0.5, 1.5), grid=np.linspace(0.0, 0.5, 20))


def test_check_normal_reports_radii_below_r0(caplog: pytest.LogCaptureFixture) -> None:
    grid = geometric_grid()

    with caplog.at_level(logging.DEBUG, logger="discnorm.weights"):
        report = check_normal(power(1.0).as_normal(0.5, 1.5), grid=grid)

    assert report.ignored == tuple(float(r) for r in grid[grid < 0.75])
    assert len(report.ignored) == 4
    assert report.to_dict()["ignored"] == list(report.ignored)
    assert "ignores 4 grid radii" in caplog.text
