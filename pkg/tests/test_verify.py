from fractions import Fraction

import pytest

from facon_api.errors import UsageError
from facon_api.services.curves import ExponentVector
from facon_api.services.facons import collect_facons
from facon_api.services.parser import parse_mapping
from facon_api.services.verify import check_catalog, numeric_curve_check, oracle_cross_check, verify

from tests.conftest import BUNDLED


def test_numeric_check_of_cusp_curve(load_mapping):
    cusp = load_mapping("cusp")
    report = numeric_curve_check(cusp, ExponentVector((-1, 1)), [1, 2], [4, 8])
    assert report.passed
    assert report.schedule == (1e3, 1e4, 1e5, 1e6)
    assert report.deviations[-1] < 1e-5
    assert list(report.deviations) == sorted(report.deviations, reverse=True)


def test_numeric_check_detects_a_wrong_limit(load_mapping):
    cusp = load_mapping("cusp")
    report = numeric_curve_check(cusp, ExponentVector((-1, 1)), [1, 2], [4, 9])
    assert not report.passed


def test_numeric_check_drops_overflowing_points(load_mapping):
    cusp = load_mapping("cusp")
    report = numeric_curve_check(cusp, ExponentVector((2, 2)), [1, 1], [0, 0], schedule=(1e10, 1e20, 1e30, 1e40))
    assert not report.passed
    assert report.notes


def test_numeric_check_validates_its_input(load_mapping):
    cusp = load_mapping("cusp")
    with pytest.raises(UsageError):
        numeric_curve_check(cusp, ExponentVector((-1, 1)), [1], [4, 8])
    with pytest.raises(UsageError):
        numeric_curve_check(cusp, ExponentVector((-1, 1)), [1, 2], [4, 8], schedule=(1e4, 1e3))


@pytest.mark.parametrize("name", BUNDLED)
def test_every_catalog_class_converges_numerically(load_mapping, name):
    F = load_mapping(name)
    for check in check_catalog(F, collect_facons(F, 2), seed=1):
        assert check.report.passed, (check.facon, check.degrees, check.report.deviations)
        assert all(Fraction(1, 2) <= value <= Fraction(3, 2) for value in check.coefficients)


@pytest.mark.parametrize("name", BUNDLED)
def test_oracle_agrees_with_symbolic_catalog(load_mapping, name):
    report = oracle_cross_check(load_mapping(name), 2, seed=0)
    assert report.agrees, report.mismatches
    assert report.numeric_facons == report.symbolic_facons


def test_oracle_bound_is_limited(load_mapping):
    with pytest.raises(UsageError):
        oracle_cross_check(load_mapping("cusp"), 3)
    with pytest.raises(UsageError):
        oracle_cross_check(load_mapping("cusp"), 0)


def test_verify_cusp(load_mapping):
    report = verify(load_mapping("cusp"), 2, seed=0)
    assert report.passed
    assert len(report.class_checks) == 2
    assert report.oracle.agrees


def test_oracle_handles_magnitudes_beyond_float_range():
    F = parse_mapping("vars x1 x2; x1^60*x2^40; x2")
    report = oracle_cross_check(F, 2, seed=0)
    assert report.agrees, report.mismatches
    assert report.numeric_facons == ("(1)[2]",)
