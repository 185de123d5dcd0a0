import re
from fractions import Fraction

import numpy as np
import pytest

from facon_api.errors import GenericityError, UsageError
from facon_api.services.algebra import MultiPoly, Space
from facon_api.services.curves import ExponentVector, Facon, limit_mapping
from facon_api.services.facons import collect_facons
from facon_api.services.parser import parse_mapping, parse_polynomial
from facon_api.services.strata import (
    ParameterSampler,
    check_frontier,
    closure_contains,
    etoile_stratification,
    facon_filtration,
    image_dimension,
    image_samples,
    implicitize,
    minimal_relations,
)

from tests.conftest import DOMINANT_WITH_FACONS, TEST_SAMPLES, TEST_TRIALS


def equations(stratum) -> list[str]:
    return [equation.to_text() for equation in stratum.implicit_eqs]


def labels(stratum) -> set[str]:
    return {facon.label for facon in stratum.facons}


def target(text: str, n: int) -> MultiPoly:
    return parse_polynomial(text, Space.TARGET, n)


# -- image measurements ---------------------------------------------------------


def test_image_dimension_of_cusp_limit(load_mapping):
    cusp = load_mapping("cusp")
    assert image_dimension(limit_mapping(cusp, ExponentVector((-1, 1))), trials=4) == 1
    assert image_dimension(limit_mapping(cusp, ExponentVector((-2, 1))), trials=4) == 0
    with pytest.raises(UsageError):
        image_dimension(limit_mapping(cusp, ExponentVector((-1, 1))), trials=0)


def test_implicitize_cusp_recovers_the_cusp_curve(load_mapping):
    limit = limit_mapping(load_mapping("cusp"), ExponentVector((-1, 1)))
    relations = implicitize(limit, 3, samples=40)
    assert [relation.to_text() for relation in relations] == ["a1^3 - a2^2"]


def test_implicitize_cone(load_mapping):
    limit = limit_mapping(load_mapping("cone"), ExponentVector((1, -1, 1)))
    relations = implicitize(limit, 2, samples=40)
    assert [relation.to_text() for relation in relations] == ["a1*a2 - a3^2"]


def test_implicitize_plane_at_degree_one(load_mapping):
    limit = limit_mapping(load_mapping("plane"), ExponentVector((1, -1, -1)))
    relations = implicitize(limit, 1, samples=20)
    assert [relation.to_text() for relation in relations] == ["a1 + a2 - a3"]


def test_implicitize_rejects_degree_zero(load_mapping):
    with pytest.raises(UsageError):
        implicitize(limit_mapping(load_mapping("cusp"), ExponentVector((-1, 1))), 0)


def test_minimal_relations_drop_generated_multiples():
    line = [target("a1", 2), target("a1^2", 2), target("a1*a2", 2)]
    assert [relation.to_text() for relation in minimal_relations(line, 2, 2)] == ["a1"]
    independent = [target("a1", 3), target("a2", 3), target("a3^2 - a3", 3)]
    assert [relation.to_text() for relation in minimal_relations(independent, 3, 2)] == ["a1", "a2", "a3^2 - a3"]


def test_samples_are_deterministic_and_generic(load_mapping):
    limit = limit_mapping(load_mapping("exfacon"), ExponentVector((-1, 0, 1)))
    first = image_samples(limit, 10, seed=3)
    assert first == image_samples(limit, 10, seed=3)
    assert first != image_samples(limit, 10, seed=4)
    sampler = ParameterSampler(seed=3)
    rng = sampler.generator("test", limit)
    for _ in range(50):
        point = sampler.draw(rng, limit)
        assert point[0] != 0 and point[2] != 0


def test_sampler_gives_up_when_constraints_cannot_hold(load_mapping):
    limit = limit_mapping(load_mapping("exfacon"), ExponentVector((-1, 0, 1)))
    sampler = ParameterSampler(seed=0, numerator_range=(0, 0), retries=5)
    with pytest.raises(GenericityError):
        sampler.draw(sampler.generator("test", limit), limit)


# -- worked examples --------------------------------------------------------------


def test_three_component_example(analyzed):
    report = analyzed("exfacon")
    assert report.catalog.labels == ["(3)[1]", "(3)[2]", "(3)[1,2]"]
    assert [stratum.dimension for stratum in report.strata] == [2, 2, 1, 0]
    assert [equations(stratum) for stratum in report.strata] == [
        ["a1"],
        ["a2"],
        ["a1", "a2"],
        ["a1", "a2", "a3"],
    ]
    assert [dimension for dimension, _ in report.stratification.filtration] == [2, 1, 0]
    assert report.strata[0].etoile_labels() == ["(3)[1]^{0*}"]
    assert report.strata[2].etoile_labels() == ["(3)[1,2]^{0*}"]
    assert report.strata[3].etoile_labels() == ["(3)[1,2]^{1*}"]
    assert report.frontier.holds


def test_cusp(analyzed):
    report = analyzed("cusp")
    assert report.catalog.labels == ["(2)[1]"]
    assert [stratum.dimension for stratum in report.strata] == [1, 0]
    assert equations(report.strata[0]) == ["a1^3 - a2^2"]
    assert equations(report.strata[1]) == ["a1", "a2"]
    assert report.strata[1].etoile_labels() == ["(2)[1]^{1*}"]
    assert report.stratification.contained_in("S0") == ["S1"]
    assert report.frontier.holds


def test_cone(analyzed):
    report = analyzed("cone")
    assert "(1,3)[2]" in report.catalog.labels
    assert [dimension for dimension, _ in report.stratification.filtration] == [2, 1, 0]
    top = [stratum for stratum in report.strata if stratum.dimension == 2]
    assert len(top) == 1
    assert equations(top[0]) == ["a1*a2 - a3^2"]
    assert "(1,3)[2]" in labels(top[0])
    assert report.frontier.holds


def test_whitney_umbrella(analyzed):
    report = analyzed("whitney")
    assert [dimension for dimension, _ in report.stratification.filtration] == [2, 1, 0]
    top = report.strata[0]
    assert top.dimension == 2
    assert ["c1*c2", "c2^2*c3^2", "c1*c2^2*c3"] in [limit.to_texts() for limit in top.parametrizations]
    assert equations(top) == ["a1^2*a2 - a3^2"]
    assert report.frontier.holds


def test_plane_collapses_to_one_stratum(analyzed):
    report = analyzed("plane")
    assert len(report.strata) == 1
    top = report.strata[0]
    assert top.dimension == 2
    assert equations(top) == ["a1 + a2 - a3"]
    assert {"(1)[2,3]", "(2)[1,3]"} <= labels(top)


def test_triple_facon_origin(analyzed):
    report = analyzed("triple")
    origin = [stratum for stratum in report.strata if stratum.dimension == 0]
    assert len(origin) == 1
    assert labels(origin[0]) == {"(1)[2,3]", "(2)[1,3]", "(3)[1,2]"}
    assert equations(origin[0]) == ["a1", "a2", "a3"]


def test_identity_has_empty_asymptotic_set(analyzed):
    report = analyzed("identity")
    assert report.catalog.is_empty()
    assert report.strata == []
    assert report.top_dimension is None
    assert report.hypersurface
    assert report.frontier.holds
    assert report.stratification.filtration == []


@pytest.mark.parametrize("name", DOMINANT_WITH_FACONS)
def test_asymptotic_set_is_a_hypersurface(analyzed, name):
    report = analyzed(name)
    assert report.dominant
    assert report.top_dimension == report.mapping.n - 1
    assert report.hypersurface
    assert report.warnings == []


# -- structural properties --------------------------------------------------------


@pytest.mark.parametrize("name", DOMINANT_WITH_FACONS)
def test_sample_points_satisfy_equations(analyzed, name):
    for stratum in analyzed(name).strata:
        assert stratum.satisfied_by(stratum.sample_points)
        assert stratum.sample_points


@pytest.mark.parametrize("name", DOMINANT_WITH_FACONS)
def test_containment_is_a_transitive_dag_with_decreasing_dimension(analyzed, name):
    stratification = analyzed(name).stratification
    edges = set(stratification.containment)
    for outer, inner in edges:
        assert stratification.get(outer).dimension > stratification.get(inner).dimension
        for further in stratification.contained_in(inner):
            assert (outer, further) in edges


@pytest.mark.parametrize("name", DOMINANT_WITH_FACONS)
def test_strata_ids_follow_decreasing_dimension(analyzed, name):
    strata = analyzed(name).strata
    assert [stratum.id for stratum in strata] == [f"S{index}" for index in range(len(strata))]
    dimensions = [stratum.dimension for stratum in strata]
    assert dimensions == sorted(dimensions, reverse=True)


@pytest.mark.parametrize("name", ("cusp", "cone", "exfacon"))
def test_frontier_check_catches_a_missing_stratum(analyzed, name):
    stratification = analyzed(name).stratification
    origin = [stratum.id for stratum in stratification.strata if stratum.dimension == 0]
    broken = check_frontier(stratification.without(origin))
    assert not broken.holds
    assert broken.violations
    # only the curves through the origin lose their boundary
    named = {match for violation in broken.violations for match in re.findall(r"of (S\d+)", violation)}
    assert named
    assert all(stratification.get(stratum_id).dimension == 1 for stratum_id in named)


def test_frontier_check_catches_equal_dimension_containment(analyzed):
    stratification = analyzed("cusp").stratification
    origin = stratification.get("S1")
    copy = type(origin)("S9", origin.dimension, origin.implicit_eqs, origin.sample_points, list(origin.parts))
    stratification.strata.append(copy)
    try:
        report = check_frontier(stratification)
    finally:
        stratification.strata.pop()
    assert not report.holds
    assert any("same dimension" in violation for violation in report.violations)


def test_per_facon_filtration_of_cusp(load_mapping):
    F = load_mapping("cusp")
    catalog = collect_facons(F, 2)
    levels = facon_filtration(F, Facon.from_label("(2)[1]", 2), catalog, 3, TEST_SAMPLES, 0, TEST_TRIALS)
    assert [[piece.dimension for piece in level] for level in levels] == [[1], [0]]


def test_etoile_stratification_needs_facons(load_mapping):
    F = load_mapping("identity")
    with pytest.raises(UsageError):
        etoile_stratification(F, collect_facons(F, 2))


def test_stratification_is_deterministic(load_mapping):
    F = parse_mapping("vars x1 x2; (x1*x2)^2; (x1*x2)^3 + x1")
    catalog = collect_facons(F, 2)
    first = etoile_stratification(F, catalog, 3, TEST_SAMPLES, 5, TEST_TRIALS)
    second = etoile_stratification(F, catalog, 3, TEST_SAMPLES, 5, TEST_TRIALS)
    assert [equations(s) for s in first.strata] == [equations(s) for s in second.strata]
    assert [s.sample_points for s in first.strata] == [s.sample_points for s in second.strata]
    assert first.containment == second.containment


@pytest.mark.parametrize(
    "name, e, degree",
    [("cusp", (-1, 1), 3), ("cone", (1, -1, 1), 2), ("whitney", (1, -1, 1), 3), ("exfacon", (-1, -1, 2), 2)],
)
def test_implicit_equations_vanish_on_fresh_samples(load_mapping, name, e, degree):
    limit = limit_mapping(load_mapping(name), ExponentVector(e))
    relations = implicitize(limit, degree, samples=40, seed=0)
    assert relations
    fresh = image_samples(limit, 3 * 40, seed=11)
    assert all(relation.evaluate(point) == 0 for relation in relations for point in fresh)


def test_closure_containment_between_strata(analyzed):
    report = analyzed("exfacon")
    planes = [stratum for stratum in report.strata if stratum.dimension == 2]
    axis = next(stratum for stratum in report.strata if stratum.dimension == 1)
    origin = next(stratum for stratum in report.strata if stratum.dimension == 0)
    first, second = planes
    assert not closure_contains(first, second)
    assert not closure_contains(second, first)
    assert closure_contains(first, first)
    assert closure_contains(first, axis) and closure_contains(second, axis)
    assert closure_contains(axis, origin)
    assert not closure_contains(axis, first)


def test_per_facon_filtration_of_cone(load_mapping):
    F = load_mapping("cone")
    catalog = collect_facons(F, 2)
    levels = facon_filtration(F, Facon.from_label("(1,3)[2]", 3), catalog, 2, TEST_SAMPLES, 0, TEST_TRIALS)
    assert [level[0].dimension for level in levels] == [2, 1, 0]
    assert all(len({piece.dimension for piece in level}) == 1 for level in levels)


def test_per_facon_filtration_of_a_single_level(load_mapping):
    F = load_mapping("exfacon")
    catalog = collect_facons(F, 2)
    levels = facon_filtration(F, Facon.from_label("(3)[1]", 3), catalog, 2, TEST_SAMPLES, 0, TEST_TRIALS)
    assert [[piece.dimension for piece in level] for level in levels] == [[2]]


def test_sampler_draws_rationals_in_range(load_mapping):
    limit = limit_mapping(load_mapping("exfacon"), ExponentVector((-1, 0, 1)))
    sampler = ParameterSampler(seed=1, numerator_range=(-3, 3), denominator_range=(1, 4))
    rng = sampler.generator("test", limit)
    assert isinstance(rng, np.random.Generator)
    for _ in range(50):
        point = sampler.draw(rng, limit, zeroed=[1])
        assert all(isinstance(value, Fraction) for value in point)
        assert point[1] == 0
        assert all(abs(value.numerator) <= 3 and 1 <= value.denominator <= 4 for value in point)
    replay = sampler.generator("test", limit)
    assert sampler.draw(replay, limit) == sampler.draw(sampler.generator("test", limit), limit)
