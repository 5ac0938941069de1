import json

import pytest

from vchoquet.geometry import Space
from vchoquet.suites import ANCHORS, DEFAULT_TRIALS, SUITES, UnknownSuiteError, verify


@pytest.mark.parametrize("name", list(SUITES))
def test_small_runs_pass_and_are_deterministic(name):
    a, b = verify(name, seed=11, trials=4), verify(name, seed=11, trials=4)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["status"] == "pass"
    assert a["anchor"] == ANCHORS[name]
    assert set(a) >= {"suite", "trials", "max_violation", "tolerance", "counts", "notes", "witnesses"}


def test_defaults_cover_every_suite():
    assert set(DEFAULT_TRIALS) == set(SUITES) == set(ANCHORS)


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError):
        verify("nope")


def test_strict_convexity_skips_on_polytope():
    rep = verify("strict_convexity", trials=3, space=Space.cube(2))
    assert rep["status"] == "skipped" and "hypothesis not met" in rep["notes"][0]


def test_strict_convexity_on_given_euclidean_space():
    rep = verify("strict_convexity", trials=10, space=Space.euclidean(3))
    assert rep["status"] == "pass" and rep["counts"]["split_lp_infeasible"] == 10


def test_simplexoid_on_given_spaces():
    assert verify("simplexoid", trials=3, space=Space.cube(3))["status"] == "pass"
    rep = verify("simplexoid", trials=3, space=Space.cross_polytope(3))
    assert rep["status"] == "pass" and rep["witnesses"]
