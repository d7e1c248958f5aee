"""Fast paths through the verification suites and individual checks."""

import random

import pytest

from novikov import checks, models
from novikov.complexes import LocalSystem
from novikov.exactlin import Q


def test_gauge_suite_passes():
    for rep in checks.SUITES["gauge"](random.Random(7)):
        assert rep.passed, rep.details


def test_les_suite_passes():
    for rep in checks.SUITES["les"](random.Random(7)):
        assert rep.passed, rep.details


def test_coker_ladder_suite_passes():
    reports = checks.SUITES["coker-ladder"](random.Random(7))
    assert all(r.passed for r in reports)
    assert reports[-1].details["passing"] == 100


def test_main_theorem_point_blowup():
    cp2 = models.build("cp2")
    standin = models.build("blowup_cp2_standin")
    pt = models.build("simplex", (0,)).complex
    rep = checks.check_main_theorem(
        "point blowup", cp2.complex, LocalSystem.trivial(cp2.complex),
        pt, LocalSystem.trivial(pt),
        standin.complex, LocalSystem.trivial(standin.complex), 2)
    assert rep.passed
    assert rep.details["xtilde"] == [1, 0, 2, 0, 1]


def test_main_theorem_empty_center():
    cp2 = models.build("cp2").complex
    rep = checks.check_main_theorem(
        "empty", cp2, LocalSystem.trivial(cp2), None, None,
        cp2, LocalSystem.trivial(cp2), 2)
    assert rep.passed


def test_main_theorem_rejects_bad_codimension():
    c = models.build("cp2").complex
    with pytest.raises(checks.IncoherentInstance):
        checks.check_main_theorem("bad", c, LocalSystem.trivial(c),
                                  None, None, c, LocalSystem.trivial(c), 1)


def test_proj_bundle_small_with_roundtrip():
    circ = models.build("circle", (3,)).complex
    rep = checks.check_proj_bundle("circle x cp1", circ,
                                   LocalSystem.trivial(circ), 1,
                                   rng=random.Random(3))
    assert rep.passed
    assert rep.details["product"] == [1, 1, 1, 1]
    assert rep.details["roundtrips"] == 10


def test_pullback_injectivity_cover():
    cover = checks._circle_cover(2)
    rep = checks.check_pullback_injectivity(
        "cover", cover, LocalSystem.trivial(cover.target),
        circle_cover=True)
    assert rep.passed
    assert rep.details["covering_degree"] == "2"


def test_run_suite_unknown_name():
    with pytest.raises(KeyError):
        checks.run_suite("bogus")


def test_reports_reproducible():
    a = checks.run_suite("coker-ladder", seed=5)
    b = checks.run_suite("coker-ladder", seed=5)
    assert [r.to_json_dict() for r in a] == [r.to_json_dict() for r in b]
