import pytest

from hadamard_duality import SPD, Ball, Euclidean, Hyperboloid, Point, SolverConfig, SquaredDistance
from hadamard_duality.verification import SUITES, run_suite

CFG = SolverConfig(seed=2)
M = [Euclidean(2), Hyperboloid(2), SPD(2)]


@pytest.mark.parametrize("m", M, ids=repr)
@pytest.mark.parametrize("suite,trials", [("fenchel-young", 10), ("cosine-law", 50), ("projection", 6),
                                          ("separation", 2), ("equivalence", 5), ("moreau", 3)])
def test_suites_pass(m, suite, trials):
    rep = run_suite(suite, m, trials, cfg=CFG)
    assert rep.passed, rep.to_dict()
    assert len(rep.results) == trials


def test_moreau_on_fixed_function():
    m = Hyperboloid(2)
    F = SquaredDistance(Point(m, m.reference_point()))
    rep = run_suite("moreau", m, 5, F=F, cfg=CFG)
    assert rep.passed and rep.max_violation <= 1e-3


def test_zero_trials_is_vacuous_pass():
    for name in SUITES:
        rep = run_suite(name, Euclidean(2), 0, cfg=CFG)
        assert rep.passed and rep.results == [] and rep.max_violation == 0.0


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", Euclidean(2), 1)


def test_separation_with_given_sets():
    m = Euclidean(2)
    A, B = Ball(Point(m, [0, 0]), 1.0), Ball(Point(m, [4, 0]), 1.0)
    rep = run_suite("separation", m, 1, cfg=CFG, sets=(A, B))
    r = rep.results[0]
    assert rep.passed and r["inf_a"] == pytest.approx(1.0) and r["sup_b"] == pytest.approx(-1.0)


def test_report_is_a_function_of_seed():
    a = run_suite("fenchel-young", SPD(2), 5, cfg=CFG).to_dict()
    b = run_suite("fenchel-young", SPD(2), 5, cfg=CFG).to_dict()
    c = run_suite("fenchel-young", SPD(2), 5, cfg=CFG.with_overrides(seed=3)).to_dict()
    assert a == b and a != c
