import numpy as np
import pytest

from helpers import make_instance
from stubs import ScriptedSolver, identity_kick
from rfxy.errors import ParameterError
from rfxy.global_solvers import (
    GlobalOptions,
    budget_report,
    compare,
    mbh,
    multistart,
    perturb,
)
from rfxy.local_solvers import rtr
from rfxy.manifold import random_point
from rfxy.model import lower_bound
from rfxy.rng import stream


def small_opts(**kw):
    base = dict(nr=3, mni=3, master_seed=11)
    base.update(kw)
    return GlobalOptions(**base)


# -- perturbation -----------------------------------------------------------


def test_perturb_tiny_eta_is_identity():
    theta = np.random.default_rng(0).uniform(0, 2 * np.pi, 50)
    out = perturb(theta, 1e-15, np.random.default_rng(1))
    assert np.allclose(out, theta, atol=1e-13)


def test_perturb_variance_convention():
    theta = np.zeros(10**5) + np.pi
    out = perturb(theta, 0.5, np.random.default_rng(2))
    assert np.var(out - theta) == pytest.approx(0.25, rel=0.02)
    assert out.min() >= 0 and out.max() < 2 * np.pi


def test_perturb_deterministic():
    theta = np.linspace(0, 6, 30)
    a = perturb(theta, 0.5, stream(5, "perturb", 0))
    b = perturb(theta, 0.5, stream(5, "perturb", 0))
    assert np.array_equal(a, b)


def test_variance_convention_switch():
    assert GlobalOptions(eta_max=0.25, eta_convention="variance").eta_std == pytest.approx(0.5)
    assert GlobalOptions(eta_max=0.5).eta_std == 0.5


def test_defaults():
    o = GlobalOptions()
    assert (o.nr, o.mni, o.eta_max, o.local_solver) == (50, 15, 0.5, "rtr")


@pytest.mark.parametrize(
    "kw", [{"nr": 0}, {"mni": 0}, {"eta_max": 0.0}, {"budget_mode": "x"}, {"local_solver": "x"}, {"master_seed": -1}]
)
def test_option_validation(kw):
    with pytest.raises(ParameterError):
        GlobalOptions(**kw).validate()


# -- MBH loop structure with scripted solvers --------------------------------


def test_never_improving_run_counts():
    inst = make_instance(1, 4, 1.0)
    for mni in (1, 2, 5):
        solver = ScriptedSolver([0.0, 1.0])
        res = mbh(inst, small_opts(nr=2, mni=mni), local_solver=solver, perturbation=identity_kick)
        assert budget_report(res) == [mni + 1, mni + 1]
        assert res.total_local_searches == sum(budget_report(res)) == solver.calls


def test_single_improvement_resets_counter():
    inst = make_instance(1, 4, 1.0)
    mni = 4
    res = mbh(inst, small_opts(nr=1, mni=mni), local_solver=ScriptedSolver([0.0, -1.0, 5.0]),
              perturbation=identity_kick)
    assert budget_report(res) == [mni + 2]
    rec = res.per_run_records[0]
    assert rec.accepted == 1 and rec.incumbents == [0.0, -1.0] and res.best_energy == -1.0


def test_ties_are_rejected():
    inst = make_instance(1, 4, 1.0)
    res = mbh(inst, small_opts(nr=1, mni=3), local_solver=ScriptedSolver([2.0]), perturbation=identity_kick)
    assert budget_report(res) == [4] and res.per_run_records[0].accepted == 0


def test_failed_searches_count_and_loop_continues():
    inst = make_instance(1, 4, 1.0)
    solver = ScriptedSolver([0.0, -1.0, 1.0], failed_calls={1})
    res = mbh(inst, small_opts(nr=1, mni=2), local_solver=solver, perturbation=identity_kick)
    rec = res.per_run_records[0]
    assert rec.failed_searches == 1 and rec.local_searches == 3 and res.best_energy == 0.0


def test_failed_initial_search_records_failed_run():
    inst = make_instance(1, 4, 1.0)
    solver = ScriptedSolver([0.0], failed_calls={0})
    res = mbh(inst, small_opts(nr=2, mni=2), local_solver=solver, perturbation=identity_kick)
    assert res.per_run_records[0].best_energy == np.inf
    assert res.per_run_records[1].best_energy == 0.0


def test_multistart_with_scripted_solver():
    inst = make_instance(1, 4, 1.0)
    res = multistart(inst, small_opts(), budget=[2, 3], local_solver=ScriptedSolver([3.0, 1.0, 2.0, -1.0, 0.0]))
    assert [r.best_energy for r in res.per_run_records] == [1.0, -1.0]
    assert res.total_local_searches == 5


# -- real runs ----------------------------------------------------------------


@pytest.fixture(scope="module")
def cube():
    return make_instance(3, 4, 2.0, seed=7)


def test_mbh_invariants(cube):
    res = mbh(cube, small_opts())
    assert res.best_energy == min(r.best_energy for r in res.per_run_records)
    assert res.best_energy >= lower_bound(cube)
    assert all(c >= 4 for c in budget_report(res))
    for rec in res.per_run_records:
        inc = rec.incumbents
        assert all(b < a for a, b in zip(inc, inc[1:]))
        assert len(rec.energies) == rec.local_searches
        assert all(e >= lower_bound(cube) for e in rec.energies)
    assert res.certificate["relative_gap"] >= 0
    assert res.certificate["lower_bound"] == lower_bound(cube)


def test_mbh_deterministic_and_parallel_equivalent(cube):
    a = mbh(cube, small_opts())
    b = mbh(cube, small_opts())
    c = mbh(cube, small_opts(workers=2))
    assert a.best_energy == b.best_energy == c.best_energy
    assert np.array_equal(a.best_config, c.best_config)
    assert budget_report(a) == budget_report(c)


def test_multistart_budget_one_is_single_solve(cube):
    opts = small_opts()
    res = multistart(cube, opts, budget=1)
    x0 = random_point(cube.lattice, rng=stream(opts.master_seed, "multistart", 0))
    assert res.best_energy == rtr(x0, cube, opts.local_opts).energy
    assert res.total_local_searches == 1


def test_multistart_nested_budgets(cube):
    opts = small_opts()
    small = multistart(cube, opts, budget=3).best_energy
    large = multistart(cube, opts, budget=8).best_energy
    assert large <= small


def test_multistart_default_budget(cube):
    res = multistart(cube, small_opts())
    assert res.run_counts == [4, 4, 4]


def test_multistart_rejects_empty_budget(cube):
    with pytest.raises(ParameterError):
        multistart(cube, small_opts(), budget=0)


def test_compare_matches_budgets(cube):
    m, s = compare(cube, small_opts())
    assert s.run_counts == m.run_counts
    assert s.total_local_searches == m.total_local_searches
    m2, s2 = compare(cube, small_opts(budget_mode="mbh_native"))
    assert s2.run_counts == [4, 4, 4]
