from itertools import product

import numpy as np
import pytest

from hkdyn.graph import SocialGraph
from hkdyn.instances import gen_complete_random, gen_dumbbell, gen_path, gen_random_sparse
from hkdyn.model import HksState
from hkdyn.rng import AgentSampler
from hkdyn.runner import RunConfig, first_move_times, run_until_stable, write_trace

EPS = 100.0


def pair():
    return HksState(SocialGraph(2, [(0, 1)]), [0.0, EPS], EPS)


def _steps_by_enumeration(delta, depth=6):
    """Stopping time of every activation sequence of the two-agent system."""
    times = set()
    for seq in product((0, 1), repeat=depth):
        x = [0.0, EPS]
        for t, v in enumerate(seq):
            gap = abs(x[0] - x[1])
            if gap <= delta or gap > EPS:
                times.add(t)
                break
            x[v] = (x[0] + x[1]) / 2
        else:
            times.add(None)
    return times


def test_two_agents_quarter_epsilon_takes_two_steps():
    assert _steps_by_enumeration(EPS / 4) == {2}
    for seed in range(20):
        rep = run_until_stable(pair(), RunConfig(delta=EPS / 4, seed=seed))
        assert rep.steps_to_stable == 2 and not rep.censored
        assert rep.initial_potential == EPS**2
        assert rep.final_potential == pytest.approx((EPS / 4) ** 2)


def test_already_stable_state_takes_zero_steps():
    s = HksState(SocialGraph.complete(3), [5.0, 5.0, 5.0], EPS)
    rep = run_until_stable(s, RunConfig(delta=1.0))
    assert rep.steps_to_stable == 0
    far = HksState(SocialGraph(2, [(0, 1)]), [0.0, 3 * EPS], EPS)
    assert run_until_stable(far, RunConfig(delta=1.0)).steps == 0


def test_budget_exhaustion_is_reported_not_raised():
    s = gen_path(16, EPS)
    rep = run_until_stable(s, RunConfig(delta=1.0, max_steps=50))
    assert rep.censored and rep.steps == 50 and rep.steps_to_stable is None
    assert s.step == 50


def test_budget_exactly_enough_is_not_censored():
    rep = run_until_stable(pair(), RunConfig(delta=EPS / 4, max_steps=2))
    assert not rep.censored and rep.steps == 2


def test_invalid_configs():
    for kw in ({"delta": 0.0}, {"delta": -1.0}, {"delta": 1.0, "max_steps": -1},
               {"delta": 1.0, "record_potential_every": 0}, {"delta": 1.0, "seed": -3},
               {"delta": 1.0, "seed": 2**64}):
        with pytest.raises(ValueError):
            RunConfig(**kw)


def test_runs_are_deterministic():
    a = run_until_stable(gen_dumbbell(16, EPS, full_social=False), RunConfig(delta=1.0, seed=5, record_potential_every=97))
    b = run_until_stable(gen_dumbbell(16, EPS, full_social=False), RunConfig(delta=1.0, seed=5, record_potential_every=97))
    assert a.to_json() == b.to_json()
    c = run_until_stable(gen_dumbbell(16, EPS, full_social=False), RunConfig(delta=1.0, seed=6))
    assert c.steps != a.steps


def _replay(state, seed, steps):
    """Re-run ``steps`` activations in pure Python with the same generator."""
    sampler = AgentSampler(seed)
    for _ in range(steps):
        state.activate(sampler.next_agent(state.n))
    return state


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_exact_stopping_by_replay(seed):
    delta = 2.0
    for make in (lambda: gen_path(8, EPS),
                 lambda: gen_random_sparse(10, 2, EPS, 200.0, 0.5, seed),
                 lambda: gen_complete_random(9, 3, EPS, 120.0, seed)):
        live = make()
        rep = run_until_stable(live, RunConfig(delta=delta, seed=seed))
        k = rep.steps_to_stable
        if k == 0:
            assert make().is_delta_stable(delta)
            continue
        before = _replay(make(), seed, k - 1)
        assert not before.is_delta_stable(delta)
        before.activate(AgentSampler(seed).agents(before.n, k)[-1])
        assert before.is_delta_stable(delta)
        assert np.allclose(before.positions, live.positions, rtol=0, atol=1e-9)


def test_terminal_state_is_exposed_and_stable():
    s = gen_complete_random(12, 2, EPS, 80.0, 3)
    run_until_stable(s, RunConfig(delta=0.5, seed=1))
    assert s.is_delta_stable(0.5)
    assert s.components_are_cliques()


def test_potential_trace_non_increasing(tmp_path):
    s = gen_dumbbell(32, EPS, full_social=False)
    rep = run_until_stable(s, RunConfig(delta=1.0, seed=2, record_potential_every=500))
    phis = [p for _, p in rep.potential_trace]
    steps = [t for t, _ in rep.potential_trace]
    assert steps[0] == 0 and steps[-1] == rep.steps
    assert all(b <= a + 1e-9 * phis[0] for a, b in zip(phis, phis[1:]))
    assert rep.final_potential <= rep.initial_potential
    out = write_trace(rep, tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "step,phi" and len(lines) == len(rep.potential_trace) + 1
    assert out is None or out.exists()


def test_write_trace_needs_trace(tmp_path):
    rep = run_until_stable(pair(), RunConfig(delta=EPS / 4))
    with pytest.raises(ValueError):
        write_trace(rep, tmp_path / "t.csv")


@pytest.mark.parametrize("seed", range(10))
def test_path_stays_socially_stable(seed):
    rep = run_until_stable(gen_path(12, EPS), RunConfig(delta=1.0, seed=seed, check_social_stability=True))
    assert rep.socially_stable_throughout is True


def test_dumbbell_is_not_socially_stable_throughout():
    rep = run_until_stable(gen_dumbbell(16, EPS), RunConfig(delta=1.0, seed=0, check_social_stability=True))
    assert rep.socially_stable_throughout is False


def test_first_move_times_path_ends_and_isolated_agent():
    cfg = RunConfig(delta=1.0, seed=4, record_first_moves=True)
    n = 10
    times = first_move_times(gen_path(n, EPS), cfg)
    draws = AgentSampler(4).agents(n, 10_000)
    for end in (0, n - 1):
        assert times[end] == draws.index(end) + 1
    iso = HksState(SocialGraph(3, [(0, 1)]), [0.0, 50.0, 500.0], EPS)
    assert first_move_times(iso, cfg)[2] is None


def test_first_move_times_needs_flag():
    with pytest.raises(ValueError):
        first_move_times(gen_path(4, EPS), RunConfig(delta=1.0))


def test_first_moves_recorded_in_run_report():
    rep = run_until_stable(gen_path(6, EPS), RunConfig(delta=1.0, seed=0, record_first_moves=True))
    assert len(rep.first_move_step) == 6
    assert all(t is not None and 1 <= t <= rep.steps for t in rep.first_move_step)


def test_path_middle_agent_waits_longer_than_ends():
    n = 16
    mid, ends = [], []
    for seed in range(40):
        t = first_move_times(gen_path(n, EPS), RunConfig(delta=1.0, seed=seed, record_first_moves=True))
        mid.append(t[n // 2 - 1])
        ends.extend([t[0], t[-1]])
    assert np.mean(mid) > 3 * np.mean(ends)
