"""Randomised property suites for the convergence argument.

Each suite draws its own instances from a seeded numpy generator and
returns a ``SuiteResult``; the CLI ``verify`` command and the acceptance
tests both run these.

    lemma1  projection along an influence edge: edge length kept, same
            neighbourhoods, per-agent movement not increased
    lemma2  1-D cut bound, and 2*longest-edge bound on weighted movement
    lemma4  per-activation potential drop >= (|N|+1)|m|^2, equality when
            the influence network is unchanged, potential non-increasing
    lemma5  expected drop >= 2 lambda^2 / (n |E_t|); the detail line also
            reports 4 lambda^2 / (n (n + 2|E_t|)), the bound that survives
            counting each agent in its own neighbourhood
    thm2    complete social graph, all influence edges <= eps/2:
            every influence component is a clique
    thm5    Dumbbell closed-form expected drop and uniform movement
"""

from dataclasses import dataclass

import numpy as np

from .graph import SocialGraph
from .instances import dumbbell_mhat, gen_dumbbell
from .model import HksState
from .potential import (
    drop_tolerance,
    expected_drop,
    expected_drop_corrected_bound,
    expected_drop_lower_bound,
    potential,
)
from .projection import check_projection_laws, cut_movement_bound, longest_edge_bound, project
from .runner import RunConfig, run_until_stable

SUITES = ("lemma1", "lemma2", "lemma4", "lemma5", "thm2", "thm5")
DEFAULT_ITERS = {"lemma1": 10_000, "lemma2": 10_000, "lemma4": 100_000,
                 "lemma5": 10_000, "thm2": 1_000, "thm5": 3}
EPS = 100.0


@dataclass(frozen=True)
class SuiteResult:
    name: str
    checked: int
    failures: int
    detail: str = ""

    @property
    def passed(self):
        return self.failures == 0 and self.checked > 0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        tail = f" {self.detail}" if self.detail else ""
        return f"{self.name}: {status} (checked={self.checked}, failures={self.failures}){tail}"


def random_state(rng, d=None, complete=None, n=None, epsilon=EPS):
    """A small random state whose edge lengths straddle ``epsilon``."""
    n = int(rng.integers(2, 13)) if n is None else n
    d = int(rng.choice([1, 2, 3])) if d is None else d
    complete = bool(rng.random() < 0.5) if complete is None else complete
    if complete:
        graph = SocialGraph.complete(n)
    else:
        p = rng.uniform(0.15, 0.7)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        graph = SocialGraph(n, edges)
    spread = epsilon * rng.uniform(0.3, 2.5)
    pos = rng.uniform(0.0, spread, size=(n, d))
    if rng.random() < 0.2:
        # snap a few agents together to exercise coincident positions
        k = int(rng.integers(0, n))
        pos[rng.integers(0, n, size=max(1, n // 3))] = pos[k]
    return HksState(graph, pos, epsilon)


def _random_states(rng, count, d=None):
    """States at random times along random trajectories."""
    state = None
    for i in range(count):
        if state is None or i % 20 == 0:
            state = random_state(rng, d=d)
        for _ in range(int(rng.integers(0, 4))):
            state.activate(int(rng.integers(0, state.n)))
        yield state


def suite_lemma1(iters, seed):
    rng = np.random.default_rng([seed, 1])
    dims = (1, 2, 3, 8)
    checked = failures = 0
    i = 0
    while checked < iters:
        i += 1
        state = random_state(rng, d=dims[i % len(dims)])
        for _ in range(int(rng.integers(0, 3))):
            state.activate(int(rng.integers(0, state.n)))
        lengths = state.edge_lengths
        mask = state.influence_mask() & (lengths > 0)
        if not mask.any():
            continue
        e = state.graph.edges[int(rng.choice(np.flatnonzero(mask)))]
        laws = check_projection_laws(state, e)
        proj = project(state, e)
        x, xb = state.positions, proj.positions1d
        full = np.sqrt(np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=2))
        contractive = np.all(np.abs(xb[:, None] - xb[None, :]) <= full + 1e-9 * state.epsilon)
        checked += 1
        failures += not (laws.all_hold and contractive)
    return SuiteResult("lemma1", checked, failures)


def suite_lemma2(iters, seed):
    rng = np.random.default_rng([seed, 2])
    checked = failures = 0
    for state in _random_states(rng, iters):
        flat = random_state(rng, d=1)
        x = flat.positions[:, 0]
        c = float(rng.choice(x)) if rng.random() < 0.3 else float(rng.uniform(x.min() - 1, x.max() + 1))
        ok = cut_movement_bound(flat, c).holds
        res = longest_edge_bound(state)
        if res is not None:
            direct, cut = res
            ok = ok and direct.holds and cut.holds and cut.lhs <= direct.lhs + direct.tol
        checked += 1
        failures += not ok
    return SuiteResult("lemma2", checked, failures)


def suite_lemma4(iters, seed, block=200):
    """``iters`` activations, fresh instance every ``block`` activations."""
    rng = np.random.default_rng([seed, 4])
    checked = failures = equal_cases = 0
    done = 0
    while done < iters:
        state = random_state(rng)
        phi0 = potential(state)
        phi = phi0
        for _ in range(min(block, iters - done)):
            v = int(rng.integers(0, state.n))
            mask = state.influence_mask()
            mean, size = state.neighborhood_mean(v)
            m = mean - state.positions[v]
            bound = float((size + 1) * np.dot(m, m))
            state.activate(v)
            after = potential(state)
            actual = phi - after
            tol = drop_tolerance(state, phi)
            unchanged = np.array_equal(mask, state.influence_mask())
            ok = actual >= bound - tol and after <= phi + 1e-9 * max(phi0, state.epsilon**2)
            if unchanged:
                equal_cases += 1
                ok = ok and abs(actual - bound) <= tol
            checked += 1
            failures += not ok
            phi = after
            done += 1
    return SuiteResult("lemma4", checked, failures, f"unchanged-network cases={equal_cases}")


def suite_lemma5(iters, seed):
    rng = np.random.default_rng([seed, 5])
    checked = failures = corrected_failures = cor3_failures = 0
    worst = None
    for state in _random_states(rng, 10 * iters):
        if checked >= iters:
            break
        lb = expected_drop_lower_bound(state)
        if lb is None:
            continue
        drop = expected_drop(state)
        tol = 1e-9 * max(lb, 1e-12 * state.epsilon**2)
        res = longest_edge_bound(state)
        cor3_ok = res is None or res[0].holds
        cor3_failures += not cor3_ok
        ok = drop >= lb - tol and cor3_ok
        corrected_failures += drop < expected_drop_corrected_bound(state) - tol
        if not ok and (worst is None or drop / lb < worst[0]):
            worst = (drop / lb, state.n, state.summary().active_edge_count)
        checked += 1
        failures += not ok
    detail = f"weighted-movement failures={cor3_failures} corrected-bound failures={corrected_failures}"
    if worst:
        detail += f" worst drop/bound={worst[0]:.4f} (n={worst[1]}, |E_t|={worst[2]})"
    return SuiteResult("lemma5", checked, failures, detail)


def clustered_complete_state(rng, epsilon=EPS):
    """Complete social graph whose influence edges all have length <= eps/2."""
    k = int(rng.integers(1, 5))
    d = int(rng.choice([1, 2, 3]))
    n = int(rng.integers(k, 13))
    centers = np.arange(k)[:, None] * (2.0 * epsilon) * np.ones((1, d))
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    offsets = rng.normal(size=(n, d))
    offsets *= (rng.uniform(0, 0.25 * epsilon, size=(n, 1))
                / np.maximum(np.linalg.norm(offsets, axis=1, keepdims=True), 1e-12))
    return HksState(SocialGraph.complete(n), centers[labels] + offsets, epsilon)


def suite_thm2(iters, seed):
    rng = np.random.default_rng([seed, 6])
    checked = failures = 0
    i = 0
    while checked < iters:
        i += 1
        if i % 2 == 0:
            state = clustered_complete_state(rng)
        else:
            n = int(rng.integers(2, 11))
            d = int(rng.choice([1, 2, 3]))
            pos = rng.uniform(0, EPS * rng.uniform(0.5, 3.0), size=(n, d))
            state = HksState(SocialGraph.complete(n), pos, EPS)
            run_until_stable(state, RunConfig(delta=EPS / 2, seed=int(rng.integers(0, 2**63))))
        lengths = state.edge_lengths[state.influence_mask()]
        if lengths.size and lengths.max() > EPS / 2:
            continue
        ok = state.components_are_cliques() and state.is_delta_equilibrium(EPS / 2)
        checked += 1
        failures += not ok
    return SuiteResult("thm2", checked, failures)


def dumbbell_closed_form_errors(n, epsilon=EPS):
    """Relative errors of the Dumbbell expected drop and of each agent's movement."""
    state = gen_dumbbell(n, epsilon, full_social=True)
    mhat = dumbbell_mhat(n, epsilon)
    closed = (n / 8 + 7 / 2 - 2 / n) * mhat**2
    drop_err = abs(expected_drop(state) - closed) / closed
    _, moves = state.movements()
    move_err = float(np.max(np.abs(np.linalg.norm(moves, axis=1) - mhat)) / mhat)
    return drop_err, move_err


def suite_thm5(sizes=(16, 32, 64), tol=1e-9):
    checked = failures = 0
    parts = []
    for n in sizes:
        drop_err, move_err = dumbbell_closed_form_errors(n)
        checked += 1
        failures += not (drop_err <= tol and move_err <= tol)
        parts.append(f"n={n}:drop_rel={drop_err:.1e},move_rel={move_err:.1e}")
    return SuiteResult("thm5", checked, failures, " ".join(parts))


def run_suite(name, iters=None, seed=0):
    iters = DEFAULT_ITERS[name] if iters is None else iters
    if name == "thm5":
        return suite_thm5()
    fn = {"lemma1": suite_lemma1, "lemma2": suite_lemma2, "lemma4": suite_lemma4,
          "lemma5": suite_lemma5, "thm2": suite_thm2}[name]
    return fn(iters, seed)
