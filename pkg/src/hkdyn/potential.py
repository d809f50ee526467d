"""Edge potential and its per-activation decrease.

``potential`` sums, over all social edges, the squared edge length capped
at ``epsilon**2``. Activating ``v`` lowers it by at least
``(|N(v)| + 1) * |m(v)|**2``, with equality while the influence network
stays the same; averaging that bound over a uniformly random agent gives
the expected one-step decrease.
"""

from dataclasses import dataclass

import numpy as np

REL_TOL = 1e-9


@dataclass(frozen=True)
class PotentialReport:
    phi: float
    drop_bound_per_agent: np.ndarray
    expected_drop: float
    claimed_lower_bound: float | None
    corrected_lower_bound: float | None
    longest_length: float
    active_edge_count: int


@dataclass(frozen=True)
class DropCheck:
    bound: float
    actual: float
    network_changed: bool
    tol: float

    @property
    def inequality_holds(self):
        return self.actual >= self.bound - self.tol

    @property
    def equality_holds(self):
        return abs(self.actual - self.bound) <= self.tol

    @property
    def ok(self):
        return self.inequality_holds and (self.network_changed or self.equality_holds)


def potential(state):
    g = state.graph
    if g.m == 0:
        return 0.0
    diff = state.positions[g.edge_u] - state.positions[g.edge_v]
    sq = np.sum(diff * diff, axis=1)
    return float(np.minimum(sq, state.epsilon ** 2).sum())


def drop_lower_bound(state, v):
    mean, size = state.neighborhood_mean(v)
    m = mean - state.positions[v]
    return float((size + 1) * np.dot(m, m))


def drop_bounds(state):
    sizes, moves = state.movements()
    return (sizes + 1) * np.sum(moves * moves, axis=1)


def expected_drop(state):
    if state.n == 0:
        return 0.0
    return float(drop_bounds(state).mean())


def expected_drop_lower_bound(state):
    """``2 * lambda**2 / (n * |E_t|)``, or None when no edge influences anything."""
    s = state.summary()
    if s.active_edge_count == 0:
        return None
    return 2.0 * s.longest_length ** 2 / (state.n * s.active_edge_count)


def expected_drop_corrected_bound(state):
    """``4 * lambda**2 / (n * (n + 2|E_t|))``, or None without influence edges.

    Cauchy-Schwarz over agents divides by ``sum_v |N(v)|``, which is
    ``n + 2|E_t|`` because every neighbourhood contains its own agent.
    The ``2 lambda**2 / (n |E_t|)`` form drops the ``n`` and fails on
    small systems (two agents on one edge: drop ``0.75 lambda**2``).
    """
    s = state.summary()
    if s.active_edge_count == 0:
        return None
    return 4.0 * s.longest_length ** 2 / (state.n * (state.n + 2 * s.active_edge_count))


def potential_report(state):
    bounds = drop_bounds(state)
    s = state.summary()
    return PotentialReport(
        phi=potential(state),
        drop_bound_per_agent=bounds,
        expected_drop=float(bounds.mean()) if state.n else 0.0,
        claimed_lower_bound=expected_drop_lower_bound(state),
        corrected_lower_bound=expected_drop_corrected_bound(state),
        longest_length=s.longest_length,
        active_edge_count=s.active_edge_count,
    )


def drop_tolerance(state, phi_before):
    return REL_TOL * max(phi_before, state.epsilon ** 2)


def check_drop_equality(state, v):
    """Activate ``v`` on a scratch copy and compare the real drop with the bound."""
    scratch = state.copy()
    before_mask = scratch.influence_mask()
    phi_before = potential(scratch)
    bound = drop_lower_bound(scratch, v)
    scratch.activate(v)
    actual = phi_before - potential(scratch)
    changed = not np.array_equal(before_mask, scratch.influence_mask())
    return DropCheck(bound, actual, changed, drop_tolerance(state, phi_before))
