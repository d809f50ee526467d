"""Hegselmann-Krause state on a social network, with asynchronous updates.

An agent ``u`` influences ``v`` when they share a social edge and their
opinions are within the confidence bound. Membership is tested as
``length <= epsilon * (1 + tau)``: constructions that put edges at length
exactly ``epsilon`` would otherwise lose them to rounding after a few
updates. ``tau = 0`` gives the literal predicate.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .graph import SocialGraph

DEFAULT_TAU = 1e-9


@dataclass(frozen=True)
class MoveRecord:
    agent: int
    moved: bool
    displacement: np.ndarray
    neighborhood_size: int


@dataclass(frozen=True)
class InfluenceSummary:
    active_edge_count: int
    violating_edge_count: int
    longest_edge: tuple | None
    longest_length: float
    delta: float | None

    @property
    def stable(self):
        return self.violating_edge_count == 0


def _check_delta(delta):
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return float(delta)


class HksState:
    """Positions of ``n`` agents in ``d`` dimensions bound to a social graph.

    The state keeps, per social edge, its current length, and maintains
    incrementally the number of influence edges, the number of edges
    violating ``delta``-stability for the tracked ``delta``, and a lazily
    invalidated longest-influence-edge cache. Each activation touches only
    the edges incident to the activated agent.
    """

    def __init__(self, graph, positions, epsilon, tau=DEFAULT_TAU, delta=None, step=0):
        if not isinstance(graph, SocialGraph):
            raise TypeError("graph must be a SocialGraph")
        pos = np.array(positions, dtype=np.float64)
        if pos.ndim == 1:
            pos = pos.reshape(-1, 1)
        if pos.ndim != 2 or pos.shape[0] != graph.n:
            raise ValueError(f"expected positions of shape ({graph.n}, d), got {pos.shape}")
        if pos.shape[1] < 1:
            raise ValueError("dimension must be at least 1")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if not epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {epsilon}")
        if tau < 0:
            raise ValueError(f"tau must be non-negative, got {tau}")
        self.graph = graph
        self.epsilon = float(epsilon)
        self.tau = float(tau)
        self.threshold = self.epsilon * (1.0 + self.tau)
        self.step = int(step)
        self._pos = np.ascontiguousarray(pos)
        self._elen = np.empty(graph.m, dtype=np.float64)
        self._counts = np.zeros(2, dtype=np.int64)
        self._cache_idx = np.array([-1, 1], dtype=np.int64)
        self._cache_len = np.array([-1.0])
        self._buf = np.empty(self.dimension)
        self.delta = None
        self._rebuild(delta)

    # -- bookkeeping -----------------------------------------------------

    def _rebuild(self, delta):
        K.all_lengths(self._pos, self.graph.edge_u, self.graph.edge_v, self._elen)
        self.delta = None if delta is None else _check_delta(delta)
        active = self._elen <= self.threshold
        self._counts[0] = int(active.sum())
        self._counts[1] = int((active & (self._elen > self._kernel_delta)).sum())
        self._cache_idx[:] = (-1, 1)
        self._cache_len[0] = -1.0
        self._refresh_longest()

    @property
    def _kernel_delta(self):
        return np.inf if self.delta is None else self.delta

    def track_delta(self, delta):
        """Maintain the violating-edge counter for ``delta`` from now on."""
        delta = _check_delta(delta)
        self.delta = delta
        active = self._elen <= self.threshold
        self._counts[1] = int((active & (self._elen > delta)).sum())

    def _refresh_longest(self):
        if not self._cache_idx[1]:
            return
        active = np.flatnonzero(self._elen <= self.threshold)
        if active.size == 0:
            self._cache_idx[0] = -1
            self._cache_len[0] = -1.0
        else:
            e = active[np.argmax(self._elen[active])]
            self._cache_idx[0] = e
            self._cache_len[0] = self._elen[e]
        self._cache_idx[1] = 0

    # -- basic accessors -------------------------------------------------

    @property
    def n(self):
        return self.graph.n

    @property
    def dimension(self):
        return self._pos.shape[1]

    @property
    def positions(self):
        view = self._pos.view()
        view.flags.writeable = False
        return view

    @property
    def edge_lengths(self):
        view = self._elen.view()
        view.flags.writeable = False
        return view

    def set_positions(self, positions):
        pos = np.array(positions, dtype=np.float64).reshape(self._pos.shape)
        self._pos[:] = pos
        self._rebuild(self.delta)

    def copy(self):
        other = HksState(self.graph, self._pos, self.epsilon, self.tau, self.delta, self.step)
        return other

    def _check_agent(self, v):
        if not (0 <= v < self.n) or int(v) != v:
            raise IndexError(f"agent id {v} outside [0, {self.n})")
        return int(v)

    # -- local quantities ------------------------------------------------

    def edge_length(self, u, v):
        u, v = self._check_agent(u), self._check_agent(v)
        return float(K.edge_len(self._pos, u, v))

    def influencing_neighborhood(self, v):
        v = self._check_agent(v)
        g = self.graph
        lo, hi = g.indptr[v], g.indptr[v + 1]
        keep = self._elen[g.incident[lo:hi]] <= self.threshold
        return {v, *map(int, g.neighbors[lo:hi][keep])}

    def neighborhood_mean(self, v):
        v = self._check_agent(v)
        out = np.empty(self.dimension)
        g = self.graph
        size = K.neighborhood_mean(v, self._pos, g.indptr, g.neighbors, g.incident,
                                   self._elen, self.threshold, out)
        return out, int(size)

    def movement(self, v):
        mean, _ = self.neighborhood_mean(v)
        return mean - self._pos[v]

    def movements(self):
        """Neighbourhood sizes ``|N(v)|`` and movement vectors for all agents at once."""
        g = self.graph
        sizes = np.empty(self.n, dtype=np.int64)
        moves = np.empty_like(self._pos)
        K.all_movements(self._pos, g.indptr, g.neighbors, g.incident, self._elen,
                        self.threshold, sizes, moves)
        return sizes, moves

    def activate(self, v):
        v = self._check_agent(v)
        g = self.graph
        before = self._pos[v].copy()
        size = len(self.influencing_neighborhood(v))
        moved = K.activate(v, self._pos, g.indptr, g.neighbors, g.incident, self._elen,
                           self.threshold, self._kernel_delta, self._counts,
                           self._cache_idx, self._cache_len, self._buf)
        self.step += 1
        return MoveRecord(v, bool(moved), self._pos[v] - before, size)

    # -- influence network -----------------------------------------------

    def influence_mask(self):
        return self._elen <= self.threshold

    def influence_network(self):
        return [self.graph.edges[e] for e in np.flatnonzero(self.influence_mask())]

    def summary(self):
        self._refresh_longest()
        e = int(self._cache_idx[0])
        return InfluenceSummary(
            active_edge_count=int(self._counts[0]),
            violating_edge_count=int(self._counts[1]),
            longest_edge=None if e < 0 else self.graph.edges[e],
            longest_length=0.0 if e < 0 else float(self._cache_len[0]),
            delta=self.delta,
        )

    def recompute_summary(self):
        """Same fields as ``summary`` but rebuilt from positions, bypassing every cache."""
        g = self.graph
        diff = self._pos[g.edge_u] - self._pos[g.edge_v]
        lengths = np.sqrt(np.sum(diff * diff, axis=1))
        active = lengths <= self.threshold
        violating = active & (lengths > self._kernel_delta)
        if active.any():
            idx = np.flatnonzero(active)
            e = int(idx[np.argmax(lengths[idx])])
            longest, length = g.edges[e], float(lengths[e])
        else:
            longest, length = None, 0.0
        return InfluenceSummary(int(active.sum()), int(violating.sum()), longest, length, self.delta)

    def longest_edge(self):
        s = self.summary()
        return s.longest_edge, s.longest_length

    def is_delta_stable(self, delta):
        delta = _check_delta(delta)
        if delta == self.delta:
            return self._counts[1] == 0
        active = self._elen <= self.threshold
        return not np.any(active & (self._elen > delta))

    def components(self):
        """Connected components of the influence network, each a sorted agent list."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.influence_network():
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        groups = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())

    def is_delta_equilibrium(self, delta):
        delta = _check_delta(delta)
        for comp in self.components():
            if len(comp) < 2:
                continue
            pts = self._pos[comp]
            diff = pts[:, None, :] - pts[None, :, :]
            if np.sqrt(np.sum(diff * diff, axis=2)).max() > delta:
                return False
        return True

    def components_are_cliques(self):
        label = np.empty(self.n, dtype=np.int64)
        comps = self.components()
        for i, comp in enumerate(comps):
            label[comp] = i
        inside = np.zeros(len(comps), dtype=np.int64)
        for u, _ in self.influence_network():
            inside[label[u]] += 1
        sizes = np.array([len(c) for c in comps])
        return bool(np.all(inside == sizes * (sizes - 1) // 2))

    def is_socially_stable_state(self):
        return int(self._counts[0]) == self.graph.m

    def __repr__(self):
        return (f"HksState(n={self.n}, d={self.dimension}, epsilon={self.epsilon}, "
                f"step={self.step}, m={self.graph.m})")
