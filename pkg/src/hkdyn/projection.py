"""One-dimensional projection of a state along an influence edge.

Projecting every opinion onto the unit vector of an active edge keeps that
edge's length, cannot lengthen any other pair (Cauchy-Schwarz), so the
influence neighbourhoods survive, and can only shrink movements. On a 1-D
state, cutting the line at ``c`` gives

    sum_v |N(v)| * |m(v)|  >=  2 * (total length of influence edges crossing c)

which, cut at the midpoint of a longest edge, bounds the weighted total
movement by twice the longest influence edge.
"""

from dataclasses import dataclass

import numpy as np

from .graph import SocialGraph
from .model import HksState

REL_TOL = 1e-9


class DegenerateProjectionError(ValueError):
    pass


@dataclass(frozen=True)
class ProjectedState:
    positions1d: np.ndarray
    edges: list
    epsilon: float
    source_edge: tuple
    direction: np.ndarray
    tau: float = 0.0

    def as_state(self):
        """The projected system as a 1-D ``HksState`` on the influence edges."""
        graph = SocialGraph(len(self.positions1d), self.edges)
        return HksState(graph, self.positions1d.reshape(-1, 1), self.epsilon, self.tau)


@dataclass(frozen=True)
class ProjectionLaws:
    edge_preserved: bool
    network_equal: bool
    movement_dominated: bool
    per_agent_dominated: bool

    @property
    def all_hold(self):
        return self.edge_preserved and self.network_equal and self.movement_dominated and self.per_agent_dominated


@dataclass(frozen=True)
class CutBound:
    lhs: float
    rhs: float
    tol: float

    @property
    def holds(self):
        return self.lhs >= self.rhs - self.tol


def _normalize_edge(state, edge):
    u, w = sorted(int(x) for x in edge)
    if not state.graph.has_edge(u, w):
        raise ValueError(f"{(u, w)} is not a social edge")
    if state.edge_length(u, w) > state.threshold:
        raise ValueError(f"{(u, w)} is not an influence edge")
    return u, w


def project(state, edge):
    u, w = _normalize_edge(state, edge)
    diff = state.positions[u] - state.positions[w]
    norm = np.linalg.norm(diff)
    if norm == 0.0:
        raise DegenerateProjectionError(f"edge {(u, w)} has zero length")
    p = diff / norm
    return ProjectedState(
        positions1d=state.positions @ p,
        edges=state.influence_network(),
        epsilon=state.epsilon,
        source_edge=(u, w),
        direction=p,
        tau=state.tau,
    )


def weighted_movement(state):
    """``sum_v |N(v)| * |m(v)|`` together with the per-agent terms."""
    sizes, moves = state.movements()
    norms = np.sqrt(np.sum(moves * moves, axis=1))
    return float(np.dot(sizes, norms)), sizes, norms


def check_projection_laws(state, edge):
    proj = project(state, edge)
    u, w = proj.source_edge
    flat = proj.as_state()
    length = state.edge_length(u, w)
    # projected coordinates carry rounding relative to the coordinates, not the gap
    scale = max(length, float(np.abs(state.positions[[u, w]]).max()))
    edge_preserved = abs(abs(proj.positions1d[u] - proj.positions1d[w]) - length) <= REL_TOL * scale
    network_equal = all(
        state.influencing_neighborhood(v) == flat.influencing_neighborhood(v) for v in range(state.n)
    )
    total, sizes, norms = weighted_movement(state)
    total_bar, sizes_bar, norms_bar = weighted_movement(flat)
    tol = REL_TOL * state.epsilon
    return ProjectionLaws(
        edge_preserved=bool(edge_preserved),
        network_equal=bool(network_equal),
        movement_dominated=bool(total >= total_bar - tol * max(1, state.n)),
        per_agent_dominated=bool(np.all(norms >= norms_bar - tol)),
    )


def cut_movement_bound(state1d, c):
    if isinstance(state1d, ProjectedState):
        state1d = state1d.as_state()
    if state1d.dimension != 1:
        raise ValueError(f"cut bound needs a 1-D state, got dimension {state1d.dimension}")
    x = state1d.positions[:, 0]
    lhs, _, _ = weighted_movement(state1d)
    left = x <= c
    g = state1d.graph
    crossing = state1d.influence_mask() & (left[g.edge_u] != left[g.edge_v])
    rhs = 2.0 * float(state1d.edge_lengths[crossing].sum())
    return CutBound(lhs, rhs, REL_TOL * max(rhs, state1d.epsilon))


def longest_edge_bound(state):
    """Check ``sum_v |N(v)| * |m(v)| >= 2 * lambda`` on a longest influence edge.

    Returns ``(direct, cut)``: the d-dimensional sum against ``2 * lambda``,
    and the projected cut bound at the edge midpoint. ``None`` when no
    influence edge has positive length.
    """
    edge, length = state.longest_edge()
    if edge is None or length == 0.0:
        return None
    proj = project(state, edge)
    u, w = proj.source_edge
    c = 0.5 * (proj.positions1d[u] + proj.positions1d[w])
    cut = cut_movement_bound(proj, c)
    total, _, _ = weighted_movement(state)
    return CutBound(total, 2.0 * length, REL_TOL * max(2.0 * length, state.epsilon)), cut
