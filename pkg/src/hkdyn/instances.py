"""Instance families and the JSON instance file format.

Path: agent ``i`` (1-based) sits at ``i * epsilon`` on a path graph, so
every edge is exactly at the confidence bound.

Dumbbell: ``n = 4k`` agents on a line. Two cliques of ``k`` coincident
agents sit at either end, each attached to a hub (``l`` and ``r``), and
the hubs are joined by a chain of ``2k - 2`` agents. Chain spacings are
``epsilon - 3 j * mhat`` so that every agent's movement has magnitude
exactly ``mhat = epsilon / (n**2/16 + 5n/4 - 1)``. With ``full_social``
the chain and both cliques are complete and the hubs see everyone;
otherwise the social network is cut down to the initial influence edges.
"""

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .graph import GraphError, SocialGraph
from .model import HksState

TOPOLOGIES = ("path", "dumbbell-full", "dumbbell-reduced", "complete-random", "custom")


class InstanceFormatError(ValueError):
    pass


class InstanceValidationError(ValueError):
    pass


# -- generators ----------------------------------------------------------


def gen_path(n, epsilon):
    if n < 2:
        raise ValueError(f"path needs n >= 2, got {n}")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    positions = np.arange(1, n + 1, dtype=np.float64) * epsilon
    return HksState(SocialGraph.path(n), positions, epsilon)


def dumbbell_mhat(n, epsilon):
    k = n // 4
    return epsilon / (k * k + 5 * k - 1)


def dumbbell_layout(n):
    """Agent index groups: left clique, left hub, chain, right hub, right clique."""
    k = n // 4
    return {
        "left_clique": list(range(0, k)),
        "left_hub": k,
        "chain": list(range(k + 1, 3 * k - 1)),
        "right_hub": 3 * k - 1,
        "right_clique": list(range(3 * k, 4 * k)),
    }


def _dumbbell_positions(n, epsilon):
    k = n // 4
    mhat = dumbbell_mhat(n, epsilon)
    xs = [0.0] * k
    cur = mhat * (k + 1)
    xs.append(cur)
    for j in range(1, k + 1):
        cur += epsilon - 3 * (k - j) * mhat
        xs.append(cur)
    for j in range(k + 1, 2 * k - 1):
        cur += epsilon - 3 * (j - k) * mhat
        xs.append(cur)
    cur += epsilon - 3 * (k - 1) * mhat
    xs.append(cur)
    xs.extend([cur + (k + 1) * mhat] * k)
    return np.array(xs)


def dumbbell_influence_edges(n):
    """Initial influence edges: both hub-cliques and the hub-to-hub chain."""
    lay = dumbbell_layout(n)
    left = lay["left_clique"] + [lay["left_hub"]]
    right = [lay["right_hub"]] + lay["right_clique"]
    line = [lay["left_hub"], *lay["chain"], lay["right_hub"]]
    edges = set(combinations(left, 2)) | set(combinations(right, 2))
    edges |= set(zip(line, line[1:]))
    return sorted(edges)


def dumbbell_social_edges(n):
    lay = dumbbell_layout(n)
    edges = set(combinations(lay["left_clique"], 2))
    edges |= set(combinations(lay["right_clique"], 2))
    edges |= set(combinations(lay["chain"], 2))
    for hub in (lay["left_hub"], lay["right_hub"]):
        edges |= {(min(hub, v), max(hub, v)) for v in range(n) if v != hub}
    return sorted(edges)


def gen_dumbbell(n, epsilon, full_social=True):
    if n % 4 or n < 16:
        raise ValueError(f"dumbbell needs n divisible by 4 and n >= 16, got {n}")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    positions = _dumbbell_positions(n, epsilon)
    full = HksState(SocialGraph(n, dumbbell_social_edges(n)), positions, epsilon)
    if full.influence_network() != dumbbell_influence_edges(n):
        raise RuntimeError("dumbbell construction produced an unexpected influence network")
    state = full if full_social else HksState(SocialGraph(n, dumbbell_influence_edges(n)), positions, epsilon)
    mhat = dumbbell_mhat(n, epsilon)
    _, moves = state.movements()
    mags = np.abs(moves[:, 0])
    if not np.allclose(mags, mhat, rtol=1e-9, atol=0.0):
        worst = float(np.max(np.abs(mags - mhat)) / mhat)
        raise RuntimeError(f"dumbbell movements deviate from mhat (relative error {worst:.3g})")
    return state


def gen_complete_random(n, d, epsilon, spread, seed):
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if not spread > 0 or not epsilon > 0:
        raise ValueError("spread and epsilon must be positive")
    if seed is None:
        raise ValueError("complete-random instances need a seed")
    rng = np.random.default_rng(seed)
    return HksState(SocialGraph.complete(n), rng.uniform(0.0, spread, size=(n, d)), epsilon)


def gen_random_sparse(n, d, epsilon, spread, p, seed):
    """Erdos-Renyi G(n, p) social network with uniform positions; fuzzing source."""
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u, v in combinations(range(n), 2)]
    keep = rng.random(len(pairs)) < p
    edges = [e for e, k in zip(pairs, keep) if k]
    return HksState(SocialGraph(n, edges), rng.uniform(0.0, spread, size=(n, d)), epsilon)


# -- instance descriptions -----------------------------------------------


@dataclass
class InstanceSpec:
    topology: str
    n: int
    dimension: int = 1
    epsilon: float = 100.0
    seed: int | None = None
    spread: float | None = None
    positions: list | None = None
    edges: list | None = field(default=None)

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}; choose from {TOPOLOGIES}")
        if self.topology.startswith("dumbbell") and (self.n % 4 or self.n < 16):
            raise ValueError(f"dumbbell needs n divisible by 4 and n >= 16, got {self.n}")
        if self.topology == "path" and self.n < 2:
            raise ValueError(f"path needs n >= 2, got {self.n}")
        if self.topology == "complete-random" and self.seed is None:
            raise ValueError("complete-random instances need a seed")
        if self.topology == "custom" and (self.positions is None or self.edges is None):
            raise ValueError("custom instances need explicit positions and edges")

    def build(self):
        if self.topology == "path":
            return gen_path(self.n, self.epsilon)
        if self.topology == "dumbbell-full":
            return gen_dumbbell(self.n, self.epsilon, full_social=True)
        if self.topology == "dumbbell-reduced":
            return gen_dumbbell(self.n, self.epsilon, full_social=False)
        if self.topology == "complete-random":
            spread = self.epsilon if self.spread is None else self.spread
            return gen_complete_random(self.n, self.dimension, self.epsilon, spread, self.seed)
        return HksState(SocialGraph(self.n, self.edges), self.positions, self.epsilon)


# -- file format ---------------------------------------------------------


def instance_document(state):
    return {
        "dimension": state.dimension,
        "epsilon": state.epsilon,
        "positions": [[float(x) for x in row] for row in state.positions],
        "edges": [[u, v] for u, v in state.graph.edges],
    }


def _json_rows(rows):
    if not rows:
        return "[]"
    return "[\n    " + ",\n    ".join(json.dumps(r) for r in rows) + "\n  ]"


def dumps_instance(state):
    # json writes floats via repr, which round-trips exactly
    doc = instance_document(state)
    return (
        "{\n"
        f'  "dimension": {doc["dimension"]},\n'
        f'  "epsilon": {json.dumps(doc["epsilon"])},\n'
        f'  "positions": {_json_rows(doc["positions"])},\n'
        f'  "edges": {_json_rows(doc["edges"])}\n'
        "}\n"
    )


def save_instance(state, path):
    path = Path(path)
    try:
        path.write_text(dumps_instance(state), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write instance to {path}: {exc}") from exc
    return path


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def loads_instance(text, source="<string>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{source}: top level must be an object")
    for key in ("dimension", "epsilon", "positions", "edges"):
        if key not in doc:
            raise InstanceFormatError(f"{source}: missing field {key!r}")

    d = doc["dimension"]
    if not _is_int(d) or d < 1:
        raise InstanceValidationError(f"{source}: field 'dimension' must be an integer >= 1, got {d!r}")
    eps = doc["epsilon"]
    if not _is_number(eps) or eps <= 0:
        raise InstanceValidationError(f"{source}: field 'epsilon' must be a positive number, got {eps!r}")
    positions = doc["positions"]
    if not isinstance(positions, list):
        raise InstanceValidationError(f"{source}: field 'positions' must be a list")
    for i, row in enumerate(positions):
        if not isinstance(row, list) or len(row) != d:
            raise InstanceValidationError(
                f"{source}: positions[{i}] must be a list of {d} numbers, got {row!r}")
        if not all(_is_number(x) for x in row):
            raise InstanceValidationError(f"{source}: positions[{i}] contains a non-numeric value")
    edges = doc["edges"]
    if not isinstance(edges, list):
        raise InstanceValidationError(f"{source}: field 'edges' must be a list")
    for i, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2 or not all(_is_int(x) for x in e):
            raise InstanceValidationError(f"{source}: edges[{i}] must be a pair of integers, got {e!r}")
    try:
        graph = SocialGraph(len(positions), edges)
    except GraphError as exc:
        raise InstanceValidationError(f"{source}: field 'edges': {exc}") from exc
    pos = np.array(positions, dtype=np.float64).reshape(len(positions), d)
    return HksState(graph, pos, float(eps))


def load_instance(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read instance {path}: {exc}") from exc
    return loads_instance(text, source=str(path))
