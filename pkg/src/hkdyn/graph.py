"""Static undirected social network."""

from bisect import bisect_left
from itertools import combinations

import numpy as np


class GraphError(ValueError):
    pass


class SocialGraph:
    """Undirected simple graph on agents ``0..n-1``.

    Edges are stored as sorted ``(u, v)`` pairs with ``u < v`` in
    lexicographic order; edge ids index into that list. A CSR view
    (``indptr``, ``neighbors``, ``incident``) is built once for the
    compiled kernels, where ``incident[k]`` is the edge id of the
    adjacency slot ``k``.
    """

    def __init__(self, n, edges=()):
        n = int(n)
        if n < 0:
            raise GraphError(f"agent count must be non-negative, got {n}")
        seen = set()
        for raw in edges:
            u, v = (int(x) for x in raw)
            if u == v:
                raise GraphError(f"self-loop at agent {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        self.n = n
        self.edges = sorted(seen)
        self.adjacency = [[] for _ in range(n)]
        for u, v in self.edges:
            self.adjacency[u].append(v)
            self.adjacency[v].append(u)
        for nbrs in self.adjacency:
            nbrs.sort()
        self._build_csr()

    def _build_csr(self):
        m = len(self.edges)
        self.edge_u = np.fromiter((u for u, _ in self.edges), dtype=np.int64, count=m)
        self.edge_v = np.fromiter((v for _, v in self.edges), dtype=np.int64, count=m)
        index = {e: i for i, e in enumerate(self.edges)}
        degrees = [len(a) for a in self.adjacency]
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(degrees, out=self.indptr[1:])
        self.neighbors = np.empty(2 * m, dtype=np.int64)
        self.incident = np.empty(2 * m, dtype=np.int64)
        k = 0
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                self.neighbors[k] = u
                self.incident[k] = index[(u, v) if u < v else (v, u)]
                k += 1

    @classmethod
    def complete(cls, n):
        return cls(n, combinations(range(n), 2))

    @classmethod
    def path(cls, n):
        return cls(n, ((i, i + 1) for i in range(n - 1)))

    @property
    def m(self):
        return len(self.edges)

    def degree(self, v):
        return len(self.adjacency[v])

    def has_edge(self, u, v):
        u, v = (u, v) if u < v else (v, u)
        nbrs = self.adjacency[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def check_consistency(self):
        """True when the adjacency lists and CSR arrays are exactly the edge list per node."""
        pairs = set()
        for v, nbrs in enumerate(self.adjacency):
            for u in nbrs:
                pairs.add((min(u, v), max(u, v)))
        if pairs != set(self.edges) or sum(map(len, self.adjacency)) != 2 * self.m:
            return False
        for v in range(self.n):
            lo, hi = self.indptr[v], self.indptr[v + 1]
            if list(self.neighbors[lo:hi]) != self.adjacency[v]:
                return False
            for k in range(lo, hi):
                e = self.incident[k]
                if {int(self.edge_u[e]), int(self.edge_v[e])} != {v, int(self.neighbors[k])}:
                    return False
        return True

    def __eq__(self, other):
        return isinstance(other, SocialGraph) and self.n == other.n and self.edges == other.edges

    def __repr__(self):
        return f"SocialGraph(n={self.n}, m={self.m})"
