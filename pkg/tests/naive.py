"""Plain-Python reference model used as an oracle by the tests.

Deliberately shares no code with the package: lists of tuples, direct
formulas, no caches.
"""

import math


def dist(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def neighborhood(pos, edges, eps, v):
    out = {v}
    for a, b in edges:
        if v in (a, b):
            u = b if a == v else a
            if dist(pos[u], pos[v]) <= eps:
                out.add(u)
    return out


def movement(pos, edges, eps, v):
    nb = neighborhood(pos, edges, eps, v)
    d = len(pos[v])
    return [sum(pos[u][k] - pos[v][k] for u in nb) / len(nb) for k in range(d)]


def activate(pos, edges, eps, v):
    m = movement(pos, edges, eps, v)
    pos = list(pos)
    pos[v] = tuple(x + dx for x, dx in zip(pos[v], m))
    return pos


def potential(pos, edges, eps):
    return sum(min(dist(pos[a], pos[b]) ** 2, eps**2) for a, b in edges)


def influence_edges(pos, edges, eps):
    return sorted((a, b) for a, b in edges if dist(pos[a], pos[b]) <= eps)


def is_stable(pos, edges, eps, delta):
    return all(not (delta < dist(pos[a], pos[b]) <= eps) for a, b in edges)


def expected_drop(pos, edges, eps):
    n = len(pos)
    total = 0.0
    for v in range(n):
        m = movement(pos, edges, eps, v)
        total += (len(neighborhood(pos, edges, eps, v)) + 1) * sum(x * x for x in m)
    return total / n


class Xoshiro256ss:
    """Reference xoshiro256** seeded through SplitMix64, in Python integers."""

    M = (1 << 64) - 1

    def __init__(self, seed):
        x = seed & self.M
        self.s = []
        for _ in range(4):
            x = (x + 0x9E3779B97F4A7C15) & self.M
            z = x
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.M
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.M
            self.s.append(z ^ (z >> 31))

    @staticmethod
    def _rotl(x, k):
        return ((x << k) | (x >> (64 - k))) & Xoshiro256ss.M

    def next(self):
        s = self.s
        result = (self._rotl((s[1] * 5) & self.M, 7) * 9) & self.M
        t = (s[1] << 17) & self.M
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = self._rotl(s[3], 45)
        return result
