"""Compiled inner loops shared by ``HksState`` and the runner.

All kernels operate on the CSR arrays of ``SocialGraph`` plus the
per-edge length array ``elen``. ``counts`` is ``int64[2]`` holding
(active edges, violating edges); the longest-edge cache is
``cache_idx = int64[2]`` (edge id, dirty flag) and ``cache_len = float64[1]``.
An edge is active when ``elen <= thr`` and violating when also ``elen > delta``.
"""

import numpy as np
from numba import njit

from .rng import rand_below

STOP_STABLE = 0
STOP_BUDGET = 1
STOP_ALL_MOVED = 2


@njit(cache=True)
def edge_len(pos, u, v):
    d = pos.shape[1]
    if d == 1:
        return abs(pos[u, 0] - pos[v, 0])
    s = 0.0
    for k in range(d):
        diff = pos[u, k] - pos[v, k]
        s += diff * diff
    return np.sqrt(s)


@njit(cache=True)
def all_lengths(pos, eu, ev, out):
    for e in range(eu.shape[0]):
        out[e] = edge_len(pos, eu[e], ev[e])


@njit(cache=True)
def neighborhood_mean(v, pos, indptr, nbr, inc, elen, thr, out):
    """Write the mean position over N(v) into ``out``; return |N(v)|."""
    d = pos.shape[1]
    for k in range(d):
        out[k] = pos[v, k]
    cnt = 1
    for s in range(indptr[v], indptr[v + 1]):
        if elen[inc[s]] <= thr:
            u = nbr[s]
            for k in range(d):
                out[k] += pos[u, k]
            cnt += 1
    for k in range(d):
        out[k] /= cnt
    return cnt


@njit(cache=True)
def all_movements(pos, indptr, nbr, inc, elen, thr, sizes, moves):
    n, d = pos.shape
    buf = np.empty(d)
    for v in range(n):
        sizes[v] = neighborhood_mean(v, pos, indptr, nbr, inc, elen, thr, buf)
        for k in range(d):
            moves[v, k] = buf[k] - pos[v, k]


@njit(cache=True)
def activate(v, pos, indptr, nbr, inc, elen, thr, delta, counts, cache_idx, cache_len, buf):
    d = pos.shape[1]
    neighborhood_mean(v, pos, indptr, nbr, inc, elen, thr, buf)
    moved = False
    for k in range(d):
        if buf[k] != pos[v, k]:
            moved = True
    if not moved:
        return False
    for k in range(d):
        pos[v, k] = buf[k]
    for s in range(indptr[v], indptr[v + 1]):
        e = inc[s]
        old = elen[e]
        new = edge_len(pos, v, nbr[s])
        elen[e] = new
        was_active = old <= thr
        is_active = new <= thr
        if was_active != is_active:
            counts[0] += 1 if is_active else -1
        was_viol = was_active and old > delta
        is_viol = is_active and new > delta
        if was_viol != is_viol:
            counts[1] += 1 if is_viol else -1
        # cache_len is always an upper bound on active lengths; exact unless dirty
        if is_active and new > cache_len[0]:
            cache_idx[0] = e
            cache_idx[1] = 0
            cache_len[0] = new
        elif e == cache_idx[0] and (not is_active or new < old):
            cache_idx[1] = 1
    return True


@njit(cache=True)
def run_loop(pos, indptr, nbr, inc, elen, thr, delta, counts, cache_idx, cache_len,
             rng, max_steps, m_edges, first_move, step0, record_first, stop_all_moved):
    """Activate uniformly random agents until the violating counter hits zero.

    Returns ``(steps, stop_code, socially_stable)``. The stability test
    happens before every draw, so ``steps`` is the index of the first
    stable state reached.
    """
    n, d = pos.shape
    buf = np.empty(d)
    steps = 0
    social = counts[0] == m_edges
    unmoved = 0
    if stop_all_moved:
        for v in range(n):
            if first_move[v] < 0:
                unmoved += 1
    while True:
        if counts[1] == 0:
            return steps, STOP_STABLE, social
        if stop_all_moved and unmoved == 0:
            return steps, STOP_ALL_MOVED, social
        if steps >= max_steps:
            return steps, STOP_BUDGET, social
        v = rand_below(rng, n)
        moved = activate(v, pos, indptr, nbr, inc, elen, thr, delta, counts,
                         cache_idx, cache_len, buf)
        steps += 1
        if moved:
            if record_first and first_move[v] < 0:
                first_move[v] = step0 + steps
                unmoved -= 1
            if counts[0] != m_edges:
                social = False
