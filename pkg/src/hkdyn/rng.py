"""Reproducible agent selection.

The generator is xoshiro256** (Blackman & Vigna), seeded by expanding a
64-bit seed through SplitMix64. Bounded integers are drawn by rejection
sampling so every agent is selected with exactly probability 1/n.

Generator state lives in a ``uint64[4]`` array so the same code path is
used from the compiled run loop and from Python (``AgentSampler``).
"""

import hashlib

import numpy as np
from numba import njit, uint64

MASK64 = (1 << 64) - 1


@njit(cache=True)
def _rotl(x, k):
    return (x << uint64(k)) | (x >> uint64(64 - k))


@njit(cache=True)
def _splitmix64(x):
    z = x + uint64(0x9E3779B97F4A7C15)
    x_next = z
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return x_next, z ^ (z >> uint64(31))


@njit(cache=True)
def seed_state(state, seed):
    x = uint64(seed)
    for i in range(4):
        x, z = _splitmix64(x)
        state[i] = z


@njit(cache=True)
def next_u64(state):
    s0 = state[0]
    s1 = state[1]
    s2 = state[2]
    s3 = state[3]
    result = _rotl(s1 * uint64(5), 7) * uint64(9)
    t = s1 << uint64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    state[0] = s0
    state[1] = s1
    state[2] = s2
    state[3] = s3
    return result


@njit(cache=True)
def rand_below(state, n):
    # reject the low (2**64 mod n) values so x % n is exactly uniform
    bound = uint64(n)
    threshold = (uint64(0) - bound) % bound
    while True:
        x = next_u64(state)
        if x >= threshold:
            return np.int64(x % bound)


def new_state(seed):
    state = np.zeros(4, dtype=np.uint64)
    seed_state(state, np.uint64(int(seed) & MASK64))
    return state


class AgentSampler:
    """Uniform agent picker with replacement; the Python face of the run loop's RNG."""

    def __init__(self, seed):
        self.seed = int(seed) & MASK64
        self.state = new_state(self.seed)

    def next_u64(self):
        return int(next_u64(self.state))

    def next_agent(self, n):
        if n < 1:
            raise ValueError("need at least one agent to sample from")
        return int(rand_below(self.state, n))

    def agents(self, n, count):
        return [self.next_agent(n) for _ in range(count)]


def derive_seed(base_seed, *parts):
    """Stable 64-bit seed from a base seed and a tuple of labels.

    Uses BLAKE2b over a canonical text encoding, so the value depends only on
    the arguments (never on process, platform or scheduling order).
    """
    text = "|".join([str(int(base_seed) & MASK64), *map(str, parts)])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")
