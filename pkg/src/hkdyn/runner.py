"""Random-activation dynamics driven to delta-stability."""

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import _kernels as K
from .potential import potential
from .rng import MASK64, new_state


@dataclass(frozen=True)
class RunConfig:
    delta: float
    max_steps: int = 10**9
    seed: int = 0
    record_potential_every: int | None = None
    record_first_moves: bool = False
    check_social_stability: bool = False

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if int(self.max_steps) != self.max_steps or self.max_steps < 0:
            raise ValueError(f"max_steps must be a non-negative integer, got {self.max_steps}")
        if self.record_potential_every is not None and self.record_potential_every < 1:
            raise ValueError("record_potential_every must be >= 1")
        if int(self.seed) != self.seed or not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass
class ConvergenceReport:
    """Outcome of one run.

    ``steps`` is the number of activations performed. When ``censored`` is
    false it is the index of the first delta-stable state; when true the
    budget ran out first.
    """

    steps: int
    censored: bool
    initial_potential: float
    final_potential: float
    seed: int
    delta: float
    first_move_step: list | None = None
    socially_stable_throughout: bool | None = None
    potential_trace: list | None = None

    @property
    def steps_to_stable(self):
        return None if self.censored else self.steps

    def to_dict(self):
        d = asdict(self)
        d["steps_to_stable"] = self.steps_to_stable
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


class _Loop:
    """Owns the RNG and kernel arguments for one run over a state."""

    def __init__(self, state, config, stop_all_moved=False):
        self.state = state
        self.config = config
        self.rng = new_state(config.seed)
        self.first_move = np.full(state.n, -1, dtype=np.int64)
        self.stop_all_moved = stop_all_moved
        self.social = None

    def advance(self, budget):
        st = self.state
        g = st.graph
        record = self.config.record_first_moves or self.stop_all_moved
        steps, code, social = K.run_loop(
            st._pos, g.indptr, g.neighbors, g.incident, st._elen, st.threshold,
            st._kernel_delta, st._counts, st._cache_idx, st._cache_len,
            self.rng, budget, g.m, self.first_move, st.step, record, self.stop_all_moved,
        )
        st.step += int(steps)
        self.social = bool(social) if self.social is None else self.social and bool(social)
        return int(steps), int(code)


def _execute(state, config, stop_all_moved=False):
    state.track_delta(config.delta)
    loop = _Loop(state, config, stop_all_moved)
    start = state.step
    phi0 = potential(state)
    stride = config.record_potential_every
    trace = [(0, phi0)] if stride else None
    remaining = int(config.max_steps)
    while True:
        budget = remaining if not stride else min(remaining, stride)
        taken, code = loop.advance(budget)
        remaining -= taken
        if stride and taken:
            trace.append((state.step - start, potential(state)))
        if code != K.STOP_BUDGET or remaining == 0:
            break
    if code == K.STOP_BUDGET and state.is_delta_stable(config.delta):
        code = K.STOP_STABLE
    report = ConvergenceReport(
        steps=state.step - start,
        censored=code == K.STOP_BUDGET,
        initial_potential=phi0,
        final_potential=potential(state),
        seed=config.seed,
        delta=config.delta,
        first_move_step=(
            [None if t < 0 else int(t - start) for t in loop.first_move]
            if config.record_first_moves or stop_all_moved else None
        ),
        socially_stable_throughout=loop.social if config.check_social_stability else None,
        potential_trace=trace,
    )
    return report, code


def run_until_stable(state, config):
    """Activate uniformly random agents (with replacement) until delta-stable.

    Mutates ``state`` into the terminal state. Runs are a pure function of
    the starting state and ``config.seed``.
    """
    report, _ = _execute(state, config)
    return report


def first_move_times(state, config):
    """Per-agent step (1-based activation count) of the first real move, ``None`` if never.

    Stops as soon as every agent has moved, since later steps cannot change
    the answer; otherwise runs to stability or the budget.
    """
    if not config.record_first_moves:
        raise ValueError("first_move_times needs record_first_moves=True")
    report, _ = _execute(state, config, stop_all_moved=True)
    return report.first_move_step


def write_trace(report, path):
    """Write the potential trace as ``step,phi`` rows."""
    if report.potential_trace is None:
        raise ValueError("report has no potential trace; set record_potential_every")
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "phi"])
            for step, phi in report.potential_trace:
                w.writerow([step, repr(float(phi))])
    except OSError as exc:
        raise OSError(f"cannot write trace to {path}: {exc}") from exc
    return path
