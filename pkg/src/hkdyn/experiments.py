"""Monte-Carlo convergence-time sweeps over instance size.

Every trial's seed is derived from ``(base_seed, topology, n, trial)``
alone, and rows are sorted canonically before aggregation, so a sweep's
output does not depend on how many workers ran it. Quartiles use linear
interpolation between order statistics (numpy's default percentile rule).
"""

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .instances import InstanceSpec
from .rng import derive_seed
from .runner import RunConfig, run_until_stable

CSV_HEADER = ["topology", "n", "epsilon", "delta", "trial", "seed", "steps",
              "censored", "final_potential", "wall_ms"]
SUMMARY_HEADER = ["topology", "n", "trials", "censored", "mean", "median", "q1", "q3",
                  "min", "max", "normalized_mean"]
FIG2_SIZES = (8, 16, 24, 32, 40, 48, 56, 64)
SWEEP_TOPOLOGIES = ("path", "dumbbell-reduced", "dumbbell-full", "complete-random")


class CensoredDataError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    topology: str
    sizes: tuple = FIG2_SIZES
    trials: int = 100
    epsilon: float = 100.0
    delta: float = 1.0
    base_seed: int = 0
    parallelism: int = 1
    max_steps: int = 10**9
    dimension: int = 1

    def __post_init__(self):
        if self.topology not in SWEEP_TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}; choose from {SWEEP_TOPOLOGIES}")
        if not self.sizes:
            raise ValueError("sizes must be non-empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if not self.epsilon > 0 or not self.delta > 0:
            raise ValueError("epsilon and delta must be positive")
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        for n in self.sizes:
            # fail before any work starts
            self.instance_spec(n, 0)

    def trial_seed(self, n, trial):
        return derive_seed(self.base_seed, self.topology, n, trial)

    def instance_spec(self, n, seed):
        return InstanceSpec(self.topology, n, dimension=self.dimension,
                            epsilon=self.epsilon, seed=seed)


@dataclass(frozen=True)
class TrialRow:
    topology: str
    n: int
    epsilon: float
    delta: float
    trial: int
    seed: int
    steps: int
    censored: bool
    final_potential: float
    wall_ms: float = 0.0

    @property
    def key(self):
        return (self.topology, self.n, self.trial)


@dataclass(frozen=True)
class CellStats:
    topology: str
    n: int
    trials: int
    censored: int
    mean: float
    median: float
    q1: float
    q3: float
    min: int
    max: int
    normalized_mean: float

    @classmethod
    def from_rows(cls, rows):
        steps = np.array([r.steps for r in rows], dtype=np.float64)
        n = rows[0].n
        q1, med, q3 = np.percentile(steps, [25, 50, 75])
        mean = float(steps.mean())
        return cls(
            topology=rows[0].topology, n=n, trials=len(rows),
            censored=sum(r.censored for r in rows),
            mean=mean, median=float(med), q1=float(q1), q3=float(q3),
            min=int(steps.min()), max=int(steps.max()),
            normalized_mean=mean / n**3,
        )


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: r.key)

    def cells(self):
        groups = {}
        for r in self.rows:
            groups.setdefault((r.topology, r.n), []).append(r)
        return [CellStats.from_rows(groups[k]) for k in sorted(groups)]

    def cell(self, topology, n):
        for c in self.cells():
            if (c.topology, c.n) == (topology, n):
                return c
        raise KeyError((topology, n))

    @property
    def censored_count(self):
        return sum(r.censored for r in self.rows)


def _run_trial(args):
    config, n, trial = args
    seed = config.trial_seed(n, trial)
    state = config.instance_spec(n, seed).build()
    t0 = time.perf_counter()
    report = run_until_stable(state, RunConfig(delta=config.delta, max_steps=config.max_steps, seed=seed))
    wall_ms = (time.perf_counter() - t0) * 1e3
    return TrialRow(config.topology, n, config.epsilon, config.delta, trial, seed,
                    report.steps, report.censored, report.final_potential, round(wall_ms, 3))


def run_sweep(config, progress=None):
    tasks = [(config, n, t) for n in config.sizes for t in range(config.trials)]
    if config.parallelism == 1:
        rows = []
        for task in tasks:
            rows.append(_run_trial(task))
            if progress:
                progress(rows[-1])
    else:
        with ProcessPoolExecutor(max_workers=config.parallelism) as pool:
            rows = []
            for row in pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (8 * config.parallelism))):
                rows.append(row)
                if progress:
                    progress(row)
    return SweepResult(rows)


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    r_squared: float
    prefactor: float
    sizes: tuple


def fit_power_law(sizes, values):
    """Least-squares line through ``(log n, log value)``."""
    x = np.log(np.asarray(sizes, dtype=np.float64))
    y = np.log(np.asarray(values, dtype=np.float64))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), r2, math.exp(intercept), tuple(int(s) for s in sizes))


def fit_scaling_exponent(result, topology=None):
    """Slope of log(mean steps) against log(n), using cell means."""
    cells = result.cells()
    if topology is None:
        topologies = {c.topology for c in cells}
        if len(topologies) != 1:
            raise ValueError(f"result holds topologies {sorted(topologies)}; pick one")
        topology = topologies.pop()
    cells = [c for c in cells if c.topology == topology]
    if len(cells) < 3:
        raise ValueError(f"need at least 3 sizes to fit, got {len(cells)}")
    bad = [c.n for c in cells if c.censored]
    if bad:
        raise CensoredDataError(f"censored trials at n={bad}; refusing to fit a biased exponent")
    return fit_power_law([c.n for c in cells], [c.mean for c in cells])


# -- CSV -----------------------------------------------------------------


def _fmt(x):
    return repr(float(x))


def dumps_csv(result, include_wall=True):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in result.rows:
        w.writerow([r.topology, r.n, _fmt(r.epsilon), _fmt(r.delta), r.trial, r.seed, r.steps,
                    int(r.censored), _fmt(r.final_potential), _fmt(r.wall_ms) if include_wall else ""])
    cells = result.cells()
    if cells:
        buf.write("# " + ",".join(SUMMARY_HEADER) + "\n")
        for c in cells:
            vals = [c.topology, c.n, c.trials, c.censored, _fmt(c.mean), _fmt(c.median),
                    _fmt(c.q1), _fmt(c.q3), c.min, c.max, _fmt(c.normalized_mean)]
            buf.write("# " + ",".join(map(str, vals)) + "\n")
    return buf.getvalue()


def export_csv(result, path, include_wall=True):
    path = Path(path)
    try:
        path.write_text(dumps_csv(result, include_wall), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write results CSV {path}: {exc}") from exc
    return path


def loads_csv(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        rows.append(TrialRow(
            topology=rec["topology"], n=int(rec["n"]), epsilon=float(rec["epsilon"]),
            delta=float(rec["delta"]), trial=int(rec["trial"]), seed=int(rec["seed"]),
            steps=int(rec["steps"]), censored=rec["censored"] == "1",
            final_potential=float(rec["final_potential"]),
            wall_ms=float(rec["wall_ms"]) if rec["wall_ms"] else 0.0,
        ))
    return SweepResult(rows)


def import_csv(path):
    path = Path(path)
    try:
        return loads_csv(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OSError(f"cannot read results CSV {path}: {exc}") from exc


def strip_wall_column(text):
    """CSV text with the ``wall_ms`` values blanked, for determinism comparisons."""
    out = []
    for ln in text.splitlines(keepends=True):
        if ln.startswith("#") or ln.startswith("topology,"):
            out.append(ln)
        else:
            out.append(ln[: ln.rstrip("\n").rfind(",") + 1] + "\n")
    return "".join(out)
