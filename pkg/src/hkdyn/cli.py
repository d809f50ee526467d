"""Command-line entry point: ``hkdyn {gen,run,sweep,verify}``."""

import argparse
import json
import sys

from .experiments import (
    FIG2_SIZES,
    SWEEP_TOPOLOGIES,
    CensoredDataError,
    SweepConfig,
    dumps_csv,
    export_csv,
    fit_scaling_exponent,
    run_sweep,
)
from .instances import (
    InstanceFormatError,
    InstanceValidationError,
    dumbbell_mhat,
    gen_complete_random,
    gen_dumbbell,
    gen_path,
    load_instance,
    save_instance,
)
from .potential import potential
from .runner import RunConfig, run_until_stable, write_trace
from .verify import DEFAULT_ITERS, SUITES, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CENSORED = 3

VERIFY_HELP = """\
suites:
  lemma1  projection along an influence edge keeps its length, the
          neighbourhoods, and never increases an agent's movement
  lemma2  1-D cut bound; weighted movement >= 2 x longest influence edge
  lemma4  per-activation potential drop >= (|N|+1)|m|^2, equal when the
          influence network is unchanged; potential never increases
  lemma5  expected one-step drop >= 2 lambda^2 / (n |E_t|)
  thm2    complete graph, influence edges <= eps/2 => components are cliques
  thm5    Dumbbell closed-form expected drop for n in {16, 32, 64}
  all     every suite above
"""


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _sizes(text):
    """``8,16,32`` or an inclusive range ``8:64:8``."""
    try:
        if ":" in text:
            lo, hi, step = (int(x) for x in text.split(":"))
            sizes = list(range(lo, hi + 1, step))
        else:
            sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}")
    return sizes


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hkdyn",
        description="Asynchronous Hegselmann-Krause dynamics on social networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("topology", choices=["path", "dumbbell", "complete-random"])
    gen.add_argument("--n", type=_positive_int, required=True)
    gen.add_argument("--epsilon", type=_positive_float, default=100.0)
    gen.add_argument("--seed", type=_nonneg_int)
    gen.add_argument("--d", type=_positive_int, default=1, help="dimension (complete-random)")
    gen.add_argument("--spread", type=_positive_float, help="position range (complete-random; default epsilon)")
    gen.add_argument("--full-social", action="store_true",
                     help="dumbbell: keep the full social network instead of the initial influence edges")
    gen.add_argument("-o", "--output", help="instance file to write")

    run = sub.add_parser("run", help="run one instance to delta-stability")
    run.add_argument("-i", "--input", required=True)
    run.add_argument("--delta", type=_positive_float, required=True)
    run.add_argument("--seed", type=_nonneg_int, default=0)
    run.add_argument("--max-steps", type=_nonneg_int, default=10**9)
    run.add_argument("--trace", help="CSV file for (step, phi) samples")
    run.add_argument("--trace-every", type=_positive_int, default=1000)
    run.add_argument("--first-moves", action="store_true", help="record each agent's first move")

    sweep = sub.add_parser("sweep", help="Monte-Carlo convergence-time sweep")
    sweep.add_argument("--topology", choices=SWEEP_TOPOLOGIES, required=True)
    sweep.add_argument("--sizes", type=_sizes, default=list(FIG2_SIZES),
                       help="comma list or lo:hi:step (default 8:64:8)")
    sweep.add_argument("--trials", type=_positive_int, default=100)
    sweep.add_argument("--epsilon", type=_positive_float, default=100.0)
    sweep.add_argument("--delta", type=_positive_float, default=1.0)
    sweep.add_argument("--base-seed", type=_nonneg_int, default=0)
    sweep.add_argument("--jobs", type=_positive_int, default=1)
    sweep.add_argument("--max-steps", type=_nonneg_int, default=10**9)
    sweep.add_argument("-o", "--output", help="results CSV (default: standard output)")

    ver = sub.add_parser("verify", help="randomised property checks",
                         epilog=VERIFY_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    ver.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    ver.add_argument("--fuzz-iters", type=_positive_int,
                     help="iterations per suite (defaults: " +
                     ", ".join(f"{k}={v}" for k, v in DEFAULT_ITERS.items()) + ")")
    ver.add_argument("--seed", type=_nonneg_int, default=0)
    return parser


def cmd_gen(args):
    if args.topology == "path":
        state = gen_path(args.n, args.epsilon)
    elif args.topology == "dumbbell":
        state = gen_dumbbell(args.n, args.epsilon, full_social=args.full_social)
    else:
        if args.seed is None:
            raise ValueError("complete-random needs --seed")
        spread = args.epsilon if args.spread is None else args.spread
        state = gen_complete_random(args.n, args.d, args.epsilon, spread, args.seed)
    if args.output:
        save_instance(state, args.output)
    parts = [f"n={state.n}", f"|E|={state.graph.m}",
             f"|E0|={state.summary().active_edge_count}", f"phi0={potential(state)!r}"]
    if args.topology == "dumbbell":
        parts.append(f"mhat={dumbbell_mhat(args.n, args.epsilon)!r}")
    if args.output:
        parts.append(f"file={args.output}")
    print(" ".join(parts))
    return EXIT_OK


def cmd_run(args):
    state = load_instance(args.input)
    config = RunConfig(
        delta=args.delta, max_steps=args.max_steps, seed=args.seed,
        record_potential_every=args.trace_every if args.trace else None,
        record_first_moves=args.first_moves,
    )
    report = run_until_stable(state, config)
    if args.trace:
        write_trace(report, args.trace)
    out = report.to_dict()
    out.pop("potential_trace")
    print(json.dumps(out, sort_keys=True))
    return EXIT_CENSORED if report.censored else EXIT_OK


def cmd_sweep(args):
    config = SweepConfig(
        topology=args.topology, sizes=tuple(args.sizes), trials=args.trials,
        epsilon=args.epsilon, delta=args.delta, base_seed=args.base_seed,
        parallelism=args.jobs, max_steps=args.max_steps,
    )
    result = run_sweep(config)
    if args.output:
        export_csv(result, args.output)
    else:
        sys.stdout.write(dumps_csv(result))
    for c in result.cells():
        print(f"# n={c.n} mean={c.mean:.1f} median={c.median:.1f} "
              f"normalized_mean={c.normalized_mean:.4f} censored={c.censored}")
    if len(config.sizes) >= 3:
        try:
            fit = fit_scaling_exponent(result)
            print(f"# exponent={fit.exponent:.4f} r_squared={fit.r_squared:.4f}")
        except CensoredDataError as exc:
            print(f"# exponent not fitted: {exc}")
    if result.censored_count:
        print(f"# warning: {result.censored_count} censored trials", file=sys.stderr)
        return EXIT_CENSORED
    return EXIT_OK


def cmd_verify(args):
    names = SUITES if args.suite == "all" else (args.suite,)
    ok = True
    for name in names:
        res = run_suite(name, iters=args.fuzz_iters, seed=args.seed)
        print(res.line())
        ok = ok and res.passed
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ValueError, InstanceFormatError, InstanceValidationError, OSError) as exc:
        print(f"hkdyn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
