"""Command-line entry point: ``cama generate|evaluate|validate|plot``.

Exit codes: 0 success, 2 usage error, 3 data error (unreadable or malformed
files), 4 metric or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .errors import CamaError, DataFormatError
from .metrics import METRICS, evaluate
from .plot import render_svg
from .simulation import DEFAULT_GRID_POINTS, ROUNDING_RULES
from .strategies import ALL_STRATEGIES
from .synth import SynthConfig, generate

# mirrors gains.ORACLE_MODES; the oracle stack (and its JIT compiler) is
# imported only by ``evaluate``
ORACLE_MODES = ("evolving", "frozen")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_CONFIG = 4


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cama", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic cohort CSV")
    d = SynthConfig()
    g.add_argument("--n", type=int, default=d.n)
    g.add_argument("--k", type=int, default=d.k)
    g.add_argument("--prevalence", type=float, default=d.prevalence)
    g.add_argument("--signal-avail", type=float, default=d.signal_avail)
    g.add_argument("--signal-acquired", type=float, default=d.signal_acquired)
    g.add_argument("--imp-fidelity", type=float, default=d.imp_fidelity)
    g.add_argument("--noise", type=float, default=d.noise_scale, help="noise scale")
    g.add_argument("--imp-noise", type=float, default=None,
                   help="imputation noise scale (defaults to --noise)")
    g.add_argument("--seed", type=int, default=d.seed)
    g.add_argument("--out", required=True, type=Path)

    e = sub.add_parser("evaluate", help="sweep strategies over cohort files")
    e.add_argument("cohorts", nargs="+", type=Path, help="cohort CSVs; task name = file stem")
    e.add_argument("--strategies", default="all",
                   help=f"comma list or 'all' ({','.join(ALL_STRATEGIES)})")
    e.add_argument("--metrics", default=",".join(METRICS))
    e.add_argument("--grid-size", type=int, default=DEFAULT_GRID_POINTS)
    e.add_argument("--rounding", choices=ROUNDING_RULES, default="half_away")
    e.add_argument("--runs", type=int, default=5)
    e.add_argument("--seed", type=int, default=0, help="base seed; run r uses seed + r")
    e.add_argument("--no-filter", action="store_true", help="keep negative-gain tasks")
    e.add_argument("--oracle-mode", choices=ORACLE_MODES, default="evolving")
    e.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $CAMA_THREADS or CPU count)")
    e.add_argument("--curves", type=Path, required=True, help="curves CSV output")
    e.add_argument("--report", type=Path, required=True, help="gain report CSV output")

    v = sub.add_parser("validate", help="check a cohort CSV")
    v.add_argument("cohort", type=Path)

    pl = sub.add_parser("plot", help="render a curves CSV as SVG")
    pl.add_argument("curves", type=Path)
    pl.add_argument("--out", required=True, type=Path)
    return p


def cmd_generate(args) -> int:
    config = SynthConfig(
        n=args.n,
        k=args.k,
        prevalence=args.prevalence,
        signal_avail=args.signal_avail,
        signal_acquired=args.signal_acquired,
        imp_fidelity=args.imp_fidelity,
        noise_scale=args.noise,
        seed=args.seed,
        imp_noise=args.imp_noise,
    )
    cohort = generate(config)
    io.write_cohort(cohort, args.out)
    print(f"wrote {args.out}")
    print(f"N={cohort.n} K={cohort.k} prevalence={cohort.n_pos / cohort.n:.4f}")
    for metric in METRICS:
        try:
            pre = evaluate(metric, cohort.labels, cohort.s_avail)
            post = evaluate(metric, cohort.labels, cohort.s_acquired)
        except CamaError as exc:
            print(f"{metric}: undefined ({exc})")
            continue
        print(f"{metric}: M_pre={pre:.6f} M_post={post:.6f}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .runner import RunConfig, run_evaluation

    strategies = ALL_STRATEGIES if args.strategies == "all" else _csv_list(args.strategies)
    config = RunConfig(
        strategies=strategies,
        metrics=_csv_list(args.metrics),
        grid_points=args.grid_size,
        rounding=args.rounding,
        runs=args.runs,
        base_seed=args.seed,
        filter_negative=not args.no_filter,
        oracle_mode=args.oracle_mode,
    )
    tasks = {}
    for path in args.cohorts:
        if path.stem in tasks:
            raise DataFormatError(f"two cohort files share the task name {path.stem!r}")
        try:
            tasks[path.stem] = io.read_cohort(path)
        except DataFormatError as exc:
            raise DataFormatError(f"{path}: {exc}") from None
    result = run_evaluation(tasks, config, threads=args.threads)
    for line in result.drop_log:
        print(line, file=sys.stderr)
    io.write_curves(result.curves, args.curves)
    io.write_report(result.report, args.report)
    print(f"{'strategy':<14}{'metric':<7}{'task':<16}{'G_full':>9}{'SEM':>9}  runs")
    for r in result.report:
        print(f"{r.strategy:<14}{r.metric:<7}{r.task:<16}{r.mean:>9.4f}{r.sem:>9.4f}  {r.n_runs}")
    return EXIT_OK


def cmd_validate(args) -> int:
    issues, cohort = io.validate_cohort_file(args.cohort)
    for issue in issues:
        print(issue)
    if cohort is None:
        return EXIT_DATA
    print(f"OK ({cohort.n} samples, {cohort.n_pos} positive, K={cohort.k})")
    return EXIT_OK


def cmd_plot(args) -> int:
    rows = io.read_curves(args.curves)
    args.out.write_text(render_svg(rows), encoding="utf-8")
    print(f"wrote {args.out}")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "evaluate": cmd_evaluate,
    "validate": cmd_validate,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_DATA
    except CamaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
