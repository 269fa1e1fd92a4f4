"""Command-line interface.

Subcommands: ``compute`` (point estimate), ``ci`` (jackknife confidence
interval), ``test`` (permutation independence test), ``screen`` (rank
features), ``bench`` (compare computation strategies on synthetic data).

Exit codes: 0 on success, 1 for data or computation errors (the error name
and coordinates go to stderr), 2 for usage errors.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, inference, metric
from .dataset import MISSING_POLICIES, TableSpec, load
from .exceptions import GiniCorrError

WORKERS_ENV = "GINICORR_WORKERS"

_BENCH_SIZES = (500, 1000, 2000, 4000)


def _default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _add_data_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("input table")
    group.add_argument("--data", required=True, help="path to the delimited data file")
    group.add_argument(
        "--target", required=True, help="label column, by name or 0-based index"
    )
    group.add_argument(
        "--features",
        help="comma-separated feature columns (names or indices); "
        "default: every numeric column except the target",
    )
    group.add_argument(
        "--missing",
        choices=MISSING_POLICIES,
        default="fail",
        help="policy for missing cells (default: fail)",
    )
    group.add_argument("--delimiter", default=",", help="field delimiter (default: ',')")
    group.add_argument(
        "--no-header", action="store_true", help="the file has no header row"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ginicorr",
        description="Categorical Gini correlation: estimation, confidence "
        "intervals, independence tests and feature screening.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="point estimate of the correlation")
    ci = sub.add_parser("ci", help="jackknife confidence interval")
    test = sub.add_parser("test", help="permutation test of independence")
    screen = sub.add_parser("screen", help="rank features by marginal correlation")
    bench = sub.add_parser("bench", help="time the computation strategies")

    for p in (compute, ci, test, screen):
        _add_data_options(p)
    for p in (compute, ci, test, screen, bench):
        p.add_argument("--alpha", type=float, default=1.0, help="distance exponent in (0, 2)")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    ci.add_argument("--level", type=float, default=0.95, help="confidence level in (0, 1)")
    test.add_argument(
        "-B", "--permutations", type=int, default=1000, help="number of permutation replicates"
    )
    test.add_argument("--seed", type=int, default=None, help="RNG seed (default: OS entropy)")
    test.add_argument(
        "--significance", type=float, default=0.05, help="rejection threshold for the p-value"
    )
    test.add_argument(
        "--workers",
        type=int,
        default=None,
        help=f"parallel workers (default: ${WORKERS_ENV} or all cores)",
    )
    screen.add_argument("--top", type=int, default=None, help="print only the top-k features")
    bench.add_argument(
        "--sizes",
        default=",".join(str(n) for n in _BENCH_SIZES),
        help="comma-separated sample sizes to benchmark",
    )
    bench.add_argument("--seed", type=int, default=0, help="seed for the synthetic data")
    return parser


def _validate(args, parser) -> None:
    if not 0.0 < args.alpha < 2.0:
        parser.error(f"--alpha must lie in (0, 2), got {args.alpha}")
    if getattr(args, "level", None) is not None and not 0.0 < args.level < 1.0:
        parser.error(f"--level must lie in (0, 1), got {args.level}")
    if getattr(args, "permutations", None) is not None and args.permutations < 1:
        parser.error(f"--permutations must be >= 1, got {args.permutations}")
    if getattr(args, "significance", None) is not None and not 0.0 < args.significance < 1.0:
        parser.error(f"--significance must lie in (0, 1), got {args.significance}")
    if getattr(args, "top", None) is not None and args.top < 1:
        parser.error(f"--top must be >= 1, got {args.top}")
    if getattr(args, "workers", None) is not None and args.workers < 1:
        parser.error(f"--workers must be >= 1, got {args.workers}")


def _table_spec(args) -> TableSpec:
    features = None
    if args.features:
        features = tuple(tok.strip() for tok in args.features.split(",") if tok.strip())
    return TableSpec(
        path=args.data,
        target=args.target,
        features=features,
        missing=args.missing,
        delimiter=args.delimiter,
        has_header=not args.no_header,
    )


def _emit(payload: dict | list) -> None:
    print(json.dumps(payload))


def _run_compute(args) -> int:
    table = load(_table_spec(args))
    est = metric.cgc(table.sample.data, table.sample.labels, alpha=args.alpha)
    if args.json:
        _emit(
            {
                "rho": est.rho,
                "uOverall": est.u_overall,
                "uWithin": est.u_within.tolist(),
                "pHat": est.proportions.tolist(),
                "alpha": est.alpha,
                "n": est.n,
                "d": est.d,
                "K": est.n_classes,
            }
        )
    else:
        if table.dropped_rows:
            print(f"Dropped rows: {table.dropped_rows}")
        print(f"Categorical Gini Correlation: {est.rho:.6f}")
    return 0


def _run_ci(args) -> int:
    table = load(_table_spec(args))
    result = inference.confidence_interval(
        table.sample.data, table.sample.labels, alpha=args.alpha, level=args.level
    )
    if args.json:
        _emit(
            {
                "estimate": result.estimate,
                "stderr": result.stderr,
                "level": result.level,
                "lower": result.lower,
                "upper": result.upper,
            }
        )
    else:
        if table.dropped_rows:
            print(f"Dropped rows: {table.dropped_rows}")
        print(f"Categorical Gini Correlation: {result.estimate:.6f}")
        print(f"Std. error: {result.stderr:.6f}")
        print(
            f"{result.level * 100:g}% confidence interval: "
            f"[{result.lower:.6f}, {result.upper:.6f}]"
        )
    return 0


def _run_test(args) -> int:
    table = load(_table_spec(args))
    workers = args.workers if args.workers is not None else _default_workers()
    result = inference.independence_test(
        table.sample.data,
        table.sample.labels,
        alpha=args.alpha,
        permutations=args.permutations,
        seed=args.seed,
        significance=args.significance,
        workers=workers,
    )
    if args.json:
        _emit(
            {
                "pValue": result.p_value,
                "statistic": result.statistic,
                "permutations": result.permutations,
                "rejected": result.rejected,
                "seed": result.seed,
                "significance": result.significance,
            }
        )
    else:
        if table.dropped_rows:
            print(f"Dropped rows: {table.dropped_rows}")
        print(f"P-value: {result.p_value:.4f}")
        if result.rejected:
            print("Reject null hypothesis.")
        else:
            print("Fail to reject null hypothesis.")
        print(f"Permutations: {result.permutations}")
        print(f"Seed: {result.seed}")
    return 0


def _run_screen(args) -> int:
    table = load(_table_spec(args))
    result = inference.screen_features(
        table.sample.data, table.sample.labels, alpha=args.alpha
    )
    ranking = result.ranking if args.top is None else result.top(args.top)
    if args.json:
        _emit(
            {
                "alpha": result.alpha,
                "ranking": [
                    {
                        "rank": rank,
                        "feature": table.feature_names[score.index],
                        "index": score.index,
                        "rho": None if score.degenerate else score.rho,
                        "degenerate": score.degenerate,
                    }
                    for rank, score in enumerate(ranking, start=1)
                ],
            }
        )
    else:
        if table.dropped_rows:
            print(f"Dropped rows: {table.dropped_rows}")
        width = max((len(table.feature_names[s.index]) for s in ranking), default=7)
        width = max(width, len("feature"))
        print(f"{'rank':>4}  {'feature':<{width}}  {'cgc':>10}")
        for rank, score in enumerate(ranking, start=1):
            value = "degenerate" if score.degenerate else f"{score.rho:10.6f}"
            print(f"{rank:>4}  {table.feature_names[score.index]:<{width}}  {value}")
    return 0


def _bench_data(n: int, rng: np.random.Generator):
    x = np.concatenate([rng.normal(0.0, 1.0, n // 2), rng.normal(1.0, 1.0, n - n // 2)])
    y = np.array(["a"] * (n // 2) + ["b"] * (n - n // 2), dtype=object)
    return x, y


def _run_bench(args) -> int:
    try:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    except ValueError:
        print("InvalidInput: --sizes must be a comma-separated list of integers", file=sys.stderr)
        return 2
    strategies = ["naive", "cached"]
    if args.alpha == 1.0:
        strategies.insert(1, "sorted")
    rng = np.random.default_rng(args.seed)
    records = []
    for n in sizes:
        x, y = _bench_data(n, rng)
        rhos = {}
        for strategy in strategies:
            start = time.perf_counter()
            est = metric.cgc(x, y, alpha=args.alpha, strategy=strategy)
            elapsed = time.perf_counter() - start
            rhos[strategy] = est.rho
            records.append(
                {"strategy": strategy, "n": n, "seconds": elapsed, "rho": est.rho}
            )
        spread = max(rhos.values()) - min(rhos.values())
        scale = max(abs(v) for v in rhos.values()) or 1.0
        if spread > 1e-10 * scale:
            print(
                f"error: strategies disagree at n={n} (spread {spread:.3e})",
                file=sys.stderr,
            )
            return 1
    if args.json:
        _emit(records)
    else:
        print(f"{'n':>7}  {'strategy':<10}  {'seconds':>12}  {'rho':>12}")
        for record in records:
            print(
                f"{record['n']:>7}  {record['strategy']:<10}  "
                f"{record['seconds']:>12.6f}  {record['rho']:>12.6f}"
            )
    return 0


_RUNNERS = {
    "compute": _run_compute,
    "ci": _run_ci,
    "test": _run_test,
    "screen": _run_screen,
    "bench": _run_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(args, parser)
    try:
        return _RUNNERS[args.command](args)
    except GiniCorrError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"InvalidInput: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
