"""``spgomp`` command line: recover, bench, rip, bound, flops.

Exit codes: 0 success, 2 bad arguments, 3 dimension/format error,
4 enumeration too large.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analysis, bench
from .analysis import EnumerationTooLargeError
from .flops import flop_model
from .matrix_io import MatrixFormatError, read_matrix_csv, read_vector_csv
from .recovery import DimensionMismatchError, RecoveryConfig, cosamp_recover, gomp_recover

EXIT_BAD_ARGS = 2
EXIT_FORMAT = 3
EXIT_ENUMERATION = 4


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _cmd_recover(args) -> int:
    phi = read_matrix_csv(args.phi)
    y = read_vector_csv(args.y)
    if args.alg == "cosamp":
        result = cosamp_recover(phi, y, args.K, epsilon=args.eps)
    else:
        big_n = 1 if args.alg == "omp" else args.N
        result = gomp_recover(phi, y, RecoveryConfig(big_n, args.K, epsilon=args.eps))
    payload = {
        "algorithm": args.alg,
        "support": sorted(result.support_estimate),
        "x_hat": result.x_hat.tolist(),
        "iterations": result.iterations,
        "converged": result.converged,
        "residual_norm": result.residual_norm if result.traces else float(np.linalg.norm(y)),
        "modeled_flops": result.modeled_flops,
    }
    print("support:", " ".join(map(str, payload["support"])))
    print("x_hat:", " ".join(repr(v) for v in payload["x_hat"]))
    print("iterations:", payload["iterations"])
    print("converged:", str(payload["converged"]).lower())
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_bench(args) -> int:
    if args.kmin > args.kmax:
        raise ValueError("--kmin must not exceed --kmax")
    cfg = bench.BenchConfig(
        m=args.m, n=args.n, big_n=args.N,
        k_values=tuple(range(args.kmin, args.kmax + 1, args.kstep)),
        trials=args.trials, signal_kind=args.signal,
        algorithms=tuple(a.strip() for a in args.algs.split(",") if a.strip()),
        master_seed=args.seed, tol=args.tol,
    )
    rows = bench.run_sweep(cfg, workers=args.workers)
    bench.emit(rows, args.format, args.out)
    return 0


def _cmd_rip(args) -> int:
    phi = read_matrix_csv(args.phi)
    est = analysis.rip_constant_bruteforce(phi, args.K)
    print(f"delta_{est.order} = {est.delta!r}")
    print("argmax_support:", " ".join(map(str, est.argmax_support)))
    return 0


def _cmd_bound(args) -> int:
    N, K = args.N, args.K
    order, thr = analysis.bound_overall(N, K)
    print(f"first_iteration: delta_{K + N} < {analysis.bound_first_iteration(N, K)!r}")
    print(f"noninitial:      delta_{N * K} < {analysis.bound_noninitial(N, K)!r}")
    print(f"overall:         delta_{order} < {thr!r}")
    print(f"omp:             delta_{K + 1} < {analysis.bound_omp(K)!r}")
    return 0


def _cmd_flops(args) -> int:
    fb = flop_model(args.N, args.m, args.n, args.S)
    print(json.dumps(fb.as_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spgomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recover", help="recover one sparse vector from CSV inputs")
    p.add_argument("--phi", required=True, help="sensing matrix CSV")
    p.add_argument("--y", required=True, help="measurement vector CSV (one row or column)")
    p.add_argument("--alg", choices=("gomp", "omp", "cosamp"), default="gomp")
    p.add_argument("--N", type=_positive_int, default=1, help="indices per gOMP iteration")
    p.add_argument("--K", type=_positive_int, required=True, help="sparsity")
    p.add_argument("--eps", type=float, default=None,
                   help="absolute residual threshold (default 1e-6 * ||y||)")
    p.add_argument("--out", help="write a JSON result here")
    p.set_defaults(func=_cmd_recover)

    p = sub.add_parser("bench", help="Monte Carlo exact-recovery sweep")
    p.add_argument("--m", type=_positive_int, default=128)
    p.add_argument("--n", type=_positive_int, default=256)
    p.add_argument("--N", type=_positive_int, default=5)
    p.add_argument("--kmin", type=_positive_int, default=10)
    p.add_argument("--kmax", type=_positive_int, default=45)
    p.add_argument("--kstep", type=_positive_int, default=5)
    p.add_argument("--trials", type=_positive_int, default=200)
    p.add_argument("--signal", choices=bench.SIGNAL_KINDS, default="gaussian")
    p.add_argument("--algs", default="gomp,omp,cosamp", help="comma-separated subset of gomp,omp,cosamp")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-4, help="relative error counted as exact")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("rip", help="exact isometry constant by enumeration")
    p.add_argument("--phi", required=True)
    p.add_argument("--K", type=_positive_int, required=True)
    p.set_defaults(func=_cmd_rip)

    p = sub.add_parser("bound", help="recovery-condition thresholds")
    p.add_argument("--N", type=_positive_int, required=True)
    p.add_argument("--K", type=_positive_int, required=True)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("flops", help="modeled flop counts")
    p.add_argument("--N", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--S", type=int, required=True, help="number of iterations")
    p.set_defaults(func=_cmd_flops)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EnumerationTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENUMERATION
    except (MatrixFormatError, DimensionMismatchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
