"""Monte Carlo recovery-frequency sweeps.

Every trial draws a fresh sensing matrix and signal. The randomness of a
trial is a pure function of ``(master_seed, algorithm, K, trial_index)``:
those four integers (the algorithm mapped through ``ALGORITHM_IDS``) seed a
``numpy.random.SeedSequence``, whose first two 64-bit output words key the
Philox streams for the matrix and for the signal. Trials can therefore run in
any order or in parallel without changing a single result.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .linalg import gaussian_sensing_matrix, make_rng
from .recovery import (RecoveryConfig, SparseSignal, cosamp_recover, exact_recovery,
                       gomp_recover)

ALGORITHM_IDS = {"gomp": 0, "omp": 1, "cosamp": 2}
SIGNAL_KINDS = ("gaussian", "pam")
PAM_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])
CSV_HEADER = ("algorithm", "K", "success_frequency", "mean_iterations",
              "mean_modeled_flops", "mean_wall_seconds")


@dataclass(frozen=True)
class BenchConfig:
    m: int = 128
    n: int = 256
    k_values: tuple[int, ...] = tuple(range(10, 46, 5))
    big_n: int = 5
    trials: int = 200
    signal_kind: str = "gaussian"
    algorithms: tuple[str, ...] = ("gomp", "omp", "cosamp")
    master_seed: int = 1
    tol: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.m < 1 or self.n < 1 or self.big_n < 1:
            raise ValueError("m, n and N must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.k_values or any(k < 1 or k > self.m or k > self.n for k in self.k_values):
            raise ValueError("every K must satisfy 1 <= K <= min(m, n)")
        if self.signal_kind not in SIGNAL_KINDS:
            raise ValueError(f"signal_kind must be one of {SIGNAL_KINDS}")
        unknown = set(self.algorithms) - set(ALGORITHM_IDS)
        if unknown or not self.algorithms:
            raise ValueError(f"unknown algorithms: {sorted(unknown)}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")


@dataclass(frozen=True)
class SummaryRow:
    algorithm: str
    K: int
    success_frequency: float
    mean_iterations: float
    mean_modeled_flops: float
    mean_wall_seconds: float
    successes: Optional[int] = field(default=None, compare=False)
    trials: Optional[int] = field(default=None, compare=False)


class TrialOutcome(NamedTuple):
    success: bool
    iterations: int
    modeled_flops: int
    wall_seconds: float


def generate_signal(n: int, sparsity_k: int, kind: str, rng: np.random.Generator) -> SparseSignal:
    """Random ``K``-sparse signal with a uniformly drawn support.

    ``gaussian`` values are standard normal; ``pam`` values are uniform on
    ``{-3, -1, 1, 3}``.
    """
    if not 1 <= sparsity_k <= n:
        raise ValueError("need 1 <= K <= n")
    support = np.sort(rng.choice(n, size=sparsity_k, replace=False))
    if kind == "gaussian":
        values = rng.standard_normal(sparsity_k)
        while np.any(values == 0):
            values[values == 0] = rng.standard_normal(int(np.sum(values == 0)))
    elif kind == "pam":
        values = rng.choice(PAM_LEVELS, size=sparsity_k)
    else:
        raise ValueError(f"unknown signal kind {kind!r}")
    return SparseSignal(n, tuple(support.tolist()), values)


def trial_seeds(master_seed: int, algorithm: str, k: int, trial_index: int) -> tuple[int, int]:
    """(matrix seed, signal seed) for one trial."""
    ss = np.random.SeedSequence([master_seed, ALGORITHM_IDS[algorithm], k, trial_index])
    a, b = ss.generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def _recover(algorithm: str, phi, y, k: int, big_n: int):
    if algorithm == "gomp":
        return gomp_recover(phi, y, RecoveryConfig(big_n, k))
    if algorithm == "omp":
        return gomp_recover(phi, y, RecoveryConfig(1, k))
    if algorithm == "cosamp":
        return cosamp_recover(phi, y, k, max_iters=k)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def run_trial(cfg: BenchConfig, algorithm: str, k: int, trial_index: int,
              phi: Optional[np.ndarray] = None) -> TrialOutcome:
    """One recovery attempt; ``phi`` replaces the random matrix when given."""
    phi_seed, signal_seed = trial_seeds(cfg.master_seed, algorithm, k, trial_index)
    if phi is None:
        phi = gaussian_sensing_matrix(cfg.m, cfg.n, phi_seed)
    x = generate_signal(phi.shape[1], k, cfg.signal_kind, make_rng(signal_seed))
    y = phi @ x.to_dense()
    start = time.perf_counter()
    result = _recover(algorithm, phi, y, k, cfg.big_n)
    elapsed = time.perf_counter() - start
    return TrialOutcome(exact_recovery(x, result, cfg.tol), result.iterations,
                        result.modeled_flops, elapsed)


def _run_cell(args) -> SummaryRow:
    cfg, algorithm, k = args
    outcomes = [run_trial(cfg, algorithm, k, t) for t in range(cfg.trials)]
    return summarize(algorithm, k, outcomes)


def summarize(algorithm: str, k: int, outcomes: Sequence[TrialOutcome]) -> SummaryRow:
    trials = len(outcomes)
    successes = sum(o.success for o in outcomes)
    return SummaryRow(
        algorithm=algorithm, K=k,
        success_frequency=float(Fraction(successes, trials)),
        mean_iterations=math.fsum(o.iterations for o in outcomes) / trials,
        mean_modeled_flops=math.fsum(o.modeled_flops for o in outcomes) / trials,
        mean_wall_seconds=math.fsum(o.wall_seconds for o in outcomes) / trials,
        successes=successes, trials=trials,
    )


def run_sweep(cfg: BenchConfig, workers: int = 1) -> list[SummaryRow]:
    """One summary row per (algorithm, K), sorted by (algorithm, K)."""
    cells = sorted((alg, k) for alg in set(cfg.algorithms) for k in set(cfg.k_values))
    jobs = [(cfg, alg, k) for alg, k in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell, jobs))
    return [_run_cell(job) for job in jobs]


def critical_sparsity(rows: Sequence[SummaryRow], algorithm: str,
                      threshold: float = 0.95) -> Optional[int]:
    """Largest K at which ``algorithm`` succeeds with frequency >= ``threshold``."""
    ks = [r.K for r in rows if r.algorithm == algorithm and r.success_frequency >= threshold]
    return max(ks) if ks else None


def _row_fields(row: SummaryRow) -> list[str]:
    return [row.algorithm, str(row.K), f"{row.success_frequency:.6f}",
            repr(float(row.mean_iterations)), repr(float(row.mean_modeled_flops)),
            repr(float(row.mean_wall_seconds))]


def format_csv(rows: Sequence[SummaryRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(_row_fields(row))
    return buf.getvalue()


def format_json(rows: Sequence[SummaryRow]) -> str:
    records = [{"algorithm": r.algorithm, "K": r.K,
                "success_frequency": round(r.success_frequency, 6),
                "mean_iterations": r.mean_iterations,
                "mean_modeled_flops": r.mean_modeled_flops,
                "mean_wall_seconds": r.mean_wall_seconds} for r in rows]
    return json.dumps(records, indent=2) + "\n"


def emit(rows: Sequence[SummaryRow], fmt: str, path) -> None:
    """Write rows as ``csv`` or ``json`` to ``path`` (``"-"`` for stdout)."""
    if fmt == "csv":
        text = format_csv(rows)
    elif fmt == "json":
        text = format_json(rows)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def parse_csv(text: str) -> list[SummaryRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected header {header}")
    return [SummaryRow(rec[0], int(rec[1]), *(float(v) for v in rec[2:])) for rec in reader if rec]


def parse_json(text: str) -> list[SummaryRow]:
    return [SummaryRow(d["algorithm"], int(d["K"]), float(d["success_frequency"]),
                       float(d["mean_iterations"]), float(d["mean_modeled_flops"]),
                       float(d["mean_wall_seconds"])) for d in json.loads(text)]
