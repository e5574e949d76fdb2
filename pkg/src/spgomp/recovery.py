"""Greedy sparse recovery: gOMP (OMP as ``N = 1``) and a CoSaMP baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .flops import cosamp_flops, flop_model
from .linalg import QrState, RankDeficientError, ls_solve, qr_append_columns, residual

DEFAULT_REL_EPS = 1e-6


class DimensionMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class SparseSignal:
    """Length-``n`` vector given by its support and the nonzero values there."""

    n: int
    support: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        values = np.asarray(self.values, dtype=float).ravel()
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)
        if not support:
            raise ValueError("support must be nonempty")
        if len(set(support)) != len(support):
            raise ValueError("support indices must be distinct")
        if min(support) < 0 or max(support) >= self.n:
            raise ValueError("support index out of range")
        if values.shape != (len(support),):
            raise ValueError("one value per support index required")
        if np.any(values == 0) or not np.all(np.isfinite(values)):
            raise ValueError("values must be finite and nonzero")
        values.setflags(write=False)

    @property
    def sparsity(self) -> int:
        return len(self.support)

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.n)
        x[list(self.support)] = self.values
        return x


@dataclass(frozen=True)
class RecoveryConfig:
    """gOMP settings.

    ``epsilon`` is an absolute residual-norm threshold; when it is ``None``
    the threshold is ``rel_eps * ||y||``. ``max_iters`` defaults to
    ``min(K, m // N)``.
    """

    big_n: int
    sparsity_k: int
    epsilon: Optional[float] = None
    max_iters: Optional[int] = None
    rel_eps: float = DEFAULT_REL_EPS

    def __post_init__(self):
        if self.big_n < 1 or self.sparsity_k < 1:
            raise ValueError("N and K must be at least 1")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.max_iters is not None and self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")

    def threshold(self, y_norm: float) -> float:
        return self.epsilon if self.epsilon is not None else self.rel_eps * y_norm

    def iteration_cap(self, m: int) -> int:
        if self.max_iters is not None:
            return self.max_iters
        return min(self.sparsity_k, m // self.big_n)


@dataclass(frozen=True)
class IterationTrace:
    k: int
    selected: tuple[int, ...]
    residual_norm: float
    support_size: int


@dataclass(frozen=True)
class RecoveryResult:
    support_estimate: tuple[int, ...]
    x_hat: np.ndarray
    traces: tuple[IterationTrace, ...]
    converged: bool
    modeled_flops: int
    rank_deficient: bool = False
    notes: tuple[str, ...] = field(default=())

    @property
    def iterations(self) -> int:
        return len(self.traces)

    @property
    def residual_norm(self) -> float:
        return self.traces[-1].residual_norm if self.traces else math.nan


def select_top_n(correlations, excluded: Iterable[int], big_n: int) -> list[int]:
    """Indices of the ``big_n`` largest ``|correlations|`` outside ``excluded``.

    Ties go to the lower index.
    """
    mag = np.abs(np.asarray(correlations, dtype=float))
    excluded = list(excluded)
    if big_n > mag.size - len(set(excluded)):
        raise ValueError("not enough candidate indices")
    if excluded:
        mag = mag.copy()
        mag[excluded] = -1.0
    order = np.argsort(-mag, kind="stable")
    return [int(i) for i in order[:big_n]]


def _check_inputs(phi, y):
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    if phi.ndim != 2:
        raise DimensionMismatchError(f"phi must be 2-D, got shape {phi.shape}")
    if y.ndim != 1 or y.shape[0] != phi.shape[0]:
        raise DimensionMismatchError(
            f"y has shape {y.shape}, expected ({phi.shape[0]},)")
    return phi, y


def gomp_recover(phi, y, cfg: RecoveryConfig) -> RecoveryResult:
    """Generalized OMP: add the ``N`` best-correlated columns per iteration.

    The loop runs while ``||r|| > epsilon`` and fewer than the configured
    number of iterations have been made. If the new columns are dependent on
    the selected ones the loop stops early with ``converged=False``; the
    returned estimate is the one from the last complete iteration.
    """
    phi, y = _check_inputs(phi, y)
    m, n = phi.shape
    N = cfg.big_n
    eps = cfg.threshold(float(np.linalg.norm(y)))
    cap = min(cfg.iteration_cap(m), n // N)

    state = QrState.empty(m)
    coeffs = np.empty(0)
    r = y.copy()
    r_norm = float(np.linalg.norm(r))
    traces = []
    rank_deficient = False

    while r_norm > eps and len(traces) < cap:
        selected = select_top_n(phi.T @ r, state.col_ids, N)
        try:
            state = qr_append_columns(state, phi, selected)
        except RankDeficientError:
            rank_deficient = True
            break
        coeffs = ls_solve(state, y)
        r = residual(phi, state, coeffs, y)
        r_norm = float(np.linalg.norm(r))
        traces.append(IterationTrace(len(traces) + 1, tuple(selected), r_norm, state.p))

    x_hat = np.zeros(n)
    x_hat[list(state.col_ids)] = coeffs
    return RecoveryResult(
        support_estimate=state.col_ids,
        x_hat=x_hat,
        traces=tuple(traces),
        converged=r_norm <= eps,
        modeled_flops=flop_model(N, m, n, len(traces)).total,
        rank_deficient=rank_deficient,
    )


def omp_recover(phi, y, sparsity_k: int, *, epsilon: Optional[float] = None,
                max_iters: Optional[int] = None) -> RecoveryResult:
    return gomp_recover(phi, y, RecoveryConfig(1, sparsity_k, epsilon, max_iters))


def cosamp_recover(phi, y, sparsity_k: int, max_iters: Optional[int] = None,
                   epsilon: Optional[float] = None) -> RecoveryResult:
    """CoSaMP with the usual 2K-merge / K-prune sizes.

    Halts on ``||r|| <= epsilon``, after ``max_iters`` iterations (default
    ``K``), or as soon as an iteration fails to decrease the residual norm,
    in which case that iteration's estimate is discarded.
    """
    phi, y = _check_inputs(phi, y)
    m, n = phi.shape
    K = sparsity_k
    if K < 1:
        raise ValueError("sparsity_k must be at least 1")
    if max_iters is None:
        max_iters = K
    notes = []
    if 3 * K > m:
        notes.append(f"3K = {3 * K} exceeds m = {m}; merged least-squares may be underdetermined")
    eps = epsilon if epsilon is not None else DEFAULT_REL_EPS * float(np.linalg.norm(y))

    x = np.zeros(n)
    support: list[int] = []
    r = y.copy()
    r_norm = float(np.linalg.norm(r))
    traces = []

    while r_norm > eps and len(traces) < max_iters:
        proxy_ids = select_top_n(phi.T @ r, (), min(2 * K, n))
        merged = sorted(set(proxy_ids) | set(support))
        b = np.zeros(n)
        b[merged] = np.linalg.lstsq(phi[:, merged], y, rcond=None)[0]
        new_support = sorted(select_top_n(b, (), min(K, n)))
        x_new = np.zeros(n)
        x_new[new_support] = b[new_support]
        r_new = y - phi @ x_new
        new_norm = float(np.linalg.norm(r_new))
        if new_norm >= r_norm:
            break
        x, support, r, r_norm = x_new, new_support, r_new, new_norm
        traces.append(IterationTrace(len(traces) + 1, tuple(proxy_ids), r_norm, len(support)))

    return RecoveryResult(
        support_estimate=tuple(support),
        x_hat=x,
        traces=tuple(traces),
        converged=r_norm <= eps,
        modeled_flops=cosamp_flops(m, n, K, len(traces)),
        notes=tuple(notes),
    )


def exact_recovery(x_true, result, tol: float = 1e-4) -> bool:
    """``||x_hat - x|| / ||x|| <= tol``. Accepts signals/results or plain arrays."""
    x = x_true.to_dense() if isinstance(x_true, SparseSignal) else np.asarray(x_true, dtype=float)
    x_hat = result.x_hat if isinstance(result, RecoveryResult) else np.asarray(result, dtype=float)
    if x.shape != x_hat.shape:
        raise DimensionMismatchError(f"length mismatch: {x.shape} vs {x_hat.shape}")
    x_norm = np.linalg.norm(x)
    err = np.linalg.norm(x_hat - x)
    if x_norm == 0:
        return bool(err <= tol)
    return bool(err / x_norm <= tol)
