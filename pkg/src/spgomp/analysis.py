"""Restricted isometry constants by enumeration, recovery-condition thresholds,
and numerical checks of the per-iteration correlation bounds behind them.

``delta_K`` is computed exactly: every size-``K`` column subset is visited and
its Gram matrix diagonalized. This is only feasible for small ``n``, which is
the point -- the result is an oracle, not an estimate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .flops import FlopBreakdown, flop_model  # noqa: F401  (re-exported)
from .recovery import RecoveryConfig, SparseSignal, gomp_recover

MAX_SUPPORTS = 10**6
_CHUNK = 1 << 16


class EnumerationTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class RipEstimate:
    order: int
    delta: float
    argmax_support: tuple[int, ...]


def _gram_defect(gram_blocks: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(gram_blocks)
    return np.maximum(w[..., -1] - 1.0, 1.0 - w[..., 0])


def support_defect(phi, support: Sequence[int]) -> float:
    """``max(lambda_max - 1, 1 - lambda_min)`` of the Gram matrix on ``support``."""
    sub = np.asarray(phi, dtype=float)[:, list(support)]
    return float(_gram_defect(sub.T @ sub))


def rip_constant_bruteforce(phi, order_k: int, *,
                            max_supports: int = MAX_SUPPORTS) -> RipEstimate:
    """Exact isometry constant of order ``order_k``.

    Raises
    ------
    EnumerationTooLargeError
        If ``C(n, order_k)`` exceeds ``max_supports``.
    """
    phi = np.asarray(phi, dtype=float)
    m, n = phi.shape
    if not 1 <= order_k <= min(m, n):
        raise ValueError(f"order must lie in [1, min(m, n)] = [1, {min(m, n)}], got {order_k}")
    count = math.comb(n, order_k)
    if count > max_supports:
        raise EnumerationTooLargeError(
            f"C({n}, {order_k}) = {count} supports exceeds the cap of {max_supports}")

    gram = phi.T @ phi
    combos = itertools.combinations(range(n), order_k)
    best, best_support = -math.inf, ()
    while True:
        flat = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, _CHUNK)),
                           dtype=np.intp)
        if flat.size == 0:
            break
        supports = flat.reshape(-1, order_k)
        blocks = gram[supports[:, :, None], supports[:, None, :]]
        defects = _gram_defect(blocks)
        i = int(np.argmax(defects))
        if defects[i] > best:
            best, best_support = float(defects[i]), tuple(int(j) for j in supports[i])
    return RipEstimate(order_k, max(best, 0.0), best_support)


class RipTable:
    """Lazily brute-forced ``delta_K`` values for one matrix."""

    def __init__(self, phi, max_supports: int = MAX_SUPPORTS):
        self.phi = np.asarray(phi, dtype=float)
        self.max_supports = max_supports
        self._cache: dict[int, float] = {}

    def __getitem__(self, order: int) -> float:
        if order <= 0:
            return 0.0
        if order not in self._cache:
            est = rip_constant_bruteforce(self.phi, order, max_supports=self.max_supports)
            self._cache[order] = est.delta
        return self._cache[order]


# Sufficient-condition thresholds.

def bound_first_iteration(big_n: int, sparsity_k: int) -> float:
    """Threshold on ``delta_{K+N}`` for a correct index in the first iteration."""
    return math.sqrt(big_n) / (math.sqrt(sparsity_k) + math.sqrt(big_n))


def bound_noninitial(big_n: int, sparsity_k: int) -> float:
    """Threshold on ``delta_{NK}`` for success after ``k`` successful iterations."""
    return math.sqrt(big_n) / (math.sqrt(sparsity_k) + 2 * math.sqrt(big_n))


def bound_overall(big_n: int, sparsity_k: int) -> tuple[int, float]:
    """``(RIP order, threshold)`` guaranteeing exact gOMP recovery."""
    if sparsity_k == 1:
        return 2, 0.5
    return big_n * sparsity_k, bound_noninitial(big_n, sparsity_k)


def bound_omp(sparsity_k: int) -> float:
    """Threshold on ``delta_{K+1}`` for exact OMP recovery."""
    return 1.0 / (math.sqrt(sparsity_k) + 1.0)


def verify_monotonicity(phi, orders: Sequence[int], *,
                        max_supports: int = MAX_SUPPORTS) -> bool:
    table = RipTable(phi, max_supports)
    ordered = sorted(set(orders))
    deltas = [table[k] for k in ordered]
    return all(a <= b + 1e-12 for a, b in zip(deltas, deltas[1:]))


@dataclass(frozen=True)
class BoundReport:
    """Observed vs. bounded correlations for the state after iteration ``k``.

    ``hypothesis_ok`` is false when some iteration up to ``k`` picked no index
    of the true support; ``vacuous`` is true when ``delta_{Nk} >= 1`` so the
    bounds carry no information. Only reports with ``counted`` set say
    anything about the bounds.
    """

    k: int
    correct_count: int
    alpha_n_observed: float
    alpha_n_bound: float
    beta_1_observed: float
    beta_1_bound: float
    deltas_used: dict
    holds: tuple[bool, bool]
    hypothesis_ok: bool
    vacuous: bool

    @property
    def counted(self) -> bool:
        return self.hypothesis_ok and not self.vacuous


def verify_iteration_bounds(phi, x_true: SparseSignal, cfg: RecoveryConfig, *,
                            rip: Optional[RipTable] = None) -> list[BoundReport]:
    """Run gOMP on ``y = phi @ x`` and check the ``alpha_N`` / ``beta_1`` bounds.

    One report per iteration ``1 <= k < K`` whose selected set does not yet
    contain the true support. The residual at each state is recomputed from
    scratch with a dense least-squares solve.
    """
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[1]
    N, K = cfg.big_n, x_true.sparsity
    rip = rip if rip is not None else RipTable(phi)
    x = x_true.to_dense()
    y = phi @ x
    result = gomp_recover(phi, y, cfg)
    T = set(x_true.support)

    reports = []
    chosen: list[int] = []
    hypothesis_ok = True
    for trace in result.traces:
        k = trace.k
        chosen.extend(trace.selected)
        hypothesis_ok = hypothesis_ok and bool(T.intersection(trace.selected))
        lam = set(chosen)
        if T <= lam or k >= K:
            break

        coef = np.linalg.lstsq(phi[:, chosen], y, rcond=None)[0]
        r = y - phi[:, chosen] @ coef
        corr = np.abs(phi.T @ r)

        l = len(T & lam)
        missing = sorted(T - lam)
        incorrect = sorted(set(range(n)) - lam - T)
        if len(incorrect) < N:
            break
        alpha_obs = float(np.sort(corr[incorrect])[::-1][N - 1])
        beta_obs = float(corr[missing].max())
        x_rest = float(np.linalg.norm(x[missing]))

        orders = {"N+K-l": N + K - l, "N+Nk": N + N * k, "Nk+K-l": N * k + K - l,
                  "Nk": N * k, "K-l": K - l}
        d = {name: rip[order] for name, order in orders.items()}
        vacuous = d["Nk"] >= 1.0
        if vacuous:
            alpha_bound, beta_bound = math.inf, -math.inf
        else:
            gap = 1.0 - d["Nk"]
            alpha_bound = (d["N+K-l"] + d["N+Nk"] * d["Nk+K-l"] / gap) * x_rest / math.sqrt(N)
            beta_bound = ((1.0 - d["K-l"] - (1.0 + d["Nk"]) / gap**2 * d["Nk+K-l"] ** 2)
                          * x_rest / math.sqrt(K - l))
        reports.append(BoundReport(
            k=k, correct_count=l,
            alpha_n_observed=alpha_obs, alpha_n_bound=alpha_bound,
            beta_1_observed=beta_obs, beta_1_bound=beta_bound,
            deltas_used={orders[name]: val for name, val in d.items()},
            holds=(alpha_obs <= alpha_bound, beta_obs >= beta_bound),
            hypothesis_ok=hypothesis_ok, vacuous=vacuous,
        ))
    return reports
