"""Analytic floating-point operation counts for gOMP.

Exact per-iteration counts (selection, least squares via the recycled QR
recursion with explicit ``(R'R)^{-1}`` maintenance, residual update) are
kept apart from the closed-form approximation ``2Smn + (2N^2 + N) S^2 m``.
The two are reported side by side and never mixed.

All counts are integers; every formula below is integral for integer inputs.
"""

from __future__ import annotations

from dataclasses import dataclass


def selection_flops(big_n: int, m: int, n: int) -> int:
    """Correlation ``Phi' r`` plus partial sort for the ``N`` largest."""
    return (2 * m - 1 + big_n) * n - big_n * (big_n + 1) // 2


def ls_flop_parts(big_n: int, k: int, m: int) -> dict[str, int]:
    """Cost of the ``k``-th least-squares step, split by sub-computation.

    Keys: ``qr`` (new Q and R blocks), ``qty`` (new entries of ``Q'y``),
    ``rtqty`` (``R'Q'y``), ``inverse`` (``(R'R)^{-1}`` block update) and
    ``apply`` (multiplying it into ``R'Q'y``).
    """
    N = big_n
    return {
        "qr": 4 * N * N * m * k - 2 * m * N * N + 3 * m * N - N * N * k + N * (N - 1) // 2,
        "qty": N * (2 * m - 1),
        "rtqty": 2 * N * N * k - N * N,
        "inverse": 2 * N**3 * k * k - 4 * N**3 * k + 3 * N**3 + N * (3 * N + 1) // 2,
        "apply": 4 * N * N * k - 2 * N * N,
    }


def ls_flops(big_n: int, k: int, m: int) -> int:
    N = big_n
    return (4 * N * N * k * m + (-2 * N * N + 5 * N) * m + 2 * N**3 * k * k
            + (-4 * N**3 + 5 * N * N) * k + 3 * N**3 - N * N - N)


def residual_flops(big_n: int, k: int, m: int) -> int:
    return 2 * big_n * k * m


def approx_total_flops(big_n: int, iterations: int, m: int, n: int) -> int:
    N, S = big_n, iterations
    return 2 * S * m * n + (2 * N * N + N) * S * S * m


@dataclass(frozen=True)
class FlopBreakdown:
    big_n: int
    m: int
    n: int
    iterations: int
    selection: tuple[int, ...]
    estimation: tuple[int, ...]
    residual_update: tuple[int, ...]
    approx_total: int

    @property
    def per_iteration(self) -> tuple[int, ...]:
        return tuple(a + b + c for a, b, c in
                     zip(self.selection, self.estimation, self.residual_update))

    @property
    def total(self) -> int:
        return sum(self.per_iteration)

    def as_dict(self) -> dict:
        return {
            "N": self.big_n, "m": self.m, "n": self.n, "S": self.iterations,
            "selection": list(self.selection),
            "estimation": list(self.estimation),
            "residual_update": list(self.residual_update),
            "per_iteration": list(self.per_iteration),
            "total_exact": self.total,
            "approx_total": self.approx_total,
        }


def flop_model(big_n: int, m: int, n: int, iterations: int) -> FlopBreakdown:
    """Flop breakdown of a gOMP run that stopped after ``iterations`` steps."""
    if big_n < 1 or m < 1 or n < 1 or iterations < 0:
        raise ValueError("flop_model needs N, m, n >= 1 and iterations >= 0")
    ks = range(1, iterations + 1)
    sel = selection_flops(big_n, m, n)
    return FlopBreakdown(
        big_n, m, n, iterations,
        selection=tuple(sel for _ in ks),
        estimation=tuple(ls_flops(big_n, k, m) for k in ks),
        residual_update=tuple(residual_flops(big_n, k, m) for k in ks),
        approx_total=approx_total_flops(big_n, iterations, m, n),
    )


def cosamp_flops(m: int, n: int, sparsity_k: int, iterations: int) -> int:
    """Rough CoSaMP count: proxy, 2K-selection, fresh LS on 3K columns, prune, residual.

    Nothing is recycled between iterations, so the least-squares term is a
    full Gram-Schmidt factorization (``2 m s^2``) plus back-substitution.
    """
    K = sparsity_k
    s = min(3 * K, m, n)
    per_iter = ((2 * m - 1) * n                       # proxy Phi' r
                + 2 * K * n - K * (2 * K + 1)         # 2K largest
                + 2 * m * s * s + s * (2 * m - 1) + s * s  # QR, Q'y, back-substitution
                + K * s - K * (K + 1) // 2            # prune to K
                + 2 * K * m)                          # residual
    return per_iter * iterations
