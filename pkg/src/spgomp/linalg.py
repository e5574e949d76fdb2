"""Dense primitives, seeded Gaussian ensembles and the incremental QR core.

The QR factorization of the selected columns is grown a block at a time.
Previously computed columns of ``Q`` and the leading block of ``R`` are
copied verbatim into the enlarged state, so every least-squares solve after
the first one only pays for the newly admitted columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

# ||q_hat|| <= RANK_TOL * ||phi_j|| means phi_j lies in the span of Q.
RANK_TOL = 1e-12


class RankDeficientError(ArithmeticError):
    """A column offered to the QR state is (numerically) dependent on it."""


def make_rng(seed: int) -> np.random.Generator:
    """Philox4x64 counter-based generator keyed by ``seed``.

    Gaussian variates come from numpy's ziggurat sampler
    (``Generator.standard_normal``); together these are the frozen RNG
    contract for every seeded object in the package.
    """
    return np.random.Generator(np.random.Philox(seed))


def gaussian_sensing_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """Return an ``m x n`` matrix with i.i.d. ``N(0, 1/m)`` entries.

    Identical ``(m, n, seed)`` triples give bit-identical matrices.
    """
    if m < 1 or n < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m}x{n}")
    return make_rng(seed).standard_normal((m, n)) / np.sqrt(m)


@dataclass(frozen=True)
class QrState:
    """Thin QR factorization ``source[:, col_ids] = q @ r``.

    ``q`` is ``m x p`` with orthonormal columns and ``r`` is ``p x p`` upper
    triangular with a strictly positive diagonal. Both arrays are read-only.
    """

    q: np.ndarray
    r: np.ndarray
    col_ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.q.ndim != 2 or self.r.shape != (self.q.shape[1], self.q.shape[1]):
            raise ValueError("inconsistent QR block shapes")
        if len(self.col_ids) != self.q.shape[1]:
            raise ValueError("col_ids length must equal the number of columns of q")
        self.q.setflags(write=False)
        self.r.setflags(write=False)

    @classmethod
    def empty(cls, m: int) -> "QrState":
        return cls(np.empty((m, 0)), np.empty((0, 0)), ())

    @property
    def m(self) -> int:
        return self.q.shape[0]

    @property
    def p(self) -> int:
        return self.q.shape[1]


def qr_append_columns(state: QrState, source: np.ndarray,
                      new_ids: Sequence[int]) -> QrState:
    """Admit ``source[:, new_ids]`` into the factorization, in order.

    Each new column is orthogonalized against all earlier ones with two
    Gram-Schmidt sweeps, which keeps ``Q`` orthonormal to working precision
    even when ``p`` approaches ``m``. The input state is left untouched; the
    first ``state.p`` columns of ``Q`` and the leading block of ``R`` are
    carried over bit for bit.

    Raises
    ------
    RankDeficientError
        If a new column is numerically in the span of the admitted ones, or
        the enlarged factorization would have more columns than rows.
    """
    source = np.asarray(source, dtype=float)
    m, p = state.m, state.p
    if source.ndim != 2 or source.shape[0] != m:
        raise ValueError(f"source must have {m} rows, got shape {source.shape}")
    new_ids = [int(i) for i in new_ids]
    if len(set(new_ids)) != len(new_ids) or set(new_ids) & set(state.col_ids):
        raise ValueError("new_ids must be distinct and not already admitted")
    if any(i < 0 or i >= source.shape[1] for i in new_ids):
        raise IndexError("column index out of range")
    p_new = p + len(new_ids)
    if p_new > m:
        raise RankDeficientError(f"{p_new} columns cannot be independent in R^{m}")

    q = np.empty((m, p_new))
    q[:, :p] = state.q
    r = np.zeros((p_new, p_new))
    r[:p, :p] = state.r

    for j, idx in enumerate(new_ids):
        col = p + j
        v = source[:, idx].copy()
        col_norm = np.linalg.norm(v)
        basis = q[:, :col]
        for _ in range(2):
            coef = basis.T @ v
            v -= basis @ coef
            r[:col, col] += coef
        v_norm = np.linalg.norm(v)
        if v_norm <= RANK_TOL * col_norm or v_norm == 0.0:
            raise RankDeficientError(f"column {idx} is dependent on the admitted columns")
        q[:, col] = v / v_norm
        r[col, col] = v_norm

    return QrState(q, r, state.col_ids + tuple(new_ids))


def ls_solve(state: QrState, y: np.ndarray) -> np.ndarray:
    """Least-squares coefficients over the admitted columns: ``R^{-1} Q'y``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (state.m,):
        raise ValueError(f"y must have length {state.m}, got shape {y.shape}")
    if state.p == 0:
        raise ValueError("no columns admitted")
    return solve_triangular(state.r, state.q.T @ y, lower=False, check_finite=False)


def residual(source: np.ndarray, state: QrState, coeffs: np.ndarray,
             y: np.ndarray) -> np.ndarray:
    """``y - source[:, col_ids] @ coeffs``; ``y`` itself for an empty state."""
    y = np.asarray(y, dtype=float)
    if state.p == 0:
        return y.copy()
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (state.p,):
        raise ValueError(f"expected {state.p} coefficients, got shape {coeffs.shape}")
    return y - np.asarray(source, dtype=float)[:, list(state.col_ids)] @ coeffs
