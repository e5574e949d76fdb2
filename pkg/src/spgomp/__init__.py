"""Generalized orthogonal matching pursuit with an incremental QR core."""

from .linalg import (QrState, RankDeficientError, gaussian_sensing_matrix, ls_solve,
                     make_rng, qr_append_columns, residual)
from .recovery import (DimensionMismatchError, IterationTrace, RecoveryConfig,
                       RecoveryResult, SparseSignal, cosamp_recover, exact_recovery,
                       gomp_recover, omp_recover, select_top_n)

__version__ = "0.1.0"
