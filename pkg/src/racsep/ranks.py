"""Matrix rank oracles: exact fraction-free elimination and SVD-based.

The exact oracle runs Bareiss (division-deferred) elimination with full
pivoting over arbitrary-precision integers, so rationals with wildly
different magnitudes (entries spanning thousands of binary digits) are
handled without loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import FieldMismatchError, InvalidInputError, ShapeError
from .tensor import EXACT, FLOAT, DenseTensor

DEFAULT_REL_TOL = 1e-12


@dataclass(frozen=True)
class RankReport:
    rank: int
    method: str  # "exact" | "svd"
    singular_values: tuple = field(default=())
    tolerance: float = 0.0


def _as_matrix(m):
    if isinstance(m, DenseTensor):
        if m.order != 2:
            raise ShapeError(f"rank expects an order-2 tensor, got order {m.order}")
        return m.data, m.field
    arr = np.asarray(m)
    if arr.ndim != 2:
        raise ShapeError("rank expects a matrix")
    return arr, (EXACT if arr.dtype == object else FLOAT)


def rank_exact(m) -> RankReport:
    """Exact rank by fraction-free Gaussian elimination with full pivoting."""
    arr, fld = _as_matrix(m)
    if fld != EXACT:
        raise FieldMismatchError("rank_exact requires the exact scalar field")
    rows = []
    for row in arr:
        fracs = [Fraction(v) for v in row]
        den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
        rows.append([int(f * den) for f in fracs])
    n, ncols = len(rows), len(rows[0]) if rows else 0

    rank = 0
    prev = 1
    for k in range(min(n, ncols)):
        # full pivoting: any nonzero entry in the trailing block will do
        piv = None
        for i in range(k, n):
            for j in range(k, ncols):
                if rows[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        pi, pj = piv
        if pi != k:
            rows[k], rows[pi] = rows[pi], rows[k]
        if pj != k:
            for row in rows:
                row[k], row[pj] = row[pj], row[k]
        pivot = rows[k][k]
        for i in range(k + 1, n):
            rik = rows[i][k]
            for j in range(k + 1, ncols):
                rows[i][j] = (rows[i][j] * pivot - rik * rows[k][j]) // prev
            rows[i][k] = 0
        prev = pivot
        rank += 1
    return RankReport(rank=rank, method="exact")


def rank_numeric(m, rel_tol: float = DEFAULT_REL_TOL) -> RankReport:
    """Numeric rank: count singular values above rel_tol * max(dims) * sigma_max."""
    arr, fld = _as_matrix(m)
    if fld == EXACT:
        arr = arr.astype(np.float64)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("matrix has NaN/Inf entries")
    sv = np.linalg.svd(arr, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return RankReport(rank=0, method="svd", singular_values=tuple(sv),
                          tolerance=rel_tol)
    cutoff = rel_tol * max(arr.shape) * sv[0]
    rank = int(np.count_nonzero(sv > cutoff))
    return RankReport(rank=rank, method="svd", singular_values=tuple(sv),
                      tolerance=rel_tol)


def multiset_coefficient(n: int, k: int) -> int:
    """Number of size-k multisets over n symbols: C(n+k-1, k)."""
    if n < 0 or k < 0:
        raise InvalidInputError("multiset_coefficient needs non-negative args")
    if k == 0:
        return 1
    if n == 0:
        return 0
    return math.comb(n + k - 1, k)
