"""Gaussian elimination over the rationals, over floats and over jets.

Matrices are plain lists of rows.  Over jets, pivots are chosen among
entries whose constant term is nonzero (units of the local ring), which is
correct as long as the rank does not drop along the curve; a rank drop is
detected and reported.
"""
from __future__ import annotations

from typing import List, Sequence, Tuple

from ..errors import InconsistentSystem, RankDropAlongCurve
from .scalars import FLOAT_PIVOT_TOL, is_zero

Matrix = List[list]


def _unit_value(x) -> float:
    """Size used to rank pivot candidates (0 means not a unit)."""
    c = x.lead() if hasattr(x, "lead") else x
    if isinstance(c, float):
        return abs(c) if abs(c) > FLOAT_PIVOT_TOL else 0.0
    return 1.0 if c != 0 else 0.0


def _entry_is_zero(x) -> bool:
    if hasattr(x, "is_zero"):
        return x.is_zero()
    return is_zero(x)


def rref(M: Sequence[Sequence], cols: Sequence[int] | None = None) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns.

    Only the columns in ``cols`` (default: all) are used as pivot columns.
    Float entries use partial pivoting with tolerance ``FLOAT_PIVOT_TOL``.
    """
    A = [list(r) for r in M]
    if not A:
        return A, []
    nrows, ncols = len(A), len(A[0])
    cols = range(ncols) if cols is None else cols
    pivots: List[int] = []
    r = 0
    for c in cols:
        if r >= nrows:
            break
        best, best_val = None, 0.0
        for i in range(r, nrows):
            v = _unit_value(A[i][c])
            if v > best_val:
                best, best_val = i, v
                lead = A[i][c].lead() if hasattr(A[i][c], "lead") else A[i][c]
                if not isinstance(lead, float):
                    break
        if best is None:
            continue
        A[r], A[best] = A[best], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(nrows):
            if i != r and not _entry_is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: Sequence[Sequence]) -> int:
    return len(rref(M)[1])


def kernel(M: Sequence[Sequence]) -> Matrix:
    """Basis of the right kernel, one vector per free column."""
    if not M:
        return []
    ncols = len(M[0])
    R, pivots = rref(M)
    _check_rank_constant(R, pivots)
    sample = _sample_entry(M)
    zero, one = sample - sample, sample - sample + 1
    basis = []
    for f in (c for c in range(ncols) if c not in pivots):
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(A: Sequence[Sequence], b: Sequence):
    """One solution of ``A x = b`` (free variables set to zero)."""
    if not A:
        return []
    ncols = len(A[0])
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, pivots = rref(aug, cols=range(ncols))
    for row in R[len(pivots):]:
        if not _entry_is_zero(row[-1]):
            raise InconsistentSystem("linear system has no solution")
    sample = _sample_entry(A)
    zero = sample - sample
    x = [zero] * ncols
    for row, p in zip(R, pivots):
        x[p] = row[-1]
    return x


def _sample_entry(M):
    for row in M:
        for x in row:
            return x
    raise ValueError("empty matrix")


def _check_rank_constant(R, pivots):
    for row in R[len(pivots):]:
        for x in row:
            if hasattr(x, "is_negligible") and not x.is_negligible():
                raise RankDropAlongCurve("rank of a jet matrix is not constant near 0")


def rat_linalg(M: Sequence[Sequence], task: str, rhs: Sequence | None = None):
    """Dispatch ``rank | kernel | solve | rref`` by name."""
    if task == "rank":
        return rank(M)
    if task == "kernel":
        return kernel(M)
    if task == "solve":
        return solve(M, rhs)
    if task == "rref":
        return rref(M)
    raise ValueError(f"unknown task {task!r}")


# -- small dense helpers -------------------------------------------------------

def transpose(M: Sequence[Sequence]) -> Matrix:
    return [list(c) for c in zip(*M)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = transpose(B)
    return [[_dot(r, c) for c in Bt] for r in A]


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    return [_dot(r, v) for r in A]


def _dot(u, v):
    it = iter(zip(u, v))
    a, b = next(it)
    s = a * b
    for a, b in it:
        s = s + a * b
    return s


def dot(u: Sequence, v: Sequence):
    return _dot(u, v)


def bilinear(u: Sequence, Omega: Sequence[Sequence], v: Sequence):
    """``u^T Omega v``."""
    return _dot(u, matvec(Omega, v))


def identity(n: int, one) -> Matrix:
    zero = one - one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]
