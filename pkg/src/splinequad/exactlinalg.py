"""Dense Gaussian elimination over exact scalars.

Just enough linear algebra for moment fitting and rank checks; matrices
here are tiny (tens of rows). Pivoting picks the entry of largest
absolute value, which is also well defined for rationals.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple


class InconsistentSystemError(ValueError):
    """A linear system admits no solution."""

    def __init__(self, row: int, residual):
        self.row = row
        self.residual = residual
        super().__init__(f"inconsistent constraint in row {row}: residual {residual}")


def _eliminate(matrix, rhs):
    m = [list(row) for row in matrix]
    b = list(rhs) if rhs is not None else None
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        best = None
        best_abs = 0
        for i in range(r, nrows):
            v = abs(m[i][c])
            if v > best_abs:
                best, best_abs = i, v
        if best is None:
            continue
        m[r], m[best] = m[best], m[r]
        if b is not None:
            b[r], b[best] = b[best], b[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        if b is not None:
            b[r] = b[r] * inv
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
                if b is not None:
                    b[i] = b[i] - f * b[r]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, b, pivots


def matrix_rank(matrix) -> int:
    if not matrix:
        return 0
    _, _, pivots = _eliminate(matrix, None)
    return len(pivots)


def solve_linear(matrix, rhs) -> Tuple[List, int]:
    """Particular solution of ``matrix @ x = rhs`` with free variables zero.

    Returns ``(solution, rank)``. Raises :class:`InconsistentSystemError`
    when the system has no solution (exact test; intended for rational
    scalars).
    """
    m, b, pivots = _eliminate(matrix, rhs)
    rank = len(pivots)
    for i in range(rank, len(m)):
        if b[i] != 0:
            raise InconsistentSystemError(i, b[i])
    ncols = len(matrix[0]) if matrix else 0
    x = [0] * ncols
    for row, col in enumerate(pivots):
        x[col] = b[row]
    return x, rank


class RankTracker:
    """Incrementally accepts vectors that enlarge the spanned space."""

    def __init__(self):
        self._rows: List[tuple] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def try_add(self, vector: Sequence) -> bool:
        v = list(vector)
        for row in self._rows:
            lead = next(i for i, x in enumerate(row) if x != 0)
            if v[lead] != 0:
                f = v[lead]
                v = [a - f * b for a, b in zip(v, row)]
        for i, x in enumerate(v):
            if x != 0:
                inv = 1 / x
                self._rows.append(tuple(a * inv for a in v))
                return True
        return False
