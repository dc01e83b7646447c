"""Exact linear algebra over the field Q(i).

Dense Gauss-Jordan elimination for the small systems (commutants, kernel
computations, ansatz solves) and a sparse incremental eliminator for the
large-but-sparse biderivation system.  No tolerances anywhere: rank
decisions are exact.
"""

from __future__ import annotations

from typing import Sequence

from .scalars import GR_ONE, GR_ZERO, GaussRational

Row = list[GaussRational]
Matrix = list[Row]


def rref(matrix: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form; returns (rref_rows, pivot_columns)."""
    rows = [list(r) for r in matrix]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if not rows[i][c].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = GR_ONE / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(matrix: Matrix) -> int:
    return len(rref(matrix)[1])


def nullspace(matrix: Matrix, ncols: int | None = None) -> list[Row]:
    """Basis of the right kernel; each vector has 1 in its free column."""
    if not matrix:
        if ncols is None:
            return []
        return [
            [GR_ONE if i == j else GR_ZERO for i in range(ncols)]
            for j in range(ncols)
        ]
    ncols = len(matrix[0])
    red, pivots = rref(matrix)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [GR_ZERO] * ncols
        v[fc] = GR_ONE
        for r_i, pc in enumerate(pivots):
            v[pc] = -red[r_i][fc]
        basis.append(v)
    return basis


def solve(matrix: Matrix, rhs: Row) -> Row | None:
    """One solution of A x = b, or None when the system is inconsistent."""
    if not matrix:
        return [] if all(x.is_zero() for x in rhs) else None
    ncols = len(matrix[0])
    aug = [list(r) + [b] for r, b in zip(matrix, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [GR_ZERO] * ncols
    for r_i, pc in enumerate(pivots):
        x[pc] = red[r_i][ncols]
    return x


def in_span(vectors: Sequence[Row], v: Row) -> bool:
    """Exact membership of v in span(vectors)."""
    if all(x.is_zero() for x in v):
        return True
    if not vectors:
        return False
    base = [list(w) for w in vectors]
    return rank(base) == rank(base + [list(v)])


def span_equal(a: Sequence[Row], b: Sequence[Row]) -> bool:
    ra = rank([list(v) for v in a])
    rb = rank([list(v) for v in b])
    rab = rank([list(v) for v in a] + [list(v) for v in b])
    return ra == rb == rab


def independent_subset(vectors: Sequence[Row]) -> list[int]:
    """Indices of a maximal linearly independent subset, greedily from the front."""
    chosen: list[Row] = []
    idx = []
    for i, v in enumerate(vectors):
        if not in_span(chosen, v):
            chosen.append(list(v))
            idx.append(i)
    return idx


def coordinates_in_basis(basis: Sequence[Row], v: Row) -> Row | None:
    """Coefficients x with sum_j x_j basis_j = v, or None if v not in span."""
    if not basis:
        return [] if all(c.is_zero() for c in v) else None
    cols = len(v)
    matrix = [[basis[j][i] for j in range(len(basis))] for i in range(cols)]
    return solve(matrix, list(v))


class SparseEliminator:
    """Incremental exact elimination for sparse homogeneous systems.

    Rows arrive as {column: coefficient} dicts; each is reduced against the
    pivot rows seen so far and kept (normalized) if independent.  After all
    rows are in, `kernel_basis` reconstructs the nullspace.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivot_rows: dict[int, dict[int, GaussRational]] = {}

    def add_row(self, row: dict[int, GaussRational]) -> None:
        row = {c: v for c, v in row.items() if not v.is_zero()}
        while row:
            lead = min(row)
            pivot = self.pivot_rows.get(lead)
            if pivot is None:
                inv = GR_ONE / row[lead]
                self.pivot_rows[lead] = {c: v * inv for c, v in row.items()}
                return
            f = row[lead]
            for c, v in pivot.items():
                nv = row.get(c, GR_ZERO) - f * v
                if nv.is_zero():
                    row.pop(c, None)
                else:
                    row[c] = nv

    def rank(self) -> int:
        return len(self.pivot_rows)

    def kernel_basis(self) -> list[dict[int, GaussRational]]:
        """Nullspace vectors as sparse dicts, one per free column."""
        # Back-substitute to full reduced form first.
        cols_order = sorted(self.pivot_rows, reverse=True)
        for lead in cols_order:
            row = self.pivot_rows[lead]
            for other_lead, other in list(self.pivot_rows.items()):
                if other_lead >= lead:
                    continue
                f = other.get(lead)
                if f is None or f.is_zero():
                    continue
                for c, v in row.items():
                    nv = other.get(c, GR_ZERO) - f * v
                    if nv.is_zero():
                        other.pop(c, None)
                    else:
                        other[c] = nv
        pivot_cols = set(self.pivot_rows)
        basis = []
        for fc in range(self.ncols):
            if fc in pivot_cols:
                continue
            vec = {fc: GR_ONE}
            for lead, row in self.pivot_rows.items():
                coeff = row.get(fc)
                if coeff is not None and not coeff.is_zero():
                    vec[lead] = -coeff
            basis.append(vec)
        return basis
