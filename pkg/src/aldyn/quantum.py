"""Finite-level quantum systems on B(C^N).

Inner derivations and Heisenberg evolution, commutants by exact linear
solves, invariance of subalgebras under a Hamiltonian, the block split of
a block-diagonal dynamics into commuting inner derivations, and the
solver showing every bracket that is Leibniz in both slots is a central
multiple of the commutator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .linalg import SparseEliminator
from .matrices import Mat, full_matrix_basis
from .scalars import GR_I, GR_ONE, GR_ZERO, GaussRational

HERMITIAN_FLOAT_TOL = 1e-12


def commutator(a: Mat, b: Mat) -> Mat:
    """[a, b] = ab - ba."""
    return a @ b - b @ a


def _require_hermitian(h: Mat | np.ndarray):
    if isinstance(h, Mat):
        if h.is_hermitian():
            return
        h = h.to_numpy()  # float-sourced entries get the numeric tolerance
    if not np.allclose(h, h.conj().T, atol=HERMITIAN_FLOAT_TOL, rtol=0.0):
        raise ValueError("Hamiltonian must be Hermitian")


def heisenberg_derivative(a: Mat, h: Mat) -> Mat:
    """The Heisenberg equation right-hand side: -i [a, H]."""
    _require_hermitian(h)
    return commutator(a, h).scale(-GR_I)


def evolve(a: Mat | np.ndarray, h: Mat | np.ndarray, t: float) -> np.ndarray:
    """Heisenberg evolution a(t) = e^{i t H} a e^{-i t H} (floating point)."""
    _require_hermitian(h)
    hn = h.to_numpy() if isinstance(h, Mat) else np.asarray(h, dtype=complex)
    an = a.to_numpy() if isinstance(a, Mat) else np.asarray(a, dtype=complex)
    w, v = np.linalg.eigh(hn)
    phase = np.exp(1j * t * w)
    u = (v * phase) @ v.conj().T          # e^{itH}
    return u @ an @ u.conj().T


class MatrixSubspace:
    """A linear subspace of Mat_n with a verified independent basis."""

    __slots__ = ("n", "basis")

    def __init__(self, basis: Sequence[Mat], check_independent: bool = True):
        basis = list(basis)
        if not basis:
            raise ValueError("subspace needs at least one basis element")
        n = basis[0].n
        if any(b.n != n for b in basis):
            raise ValueError("mixed matrix sizes")
        if check_independent:
            vectors = [b.flatten() for b in basis]
            if linalg.rank(vectors) != len(basis):
                raise ValueError("basis matrices are linearly dependent")
        self.n = n
        self.basis = basis

    def dimension(self) -> int:
        return len(self.basis)

    def contains(self, m: Mat) -> bool:
        return linalg.in_span([b.flatten() for b in self.basis], m.flatten())

    def is_product_closed(self) -> bool:
        vectors = [b.flatten() for b in self.basis]
        return all(
            linalg.in_span(vectors, (x @ y).flatten())
            for x in self.basis
            for y in self.basis
        )

    def is_commutator_closed(self) -> bool:
        vectors = [b.flatten() for b in self.basis]
        return all(
            linalg.in_span(vectors, commutator(x, y).flatten())
            for x in self.basis
            for y in self.basis
        )

    def span_equals(self, other: "MatrixSubspace") -> bool:
        return self.n == other.n and linalg.span_equal(
            [b.flatten() for b in self.basis],
            [b.flatten() for b in other.basis],
        )

    @staticmethod
    def block_algebra(n: int, k: int) -> "MatrixSubspace":
        """The top-left k x k corner embedded in Mat_n."""
        if not 0 < k < n:
            raise ValueError("need 0 < k < n")
        return MatrixSubspace(
            [Mat.basis_elt(n, i, j) for i in range(k) for j in range(k)]
        )

    def to_json(self) -> list:
        return [b.to_json() for b in self.basis]

    @staticmethod
    def from_json(data) -> "MatrixSubspace":
        return MatrixSubspace([Mat.from_json(m) for m in data])


def commutant(space: MatrixSubspace) -> MatrixSubspace:
    """All f with [f, b] = 0 for every basis b, by an exact linear solve.

    The returned basis spans the full commutant; it is closed under
    products and commutators by construction (verified by the caller's
    tests, cheap to re-check via is_product_closed).
    """
    n = space.n
    rows: list[list[GaussRational]] = []
    for b in space.basis:
        bn = b.entries
        # (f b - b f)_{ij} = sum_k f_{ik} b_{kj} - b_{ik} f_{kj} = 0
        for i in range(n):
            for j in range(n):
                row = [GR_ZERO] * (n * n)
                for k in range(n):
                    row[i * n + k] = row[i * n + k] + bn[k][j]
                    row[k * n + j] = row[k * n + j] - bn[i][k]
                rows.append(row)
    kernel = linalg.nullspace(rows, ncols=n * n)
    if not kernel:
        raise RuntimeError("commutant is never empty (identity commutes)")
    return MatrixSubspace([Mat.unflatten(v, n) for v in kernel], check_independent=False)


@dataclass
class InvarianceReport:
    ok: bool
    witness: Mat | None = None


def invariance_check(h: Mat, space: MatrixSubspace) -> InvarianceReport:
    """Does ad_H map the subspace into itself?  Exact rank test per basis b."""
    vectors = [b.flatten() for b in space.basis]
    for b in space.basis:
        c = commutator(b, h)
        if not linalg.in_span(vectors, c.flatten()):
            return InvarianceReport(False, b)
    return InvarianceReport(True)


class InnerDerivation:
    """a -> [a, X]; canonicalized by the traceless part of X."""

    __slots__ = ("x",)

    def __init__(self, x: Mat):
        self.x = x.traceless_part()

    def __call__(self, a: Mat) -> Mat:
        return commutator(a, self.x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InnerDerivation):
            return NotImplemented
        return self.x == other.x

    def __add__(self, other: "InnerDerivation") -> "InnerDerivation":
        return InnerDerivation(self.x + other.x)

    def commutes_with(self, other: "InnerDerivation") -> bool:
        """[ad_X, ad_Y] = ad_[Y,X]; zero iff [X, Y] is central."""
        return commutator(self.x, other.x).traceless_part().is_zero()


def is_block_diagonal(h: Mat, k: int) -> bool:
    for i in range(h.n):
        for j in range(h.n):
            if (i < k) != (j < k) and not h.entries[i][j].is_zero():
                return False
    return True


def block_split(h: Mat, k: int) -> tuple[InnerDerivation, InnerDerivation]:
    """Split ad_H of a block-diagonal H into the two commuting block parts."""
    if not 0 < k < h.n:
        raise ValueError("need 0 < k < n")
    if not is_block_diagonal(h, k):
        raise ValueError(f"H is not block-diagonal at block size {k}")
    top = [
        [h.entries[i][j] if (i < k and j < k) else GR_ZERO for j in range(h.n)]
        for i in range(h.n)
    ]
    bottom = [
        [h.entries[i][j] if (i >= k and j >= k) else GR_ZERO for j in range(h.n)]
        for i in range(h.n)
    ]
    return InnerDerivation(Mat(top)), InnerDerivation(Mat(bottom))


def biderivation_solver(n: int) -> list[dict]:
    """Solution space of brackets on Mat_n that are Leibniz in both slots.

    Unknowns are the matrix values T[a][b] = {E_a, E_b} on the standard
    basis; the two Leibniz rules on all basis triples give an extremely
    sparse homogeneous system (at most three unknown entries per scalar
    equation), eliminated exactly over Q(i).  Each solution is returned as
    a sparse coefficient dict keyed by (a, b, g, h) for entry (g,h) of
    {E_a, E_b}.
    """
    if n > 4:
        raise ValueError("solver is sized for n <= 4")
    d = n * n
    ncols = d * d * n * n

    def col(a: int, b: int, g: int, h: int) -> int:
        return ((a * d + b) * n + g) * n + h

    def idx(i: int, j: int) -> int:
        return i * n + j

    def add(row: dict, colid: int, val: GaussRational):
        s = row.get(colid, GR_ZERO) + val
        if s.is_zero():
            row.pop(colid, None)
        else:
            row[colid] = s

    elim = SparseEliminator(ncols)
    pairs = [(i, j) for i in range(n) for j in range(n)]
    for ai, aj in pairs:
        for bi, bj in pairs:
            for ci, cj in pairs:
                a, b, c = idx(ai, aj), idx(bi, bj), idx(ci, cj)
                for g in range(n):
                    for h in range(n):
                        # {E_a E_b, E_c} = E_a {E_b, E_c} + {E_a, E_c} E_b
                        row: dict[int, GaussRational] = {}
                        if aj == bi:
                            add(row, col(idx(ai, bj), c, g, h), GR_ONE)
                        if g == ai:  # (E_a T[b][c])_{gh} = T[b][c]_{aj,h}
                            add(row, col(b, c, aj, h), -GR_ONE)
                        if h == bj:  # (T[a][c] E_b)_{gh} = T[a][c]_{g,bi}
                            add(row, col(a, c, g, bi), -GR_ONE)
                        if row:
                            elim.add_row(row)
                        # {E_a, E_b E_c} = {E_a, E_b} E_c + E_b {E_a, E_c}
                        row = {}
                        if bj == ci:
                            add(row, col(a, idx(bi, cj), g, h), GR_ONE)
                        if h == cj:  # (T[a][b] E_c)_{gh} = T[a][b]_{g,ci}
                            add(row, col(a, b, g, ci), -GR_ONE)
                        if g == bi:  # (E_b T[a][c])_{gh} = T[a][c]_{bj,h}
                            add(row, col(a, c, bj, h), -GR_ONE)
                        if row:
                            elim.add_row(row)
    return elim.kernel_basis()


def commutator_bracket_vector(n: int) -> dict:
    """The commutator bracket in the solver's coordinate layout."""
    d = n * n
    basis = full_matrix_basis(n)
    out = {}
    for a in range(d):
        for b in range(d):
            c = commutator(basis[a], basis[b])
            for g in range(n):
                for h in range(n):
                    v = c.entries[g][h]
                    if not v.is_zero():
                        out[((a * d + b) * n + g) * n + h] = v
    return out
