"""Exact integer and rational linear algebra on plain nested lists.

Matrices are ``list[list[int]]`` or ``list[list[Fraction]]``; functions never
mutate their arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*A)] if A else []


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    Bt = transpose(B)
    if not Bt:
        return [[] for _ in A]
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, x)) for row in A]


def det(A: Sequence[Sequence]) -> Fraction:
    """Exact determinant by Gaussian elimination over Q."""
    n = len(A)
    M = [[Fraction(v) for v in row] for row in A]
    if any(len(row) != n for row in M):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            sign = -sign
        piv = M[c][c]
        d *= piv
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / piv
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return sign * d


# -- Smith / Hermite normal forms ----------------------------------------------

def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``D = U A V`` diagonal, ``d1 | d2 | ...``, ``U, V`` unimodular.

    Pivot choice: the smallest nonzero absolute value in the active block,
    first in row-major order, so the output is deterministic.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [[int(v) for v in row] for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for M in (D, V):
            for row in M:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        cands = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not cands:
            break
        _, i, j = min(cands)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
            rest = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
            rest += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
            if rest:
                _, i, j = min(rest)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
    return U, D, V


def hermite_normal_form(A: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite normal form; zero rows are dropped.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)``.  For a
    fixed row lattice the result is unique.
    """
    H = [[int(v) for v in row] for row in A]
    m = len(H)
    n = len(H[0]) if m else 0
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [(abs(H[i][c]), i) for i in range(r, m) if H[i][c]]
            if not nz:
                break
            _, i = min(nz)
            H[r], H[i] = H[i], H[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if not H[r][c]:
            continue
        if H[r][c] < 0:
            H[r] = [-a for a in H[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [a - q * b for a, b in zip(H[i], H[r])]
        r += 1
    return [row for row in H if any(row)]


# -- rational row reduction ----------------------------------------------------

def rref(A: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over Q and the pivot column indices."""
    M = [[Fraction(v) for v in row] for row in A]
    m = len(M)
    n = len(M[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(m):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank(A: Sequence[Sequence]) -> int:
    return len(rref(A)[1]) if A else 0


@dataclass(frozen=True)
class LinearSolution:
    """Result of :func:`solve_linear`; ``particular`` is None when inconsistent."""

    particular: tuple[Fraction, ...] | None
    kernel: tuple[tuple[Fraction, ...], ...]

    @property
    def consistent(self) -> bool:
        return self.particular is not None


def solve_linear(A: Sequence[Sequence], b: Sequence) -> LinearSolution:
    """Solve ``A x = b`` exactly: a particular solution (free variables zero) and a kernel basis."""
    m = len(A)
    n = len(A[0]) if m else 0
    if len(b) != m:
        raise ValueError("right-hand side length does not match the row count")
    R, pivots = rref([list(row) + [bv] for row, bv in zip(A, b)])
    if n in pivots:
        particular = None
    else:
        x = [Fraction(0)] * n
        for row, c in zip(R, pivots):
            x[c] = row[n]
        particular = tuple(x)
    free = [c for c in range(n) if c not in pivots]
    kernel = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for row, c in zip(R, pivots):
            if c < n:
                v[c] = -row[fcol]
        kernel.append(tuple(v))
    return LinearSolution(particular, tuple(kernel))


def inverse(A: Sequence[Sequence]) -> Matrix:
    n = len(A)
    R, pivots = rref([list(row) + [Fraction(int(i == j)) for j in range(n)]
                      for i, row in enumerate(A)])
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]
