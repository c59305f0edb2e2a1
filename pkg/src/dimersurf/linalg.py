"""Exact linear algebra helpers: Z2 vectors as int bitmasks, integer
Smith normal form, and small dense rational routines.

Everything here is desk-scale (at most a few hundred rows); clarity and
exactness win over asymptotics.
"""

from fractions import Fraction


# ---------------------------------------------------------------------------
# Z2 vectors are python ints: bit j = coordinate j.


class Z2Solver:
    """Incremental reduced echelon basis over Z2 with combination tracking.

    Generators are fed one by one with add(); each stored pivot row
    remembers which subset of the fed generators it is (a bitmask over
    feed order), so express() can return an exact combination.
    """

    def __init__(self):
        self._rows = []  # (pivot bit, vector, combination mask)
        self.count = 0

    def _reduce(self, vec, comb):
        for pivot, row, rcomb in self._rows:
            if vec >> pivot & 1:
                vec ^= row
                comb ^= rcomb
        return vec, comb

    def add(self, vec):
        """Feed one generator; True iff it enlarged the span."""
        idx = self.count
        self.count += 1
        vec, comb = self._reduce(vec, 1 << idx)
        if vec == 0:
            return False
        pivot = vec.bit_length() - 1
        # keep the form reduced: clear the new pivot from older rows
        self._rows = [
            (p, r ^ vec, c ^ comb) if r >> pivot & 1 else (p, r, c)
            for p, r, c in self._rows
        ]
        self._rows.append((pivot, vec, comb))
        return True

    @property
    def rank(self):
        return len(self._rows)

    def express(self, vec):
        """Mask m with vec == XOR of fed generators in m, or None."""
        vec, comb = self._reduce(vec, 0)
        return comb if vec == 0 else None

    def contains(self, vec):
        return self.express(vec) is not None


class Z2Quotient:
    """Coordinates in span(basis) modulo span(modded).

    basis elements must be independent modulo span(modded); then the
    basis part of any expression of a vector is unique and coords()
    is well defined.
    """

    def __init__(self, basis, modded):
        self.dim = len(basis)
        self._solver = Z2Solver()
        for v in basis:
            self._solver.add(v)
        for v in modded:
            self._solver.add(v)

    def coords(self, vec):
        mask = self._solver.express(vec)
        if mask is None:
            return None
        return tuple(mask >> i & 1 for i in range(self.dim))


def z2_extend_basis(modded, candidates):
    """Indices into candidates whose vectors extend span(modded) to
    span(modded + candidates), greedily in order."""
    solver = Z2Solver()
    for v in modded:
        solver.add(v)
    picked = []
    for i, v in enumerate(candidates):
        if solver.add(v):
            picked.append(i)
    return picked


def z2_solve_full(rows, rhs, ncols):
    """All solutions of the Z2 system parity(rows[i] & x) == rhs[i].

    Returns (particular, kernel_basis); particular is None when the
    system is infeasible.  kernel_basis always describes the
    homogeneous solutions.
    """
    ech = {}  # pivot bit (shifted encoding) -> row
    feasible = True
    for row, b in zip(rows, rhs):
        vec = (row << 1) | (b & 1)  # bit 0 carries the right-hand side
        # clear every pivot bit; each stored row holds no pivot but its
        # own, so one descending pass reduces vec completely
        for p in sorted(ech, reverse=True):
            if vec >> p & 1:
                vec ^= ech[p]
        p = vec.bit_length() - 1
        if p <= 0:
            if vec == 1:
                feasible = False
            continue
        for q in list(ech):
            if ech[q] >> p & 1:
                ech[q] ^= vec
        ech[p] = vec
    pivot_vars = {p - 1 for p in ech}
    kernel = []
    for f in range(ncols):
        if f in pivot_vars:
            continue
        v = 1 << f
        for p, r in ech.items():
            if r >> (f + 1) & 1:
                v |= 1 << (p - 1)
        kernel.append(v)
    if not feasible:
        return None, kernel
    particular = 0
    for p, r in ech.items():
        if r & 1:
            particular |= 1 << (p - 1)
    return particular, kernel


# ---------------------------------------------------------------------------
# Integer matrices: lists of lists.


def identity_matrix(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_vec(M, v):
    return [sum(a * b for a, b in zip(row, v)) for row in M]


def mat_mul(A, B):
    n = len(B[0]) if B else 0
    return [[sum(row[k] * B[k][j] for k in range(len(B))) for j in range(n)]
            for row in A]


def smith_normal_form(mat):
    """Diagonalize an integer matrix: returns (D, U, V) with U*mat*V == D,
    U and V unimodular, D diagonal with nonnegative entries satisfying
    the divisibility chain d1 | d2 | ...
    """
    m = len(mat)
    n = len(mat[0]) if m else 0
    A = [list(row) for row in mat]
    U = identity_matrix(m)
    V = identity_matrix(n)

    def row_add(i, j, c):
        A[i] = [a + c * b for a, b in zip(A[i], A[j])]
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def col_add(i, j, c):
        for r in A:
            r[i] += c * r[j]
        for r in V:
            r[i] += c * r[j]

    def col_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def diagonalize():
        t = 0
        while t < m and t < n:
            # smallest nonzero pivot in the remaining block
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] != 0 and (best is None
                                         or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            row_swap(t, best[0])
            col_swap(t, best[1])
            clean = True
            for i in range(t + 1, m):
                q = A[i][t] // A[t][t]
                if q:
                    row_add(i, t, -q)
                if A[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = A[t][j] // A[t][t]
                if q:
                    col_add(j, t, -q)
                if A[t][j]:
                    clean = False
            if clean:
                t += 1

    diagonalize()
    rank = min(m, n)
    for i in range(min(m, n)):
        if A[i][i] == 0:
            rank = i
            break
    # enforce the divisibility chain, re-diagonalizing as needed
    while True:
        broken = None
        for i in range(rank - 1):
            if A[i + 1][i + 1] % A[i][i] != 0:
                broken = i
                break
        if broken is None:
            break
        col_add(broken, broken + 1, 1)
        diagonalize()
    for i in range(rank):
        if A[i][i] < 0:
            A[i] = [-a for a in A[i]]
            U[i] = [-a for a in U[i]]
    return A, U, V


def int_solve(A, b):
    """Integer solutions of A x == b via Smith normal form.

    Returns (particular, kernel_basis); particular is None when no
    integer solution exists.  kernel_basis spans the integer kernel.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [0] * n, [[int(i == j) for j in range(n)] for i in range(n)]
    D, U, V = smith_normal_form(A)
    ub = mat_vec(U, b)
    y = [0] * n
    feasible = True
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d != 0:
            if ub[i] % d != 0:
                feasible = False
            else:
                y[i] = ub[i] // d
        elif ub[i] != 0:
            feasible = False
    kernel = []
    for j in range(n):
        if j >= m or D[j][j] == 0:
            kernel.append([V[i][j] for i in range(n)])
    if not feasible:
        return None, kernel
    return mat_vec(V, y), kernel


# ---------------------------------------------------------------------------
# Small dense rational routines.


def frac_det(M):
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if A[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            A[c], A[pivot] = A[pivot], A[c]
            det = -det
        det *= A[c][c]
        inv = 1 / A[c][c]
        for r in range(c + 1, n):
            if A[r][c]:
                f = A[r][c] * inv
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return det


def frac_inv(M):
    """Exact inverse of a square rational matrix (raises on singular)."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if A[r][c] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[pivot] = A[pivot], A[c]
        inv = 1 / A[c][c]
        A[c] = [a * inv for a in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


class QSpan:
    """Incremental row space over Q (greedy rank tracking)."""

    def __init__(self):
        self._rows = []  # (pivot index, row as Fractions)

    def try_add(self, vec):
        """True iff vec was independent (and is now included)."""
        v = [Fraction(x) for x in vec]
        for p, r in self._rows:
            if v[p]:
                f = v[p] / r[p]
                v = [a - f * b for a, b in zip(v, r)]
        pivot = next((i for i, x in enumerate(v) if x != 0), None)
        if pivot is None:
            return False
        self._rows.append((pivot, v))
        return True

    @property
    def rank(self):
        return len(self._rows)
