"""Exact Pfaffians and a finite Grassmann algebra.

Two independent evaluation routes are kept side by side on purpose:
elimination (fast) and the signed perfect-matching expansion (slow,
used as the cross-check oracle).  The symbolic Pfaffian polynomial
feeds the derivative/minor identity used by the surgery checks.
"""

import math
from fractions import Fraction

from .errors import CrossCheckError


def check_skew(A):
    """Validate skew symmetry and return a mutable Fraction copy."""
    n = len(A)
    M = []
    for row in A:
        if len(row) != n:
            raise ValueError("matrix is not square")
        M.append([Fraction(x) for x in row])
    for i in range(n):
        if M[i][i]:
            raise ValueError("diagonal entry %d is not zero" % i)
        for j in range(i + 1, n):
            if M[i][j] != -M[j][i]:
                raise ValueError("entries (%d,%d)/(%d,%d) not skew" % (i, j, j, i))
    return M


def pf(A):
    """Pfaffian by exact elimination with pivoting.

    Each step splits off a 2x2 block after a congruence of determinant
    one, so the product of the pivots is the Pfaffian.  Empty matrix
    gives 1, odd size 0.
    """
    M = check_skew(A)
    n = len(M)
    if n % 2:
        return Fraction(0)
    result = Fraction(1)
    for k in range(0, n - 1, 2):
        piv = next((j for j in range(k + 1, n) if M[k][j]), None)
        if piv is None:
            return Fraction(0)
        if piv != k + 1:
            M[piv], M[k + 1] = M[k + 1], M[piv]
            for row in M:
                row[piv], row[k + 1] = row[k + 1], row[piv]
            result = -result
        c = M[k][k + 1]
        result *= c
        for i in range(k + 2, n):
            ai, bi = M[k][i], M[k + 1][i]
            if not ai and not bi:
                continue
            row = M[i]
            for j in range(k + 2, n):
                row[j] += (bi * M[k][j] - ai * M[k + 1][j]) / c
    return result


def pf_combinatorial(A):
    """Pfaffian as the signed sum over perfect matchings of the index
    set; exponential time, for cross-checks on small matrices."""
    M = check_skew(A)

    def expand(ids):
        if not ids:
            return Fraction(1)
        i0 = ids[0]
        total = Fraction(0)
        for t in range(1, len(ids)):
            j = ids[t]
            a = M[i0][j]
            if not a:
                continue
            rest = ids[1:t] + ids[t + 1:]
            term = a * expand(rest)
            total += term if t % 2 else -term
        return total

    return expand(tuple(range(len(M))))


def permutation_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def pf_minor(A, I):
    """The pair (sign, Pf of A with rows/columns I removed).

    The sign is that of the permutation sending 0..n-1 to I followed by
    the remaining indices in increasing order; sign * value is the
    iterated partial derivative of Pf with respect to the upper entries
    indexed by consecutive pairs of I.
    """
    M = check_skew(A)
    n = len(M)
    I = list(I)
    if len(set(I)) != len(I):
        raise ValueError("repeated indices in minor")
    for i in I:
        if not 0 <= i < n:
            raise ValueError("index %r out of range" % (i,))
    if len(I) % 2:
        raise ValueError("minor needs an even number of indices")
    rest = sorted(set(range(n)) - set(I))
    sign = permutation_sign(I + rest)
    sub = [[M[i][j] for j in rest] for i in rest]
    return sign, pf(sub)


def pf_symbolic(indices):
    """The Pfaffian over an ordered index list as a polynomial.

    Keys are frozensets of (i, j) pairs with i < j (one perfect
    matching of the index list each), values the matching signs.
    """
    idx = tuple(indices)
    if len(idx) % 2:
        return {}
    if not idx:
        return {frozenset(): 1}
    out = {}
    i0 = idx[0]
    for t in range(1, len(idx)):
        j = idx[t]
        sign = 1 if t % 2 else -1
        rest = idx[1:t] + idx[t + 1:]
        pair = (i0, j) if i0 < j else (j, i0)
        for mono, c in pf_symbolic(rest).items():
            out[mono | {pair}] = sign * c
    return out


def diff_symbolic(poly, pair):
    """Partial derivative with respect to one upper matrix entry; each
    variable is at most linear in every monomial."""
    pair = tuple(sorted(pair))
    return {mono - {pair}: c for mono, c in poly.items() if pair in mono}


def evaluate_symbolic(poly, A):
    total = Fraction(0)
    for mono, c in poly.items():
        term = Fraction(c)
        for i, j in mono:
            term *= A[i][j]
        total += term
    return total


class GrassmannElement:
    """Element of the algebra on n anticommuting generators.

    terms maps strictly increasing index tuples to rational
    coefficients; the integral convention makes the coefficient of the
    full ascending monomial the Berezin integral.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[tuple(mono)] = c

    @classmethod
    def one(cls, n, c=1):
        return cls(n, {(): c})

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def generator(cls, n, i):
        if not 0 <= i < n:
            raise ValueError("generator index %r out of range" % (i,))
        return cls(n, {(i,): 1})

    def _check(self, other):
        if self.n != other.n:
            raise ValueError("elements live on different generator sets")

    def __eq__(self, other):
        return (
            isinstance(other, GrassmannElement)
            and self.n == other.n
            and self.terms == other.terms
        )

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return GrassmannElement(self.n, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        scalar = Fraction(scalar)
        return GrassmannElement(
            self.n, {m: scalar * c for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        self._check(other)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                sign, merged = _merge_monomials(m1, m2)
                if sign:
                    key = merged
                    out[key] = out.get(key, Fraction(0)) + sign * c1 * c2
        return GrassmannElement(self.n, out)

    def is_zero(self):
        return not self.terms

    def constant_term(self):
        return self.terms.get((), Fraction(0))


def _merge_monomials(m1, m2):
    # merge two ascending tuples, tracking the anticommutation sign;
    # any shared generator squares to zero
    sign = 1
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        a, b = m1[i], m2[j]
        if a == b:
            return 0, ()
        if a < b:
            out.append(a)
            i += 1
        else:
            out.append(b)
            j += 1
            if (len(m1) - i) % 2:
                sign = -sign
    out.extend(m1[i:])
    out.extend(m2[j:])
    return sign, tuple(out)


def gr_mul(x, y):
    return x * y


def gr_exp(x):
    """exp of a Grassmann element without constant term; the series is
    finite because such elements are nilpotent."""
    if x.constant_term():
        raise ValueError("gr_exp needs a vanishing constant term")
    total = GrassmannElement.one(x.n)
    term = GrassmannElement.one(x.n)
    k = 0
    while True:
        k += 1
        term = Fraction(1, k) * (term * x)
        if term.is_zero():
            return total
        total = total + term


def gr_integral(x):
    """Berezin integral: the coefficient of the full ascending monomial."""
    return x.terms.get(tuple(range(x.n)), Fraction(0))


def gr_integrate(x, indices):
    """Partial Berezin integral over the listed generators.

    Monomials missing one of them die; a surviving monomial drops the
    integrated generators, with the sign that walks each of them past
    the kept generators to its right.  Over all generators this reduces
    to gr_integral; the result still lives on the full generator set.
    """
    sset = set(indices)
    out = {}
    for m, c in x.terms.items():
        kept = []
        sign = 1
        hit = 0
        crossings = 0
        for g in reversed(m):
            if g in sset:
                hit += 1
                if crossings % 2:
                    sign = -sign
            else:
                kept.append(g)
                crossings += 1
        if hit != len(sset):
            continue
        key = tuple(reversed(kept))
        out[key] = out.get(key, Fraction(0)) + sign * c
    return GrassmannElement(x.n, out)


def gr_quadratic(A):
    """(1/2) sum A_ij phi_i phi_j as a Grassmann element."""
    M = check_skew(A)
    n = len(M)
    terms = {}
    for i in range(n):
        for j in range(i + 1, n):
            if M[i][j]:
                terms[(i, j)] = M[i][j]
    return GrassmannElement(n, terms)


def gr_pairing(F, G):
    """Scalar product making the monomial basis orthonormal.

    Both factors live on n generators; internally the second is
    rewritten in a twin family, its monomials reversed, and the pair is
    integrated against exp(sum phi_i psi_i) with the interleaved
    ordering phi_1 psi_1 ... phi_n psi_n as the top form.
    """
    if F.n != G.n:
        raise ValueError("elements live on different generator sets")
    n = F.n
    big_f = GrassmannElement(
        2 * n, {tuple(2 * i for i in m): c for m, c in F.terms.items()})
    big_g_terms = {}
    for m, c in G.terms.items():
        k = len(m)
        sign = -1 if (k * (k - 1) // 2) % 2 else 1
        big_g_terms[tuple(2 * i + 1 for i in m)] = sign * c
    big_g = GrassmannElement(2 * n, big_g_terms)
    kernel = GrassmannElement(
        2 * n, {(2 * i, 2 * i + 1): 1 for i in range(n)})
    return gr_integral(gr_exp(kernel) * big_f * big_g)


def pf_dual_check(A):
    """Evaluate the Pfaffian by elimination and by matching expansion,
    raising if the two routes disagree."""
    fast = pf(A)
    slow = pf_combinatorial(A)
    if fast != slow:
        raise CrossCheckError(
            "pfaffian mismatch: elimination %s vs expansion %s" % (fast, slow))
    return fast
