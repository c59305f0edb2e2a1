"""Pfaffian routes, signed minors, symbolic derivatives, Grassmann algebra."""

import itertools
import random
from fractions import Fraction

import pytest

from dimersurf.linalg import frac_det
from dimersurf.pfaffian import (
    GrassmannElement,
    check_skew,
    diff_symbolic,
    evaluate_symbolic,
    gr_exp,
    gr_integral,
    gr_mul,
    gr_pairing,
    gr_quadratic,
    permutation_sign,
    pf,
    pf_combinatorial,
    pf_dual_check,
    pf_minor,
    pf_symbolic,
)

# upper entries a..f = 1..6; Pf = af - be + cd = 6 - 10 + 12
A4 = [
    [0, 1, 2, 3],
    [-1, 0, 4, 5],
    [-2, -4, 0, 6],
    [-3, -5, -6, 0],
]


def random_skew(rng, n):
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            x = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            A[i][j] = x
            A[j][i] = -x
    return A


def test_pf_frozen_values():
    assert pf([]) == 1
    assert pf([[0, 5], [-5, 0]]) == 5
    assert pf(A4) == 8
    assert pf([[0]]) == 0  # odd size
    assert pf([[0, 0], [0, 0]]) == 0


def test_pf_needs_pivot_search():
    # first candidate pivot vanishes, forcing a swap (and a sign flip)
    A = [
        [0, 0, 2, 0],
        [0, 0, 0, 3],
        [-2, 0, 0, 0],
        [0, -3, 0, 0],
    ]
    assert pf(A) == pf_combinatorial(A) == -6


def test_pf_rejects_non_skew():
    with pytest.raises(ValueError, match="not skew"):
        pf([[0, 1], [1, 0]])
    with pytest.raises(ValueError, match="diagonal"):
        pf([[1, 2], [-2, 0]])
    with pytest.raises(ValueError, match="square"):
        pf([[0, 1]])


def test_pf_squares_to_determinant():
    rng = random.Random(11)
    for n in (0, 2, 4, 6, 8, 10):
        for _ in range(4):
            A = random_skew(rng, n)
            assert pf(A) ** 2 == frac_det(A)


def test_pf_matches_expansion_oracle():
    rng = random.Random(12)
    cases = 0
    for n in (2, 4, 6, 8):
        for _ in range(13):
            A = random_skew(rng, n)
            assert pf_dual_check(A) == pf(A)
            cases += 1
    assert cases >= 50


def test_pf_under_permutation_congruence():
    rng = random.Random(13)
    for n in (4, 6):
        A = random_skew(rng, n)
        for _ in range(10):
            perm = list(range(n))
            rng.shuffle(perm)
            B = [[A[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
            assert pf(B) == permutation_sign(perm) * pf(A)


def test_permutation_sign():
    assert permutation_sign([0, 1, 2]) == 1
    assert permutation_sign([1, 0, 2]) == -1
    assert permutation_sign([2, 0, 1]) == 1


def test_pf_minor_frozen():
    sign, val = pf_minor(A4, (0, 1))
    assert (sign, val) == (1, 6)  # remove rows/cols 0,1: Pf = f
    sign, val = pf_minor(A4, (0, 2))
    assert (sign, val) == (-1, 5)  # derivative of Pf by b is -e
    assert pf_minor(A4, (0, 1, 2, 3)) == (1, 1)
    assert pf_minor(A4, (1, 0, 2, 3)) == (-1, 1)
    assert pf_minor(A4, ()) == (1, 8)


def test_pf_minor_validation():
    with pytest.raises(ValueError, match="repeated"):
        pf_minor(A4, (1, 1))
    with pytest.raises(ValueError, match="range"):
        pf_minor(A4, (0, 9))
    with pytest.raises(ValueError, match="even"):
        pf_minor(A4, (0,))


def test_pf_minor_is_entry_derivative():
    # Pf is affine in each independent entry, so a unit bump computes
    # the partial derivative exactly
    rng = random.Random(14)
    for n in (4, 6):
        A = random_skew(rng, n)
        for i in range(n):
            for j in range(i + 1, n):
                B = [row[:] for row in A]
                B[i][j] += 1
                B[j][i] -= 1
                sign, val = pf_minor(A, (i, j))
                assert pf(B) - pf(A) == sign * val


def test_pf_symbolic_n4():
    poly = pf_symbolic(range(4))
    assert poly == {
        frozenset({(0, 1), (2, 3)}): 1,
        frozenset({(0, 2), (1, 3)}): -1,
        frozenset({(0, 3), (1, 2)}): 1,
    }


def test_pf_symbolic_evaluates_to_pf():
    rng = random.Random(15)
    for n in (2, 4, 6):
        A = random_skew(rng, n)
        assert evaluate_symbolic(pf_symbolic(range(n)), A) == pf(A)


def test_symbolic_derivative_matches_signed_minor():
    # iterated derivatives of the Pfaffian polynomial agree, monomial by
    # monomial, with the signed Pfaffian of the complementary minor
    rng = random.Random(16)
    for n in (4, 6):
        full = pf_symbolic(range(n))
        for _ in range(12):
            k = rng.randint(1, n // 2)
            picked = rng.sample(range(n), 2 * k)
            pairs = [
                tuple(sorted(picked[2 * t: 2 * t + 2])) for t in range(k)
            ]
            lhs = full
            index_list = []
            for p in pairs:
                lhs = diff_symbolic(lhs, p)
                index_list.extend(p)
            rest = sorted(set(range(n)) - set(index_list))
            sign = permutation_sign(index_list + rest)
            rhs = {m: sign * c for m, c in pf_symbolic(rest).items()}
            assert lhs == rhs


def test_grassmann_generator_relations():
    n = 4
    phi = [GrassmannElement.generator(n, i) for i in range(n)]
    assert (phi[1] * phi[1]).is_zero()
    assert phi[0] * phi[2] == -1 * (phi[2] * phi[0])
    assert gr_mul(phi[0], phi[1]).terms == {(0, 1): 1}
    assert (phi[2] * phi[0]).terms == {(0, 2): -1}
    with pytest.raises(ValueError, match="out of range"):
        GrassmannElement.generator(2, 2)
    with pytest.raises(ValueError, match="different generator sets"):
        gr_mul(GrassmannElement.one(2), GrassmannElement.one(3))


def test_grassmann_integral_convention():
    # the measure is normalized so the ascending full monomial
    # integrates to +1
    n = 3
    phi = [GrassmannElement.generator(n, i) for i in range(n)]
    assert gr_integral(phi[0] * phi[1] * phi[2]) == 1
    assert gr_integral(phi[2] * phi[1] * phi[0]) == -1
    assert gr_integral(phi[0] * phi[1]) == 0
    assert gr_integral(GrassmannElement.one(0)) == 1

    two = GrassmannElement.generator(2, 0) * GrassmannElement.generator(2, 1)
    assert gr_integral(two) == 1


def test_gr_exp():
    n = 2
    a = Fraction(7, 3)
    x = a * (GrassmannElement.generator(n, 0) * GrassmannElement.generator(n, 1))
    assert gr_integral(gr_exp(x)) == a
    assert gr_exp(x) * gr_exp(-1 * x) == GrassmannElement.one(n)
    with pytest.raises(ValueError, match="constant term"):
        gr_exp(GrassmannElement.one(n))


def test_gaussian_integral_is_pfaffian():
    assert gr_integral(gr_exp(gr_quadratic(A4))) == 8
    rng = random.Random(17)
    for n in (2, 4, 6):
        for _ in range(5):
            A = random_skew(rng, n)
            assert gr_integral(gr_exp(gr_quadratic(A))) == pf(A)


def test_gr_pairing_pinned_values():
    one = GrassmannElement.one(2)
    p0 = GrassmannElement.generator(2, 0)
    p1 = GrassmannElement.generator(2, 1)
    assert gr_pairing(one, one) == 1
    assert gr_pairing(p0, p0) == 1
    assert gr_pairing(p0, p1) == 0
    with pytest.raises(ValueError, match="different generator sets"):
        gr_pairing(GrassmannElement.one(2), GrassmannElement.one(3))


def test_gr_pairing_gram_identity():
    for n in (1, 2, 3, 4, 5):
        monos = []
        for k in range(n + 1):
            monos.extend(itertools.combinations(range(n), k))
        for s in monos:
            fs = GrassmannElement(n, {s: 1})
            for t in monos:
                ft = GrassmannElement(n, {t: 1})
                assert gr_pairing(fs, ft) == (1 if s == t else 0)


def test_gr_pairing_bilinear():
    rng = random.Random(18)
    n = 3
    monos = []
    for k in range(n + 1):
        monos.extend(itertools.combinations(range(n), k))

    def rand_elem():
        return GrassmannElement(
            n, {m: Fraction(rng.randint(-4, 4)) for m in monos})

    for _ in range(10):
        f, g, h = rand_elem(), rand_elem(), rand_elem()
        c = Fraction(rng.randint(-3, 3))
        assert gr_pairing(f + c * g, h) == gr_pairing(f, h) + c * gr_pairing(g, h)
        # the pairing recovers coefficients, hence equals the sum of
        # products of matching coefficients
        expected = sum(
            f.terms.get(m, Fraction(0)) * g.terms.get(m, Fraction(0))
            for m in monos)
        assert gr_pairing(f, g) == expected


def test_check_skew_copies():
    A = [[0, 1], [-1, 0]]
    M = check_skew(A)
    M[0][1] = Fraction(9)
    assert A[0][1] == 1
