import random
from fractions import Fraction
from itertools import permutations

import pytest

from chainfact.exactmath import (
    ExactDivisionError,
    IntMatrix,
    Poly,
    charpoly_division_free,
    det_bareiss,
    det_lower_hessenberg,
    in_row_span,
    int_mat_mul,
    kernel_basis,
    poly_div_exact,
    rank_rational,
    series_inverse,
    smith_normal_form,
    sparse_rank,
)


# ----------------------------------------------------------------- oracles

def perm_sign(p):
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def charpoly_by_permutations(a: IntMatrix) -> Poly:
    """Leibniz expansion of det(t*1 - A); independent of Berkowitz."""
    n = a.rows
    total = Poly.zero()
    for p in permutations(range(n)):
        term = Poly.one()
        for i in range(n):
            e = a[i, p[i]]
            entry = Poly((-e, 1)) if p[i] == i else Poly((-e,))
            term = term * entry
        total = total + perm_sign(p) * term
    return total


def minor_gcd(a: IntMatrix, k: int) -> int:
    """gcd of all k x k minors, the classical invariant-factor oracle."""
    from itertools import combinations
    from math import gcd

    g = 0
    for rows in combinations(range(a.rows), k):
        for cols in combinations(range(a.cols), k):
            sub = IntMatrix([[a[i, j] for j in cols] for i in rows])
            g = gcd(g, det_bareiss(sub))
    return g


def rand_matrix(rng, n, m, lo=-5, hi=5):
    return IntMatrix([[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)])


# ------------------------------------------------------------------- Poly

def test_poly_basics():
    p = Poly((1, 0, -2, 0, 0))
    assert p.coeffs == (1, 0, -2)
    assert p.degree == 2
    assert p.coeff(1) == 0 and p.coeff(7) == 0
    assert Poly((Fraction(2, 2),)).coeffs == (1,)
    assert (p * Poly.zero()).is_zero()
    assert p(3) == 1 - 2 * 9


def test_poly_reversal_and_derivative():
    p = Poly((1, -1, 0, 2))
    assert p.reversal(3) == Poly((2, 0, -1, 1))
    assert p.derivative() == Poly((-1, 0, 6))


def test_series_inverse_geometric():
    assert series_inverse(Poly((1, -1)), 3) == Poly((1, 1, 1, 1))


def test_series_inverse_alternating_quartic():
    # long-division oracle: (1+t)/(1-t^4) agrees mod t^3
    p = Poly((1, -1, 1, -1))
    q = series_inverse(p, 2)
    assert q == Poly((1, 1, 0))
    assert (p * q).truncate(2) == Poly.one()


def test_series_inverse_degree8_chain():
    p = Poly((1, 1, 0, 0, 1, 1))        # (1+t)(1+t^4)
    q = series_inverse(p, 4)
    assert q == Poly((1, -1, 1, -1, 0))
    assert (p * q).truncate(4) == Poly.one()


def test_series_inverse_rejects_zero_constant():
    with pytest.raises(ExactDivisionError):
        series_inverse(Poly((0, 1)), 3)


def test_series_inverse_roundtrip_random():
    rng = random.Random(7)
    for _ in range(40):
        coeffs = [rng.choice([1, -1, 2])] + [rng.randint(-3, 3) for _ in range(rng.randint(0, 6))]
        p = Poly(coeffs)
        k = rng.randint(0, 12)
        q = series_inverse(p, k)
        assert (p * q).truncate(k) == Poly.one()


def test_poly_div_exact_examples():
    num = Poly((1,) + (0,) * 3 + (-1,)) * Poly((1, -1))      # (1-t^4)(1-t)
    den = Poly((1, 0, -1))                                    # 1-t^2
    quot = poly_div_exact(num, den)
    assert quot == Poly((1, -1, 1, -1))
    assert quot * den == num
    p = Poly((3, 1, 2))
    assert poly_div_exact(p, Poly.one()) == p
    with pytest.raises(ExactDivisionError):
        poly_div_exact(Poly((1, 0, -1)), Poly((1, 0, 0, -1)))


def test_poly_div_exact_random_roundtrip():
    rng = random.Random(11)
    for _ in range(60):
        a = Poly([rng.randint(-4, 4) for _ in range(rng.randint(1, 6))])
        b = Poly([rng.randint(-4, 4) for _ in range(rng.randint(1, 6))])
        if b.is_zero():
            continue
        assert poly_div_exact(a * b, b) == a


# ------------------------------------------------------------------- SNF

def check_snf(a: IntMatrix):
    snf = smith_normal_form(a)
    assert snf.U * a * snf.V == snf.D
    assert det_bareiss(snf.U) in (1, -1)
    assert det_bareiss(snf.V) in (1, -1)
    k = min(a.rows, a.cols)
    diag = [snf.D[i, i] for i in range(k)]
    for i in range(a.rows):
        for j in range(a.cols):
            if i != j:
                assert snf.D[i, j] == 0
    for i in range(k - 1):
        if diag[i] == 0:
            assert diag[i + 1] == 0
        else:
            assert diag[i + 1] % diag[i] == 0
    assert all(d >= 0 for d in diag)
    return snf


def test_snf_identity():
    snf = check_snf(IntMatrix.identity(2))
    assert snf.D == IntMatrix.identity(2)


def test_snf_zero_1x1():
    snf = check_snf(IntMatrix([[0]]))
    assert snf.D == IntMatrix([[0]])


def test_snf_chain_relation_matrix():
    # rows f - 2 x1 - x2 and f - 2 x2 over generators (x1, x2, f)
    a = IntMatrix([[-2, -1, 1], [0, -2, 1]])
    # minor-gcd oracle: invariant factors d1 = g1, d2 = g2/g1
    g1 = minor_gcd(a, 1)
    g2 = minor_gcd(a, 2)
    assert (g1, g2 // g1) == (1, 1)
    snf = check_snf(a)
    assert snf.invariant_factors() == (1, 1)


def test_snf_random_matrices():
    rng = random.Random(3)
    for _ in range(40):
        a = rand_matrix(rng, rng.randint(1, 4), rng.randint(1, 4))
        snf = check_snf(a)
        # cross-check invariant factors against the minor-gcd oracle
        k = min(a.rows, a.cols)
        prev = 1
        for i in range(1, k + 1):
            g = minor_gcd(a, i)
            expected = 0 if g == 0 else g // prev
            assert snf.D[i - 1, i - 1] == abs(expected)
            if g == 0:
                break
            prev = g


def test_in_row_span():
    a = IntMatrix([[2, 0], [0, 3]])
    assert in_row_span((2, 3), a)
    assert not in_row_span((1, 0), a)


# -------------------------------------------------------------- charpoly

def test_charpoly_zero_3x3():
    assert charpoly_division_free(IntMatrix.zeros(3, 3)) == Poly.monomial(3)


def test_charpoly_nilpotent():
    n = IntMatrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert charpoly_division_free(n) == Poly.monomial(3)


def test_charpoly_known_serre_matrix():
    # cofactor oracle for the 3x3 matrix with det(t-1 form) t^3 - t^2 + t - 1
    m = IntMatrix([[0, 0, 1], [1, 0, -1], [0, 1, 1]])
    oracle = charpoly_by_permutations(m)
    assert oracle == Poly((-1, 1, -1, 1))
    assert charpoly_division_free(m) == oracle


def test_charpoly_vs_permutation_oracle_random():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 4)
        a = rand_matrix(rng, n, n)
        assert charpoly_division_free(a) == charpoly_by_permutations(a)


def test_charpoly_rejects_rectangular():
    with pytest.raises(ValueError):
        charpoly_division_free(IntMatrix([[1, 2]]))


def test_hessenberg_det_matches_dense():
    rng = random.Random(9)
    for _ in range(25):
        n = rng.randint(1, 5)
        dense = [[Poly.zero()] * n for _ in range(n)]
        diag_rows = []
        superdiag = []
        for i in range(n):
            row = {}
            for j in range(i + 1):
                if rng.random() < 0.7:
                    p = Poly([rng.randint(-3, 3) for _ in range(rng.randint(1, 3))])
                    if not p.is_zero():
                        row[j] = p
                        dense[i][j] = p
            diag_rows.append(row)
            if i + 1 < n:
                s = Poly([rng.randint(-2, 2) for _ in range(rng.randint(1, 2))])
                superdiag.append(s)
                dense[i][i + 1] = s
        # Leibniz oracle on the dense polynomial matrix
        total = Poly.zero()
        for p in permutations(range(n)):
            term = Poly.one()
            ok = True
            for i in range(n):
                if dense[i][p[i]].is_zero():
                    ok = False
                    break
                term = term * dense[i][p[i]]
            if ok:
                total = total + perm_sign(p) * term
        assert det_lower_hessenberg(diag_rows, superdiag, n) == total


# -------------------------------------------------------- rational ranks

def test_rank_rational_examples():
    assert rank_rational([[1, 0], [0, 1]]) == 2
    assert rank_rational([[1, 2], [2, 4]]) == 1
    assert rank_rational([[Fraction(1, 2), Fraction(1, 3)]]) == 1


def test_kernel_basis():
    ker = kernel_basis([[1, 2, 3]])
    assert len(ker) == 2
    for v in ker:
        assert sum(c * x for c, x in zip([1, 2, 3], v)) == 0


def test_sparse_rank_matches_dense():
    rng = random.Random(13)
    for _ in range(40):
        n, m = rng.randint(1, 6), rng.randint(1, 6)
        a = [[rng.choice([0, 0, 1, -1, 2]) for _ in range(m)] for _ in range(n)]
        sparse = [{j: v for j, v in enumerate(row) if v} for row in a]
        assert sparse_rank(sparse) == rank_rational(a)


# ----------------------------------------------------------- int matmul

def test_int_mat_mul_guarded_vs_pure():
    rng = random.Random(17)
    for _ in range(20):
        n, k, m = rng.randint(1, 5), rng.randint(1, 5), rng.randint(1, 5)
        a = [[rng.randint(-10, 10) for _ in range(k)] for _ in range(n)]
        b = [[rng.randint(-10, 10) for _ in range(m)] for _ in range(k)]
        bt = list(zip(*b))
        pure = [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]
        assert int_mat_mul(a, b) == pure


def test_int_mat_mul_big_entries_exact():
    big = 10 ** 30
    a = [[big, 1]]
    b = [[big], [1]]
    assert int_mat_mul(a, b) == [[big * big + 1]]


def test_matrix_power_binary():
    m = IntMatrix([[1, 1], [0, 1]])
    assert m.power(5) == IntMatrix([[1, 5], [0, 1]])
    assert m.power(0) == IntMatrix.identity(2)
