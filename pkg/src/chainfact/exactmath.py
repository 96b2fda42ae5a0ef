"""Exact arithmetic substrate: integers, rationals, polynomials, matrices.

Everything here is exact.  Rational numbers are `fractions.Fraction`,
integers are Python ints, and no routine ever touches floating point.
The module provides:

  * ``Poly``      -- dense univariate polynomials with exact coefficients,
                     plus truncated power-series inversion and exact division;
  * ``MPoly``     -- sparse multivariate polynomials (exponent tuple -> coeff);
  * ``IntMatrix`` -- immutable integer matrices with a Smith normal form,
                     a division-free (Berkowitz) characteristic polynomial,
                     and a sparse lower-Hessenberg determinant;
  * exact rational rank / kernel computations (dense and sparse).

Integer matrix products go through :func:`int_mat_mul`, which uses a numpy
int64 kernel only when a triangle-inequality bound proves the product cannot
overflow; otherwise (or when ``CHAINFACT_PURE=1``) it falls back to pure
Python big-int arithmetic.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import gcd


class ExactDivisionError(ArithmeticError):
    """Raised when a division that must be exact leaves a remainder."""


def _norm_num(c):
    """Collapse Fractions with denominator 1 to ints; reject floats."""
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    raise TypeError(f"exact coefficient expected, got {type(c).__name__}")


# ---------------------------------------------------------------------------
# dense univariate polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Dense univariate polynomial with exact (int/Fraction) coefficients.

    Coefficients are indexed by exponent; trailing zeros are stripped so the
    leading coefficient is nonzero unless the polynomial is zero.  Instances
    are immutable and hashable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_norm_num(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls((1,))

    @classmethod
    def monomial(cls, k, c=1):
        return cls((0,) * k + (c,))

    @classmethod
    def one_minus_power(cls, k):
        """1 - t^k."""
        return cls((1,) + (0,) * (k - 1) + (-1,))

    @property
    def degree(self):
        """Degree, with the zero polynomial assigned -1."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def coeff(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __neg__(self):
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly(tuple(c * other for c in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] += ai * bj
        return Poly(out)

    __rmul__ = __mul__

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def truncate(self, order):
        """Drop all terms of exponent > order."""
        return Poly(self.coeffs[: order + 1])

    def reversal(self, n):
        """t^n * p(1/t); requires n >= degree."""
        if n < self.degree:
            raise ValueError("reversal order below degree")
        rev = [0] * (n + 1)
        for i, c in enumerate(self.coeffs):
            rev[n - i] = c
        return Poly(rev)

    def derivative(self):
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*t^{i}" if i else f"{c}")
        return "Poly(" + " + ".join(terms) + ")"


def series_inverse(p: Poly, order: int) -> Poly:
    """Truncated inverse q with p*q == 1 mod t^(order+1).

    Requires p(0) != 0; coefficients are exact rationals (ints whenever the
    constant term is a unit).
    """
    if p.is_zero() or p.coeff(0) == 0:
        raise ExactDivisionError("series inverse needs a nonzero constant term")
    c0 = p.coeff(0)
    inv0 = Fraction(1, 1) / c0
    support = [(i, c) for i, c in enumerate(p.coeffs) if i and c]
    out = [_norm_num(inv0)]
    for k in range(1, order + 1):
        acc = 0
        for i, c in support:
            if i > k:
                break
            acc += c * out[k - i]
        out.append(_norm_num(-acc * inv0))
    return Poly(out)


def poly_divmod(num: Poly, den: Poly):
    """Euclidean division over the rationals: num = den*q + r, deg r < deg den."""
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(num.coeffs)
    dd = den.degree
    lead = den.coeffs[-1]
    q = [0] * max(len(rem) - dd, 0)
    for k in range(len(rem) - dd - 1, -1, -1):
        c = rem[k + dd]
        if c == 0:
            continue
        f = _norm_num(Fraction(c) / lead if not isinstance(c, Fraction) else c / lead)
        q[k] = f
        for i, dc in enumerate(den.coeffs):
            rem[k + i] -= f * dc
    return Poly(q), Poly(rem)


def poly_div_exact(num: Poly, den: Poly) -> Poly:
    """Exact quotient; raises ExactDivisionError on any nonzero remainder."""
    q, r = poly_divmod(num, den)
    if not r.is_zero():
        raise ExactDivisionError(f"nonzero remainder {r!r} dividing by {den!r}")
    return q


def alternating_product(plus: list[Poly], minus: list[Poly]) -> Poly:
    """Exact evaluation of prod(plus) / prod(minus); aborts if not a polynomial."""
    num = Poly.one()
    for p in plus:
        num = num * p
    den = Poly.one()
    for p in minus:
        den = den * p
    return poly_div_exact(num, den)


# ---------------------------------------------------------------------------
# sparse multivariate polynomials
# ---------------------------------------------------------------------------

class MPoly:
    """Sparse multivariate polynomial: {exponent tuple: exact coefficient}.

    The zero polynomial has an empty term dict.  All terms must share the
    variable count ``nvars``.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars, terms=()):
        data = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exps, c in items:
            c = _norm_num(c)
            if c == 0:
                continue
            exps = tuple(exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for {nvars} variables")
            data[exps] = data.get(exps, 0) + c
        data = {e: c for e, c in data.items() if c != 0}
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", data)
        object.__setattr__(self, "_hash", hash((nvars, frozenset(data.items()))))

    def __setattr__(self, *a):
        raise AttributeError("MPoly is immutable")

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def const(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, i, power=1):
        exps = [0] * nvars
        exps[i] = power
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exps, c=1):
        return cls(len(exps), {tuple(exps): c})

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms.get((0,) * self.nvars, 0)

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return self._hash

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MPoly(self.nvars, out)

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MPoly(self.nvars, {e: c * other for e, c in self.terms.items()})
        out = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __repr__(self):
        if not self.terms:
            return "MPoly(0)"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"x{i + 1}^{k}" for i, k in enumerate(e) if k)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "MPoly(" + " + ".join(parts) + ")"


# ---------------------------------------------------------------------------
# integer matrices
# ---------------------------------------------------------------------------

_PURE = os.environ.get("CHAINFACT_PURE", "") not in ("", "0")
_INT64_SAFE = 1 << 62

_np = None


def _numpy():
    global _np
    if _np is None:
        import numpy
        _np = numpy
    return _np


def _max_abs(rows):
    m = 0
    for row in rows:
        for x in row:
            if x > m:
                m = x
            elif -x > m:
                m = -x
    return m


def int_mat_mul(a, b):
    """Exact product of integer matrices given as row sequences.

    Proves int64 safety via inner_dim * max|a| * max|b| < 2^62 before using
    the numpy kernel; otherwise multiplies with Python big ints.
    """
    n = len(a)
    inner = len(a[0]) if n else 0
    if inner != len(b):
        raise ValueError("shape mismatch in matrix product")
    m = len(b[0]) if inner else 0
    if n == 0 or m == 0 or inner == 0:
        return [[0] * m for _ in range(n)]
    if not _PURE:
        amax, bmax = _max_abs(a), _max_abs(b)
        if inner * amax * bmax < _INT64_SAFE:
            np = _numpy()
            prod = np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)
            return prod.tolist()
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


class IntMatrix:
    """Immutable rectangular matrix of arbitrary-precision integers."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        rows = tuple(tuple(r) for r in entries)
        if not rows or not rows[0]:
            raise ValueError("IntMatrix must have positive dimensions")
        ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            for x in r:
                if not isinstance(x, int):
                    raise TypeError("integer entries required")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, *a):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n, m):
        return cls([[0] * m for _ in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __add__(self, other):
        return IntMatrix([[x + y for x, y in zip(r, s)]
                          for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return IntMatrix([[x - y for x, y in zip(r, s)]
                          for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return IntMatrix([[-x for x in r] for r in self.entries])

    def __mul__(self, other):
        if isinstance(other, int):
            return IntMatrix([[x * other for x in r] for r in self.entries])
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        return IntMatrix(int_mat_mul(self.entries, other.entries))

    __rmul__ = __mul__
    __matmul__ = __mul__

    def transpose(self):
        return IntMatrix(list(zip(*self.entries)))

    def is_square(self):
        return self.rows == self.cols

    def power(self, k):
        """Nonnegative power by binary exponentiation."""
        if not self.is_square() or k < 0:
            raise ValueError("power needs a square base and k >= 0")
        result = IntMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.entries]!r})"


def det_bareiss(a: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if not a.is_square():
        raise ValueError("determinant of a non-square matrix")
    n = a.rows
    m = [list(r) for r in a.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


class SNFResult:
    """Smith normal form data: U*A*V = D with U, V unimodular."""

    __slots__ = ("U", "D", "V")

    def __init__(self, U, D, V):
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "V", V)

    def __setattr__(self, *a):
        raise AttributeError("SNFResult is immutable")

    def invariant_factors(self):
        k = min(self.D.rows, self.D.cols)
        return tuple(self.D[i, i] for i in range(k))


def smith_normal_form(a: IntMatrix) -> SNFResult:
    """Smith normal form with deterministic pivoting.

    The pivot at each step is the smallest-absolute-value nonzero entry of
    the working submatrix, ties broken by lowest (row, col).  Returns
    unimodular U, V and diagonal D with a divisibility chain d1 | d2 | ...
    and nonnegative diagonal entries.
    """
    n, m = a.rows, a.cols
    M = [list(r) for r in a.entries]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    V = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def row_op(i, j, q):          # row_i -= q * row_j
        Mi, Mj = M[i], M[j]
        for c in range(m):
            Mi[c] -= q * Mj[c]
        Ui, Uj = U[i], U[j]
        for c in range(n):
            Ui[c] -= q * Uj[c]

    def col_op(i, j, q):          # col_i -= q * col_j
        for r in range(n):
            M[r][i] -= q * M[r][j]
        for r in range(m):
            V[r][i] -= q * V[r][j]

    def swap_rows(i, j):
        if i != j:
            M[i], M[j] = M[j], M[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for r in range(n):
                M[r][i], M[r][j] = M[r][j], M[r][i]
            for r in range(m):
                V[r][i], V[r][j] = V[r][j], V[r][i]

    def pick_pivot(k):
        best = None
        for i in range(k, n):
            for j in range(k, m):
                x = M[i][j]
                if x:
                    key = (abs(x), i, j)
                    if best is None or key < best:
                        best = key
        return None if best is None else (best[1], best[2])

    rank_bound = min(n, m)
    for k in range(rank_bound):
        while True:
            pos = pick_pivot(k)
            if pos is None:
                break
            swap_rows(k, pos[0])
            swap_cols(k, pos[1])
            p = M[k][k]
            dirty = False
            for i in range(k + 1, n):
                if M[i][k]:
                    row_op(i, k, M[i][k] // p)
                    dirty = dirty or M[i][k] != 0
            for j in range(k + 1, m):
                if M[k][j]:
                    col_op(j, k, M[k][j] // p)
                    dirty = dirty or M[k][j] != 0
            if dirty:
                continue
            # pivot must divide every remaining entry for the chain to hold
            offender = None
            for i in range(k + 1, n):
                for j in range(k + 1, m):
                    if M[i][j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(k, offender, -1)   # fold the offending row into row k
        if M[k][k] < 0:
            for c in range(m):
                M[k][c] = -M[k][c]
            for c in range(n):
                U[k][c] = -U[k][c]

    return SNFResult(IntMatrix(U), IntMatrix(M), IntMatrix(V))


def in_row_span(vec, a: IntMatrix) -> bool:
    """Whether an integer vector lies in the integer row span of ``a``."""
    if len(vec) != a.cols:
        raise ValueError("length mismatch")
    snf = smith_normal_form(a)
    w = int_mat_mul([list(vec)], snf.V.entries)[0]
    k = min(a.rows, a.cols)
    for j in range(a.cols):
        d = snf.D[j, j] if j < k else 0
        if d == 0:
            if w[j] != 0:
                return False
        elif w[j] % d:
            return False
    return True


def charpoly_division_free(a: IntMatrix) -> Poly:
    """det(t*1 - A) by the Berkowitz algorithm (no divisions).

    Coefficient list is returned lowest-degree-first as a :class:`Poly`; the
    result is monic of degree n with exact integer coefficients.
    """
    if not a.is_square():
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = a.rows
    e = a.entries
    # work with coefficient vectors ordered highest power first:
    # after step i, c = [1, c1, ..., c_{i+1}] with
    # det(t*1 - A[:i+1,:i+1]) = t^{i+1} + c1 t^i + ...
    c = [1, -e[0][0]]
    for i in range(1, n):
        row = e[i][:i]
        col = [e[r][i] for r in range(i)]
        # s[k] = row . M^k . col for the leading i x i block M
        s = []
        v = col
        for _ in range(i):
            s.append(sum(x * y for x, y in zip(row, v)))
            v = [sum(e[r][j] * v[j] for j in range(i)) for r in range(i)]
        # first column of the (i+2) x (i+1) Toeplitz update matrix
        t0 = [1, -e[i][i]] + [-x for x in s]
        new = [0] * (i + 2)
        for r in range(i + 2):
            acc = 0
            for k in range(min(r, i) + 1):
                acc += t0[r - k] * c[k]
            new[r] = acc
        c = new
    return Poly(list(reversed(c)))


def det_lower_hessenberg(diag_rows, superdiag, n) -> Poly:
    """Determinant of a sparse lower-Hessenberg matrix with Poly entries.

    ``diag_rows[i]`` maps column j <= i to the entry at (i, j); ``superdiag[i]``
    is the entry at (i, i+1).  Uses the leading-principal-minor cofactor
    recurrence; cost scales with the number of stored entries, so companion
    shapes are quadratic overall.
    """
    if n == 0:
        return Poly.one()
    # last step at which each referenced column is needed
    last_use = {}
    for i, row in enumerate(diag_rows):
        for j in row:
            if j > i:
                raise ValueError("entry above the superdiagonal")
            last_use[j] = max(last_use.get(j, 0), i + 1)
    minors = [Poly.one()]               # minors[k] = det of leading k x k block
    tracked = {}                        # j -> product superdiag[j..k-2]
    for k in range(1, n + 1):
        for j in list(tracked):
            if last_use.get(j, 0) < k:
                del tracked[j]
            else:
                tracked[j] = tracked[j] * superdiag[k - 2]
        if last_use.get(k - 1, 0) >= k:
            tracked[k - 1] = Poly.one()
        acc = Poly.zero()
        for j, entry in diag_rows[k - 1].items():
            term = entry * tracked[j] * minors[j]
            if (k - 1 + j) % 2:
                term = -term
            acc = acc + term
        minors.append(acc)
    return minors[n]


# ---------------------------------------------------------------------------
# exact rational elimination
# ---------------------------------------------------------------------------

def _frac_rows(a):
    return [[Fraction(x) for x in row] for row in a]


def rank_rational(a) -> int:
    """Rank over the rationals by exact Gaussian elimination.

    Accepts any rectangular sequence of sequences of ints/Fractions.
    """
    rows = _frac_rows(a)
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][col]:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        inv = 1 / prow[col]
        rows[rank] = prow = [x * inv for x in prow]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], prow)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def rref(a):
    """Reduced row echelon form; returns (rows, pivot column list)."""
    rows = _frac_rows(a)
    pivots = []
    if not rows:
        return rows, pivots
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][col]:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    return rows[:rank], pivots


def kernel_basis(a):
    """Basis of the right kernel {x : A x = 0} over the rationals.

    ``a`` is a sequence of rows; returns a list of exact coordinate vectors.
    """
    rows = [list(r) for r in a]
    if not rows:
        return []
    ncols = len(rows[0])
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][free]
        basis.append(vec)
    return basis


def sparse_rank(rows, ncols=None) -> int:
    """Rank of a sparse rational matrix given as dicts {col: coeff}.

    Pivots are chosen to limit fill (shortest rows first, then the column
    with the fewest other occurrences).  Arithmetic is exact.
    """
    col_count = {}
    work = []
    for row in rows:
        r = {c: Fraction(v) for c, v in row.items() if v}
        if r:
            work.append(r)
            for c in r:
                col_count[c] = col_count.get(c, 0) + 1
    work.sort(key=len)
    pivots = {}                     # col -> normalized row dict
    rank = 0
    for row in work:
        while True:
            hit = None
            for c in row:
                if c in pivots:
                    hit = c
                    break
            if hit is None:
                break
            f = row[hit]
            for c, v in pivots[hit].items():
                nv = row.get(c, 0) - f * v
                if nv:
                    row[c] = nv
                elif c in row:
                    del row[c]
        if row:
            pc = min(row, key=lambda c: (col_count.get(c, 0), c))
            inv = 1 / row[pc]
            pivots[pc] = {c: v * inv for c, v in row.items()}
            rank += 1
    return rank


def lcm(a, b):
    return a // gcd(a, b) * b
