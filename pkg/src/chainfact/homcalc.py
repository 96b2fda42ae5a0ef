"""Stable morphism-space dimensions by exact linear algebra on graded pieces.

For factorizations F, G and a degree l, the degree-l maps F -> T^p G form a
2-periodic complex whose cohomology at parity p is the stable Hom space.
Each graded piece is finite because the weight character is positive, so the
computation is: enumerate monomial bases slot by slot, assemble the two
neighboring differentials as sparse rational matrices, and take exact ranks.

Scan windows are certified on both sides: below by direct weight negativity
of the cell spaces, above by applying the same bound to the Serre-dual query.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .chain import ChainPolynomial, Degree, build_grading_group
from .exactmath import MPoly, kernel_basis, sparse_rank
from .mf import GradedMatrix, MatrixFactorization, MFMorphism, t_power


@dataclass(frozen=True)
class HomQuery:
    """One stable-morphism dimension request."""

    source: MatrixFactorization
    target: MatrixFactorization
    degree: Degree
    power: int = 0


def _variable_degree_sum(group):
    total = group.zero
    for i in range(group.chain.n):
        total = total + group.variable_degree(i)
    return total


@lru_cache(maxsize=None)
def _cell_basis(F: MatrixFactorization, H: MatrixFactorization, l: Degree):
    """Monomial basis of the degree-l component-map space F -> H.

    Returns (items, index) with items = [(component, row, col, exponents)].
    """
    group = F.group
    items = []
    for comp, (src, tgt) in enumerate(((F.F0, H.F0), (F.F1, H.F1))):
        for r in range(tgt.rank):
            for c in range(src.rank):
                want = src.twists[c] - tgt.twists[r] + l
                for exps in group.monomial_basis(want):
                    items.append((comp, r, c, exps))
    return tuple(items), {it: i for i, it in enumerate(items)}


def _differential_rows(F, G, l, p):
    """Rows (one per source cell) of d_p: C^p -> C^{p+1} in the cell bases.

    The translation functor already negates structure maps, so the rolled
    presentation uses a constant minus sign on the phi-after-d side; the
    resulting differential is (-1)^p times the classical Hom-complex one,
    hence has the same kernels and images and squares to zero.
    """
    H = t_power(G, p)
    basis, _ = _cell_basis(F, H, l)
    _, tindex = _cell_basis(F, t_power(G, p + 1), l)
    rows = []
    for comp, r, c, exps in basis:
        mono = MPoly.monomial(exps)
        row: dict[int, Fraction] = {}

        def add(tcomp, tr, tc, poly):
            if poly.is_zero():
                return
            for e, coeff in poly.terms.items():
                idx = tindex[(tcomp, tr, tc, e)]
                row[idx] = row.get(idx, 0) + coeff

        if comp == 0:
            for tr in range(H.F1.rank):
                add(0, tr, c, H.d0.entries[tr][r] * mono)
            for tc in range(F.F1.rank):
                add(1, r, tc, -(mono * F.d1.entries[c][tc]))
        else:
            for tc in range(F.F0.rank):
                add(0, r, tc, -(mono * F.d0.entries[c][tc]))
            for tr in range(H.F0.rank):
                add(1, tr, c, H.d1.entries[tr][r] * mono)
        rows.append(row)
    return rows


@lru_cache(maxsize=None)
def _rank_d(F, G, l, p) -> int:
    return sparse_rank(_differential_rows(F, G, l, p))


def hom_dim(source: MatrixFactorization, target: MatrixFactorization,
            degree: Degree | None = None, power: int = 0) -> int:
    """dim of stable Hom(source, T^power target(degree)).

    Kernel of the outgoing differential modulo the image of the incoming one,
    all over exact rationals.
    """
    if source.group is not target.group:
        raise ValueError("factorizations live over different gradings")
    group = source.group
    l = degree if degree is not None else group.zero
    cells = len(_cell_basis(source, t_power(target, power), l)[0])
    if cells == 0:
        return 0
    out_rank = _rank_d(source, target, l, power)
    in_rank = _rank_d(source, target, l, power - 1)
    return cells - out_rank - in_rank


def hom_dim_query(q: HomQuery) -> int:
    return hom_dim(q.source, q.target, q.degree, q.power)


def _max_cell_weight(F, H, l):
    """Largest slot weight of the component-map space, or None if no slots."""
    best = None
    for src, tgt in ((F.F0, H.F0), (F.F1, H.F1)):
        for c in range(src.rank):
            for r in range(tgt.rank):
                w = (src.twists[c] - tgt.twists[r] + l).weight
                if best is None or w > best:
                    best = w
    return best


def _lowest_nonvanishing_power(F, G, l) -> int | None:
    """Least p for which the cell space C^p can be nonzero (weight bound)."""
    group = F.group
    d = group.total_degree.weight
    best = None
    for parity in (0, 1):
        base = _max_cell_weight(F, t_power(G, parity), l)
        if base is None:
            continue
        k = -(base // d)                       # ceil(-base/d)
        p = 2 * k + parity
        if best is None or p < best:
            best = p
    return best


def scan_window(source, target, degree: Degree | None = None) -> tuple[int, int]:
    """Certified power window outside which all stable Homs vanish.

    The lower end is direct weight negativity of the cells; the upper end is
    the same bound applied to the Serre-dual query.  Returns (pmin, pmax),
    possibly empty as (0, -1).
    """
    group = source.group
    l = degree if degree is not None else group.zero
    pmin = _lowest_nonvanishing_power(source, target, l)
    if pmin is None:
        return (0, -1)
    dual_l = -_variable_degree_sum(group) - l
    qmin = _lowest_nonvanishing_power(target, source, dual_l)
    if qmin is None:
        return (0, -1)
    pmax = group.chain.n - qmin
    return (pmin, pmax)


# ---------------------------------------------------------------------------
# tables and pairings
# ---------------------------------------------------------------------------

SCHEMA_VERSION = 1


@dataclass
class HomTable:
    """Hom dimensions over a collection, per (source, target, power) cell."""

    chain: tuple[int, ...]
    offset: int
    entries: dict[tuple[int, int, int], int]
    windows: dict[tuple[int, int], tuple[int, int]]
    dual: bool = False
    margin: int = 0

    def dim(self, i, j, p) -> int:
        return self.entries.get((i, j, p), 0)

    def hull(self) -> tuple[int, int]:
        if not self.entries:
            return (0, -1)
        ps = [p for (_, _, p) in self.entries]
        return (min(ps), max(ps))

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "chain": list(self.chain),
            "offset": self.offset,
            "dual": self.dual,
            "margin": self.margin,
            "window": list(self.hull()),
            "windows": {f"{i},{j}": list(w) for (i, j), w in sorted(self.windows.items())},
            "entries": [{"i": i, "j": j, "p": p, "dim": d}
                        for (i, j, p), d in sorted(self.entries.items())],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "HomTable":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError("unsupported table schema")
        entries = {(e["i"], e["j"], e["p"]): e["dim"] for e in data["entries"]}
        windows = {}
        for key, val in data["windows"].items():
            i, j = key.split(",")
            windows[(int(i), int(j))] = (val[0], val[1])
        return cls(tuple(data["chain"]), data["offset"], entries, windows,
                   data.get("dual", False), data.get("margin", 0))


def compute_hom_table(f: ChainPolynomial, offset: int = 0, margin: int = 0,
                      dual: bool = False, collection=None) -> HomTable:
    """All pairwise Hom dimensions of the collection over certified windows.

    With ``dual`` set, each (i, j, p) cell instead holds the Serre-dual query
    dimension, so the two tables must agree entrywise.
    """
    if collection is None:
        from .verify import build_collection
        collection = build_collection(f, offset)
    group = build_grading_group(f)
    n = f.n
    sigma = _variable_degree_sum(group)
    mu = len(collection)
    entries, windows = {}, {}
    for i in range(mu):
        for j in range(mu):
            pmin, pmax = scan_window(collection[i], collection[j])
            windows[(i, j)] = (pmin, pmax)
            for p in range(pmin - margin, pmax + margin + 1):
                if dual:
                    d = hom_dim(collection[j], collection[i], -sigma, n - p)
                else:
                    d = hom_dim(collection[i], collection[j], None, p)
                entries[(i, j, p)] = d
    return HomTable(f.exponents, offset, entries, windows, dual, margin)


def euler_pairing(table: HomTable):
    """Alternating sums over the certified windows, as a nested list."""
    mu = max(i for (i, _, _) in table.entries) + 1 if table.entries else 0
    out = []
    for i in range(mu):
        row = []
        for j in range(mu):
            pmin, pmax = table.windows[(i, j)]
            row.append(sum((1 if p % 2 == 0 else -1) * table.dim(i, j, p)
                           for p in range(pmin, pmax + 1)))
        out.append(row)
    return out


def check_exceptionality(table: HomTable) -> dict:
    """Exceptional-collection conditions read off a computed table.

    Checks scalar endomorphisms concentrated at power 0 and lower-triangular
    vanishing across the full stored power range (window plus margin); also
    reports whether the collection is strongly exceptional.
    """
    mu = max(i for (i, _, _) in table.entries) + 1 if table.entries else 0
    failures = []
    strong = True
    for (i, j, p), d in table.entries.items():
        if i == j:
            want = 1 if p == 0 else 0
            if d != want:
                failures.append({"i": i, "j": j, "p": p, "dim": d,
                                 "reason": "endomorphisms not scalar"})
        elif i > j:
            if d != 0:
                failures.append({"i": i, "j": j, "p": p, "dim": d,
                                 "reason": "backwards morphism"})
        elif p != 0 and d != 0:
            strong = False
    return {"objects": mu, "exceptional": not failures,
            "strong": strong and not failures, "failures": failures}


def serre_symmetry_check(table: HomTable, dual_table: HomTable) -> bool:
    """Entrywise agreement of a table with its Serre-dual recomputation."""
    keys = set(table.entries) | set(dual_table.entries)
    return all(table.entries.get(k, 0) == dual_table.entries.get(k, 0)
               for k in keys)


# ---------------------------------------------------------------------------
# closed-form oracle for the diagonal
# ---------------------------------------------------------------------------

def closed_form_hom(f: ChainPolynomial, parity: int) -> dict[Degree, int]:
    """Graded dimensions of the diagonal Hom algebra in closed form.

    Even variable counts: the quotient by the even-indexed variables and the
    powers of the odd-indexed ones, with nothing at odd parity.  Odd variable
    counts: the mirror quotient at even parity and, at odd parity, one free
    rank over it generated in the negated-first-variable degree.
    """
    group = build_grading_group(f)
    n, a = f.n, f.exponents
    if n % 2 == 0:
        if parity % 2:
            return {}
        free_vars = list(range(0, n, 2))         # 0-based odd-labelled x1, x3, ...
        gen_shift = group.zero
    else:
        free_vars = list(range(1, n, 2))         # 0-based even-labelled x2, x4, ...
        gen_shift = group.zero if parity % 2 == 0 else group.variable_degree(0)

    dims: dict[Degree, int] = {}

    def rec(idx, exps):
        if idx == len(free_vars):
            full = [0] * n
            for v, e in zip(free_vars, exps):
                full[v] = e
            deg = group.monomial_degree(tuple(full)) - gen_shift
            dims[deg] = dims.get(deg, 0) + 1
            return
        for e in range(a[free_vars[idx]]):
            rec(idx + 1, exps + [e])

    rec(0, [])
    return dims


# ---------------------------------------------------------------------------
# explicit morphism representatives
# ---------------------------------------------------------------------------

def morphism_space_basis(source, target, degree: Degree | None = None,
                         power: int = 0) -> list[MFMorphism]:
    """Explicit representatives of a basis of the stable Hom space.

    Kernel vectors of the outgoing differential are reduced modulo the image
    of the incoming one; each survivor is reassembled into a validated
    morphism onto T^power(target)(degree).
    """
    group = source.group
    l = degree if degree is not None else group.zero
    H = t_power(target, power)
    basis, _ = _cell_basis(source, H, l)
    dim = len(basis)
    if dim == 0:
        return []
    out_rows = _differential_rows(source, target, l, power)
    out_dim = len(_cell_basis(source, t_power(target, power + 1), l)[0])
    dense_out = [[Fraction(0)] * dim for _ in range(out_dim)]
    for col, row in enumerate(out_rows):
        for tgt_idx, coeff in row.items():
            dense_out[tgt_idx][col] = Fraction(coeff)
    kernel = kernel_basis(dense_out) if out_dim else \
        [[Fraction(1) if i == j else Fraction(0) for i in range(dim)] for j in range(dim)]

    in_rows = _differential_rows(source, target, l, power - 1)
    image = []
    for row in in_rows:
        vec = [Fraction(0)] * dim
        for tgt_idx, coeff in row.items():
            vec[tgt_idx] = Fraction(coeff)
        if any(vec):
            image.append(vec)

    # reduce kernel vectors modulo the image span, keep independent survivors
    pivots: dict[int, list[Fraction]] = {}

    def reduce_vec(vec):
        vec = list(vec)
        for col, prow in sorted(pivots.items()):
            if vec[col]:
                fac = vec[col]
                vec = [x - fac * y for x, y in zip(vec, prow)]
        return vec

    for vec in image:
        vec = reduce_vec(vec)
        lead = next((c for c, x in enumerate(vec) if x), None)
        if lead is not None:
            inv = 1 / vec[lead]
            pivots[lead] = [x * inv for x in vec]

    reps = []
    for vec in kernel:
        red = reduce_vec(vec)
        lead = next((c for c, x in enumerate(red) if x), None)
        if lead is None:
            continue
        inv = 1 / red[lead]
        pivots[lead] = [x * inv for x in red]
        reps.append(red)

    nvars = group.chain.n
    morphisms = []
    for vec in reps:
        comps = {0: {}, 1: {}}
        for coeff, (comp, r, c, exps) in zip(vec, basis):
            if coeff:
                slot = comps[comp].setdefault((r, c), {})
                slot[exps] = slot.get(exps, 0) + coeff

        def to_matrix(comp, src_mod, tgt_mod):
            rows = [[MPoly(nvars, comps[comp].get((r, c), {}))
                     for c in range(src_mod.rank)] for r in range(tgt_mod.rank)]
            return GradedMatrix(src_mod, tgt_mod, l, rows)

        phi0 = to_matrix(0, source.F0, H.F0)
        phi1 = to_matrix(1, source.F1, H.F1)
        morphisms.append(MFMorphism(source, H, l, phi0, phi1))
    return morphisms


def clear_caches():
    _cell_basis.cache_clear()
    _rank_d.cache_clear()
