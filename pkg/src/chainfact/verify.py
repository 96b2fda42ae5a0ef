"""Orchestration: collection construction, identity pipelines, reports, cache.

This module wires everything together: it builds the distinguished collection
of stabilizations with the explicit generator/cofactor splittings, runs the
whole battery of exact checks, and packages the outcome as a serializable
report.  Nothing here does new mathematics; failures bubble up from the
lower layers and land in report entries with witnesses attached.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .chain import ChainPolynomial, Degree, build_grading_group, numerics, transpose
from .exactmath import IntMatrix, MPoly, Poly
from .homcalc import (
    HomTable,
    check_exceptionality,
    compute_hom_table,
    euler_pairing,
    hom_dim,
    morphism_space_basis,
    scan_window,
    serre_symmetry_check,
)
from .invariants import (
    VerificationFailure,
    check_lattice_correspondence,
    check_zeta_factorization,
    companion_matrix,
    euler_matrix,
    monodromy_data,
    polarization_integer,
    transpose_monodromy_charpoly,
    zeta_polynomial,
)
from .mf import (
    GradingError,
    MatrixFactorization,
    cone,
    direct_sum,
    reduce,
    shift,
    stabilize,
    zero_object,
)

REPORT_SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# collection construction
# ---------------------------------------------------------------------------

def collection_splitting(f: ChainPolynomial):
    """Generator/cofactor splitting behind the distinguished collection.

    Odd variable counts quotient by the odd-indexed variables, even counts by
    the even-indexed ones; each cofactor regroups the two monomials of f that
    involve the matching generator.  Returns (gens, cofs, step) where step is
    the one-object twist of the collection.
    """
    n = f.n
    a = f.exponents
    g = build_grading_group(f)

    def x(i, power=1):
        return MPoly.variable(n, i, power)

    gens, cofs = [], []
    if n % 2:
        for j in range(0, n, 2):                # 0-based: x1, x3, ...
            gens.append(x(j))
            if j == 0:
                cofs.append(x(0, a[0] - 1) * x(1) if n > 1 else x(0, a[0] - 1))
            else:
                tail = x(j, a[j] - 1) * x(j + 1) if j + 1 < n else x(j, a[j] - 1)
                cofs.append(x(j - 1, a[j - 1]) + tail)
        step = -g.variable_degree(0)
    else:
        for j in range(1, n, 2):                # 0-based: x2, x4, ...
            gens.append(x(j))
            tail = x(j, a[j] - 1) * x(j + 1) if j + 1 < n else x(j, a[j] - 1)
            cofs.append(x(j - 1, a[j - 1]) + tail)
        step = g.variable_degree(0)
    return gens, cofs, step


def build_collection(f: ChainPolynomial, offset: int = 0) -> list[MatrixFactorization]:
    """The length-mu twist orbit of the base stabilization."""
    gens, cofs, step = collection_splitting(f)
    base = stabilize(f, gens, cofs)
    mu = numerics(f).milnor
    return [shift(base, (offset + i) * step) for i in range(mu)]


def auxiliary_splitting(f: ChainPolynomial):
    """Splitting for the triangle third objects (even variable count).

    Quotients by x1 together with the even-indexed variables; the first two
    cofactors split the leading monomials between x1 and x2.
    """
    n, a = f.n, f.exponents
    if n % 2:
        raise ValueError("auxiliary objects need an even variable count")

    def x(i, power=1):
        return MPoly.variable(n, i, power)

    gens = [x(0), x(1)] + [x(j) for j in range(3, n, 2)]
    cofs = [x(0, a[0] - 1) * x(1),
            x(1, a[1] - 1) * x(2) if n > 2 else x(1, a[1] - 1)]
    for j in range(3, n, 2):
        tail = x(j, a[j] - 1) * x(j + 1) if j + 1 < n else x(j, a[j] - 1)
        cofs.append(x(j - 1, a[j - 1]) + tail)
    return gens, cofs


def ladder_splitting(f: ChainPolynomial, j: int):
    """Splitting for the ladder objects (odd count, first generator a power)."""
    n, a = f.n, f.exponents
    if n % 2 == 0 or n < 3:
        raise ValueError("ladder objects need an odd count of at least three")
    if not 1 <= j <= a[0]:
        raise ValueError("ladder index out of range")

    def x(i, power=1):
        return MPoly.variable(n, i, power)

    gens = [x(0, j)] + [x(i) for i in range(2, n, 2)]
    first = x(1) if j == a[0] else x(0, a[0] - j) * x(1)
    cofs = [first]
    for i in range(2, n, 2):
        tail = x(i, a[i] - 1) * x(i + 1) if i + 1 < n else x(i, a[i] - 1)
        cofs.append(x(i - 1, a[i - 1]) + tail)
    return gens, cofs


def auxiliary_object(f: ChainPolynomial, i: int) -> MatrixFactorization:
    gens, cofs = auxiliary_splitting(f)
    g = build_grading_group(f)
    return stabilize(f, gens, cofs, i * g.variable_degree(0))


def ladder_object(f: ChainPolynomial, i: int, j: int) -> MatrixFactorization:
    if j == 0 or j == f.exponents[0] + 1:
        return zero_object(f)
    gens, cofs = ladder_splitting(f, j)
    g = build_grading_group(f)
    return stabilize(f, gens, cofs, -i * g.variable_degree(0))


# ---------------------------------------------------------------------------
# verification report
# ---------------------------------------------------------------------------

def _jsonify(value):
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, IntMatrix):
        return [list(r) for r in value.entries]
    if isinstance(value, Poly):
        return list(value.coeffs)
    if isinstance(value, Degree):
        return list(value.coords)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, MPoly):
        return {",".join(map(str, e)): str(c) for e, c in sorted(value.terms.items())}
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    return str(value)


@dataclass
class CheckResult:
    name: str
    status: str                  # pass | fail | note | inconclusive
    detail: dict = field(default_factory=dict)
    elapsed_ns: int = 0


@dataclass
class VerificationReport:
    chain: tuple[int, ...]
    offset: int
    tool_version: str
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def check(self, name) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(self.chain, self.offset, self.tool_version,
                                  self.checks + other.checks)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "chain": list(self.chain),
            "offset": self.offset,
            "tool_version": self.tool_version,
            "checks": [{"name": c.name, "status": c.status,
                        "detail": c.detail, "elapsed_ns": c.elapsed_ns}
                       for c in self.checks],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "VerificationReport":
        if data.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ValueError("unsupported report schema")
        checks = [CheckResult(c["name"], c["status"], c["detail"], c["elapsed_ns"])
                  for c in data["checks"]]
        return cls(tuple(data["chain"]), data["offset"], data["tool_version"], checks)


class _Runner:
    def __init__(self):
        self.checks: list[CheckResult] = []

    def run(self, name, fn):
        t0 = time.perf_counter_ns()
        try:
            detail = fn()
            status = "pass"
            if isinstance(detail, tuple):
                status, detail = detail
            detail = _jsonify(detail or {})
        except (VerificationFailure, GradingError) as exc:
            status = "fail"
            detail = {"error": str(exc)}
            witness = getattr(exc, "witness", None)
            if witness:
                detail["witness"] = _jsonify(witness)
        self.checks.append(CheckResult(name, status, detail,
                                       time.perf_counter_ns() - t0))
        return self.checks[-1]


def emit_report(report: VerificationReport, fmt: str = "json") -> str:
    """Render a report as machine JSON, flat CSV, or human Markdown."""
    if fmt == "json":
        return json.dumps(report.to_json_dict(), indent=2, sort_keys=True)
    if fmt == "csv":
        lines = ["name,status,elapsed_ns"]
        for c in report.checks:
            lines.append(f"{c.name},{c.status},{c.elapsed_ns}")
        return "\n".join(lines) + "\n"
    if fmt == "md":
        lines = [f"# Verification report for chain {','.join(map(str, report.chain))}",
                 "",
                 f"offset: {report.offset}; tool {report.tool_version}; "
                 f"overall: {'PASS' if report.passed else 'FAIL'}",
                 "",
                 "| check | status | ms |",
                 "| --- | --- | --- |"]
        for c in report.checks:
            lines.append(f"| {c.name} | {c.status} | {c.elapsed_ns // 10 ** 6} |")
        for c in report.checks:
            if c.name == "euler_pairing_matches" and "matrix" in c.detail:
                lines += ["", "Euler matrix (engine):", "", "```"]
                for row in c.detail["matrix"]:
                    lines.append(" ".join(str(x) for x in row))
                lines += ["```"]
            if c.name == "zeta_factorization" and "factors" in c.detail:
                lines += ["", f"det(1 - tM) factorization: {c.detail['factors']}"]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report(text: str) -> VerificationReport:
    return VerificationReport.from_json_dict(json.loads(text))


# ---------------------------------------------------------------------------
# hom-table cache
# ---------------------------------------------------------------------------

class HomTableCache:
    """Content-addressed JSON store for computed Hom tables.

    The key hashes the chain, offset, variant, margin, and schema version, so
    convention changes invalidate automatically; unreadable or schema-stale
    entries are recomputed and overwritten.
    """

    def __init__(self, root: str | os.PathLike | None = None):
        if root is None:
            root = os.environ.get("CHAINFACT_CACHE_DIR")
        if root is None:
            root = Path.home() / ".cache" / "chainfact"
        self.root = Path(root)

    def _path(self, chain, offset, dual, margin) -> Path:
        key = json.dumps({"chain": list(chain), "offset": offset, "dual": dual,
                          "margin": margin, "schema": 1}, sort_keys=True)
        digest = hashlib.sha256(key.encode()).hexdigest()[:24]
        return self.root / f"homtable-{digest}.json"

    def load(self, chain, offset, dual, margin) -> HomTable | None:
        path = self._path(chain, offset, dual, margin)
        try:
            data = json.loads(path.read_text())
            table = HomTable.from_json_dict(data)
        except (OSError, ValueError, KeyError, TypeError):
            return None
        if (table.chain != tuple(chain) or table.offset != offset
                or table.dual != dual or table.margin != margin):
            return None
        return table

    def store(self, table: HomTable) -> None:
        path = self._path(table.chain, table.offset, table.dual, table.margin)
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(table.to_json_dict(), sort_keys=True))
        tmp.replace(path)


def cached_hom_table(f: ChainPolynomial, offset: int = 0, margin: int = 0,
                     dual: bool = False, use_cache: bool = True,
                     cache: HomTableCache | None = None,
                     collection=None) -> tuple[HomTable, bool]:
    """Load a table from the cache or compute and store it.

    Returns (table, cache_hit).  With ``use_cache`` false the table is always
    recomputed, and the fresh result overwrites whatever was stored.
    """
    cache = cache or HomTableCache()
    if use_cache:
        table = cache.load(f.exponents, offset, dual, margin)
        if table is not None:
            return table, True
    table = compute_hom_table(f, offset, margin, dual, collection)
    try:
        cache.store(table)
    except OSError:
        pass
    return table, False


# ---------------------------------------------------------------------------
# pipelines
# ---------------------------------------------------------------------------

def verify_invariants(f: ChainPolynomial) -> VerificationReport:
    """The matrix-level identity battery (no Hom engine involved)."""
    r = _Runner()
    nm = numerics(f)

    def grading():
        g = build_grading_group(f)
        order = g.quotient_by_total_degree_order()
        if order != nm.cum_products[-1]:
            raise VerificationFailure("quotient order differs from the top degree",
                                      {"order": order})
        return {"weights": list(g.weights), "torsion": list(g.torsion_factors),
                "torsion_free": g.is_torsion_free(), "quotient_order": order}

    r.run("grading_group", grading)
    r.run("zeta_polynomial", lambda: {"coefficients": zeta_polynomial(f).poly,
                                      "degree": nm.milnor})
    r.run("euler_matrix", lambda: {"series": list(euler_matrix(f).series_coeffs)})
    r.run("companion_root", lambda: {"size": companion_matrix(zeta_polynomial(f)).rows})

    state = {}

    def monodromy():
        md = monodromy_data(f)
        state["md"] = md
        return {"det_one_minus_t": md.det_one_minus_t,
                "gcd_exponents": list(md.gcd_exponents)}

    r.run("monodromy_two_routes", monodromy)

    def zeta_fact():
        md = state.get("md") or monodromy_data(f)
        if not check_zeta_factorization(md, f):
            raise VerificationFailure("factorization product mismatch",
                                      {"charpoly": md.det_one_minus_t})
        factors = " * ".join(
            f"(1-t^{nm.cum_products[i] // md.gcd_exponents[i]})^"
            f"{'+' if (-1) ** (f.n - i) > 0 else '-'}{md.gcd_exponents[i]}"
            for i in range(f.n + 1))
        return {"factors": factors}

    r.run("zeta_factorization", zeta_fact)

    def oracle():
        md = state.get("md") or monodromy_data(f)
        reversed_poly = md.det_one_minus_t.reversal(nm.milnor)
        got = transpose_monodromy_charpoly(transpose(f))
        if got != reversed_poly:
            raise VerificationFailure("weighted-homogeneous oracle disagrees",
                                      {"oracle": got, "reversed": reversed_poly})
        return {"charpoly": got}

    r.run("monodromy_oracle", oracle)
    r.run("lattice_correspondence",
          lambda: {"ok": check_lattice_correspondence(euler_matrix(f), f)})
    r.run("polarization_integer", lambda: {"k": polarization_integer(f)})
    return VerificationReport(f.exponents, 0, __version__, r.checks)


def _euler_entry(source, target, degree=None) -> int:
    pmin, pmax = scan_window(source, target, degree)
    return sum((1 if p % 2 == 0 else -1) * hom_dim(source, target, degree, p)
               for p in range(pmin, pmax + 1))


def verify_main_theorem(f: ChainPolynomial, offset: int = 0,
                        use_cache: bool = True, margin: int = 3,
                        cache: HomTableCache | None = None) -> VerificationReport:
    """Full pipeline: collection, exceptionality, Euler pairing, identities."""
    report = verify_invariants(f)
    r = _Runner()
    state: dict = {}

    def collection():
        coll = build_collection(f, offset)
        state["coll"] = coll
        gens, _, _ = collection_splitting(f)
        want = 2 ** (len(gens) - 1)
        if any(e.size != want for e in coll):
            raise VerificationFailure("collection object of unexpected size",
                                      {"sizes": [e.size for e in coll]})
        return {"objects": len(coll), "size": want}

    r.run("collection", collection)

    def table():
        tbl, hit = cached_hom_table(f, offset, margin, False, use_cache, cache,
                                    state.get("coll"))
        state["table"] = tbl
        return {"entries": len(tbl.entries), "window_hull": list(tbl.hull()),
                "cache_hit": hit}

    r.run("hom_table", table)

    def exceptional():
        result = check_exceptionality(state["table"])
        state["exc"] = result
        if not result["exceptional"]:
            raise VerificationFailure("collection is not exceptional",
                                      {"failures": result["failures"]})
        return {"strong": result["strong"]}

    r.run("exceptionality", exceptional)

    def euler():
        engine = euler_pairing(state["table"])
        want = [list(row) for row in euler_matrix(f).matrix.entries]
        if engine != want:
            raise VerificationFailure("Euler pairing differs from the Toeplitz matrix",
                                      {"engine": engine, "matrix": want})
        return {"matrix": engine}

    r.run("euler_pairing_matches", euler)

    def serre_sym():
        dual, hit = cached_hom_table(f, offset, margin, True, use_cache, cache,
                                     state.get("coll"))
        if not serre_symmetry_check(state["table"], dual):
            raise VerificationFailure("Serre symmetry violated on the table")
        return {"cache_hit": hit}

    r.run("serre_symmetry", serre_sym)

    if f.n == 2:
        def nakayama():
            a1 = f.exponents[0]
            tbl = state["table"]
            mu = numerics(f).milnor
            exc = state.get("exc") or check_exceptionality(tbl)
            if not exc["strong"]:
                raise VerificationFailure("collection is not strong")
            for i in range(mu):
                for j in range(mu):
                    want = 1 if 0 <= j - i < a1 else 0
                    if tbl.dim(i, j, 0) != want:
                        raise VerificationFailure(
                            "path-algebra dimension table mismatch",
                            {"i": i, "j": j, "got": tbl.dim(i, j, 0), "want": want})
            return {"quiver_length": mu, "nilpotency": a1}

        r.run("nakayama_cartan", nakayama)

    r.checks.append(CheckResult(
        "fullness", "note",
        {"note": "generation of the whole category is not machine-verified; "
                 "only its computable consequences are checked"}, 0))
    return VerificationReport(f.exponents, offset, __version__,
                              report.checks + r.checks)


def _profiles_agree(probes, left, right, pad: int = 2) -> bool:
    for x in probes:
        w1 = scan_window(x, left)
        w2 = scan_window(x, right)
        lo = min(w1[0], w2[0]) - pad
        hi = max(w1[1], w2[1]) + pad
        for p in range(lo, hi + 1):
            if hom_dim(x, left, None, p) != hom_dim(x, right, None, p):
                return False
    return True


def _search_cone_match(source, target, reference, probes) -> str:
    """Search a morphism whose reduced cone matches the reference profile.

    Tries every basis element of the degree-zero stable Hom space and, for
    small spaces, signed sums of two basis elements; exhaustion is reported
    as inconclusive, never as a refutation.
    """
    basis = morphism_space_basis(source, target)
    if not basis:
        return "inconclusive"
    candidates = list(basis)
    if 2 <= len(basis) <= 3:
        from .mf import MFMorphism
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                for s in (1, -1):
                    phi0 = basis[i].phi0 + (-basis[j].phi0 if s < 0 else basis[j].phi0)
                    phi1 = basis[i].phi1 + (-basis[j].phi1 if s < 0 else basis[j].phi1)
                    candidates.append(MFMorphism(basis[i].source, basis[i].target,
                                                 basis[i].shift, phi0, phi1))
    for phi in candidates:
        c = reduce(cone(phi))
        if _profiles_agree(probes, c, reference):
            return "pass"
    return "inconclusive"


def verify_triangles(f: ChainPolynomial, offset: int = 0,
                     structural: bool | None = None) -> VerificationReport:
    """Triangle consequences: Euler additivity plus structural cone checks."""
    r = _Runner()
    nm = numerics(f)
    mu = nm.milnor
    if f.n < 2:
        r.checks.append(CheckResult("triangles", "note",
                                    {"note": "one variable has no triangle lemma"}, 0))
        return VerificationReport(f.exponents, offset, __version__, r.checks)
    if structural is None:
        structural = mu <= 10 and f.n <= 3
    coll = build_collection(f, offset)
    probes = coll

    if f.n % 2 == 0:
        def k_identity():
            bad = []
            for i in range(offset + 1, offset + mu):
                aux = auxiliary_object(f, i)
                prev = coll[i - 1 - offset]
                cur = coll[i - offset]
                for x in probes:
                    total = (_euler_entry(x, prev) - _euler_entry(x, cur)
                             + _euler_entry(x, aux))
                    if total != 0:
                        bad.append({"i": i, "total": total})
            if bad:
                raise VerificationFailure("Euler additivity failed", {"cases": bad})
            return {"triangles": mu - 1, "probes": len(probes)}

        r.run("triangle_euler_additivity", k_identity)

        def integrality():
            if (mu - 1) % f.exponents[0]:
                raise VerificationFailure("(mu - 1) not divisible by the first exponent",
                                          {"mu": mu})
            return {"reduced_length": (mu - 1) // f.exponents[0]}

        r.run("reduced_collection_integrality", integrality)

        if structural:
            def structure():
                i = offset + 1
                status = _search_cone_match(coll[0], coll[1],
                                            auxiliary_object(f, i), probes)
                return (status, {"i": i})

            r.run("triangle_structural", structure)
    else:
        a1 = f.exponents[0]

        def ladder_total(i, j, x):
            terms = [(1, ladder_object(f, i + 1, j)),
                     (-1, ladder_object(f, i, j + 1)),
                     (-1, ladder_object(f, i + 1, j - 1)),
                     (1, ladder_object(f, i, j))]
            total = 0
            for sgn, obj in terms:
                if obj.size:
                    total += sgn * _euler_entry(x, obj)
            return total

        i_range = range(offset, offset + min(mu - 1, 3))

        def ladder_identity():
            bad = []
            for i in i_range:
                for j in range(1, a1):
                    for x in probes:
                        total = ladder_total(i, j, x)
                        if total != 0:
                            bad.append({"i": i, "j": j, "total": total})
            if bad:
                raise VerificationFailure("ladder Euler identity failed",
                                          {"cases": bad})
            return {"ladder_width": a1, "widths_checked": list(range(1, a1))}

        r.run("ladder_euler_additivity", ladder_identity)

        def boundary_erratum():
            # The printed width-a1 instance reads the out-of-category object
            # as zero; its Euler defect is then forced to be the class sum of
            # a1+1 consecutive collection objects, which is nonzero.  Pin the
            # defect exactly so any drift is caught.
            gens_, cofs_, step = collection_splitting(f)
            base = stabilize(f, gens_, cofs_)
            mismatches = []
            boundary_holds = True
            for i in i_range:
                for x in probes:
                    total = ladder_total(i, a1, x)
                    predicted = sum(_euler_entry(x, shift(base, (i + k) * step))
                                    for k in range(a1 + 1))
                    if total != 0:
                        boundary_holds = False
                    if total != predicted:
                        mismatches.append({"i": i, "total": total,
                                           "predicted": predicted})
            if mismatches:
                raise VerificationFailure(
                    "boundary defect does not match the class-sum prediction",
                    {"cases": mismatches})
            status = "pass" if boundary_holds else "note"
            return (status, {"literal_boundary_instance_holds": boundary_holds,
                             "defect": "sum of a1+1 consecutive collection classes"})

        r.run("ladder_boundary_width_a1", boundary_erratum)

        def base_agrees():
            if ladder_object(f, offset, 1) != coll[0]:
                raise VerificationFailure("width-one ladder object differs from E_i")
            return {}

        r.run("ladder_base_object", base_agrees)

        def integrality():
            d2 = nm.cum_products[2]
            if (mu - a1 + 1) % d2:
                raise VerificationFailure("ladder length quotient not integral",
                                          {"mu": mu, "a1": a1, "d2": d2})
            return {"reduced_length": (mu - a1 + 1) // d2}

        r.run("reduced_collection_integrality", integrality)

        if structural:
            def structure():
                i = offset
                results = []
                for j in range(1, a1):
                    src = ladder_object(f, i + 1, j)
                    mid1 = ladder_object(f, i, j + 1)
                    mid2 = ladder_object(f, i + 1, j - 1)
                    if mid1.size and mid2.size:
                        target = direct_sum(mid1, mid2)
                    elif mid1.size:
                        target = mid1
                    elif mid2.size:
                        target = mid2
                    else:
                        continue
                    status = _search_cone_match(src, target,
                                                ladder_object(f, i, j), probes)
                    results.append({"j": j, "status": status})
                overall = ("pass" if all(x["status"] == "pass" for x in results)
                           else "inconclusive")
                return (overall, {"cases": results})

            r.run("triangle_structural", structure)

    return VerificationReport(f.exponents, offset, __version__, r.checks)


def verify_section_inequalities(f: ChainPolynomial) -> VerificationReport:
    """The strict reduction inequalities behind the generation argument."""
    r = _Runner()
    nm = numerics(f)
    n = f.n

    def check():
        mu = nm.milnor
        d = nm.cum_products
        if n == 1:
            return {"note": "vacuous for one variable"}
        if n % 2:
            m = (n - 1) // 2
            bound = sum(d[k] for k in range(1, 2 * m, 2))
            recursion = d[n - 2] * f.exponents[n - 2] * (f.exponents[n - 1] - 1) \
                + nm.milnor_numbers[n - 2]
            if mu != recursion:
                raise VerificationFailure("two-step recursion mismatch",
                                          {"mu": mu, "recursion": recursion})
        else:
            m = n // 2
            bound = sum(d[k] for k in range(0, 2 * m - 1, 2))
        if not mu > bound:
            raise VerificationFailure("strict inequality failed",
                                      {"mu": mu, "bound": bound})
        return {"milnor": mu, "bound": bound}

    r.run("reduction_inequalities", check)
    return VerificationReport(f.exponents, 0, __version__, r.checks)
