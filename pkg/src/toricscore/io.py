"""Problem files and reports.

A problem file is one JSON object::

    {
      "fan": {"rays": [[1,0],[0,1],[-1,-1]], "max_cones": [[0,1],[1,2],[0,2]]},
      "deformation": "euler",
      "hypersurfaces": [
        {"label": "C", "class": [2], "f": [[[1,1,0], 1], [[0,0,2], 1]], "J": "jacobian"}
      ],
      "queries": [{"kind": "intersect", "classes": [[1], "D2"]}]
    }

Polynomials are lists of ``[exponents, coefficient]`` pairs (an object keyed
by ``"a,b,c"`` is also accepted).  Rationals are integers, ``[p, q]`` pairs or
strings ``"p/q"``.  A class or W-vector is a list of rationals or ``"D<i>"``,
the class of the i-th toric divisor.  ``deformation`` is ``"euler"`` or a list
of ``{"row_ray", "col_ray", "w"}`` entries giving every nonzero coefficient.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from toricscore import __version__
from toricscore.errors import ClassMismatchError, FanError, ProblemParseError, ToricScoreError
from toricscore.polymology import (
    DeformedEuler,
    polymology_ring,
    product_V,
    sym_product,
    undeformed_euler,
    validate_deformation,
)
from toricscore.polynomial import Polynomial
from toricscore.rational import format_rational, parse_rational
from toricscore.score import (
    complete_intersection,
    make_hypersurface,
    restriction_consistency_check,
    score_product,
)
from toricscore.toric import Fan, ToricVariety, betti_numbers, intersection_number, validate_fan

KINDS = ("validate", "ring", "product", "score", "intersect")
_DIVISOR_RE = re.compile(r"^D(\d+)$")


@dataclass(frozen=True)
class HypersurfaceSpec:
    label: str
    divisor_class: tuple[int, ...] | None
    f: Polynomial
    J: tuple[Polynomial, ...] | None  # None means the Jacobian of f


@dataclass(frozen=True)
class Query:
    kind: str
    classes: tuple = ()  # sigmas / classes: tuples of Fractions or "D<i>" strings
    hypersurfaces: tuple[str, ...] | None = None
    consistency: bool = False


@dataclass(frozen=True)
class ProblemFile:
    fan: Fan
    deformation: str | tuple
    hypersurfaces: tuple[HypersurfaceSpec, ...]
    queries: tuple[Query, ...]


# -- parsing ----------------------------------------------------------------------

def _fail(location: str, message: str):
    raise ProblemParseError(message, location)


def _rational(value, loc: str) -> Fraction:
    try:
        return parse_rational(value)
    except ValueError as exc:
        _fail(loc, str(exc))


def _int_list(value, loc: str) -> list[int]:
    if not isinstance(value, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in value):
        _fail(loc, "expected a list of integers")
    return value


def _polynomial(value, nvars: int, loc: str) -> Polynomial:
    if isinstance(value, dict):
        pairs = []
        for key, c in value.items():
            try:
                exp = [int(t) for t in key.split(",")]
            except ValueError:
                _fail(f"{loc}.{key}", "monomial keys are comma-separated exponents")
            pairs.append((exp, c, f"{loc}.{key}"))
    elif isinstance(value, list):
        pairs = []
        for i, item in enumerate(value):
            if not isinstance(item, list) or len(item) != 2:
                _fail(f"{loc}[{i}]", "expected [exponents, coefficient]")
            pairs.append((_int_list(item[0], f"{loc}[{i}][0]"), item[1], f"{loc}[{i}]"))
    else:
        _fail(loc, "polynomial must be a list of [exponents, coefficient] pairs")
    terms = {}
    for exp, c, here in pairs:
        if len(exp) != nvars:
            _fail(here, f"exponent vector has length {len(exp)}, expected {nvars} (one per ray)")
        if any(a < 0 for a in exp):
            _fail(here, "negative exponent")
        if tuple(exp) in terms:
            _fail(here, "repeated monomial")
        terms[tuple(exp)] = _rational(c, here)
    return Polynomial(nvars, terms)


def _class_spec(value, rank: int, nrays: int, loc: str):
    if isinstance(value, str):
        m = _DIVISOR_RE.match(value)
        if not m or int(m.group(1)) >= nrays:
            _fail(loc, f"unknown divisor {value!r}")
        return value
    if not isinstance(value, list):
        _fail(loc, "expected a list of rationals or 'D<i>'")
    if len(value) != rank:
        _fail(loc, f"class has length {len(value)}, expected {rank}")
    return tuple(_rational(v, f"{loc}[{i}]") for i, v in enumerate(value))


def _variety_or_none(fan: Fan) -> ToricVariety | None:
    try:
        return ToricVariety.from_fan(fan)
    except FanError:
        return None


def problem_from_dict(data: Any) -> ProblemFile:
    if not isinstance(data, dict):
        _fail("$", "problem must be a JSON object")
    unknown = set(data) - {"fan", "deformation", "hypersurfaces", "queries"}
    if unknown:
        _fail(sorted(unknown)[0], "unknown top-level field")

    fd = data.get("fan")
    if not isinstance(fd, dict) or "rays" not in fd or "max_cones" not in fd:
        _fail("fan", "expected an object with 'rays' and 'max_cones'")
    rays = fd["rays"]
    if not isinstance(rays, list):
        _fail("fan.rays", "expected a list")
    rays = [_int_list(r, f"fan.rays[{i}]") for i, r in enumerate(rays)]
    cones = fd["max_cones"]
    if not isinstance(cones, list):
        _fail("fan.max_cones", "expected a list")
    cones = [_int_list(c, f"fan.max_cones[{i}]") for i, c in enumerate(cones)]
    try:
        fan = Fan(rays, cones)
    except FanError as exc:
        _fail("fan", str(exc))
    V = _variety_or_none(fan)
    nrays = fan.nrays
    rank = nrays - fan.dim

    dd = data.get("deformation", "euler")
    if dd == "euler":
        deformation: str | tuple = "euler"
    elif isinstance(dd, list):
        entries = []
        seen = set()
        for i, e in enumerate(dd):
            loc = f"deformation[{i}]"
            if not isinstance(e, dict) or set(e) != {"row_ray", "col_ray", "w"}:
                _fail(loc, "expected {row_ray, col_ray, w}")
            row, col = e["row_ray"], e["col_ray"]
            for name, v in (("row_ray", row), ("col_ray", col)):
                if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < nrays:
                    _fail(f"{loc}.{name}", "unknown ray index")
            if (row, col) in seen:
                _fail(loc, "duplicate entry")
            seen.add((row, col))
            if not isinstance(e["w"], list) or len(e["w"]) != rank:
                _fail(f"{loc}.w", f"expected {rank} rationals")
            w = tuple(_rational(v, f"{loc}.w[{k}]") for k, v in enumerate(e["w"]))
            if V is not None and any(w) and V.degrees[row] != V.degrees[col]:
                _fail(loc, f"couples rays of classes {V.degrees[row]} and {V.degrees[col]}")
            if any(w):
                entries.append((row, col, w))
        deformation = tuple(sorted(entries))
    else:
        _fail("deformation", "expected 'euler' or a list of entries")

    hyps = []
    labels = set()
    hd = data.get("hypersurfaces", [])
    if not isinstance(hd, list):
        _fail("hypersurfaces", "expected a list")
    for i, h in enumerate(hd):
        loc = f"hypersurfaces[{i}]"
        if not isinstance(h, dict) or "f" not in h:
            _fail(loc, "expected an object with at least 'f'")
        extra = set(h) - {"label", "class", "f", "J"}
        if extra:
            _fail(f"{loc}.{sorted(extra)[0]}", "unknown field")
        label = h.get("label", f"X{i + 1}")
        if not isinstance(label, str) or not label:
            _fail(f"{loc}.label", "label must be a non-empty string")
        if label in labels:
            _fail(f"{loc}.label", f"duplicate label {label!r}")
        labels.add(label)
        f = _polynomial(h["f"], nrays, f"{loc}.f")
        if f.is_zero():
            _fail(f"{loc}.f", "defining section is zero")
        cls = None
        if "class" in h:
            cls = tuple(_int_list(h["class"], f"{loc}.class"))
            if len(cls) != rank:
                _fail(f"{loc}.class", f"expected {rank} integers")
        if V is not None:
            try:
                got = V.class_of(f)
            except ClassMismatchError as exc:
                _fail(f"{loc}.f", str(exc))
            if cls is not None and got != cls:
                _fail(f"{loc}.f", f"f has class {list(got)}, declared {list(cls)}")
            cls = got
        J = h.get("J", "jacobian")
        if J == "jacobian":
            J = None
        elif isinstance(J, dict):
            polys = [Polynomial.zero(nrays)] * nrays
            for key, val in J.items():
                if not key.isdigit() or int(key) >= nrays:
                    _fail(f"{loc}.J.{key}", "unknown ray index")
                p = _polynomial(val, nrays, f"{loc}.J.{key}")
                rho = int(key)
                if V is not None and not p.is_zero():
                    want = tuple(a - b for a, b in zip(cls, V.degrees[rho]))
                    try:
                        got = V.class_of(p)
                    except ClassMismatchError as exc:
                        _fail(f"{loc}.J.{key}", str(exc))
                    if got != want:
                        _fail(f"{loc}.J.{key}", f"entry has class {list(got)}, expected {list(want)}")
                polys[rho] = p
            J = tuple(polys)
        else:
            _fail(f"{loc}.J", "expected 'jacobian' or an object keyed by ray index")
        hyps.append(HypersurfaceSpec(label, cls, f, J))

    queries = []
    qd = data.get("queries", [])
    if not isinstance(qd, list):
        _fail("queries", "expected a list")
    for i, q in enumerate(qd):
        loc = f"queries[{i}]"
        if not isinstance(q, dict) or q.get("kind") not in KINDS:
            _fail(f"{loc}.kind", f"kind must be one of {', '.join(KINDS)}")
        queries.append(_query(q, rank, nrays, fan.dim, labels, [h.label for h in hyps], loc))

    return ProblemFile(fan, deformation, tuple(hyps), tuple(queries))


def _query(q: dict, rank: int, nrays: int, n: int, labels: set, order: list, loc: str) -> Query:
    kind = q["kind"]
    allowed = {
        "validate": {"kind"},
        "ring": {"kind"},
        "intersect": {"kind", "classes"},
        "product": {"kind", "sigmas"},
        "score": {"kind", "sigmas", "hypersurfaces", "consistency"},
    }[kind]
    extra = set(q) - allowed
    if extra:
        _fail(f"{loc}.{sorted(extra)[0]}", f"unknown field for a {kind} query")
    if kind in ("validate", "ring"):
        return Query(kind)
    key = "classes" if kind == "intersect" else "sigmas"
    raw = q.get(key)
    if not isinstance(raw, list):
        _fail(f"{loc}.{key}", "expected a list")
    classes = tuple(_class_spec(v, rank, nrays, f"{loc}.{key}[{j}]") for j, v in enumerate(raw))
    if kind != "score":
        if len(classes) != n:
            _fail(f"{loc}.{key}", f"expected {n} entries, got {len(classes)}")
        return Query(kind, classes)
    hs = q.get("hypersurfaces")
    if hs is None:
        hs = list(order)
    if not isinstance(hs, list) or any(h not in labels for h in hs):
        _fail(f"{loc}.hypersurfaces", "expected a list of known hypersurface labels")
    if len(set(hs)) != len(hs):
        _fail(f"{loc}.hypersurfaces", "repeated label")
    if len(classes) != n - len(hs):
        _fail(f"{loc}.sigmas", f"expected {n - len(hs)} entries, got {len(classes)}")
    consistency = q.get("consistency", False)
    if not isinstance(consistency, bool):
        _fail(f"{loc}.consistency", "expected a boolean")
    return Query(kind, classes, tuple(hs), consistency)


def parse_problem_text(text: str) -> ProblemFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemParseError(exc.msg, f"line {exc.lineno}:{exc.colno}") from None
    return problem_from_dict(data)


def parse_problem(path) -> ProblemFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemParseError(str(exc), str(path)) from None
    return parse_problem_text(text)


# -- canonical serialization ------------------------------------------------------

def poly_terms(p: Polynomial) -> list:
    return [[list(e), format_rational(c)] for e, c in p.items()]


def _class_out(c):
    return c if isinstance(c, str) else [format_rational(v) for v in c]


def dump_problem(pf: ProblemFile) -> dict:
    out: dict[str, Any] = {
        "fan": {"rays": [list(r) for r in pf.fan.rays],
                "max_cones": [list(c) for c in pf.fan.max_cones]},
        "deformation": pf.deformation if pf.deformation == "euler" else [
            {"row_ray": r, "col_ray": c, "w": [format_rational(v) for v in w]}
            for r, c, w in pf.deformation],
        "hypersurfaces": [],
        "queries": [],
    }
    for h in pf.hypersurfaces:
        d: dict[str, Any] = {"label": h.label, "f": poly_terms(h.f)}
        if h.divisor_class is not None:
            d["class"] = list(h.divisor_class)
        d["J"] = "jacobian" if h.J is None else {
            str(rho): poly_terms(p) for rho, p in enumerate(h.J) if not p.is_zero()}
        out["hypersurfaces"].append(d)
    for q in pf.queries:
        d = {"kind": q.kind}
        if q.kind == "intersect":
            d["classes"] = [_class_out(c) for c in q.classes]
        elif q.kind in ("product", "score"):
            d["sigmas"] = [_class_out(c) for c in q.classes]
        if q.kind == "score":
            d["hypersurfaces"] = list(q.hypersurfaces)
            d["consistency"] = q.consistency
        out["queries"].append(d)
    return out


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def input_digest(pf: ProblemFile) -> str:
    return hashlib.sha256(canonical_json(dump_problem(pf)).encode("utf-8")).hexdigest()


# -- running ----------------------------------------------------------------------

class _Session:
    """Lazily built (V, E) and per-hypersurface data shared by all queries of one file."""

    def __init__(self, pf: ProblemFile):
        self.pf = pf
        self._V = None
        self._E = None
        self._hyps: dict[str, Any] = {}

    @property
    def V(self) -> ToricVariety:
        if self._V is None:
            self._V = ToricVariety.from_fan(self.pf.fan)
        return self._V

    @property
    def E(self) -> DeformedEuler:
        if self._E is None:
            if self.pf.deformation == "euler":
                self._E = undeformed_euler(self.V)
            else:
                self._E = DeformedEuler.from_entries(self.V, self.pf.deformation)
        return self._E

    def resolve(self, c) -> tuple[Fraction, ...]:
        if isinstance(c, str):
            return tuple(Fraction(v) for v in self.V.degrees[int(c[1:])])
        return c

    def hypersurface(self, label: str):
        if label not in self._hyps:
            spec = next(h for h in self.pf.hypersurfaces if h.label == label)
            J = [spec.f.derivative(rho) for rho in range(self.V.nrays)] if spec.J is None else spec.J
            self._hyps[label] = make_hypersurface(self.V, spec.f, J, label)
        return self._hyps[label]


def _psi_names(r: int) -> list[str]:
    return [f"psi{i + 1}" for i in range(r)]


def _poly_out(p: Polynomial, names=None) -> dict:
    return {"text": p.to_string(names), "terms": poly_terms(p)}


def _vec_out(v) -> list[str]:
    return [format_rational(x) for x in v]


def _run_one(s: _Session, q: Query, allow_hypothesis_violations: bool) -> dict:
    if q.kind == "validate":
        fan_report = validate_fan(s.pf.fan)
        out: dict[str, Any] = {"fan": fan_report.as_dict()}
        failures = list(fan_report.failures)
        if fan_report.ok:
            try:
                dep = validate_deformation(s.V, s.E)
                out["deformation"] = dep.as_dict()
                failures += dep.failures
            except ToricScoreError as exc:
                out["deformation"] = {"error": str(exc)}
                failures.append(type(exc).__name__)
        out["status"] = "ok" if not failures else "failed: " + ", ".join(failures)
        return out
    V, E = s.V, s.E
    names = _psi_names(V.rank)
    if q.kind == "ring":
        ring = polymology_ring(V, E)
        return {
            "status": "ok",
            "generators": [{"collection": list(K), **_poly_out(g, names)}
                           for K, g in zip(ring.ideal.collections, ring.ideal.generators)],
            "dims": ring.dims(),
            "betti": betti_numbers(V.fan),
            "degrees": [list(d) for d in V.degrees],
        }
    classes = [s.resolve(c) for c in q.classes]
    if q.kind == "intersect":
        return {"status": "ok", "value": format_rational(intersection_number(V, classes))}
    if q.kind == "product":
        cert = sym_product(classes, V.rank)
        return {"status": "ok", "value": format_rational(product_V(V, E, classes)),
                "certificate": _poly_out(cert, names)}
    hyps = [s.hypersurface(label) for label in q.hypersurfaces]
    ci = complete_intersection(V, E, hyps)
    rep = score_product(V, E, ci, classes, allow_hypothesis_violations=allow_hypothesis_violations)
    out = {
        "status": "ok",
        "value": format_rational(rep.value),
        "gammas": {h.label: _vec_out(g) for h, g in zip(hyps, ci.gammas)},
        "hypersurfaces": list(q.hypersurfaces),
        "certificate": _poly_out(rep.certificate, names),
        "normal_form": _poly_out(rep.normal_form, names),
        "warnings": list(rep.warnings),
    }
    if q.consistency:
        cr = restriction_consistency_check(V, E, ci, classes)
        out["consistency"] = {
            "one_shot": format_rational(cr.one_shot),
            "consistent": cr.consistent,
            "orders": [{"order": [q.hypersurfaces[k] for k in t.order],
                        "partials": [p.to_string(names) for p in t.partials],
                        "value": format_rational(t.value)} for t in cr.traces],
        }
    return out


def run_queries(pf: ProblemFile, *, allow_hypothesis_violations: bool = True,
                queries: tuple[Query, ...] | None = None) -> dict:
    """One result per query, in order; errors are captured per query."""
    session = _Session(pf)
    results = []
    for i, q in enumerate(pf.queries if queries is None else queries):
        try:
            res = _run_one(session, q, allow_hypothesis_violations)
        except ToricScoreError as exc:
            res = {"status": f"error: {type(exc).__name__}: {exc}"}
        except StopIteration:
            res = {"status": "error: unknown hypersurface"}
        results.append({"index": i, "kind": q.kind, **res})
    return {
        "engine": f"toricscore {__version__}",
        "input_digest": input_digest(pf),
        "results": results,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_text(report: dict) -> str:
    lines = [f"{report['engine']}  input sha256 {report['input_digest']}"]
    for r in report["results"]:
        head = f"[{r['index']}] {r['kind']}: {r['status']}"
        if "value" in r:
            head += f"  value = {r['value']}"
        lines.append(head)
        if r["kind"] == "validate" and "fan" in r:
            fr = r["fan"]
            lines.append("    fan: " + ", ".join(
                f"{k}={fr[k]}" for k in ("smooth", "simplicial", "wall_condition",
                                         "ray_coverage", "connected", "complete")))
            lines.extend(f"    note: {m}" for m in fr["messages"])
            dr = r.get("deformation")
            if dr and "error" not in dr:
                lines.append(f"    deformation: dims={dr['dims']} betti={dr['betti']} "
                             f"nondegenerate={dr['nondegenerate']} undeformed={dr['undeformed']}")
            elif dr:
                lines.append(f"    deformation: {dr['error']}")
        if r["kind"] == "ring" and r["status"] == "ok":
            for g in r["generators"]:
                lines.append(f"    SR{g['collection']}: {g['text']}")
            lines.append(f"    dims {r['dims']}  betti {r['betti']}")
        if r["kind"] == "score" and r["status"] == "ok":
            for label, g in r["gammas"].items():
                lines.append(f"    gamma[{label}] = ({', '.join(g)})")
            lines.append(f"    certificate {r['certificate']['text']}  ->  {r['normal_form']['text']}")
            if "consistency" in r:
                c = r["consistency"]
                lines.append(f"    stepwise insertion consistent: {c['consistent']} "
                             f"({len(c['orders'])} orders)")
        for w in r.get("warnings", []):
            lines.append(f"    warning: {w}")
    return "\n".join(lines) + "\n"


def exit_code(report: dict) -> int:
    statuses = [r["status"] for r in report["results"]]
    if any(s.startswith("failed") for s in statuses):
        return 2
    if any(s.startswith("error") for s in statuses):
        return 3
    return 0
