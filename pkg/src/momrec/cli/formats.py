"""JSON problem and result files.

Problem file::

    {"schema_version": 1, "kind": "mrp" | "trp-positive" | "trp-general",
     "n": 4, "d": 3,
     "set": {"equalities": [POLY], "inequalities": [POLY], "sphere": true},
     "functionals": [{"poly": POLY, "b": 1.0}],                 # mrp
     "equations": [{"terms": [[[1, 1, 3], 1.0], ...], "rhs": 2}], # trp, entry form
     "tensors": [{"entries": [{"index": [1, 2, 3], "value": 0.5}], "rhs": 1}],
     "options": {"seed": 0, "k_min": 2, "k_max": 5, "rank_tol": 1e-6, ...}}

with ``POLY = [{"exponent": [1, 0, 0, 0], "coef": 1.0}, ...]``.  Tensor
problems may mix ``equations`` (coefficients on entries) and ``tensors``
(canonical entries of a measurement tensor ``F``, one per sorted index).

Result file::

    {"schema_version": 1, "kind": ..., "status": "recovered", "n": .., "d": ..,
     "r": 2, "r1": 2, "terms": [{"sign": 1, "weight": .., "atom": [..]}],
     "residuals": {"functional": .., "membership": [..]},
     "hierarchy": [{"k": 2, "status": "Optimal", "phi": .., ...}],
     "timing": {"seconds": ..}, "seed": 0, "tolerances": {...}}

Unknown fields are rejected everywhere.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import jsonschema
import numpy as np

from ..polycore import Poly
from ..semialg import SemialgebraicSet, membership_residual
from ..tensorrec import SymTensor, entry_equation, measurement_poly

SCHEMA_VERSION = 1
KINDS = ("mrp", "trp-positive", "trp-general")

_POLY = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "exponent": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            "coef": {"type": "number"},
        },
        "required": ["exponent", "coef"],
        "additionalProperties": False,
    },
}
_INDEX = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}

PROBLEM_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "name": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "d": {"type": "integer", "minimum": 1},
        "set": {
            "type": "object",
            "properties": {
                "equalities": {"type": "array", "items": _POLY},
                "inequalities": {"type": "array", "items": _POLY},
                "sphere": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "functionals": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"poly": _POLY, "b": {"type": "number"}},
                "required": ["poly", "b"],
                "additionalProperties": False,
            },
        },
        "equations": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "terms": {
                        "type": "array",
                        "items": {"type": "array", "prefixItems": [_INDEX, {"type": "number"}],
                                  "minItems": 2, "maxItems": 2},
                    },
                    "rhs": {"type": "number"},
                },
                "required": ["terms", "rhs"],
                "additionalProperties": False,
            },
        },
        "tensors": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "entries": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "properties": {"index": _INDEX, "value": {"type": "number"}},
                            "required": ["index", "value"],
                            "additionalProperties": False,
                        },
                    },
                    "rhs": {"type": "number"},
                },
                "required": ["entries", "rhs"],
                "additionalProperties": False,
            },
        },
        "options": {
            "type": "object",
            "properties": {
                "seed": {"type": ["integer", "null"], "minimum": 0},
                "k_min": {"type": "integer", "minimum": 1},
                "k_max": {"type": "integer", "minimum": 1},
                "rank_tol": {"type": "number", "exclusiveMinimum": 0},
                "atom_tol": {"type": "number", "exclusiveMinimum": 0},
                "merge_tol": {"type": "number", "exclusiveMinimum": 0},
                "zero_tol": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "required": ["schema_version", "kind", "n"],
    "additionalProperties": False,
}

_TERM = {
    "type": "object",
    "properties": {
        "sign": {"enum": [1, -1]},
        "weight": {"type": "number", "exclusiveMinimum": 0},
        "atom": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["sign", "weight", "atom"],
    "additionalProperties": False,
}

RESULT_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kind": {"enum": list(KINDS)},
        "name": {"type": "string"},
        "status": {"enum": ["recovered", "no_flat_truncation", "infeasible", "solver_failure"]},
        "n": {"type": "integer", "minimum": 1},
        "d": {"type": ["integer", "null"]},
        "r": {"type": "integer", "minimum": 0},
        "r1": {"type": "integer", "minimum": 0},
        "terms": {"type": "array", "items": _TERM},
        "residuals": {
            "type": "object",
            "properties": {
                "functional": {"type": ["number", "null"]},
                "membership": {"type": "array", "items": {"type": "number"}},
            },
            "required": ["functional", "membership"],
            "additionalProperties": False,
        },
        "hierarchy": {"type": "array", "items": {"type": "object"}},
        "timing": {"type": "object"},
        "seed": {"type": ["integer", "null"]},
        "tolerances": {"type": "object"},
    },
    "required": ["schema_version", "kind", "status", "n", "terms", "residuals"],
    "additionalProperties": False,
}


class FormatError(ValueError):
    """Raised for files that fail validation or describe an inconsistent problem."""


def _validate(doc, schema, what: str) -> None:
    try:
        jsonschema.validate(doc, schema, cls=jsonschema.Draft202012Validator)
    except jsonschema.ValidationError as err:
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise FormatError(f"{what}: {err.message} (at {path})") from None


def poly_from_json(records, n: int) -> Poly:
    terms = {}
    for rec in records:
        alpha = tuple(rec["exponent"])
        if len(alpha) != n:
            raise FormatError(f"exponent {list(alpha)} does not have {n} entries")
        terms[alpha] = terms.get(alpha, 0.0) + float(rec["coef"])
    return Poly(n, terms)


def poly_to_json(p: Poly) -> list:
    return [{"exponent": list(a), "coef": c} for a, c in sorted(p.terms.items())]


def set_from_json(doc: dict, n: int) -> SemialgebraicSet:
    eqs = tuple(poly_from_json(r, n) for r in doc.get("equalities", []))
    ineqs = tuple(poly_from_json(r, n) for r in doc.get("inequalities", []))
    return SemialgebraicSet(n, eqs, ineqs, bool(doc.get("sphere", False)))


def set_to_json(K: SemialgebraicSet) -> dict:
    return {"equalities": [poly_to_json(p) for p in K.equalities],
            "inequalities": [poly_to_json(p) for p in K.inequalities],
            "sphere": K.sphere}


@dataclass
class ProblemSpec:
    kind: str
    n: int
    d: Optional[int]
    K: SemialgebraicSet
    functionals: list  # (Poly, b)
    tensors: list = field(default_factory=list)  # SymTensor measurements for trp kinds
    options: dict = field(default_factory=dict)
    name: str = ""

    @property
    def b(self) -> np.ndarray:
        return np.array([b for _, b in self.functionals], dtype=float)

    @property
    def signed(self) -> bool:
        return self.kind == "trp-general"


def parse_problem(doc: dict) -> ProblemSpec:
    _validate(doc, PROBLEM_SCHEMA, "problem file")
    kind, n = doc["kind"], doc["n"]
    K = set_from_json(doc.get("set", {}), n)
    opts = dict(doc.get("options", {}))
    if kind == "mrp":
        if "equations" in doc or "tensors" in doc:
            raise FormatError("mrp problems take 'functionals', not tensor equations")
        funcs = [(poly_from_json(f["poly"], n), float(f["b"])) for f in doc.get("functionals", [])]
        return ProblemSpec(kind, n, doc.get("d"), K, funcs, [], opts, doc.get("name", ""))
    if "functionals" in doc:
        raise FormatError("tensor problems take 'equations' or 'tensors', not 'functionals'")
    if "d" not in doc:
        raise FormatError("tensor problems need the order 'd'")
    d = doc["d"]
    tensors, rhs = [], []
    try:
        for eq in doc.get("equations", []):
            tensors.append(entry_equation([(idx, c) for idx, c in eq["terms"]], n, d))
            rhs.append(float(eq["rhs"]))
        for rec in doc.get("tensors", []):
            entries = {}
            for e in rec["entries"]:
                key = tuple(sorted(e["index"]))
                if key in entries:
                    raise FormatError(f"entry {list(key)} listed twice")
                entries[key] = e["value"]
            tensors.append(SymTensor.from_entries(n, d, entries))
            rhs.append(float(rec["rhs"]))
    except (KeyError, ValueError) as err:
        if isinstance(err, FormatError):
            raise
        raise FormatError(f"bad tensor index: {err}") from None
    funcs = [(measurement_poly(F), b) for F, b in zip(tensors, rhs)]
    return ProblemSpec(kind, n, d, K, funcs, tensors, opts, doc.get("name", ""))


def load_problem(path) -> ProblemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise FormatError(f"{path}: not valid JSON ({err})") from None
    return parse_problem(doc)


# --------------------------------------------------------------------------
# results


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def signed_residual(spec: ProblemSpec, signs, weights, atoms) -> float:
    """``max_i |sum_j sign_j weight_j a_i(u_j) - b_i|``; 0 when there are no functionals."""
    worst = 0.0
    for a, b in spec.functionals:
        val = sum(s * w * a(u) for s, w, u in zip(signs, weights, atoms))
        worst = max(worst, abs(val - b))
    return worst


def result_document(spec: ProblemSpec, outcome: str, signs, weights, atoms, records, seconds: float,
                    seed, tolerances: dict) -> dict:
    """Build a result document; residuals are recomputed from the serialised atoms."""
    terms = [{"sign": int(s), "weight": float(w), "atom": [float(v) for v in u]}
             for s, w, u in zip(signs, weights, atoms)]
    ser_atoms = [np.array(t["atom"]) for t in terms]
    ser_signs = [t["sign"] for t in terms]
    ser_w = [t["weight"] for t in terms]
    recovered = outcome == "recovered"
    func = signed_residual(spec, ser_signs, ser_w, ser_atoms) if recovered else None
    mem = [float(membership_residual(spec.K, u)) for u in ser_atoms]
    hier = []
    for rec in records:
        hier.append({
            "k": rec.k, "status": rec.status, "phi": _num(rec.phi), "psi": _num(rec.psi),
            "duals": [_num(v) for v in rec.duals], "flat_t": None if rec.flat_t is None else int(rec.flat_t),
            "ranks": [[int(v) for v in r] for r in rec.ranks], "zero": [bool(z) for z in rec.zero],
            "iterations": int(rec.iterations), "seconds": float(rec.seconds), "note": rec.note,
        })
    doc = {
        "schema_version": SCHEMA_VERSION, "kind": spec.kind, "status": outcome, "n": spec.n,
        "d": spec.d, "r": len(terms), "r1": sum(1 for s in ser_signs if s > 0), "terms": terms,
        "residuals": {"functional": func, "membership": mem},
        "hierarchy": hier, "timing": {"seconds": seconds}, "seed": seed, "tolerances": tolerances,
    }
    if spec.name:
        doc["name"] = spec.name
    return doc


def parse_result(doc: dict) -> dict:
    _validate(doc, RESULT_SCHEMA, "result file")
    return doc


def load_result(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as err:
        raise FormatError(f"{path}: not valid JSON ({err})") from None
    return parse_result(doc)


def write_json(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    if path is not None and str(path) != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
