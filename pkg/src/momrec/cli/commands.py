"""Implementations behind the command-line entry points.

Each ``cmd_*`` function returns ``(exit_code, document)`` so the commands
can be driven from Python as well as from the shell.
"""
from __future__ import annotations

import os
import time
from typing import Optional

import numpy as np

from .. import extract as ex
from ..relax import HierarchyOptions, MrpProblem, Outcome, _assemble, generic_objective, run_hierarchy
from ..sdp import dump_program
from ..tensorrec import recover_general, recover_positive
from .formats import FormatError, ProblemSpec, load_problem, load_result, result_document, signed_residual
from ..semialg import membership_residual

EXIT_CODES = {
    Outcome.RECOVERED: 0,
    Outcome.NO_FLAT_TRUNCATION: 2,
    Outcome.INFEASIBLE: 3,
    Outcome.SOLVER_FAILURE: 4,
}
EXIT_PARSE = 1
EXIT_VERIFY_FAILED = 5

#: environment overrides for default tolerances
ENV_TOLERANCES = {
    "rank_tol": "MOMREC_RANK_TOL",
    "atom_tol": "MOMREC_ATOM_TOL",
    "merge_tol": "MOMREC_MERGE_TOL",
    "zero_tol": "MOMREC_ZERO_TOL",
}
ENV_VERIFY_TOL = "MOMREC_VERIFY_TOL"
DEFAULT_VERIFY_TOL = 1e-6


def _env_float(name: str) -> Optional[float]:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        val = float(raw)
    except ValueError:
        raise FormatError(f"environment variable {name}={raw!r} is not a number") from None
    if not val > 0:
        raise FormatError(f"environment variable {name} must be positive")
    return val


def resolve_tolerances(file_opts: dict, overrides: Optional[dict] = None) -> dict:
    """Flag overrides beat file options, which beat the environment, which beats defaults."""
    defaults = HierarchyOptions()
    out = {}
    for key, env in ENV_TOLERANCES.items():
        val = getattr(defaults, key)
        env_val = _env_float(env)
        if env_val is not None:
            val = env_val
        if key in file_opts:
            val = float(file_opts[key])
        if overrides and overrides.get(key) is not None:
            val = float(overrides[key])
        out[key] = val
    return out


def solve_spec(spec: ProblemSpec, seed: Optional[int] = None, k_min: Optional[int] = None,
               k_max: Optional[int] = None, tolerances: Optional[dict] = None):
    """Run the front-end that matches ``spec.kind``; returns ``(exit_code, result_doc)``."""
    opts_in = spec.options
    seed = opts_in.get("seed", 0) if seed is None else seed
    k_min = opts_in.get("k_min") if k_min is None else k_min
    k_max = opts_in.get("k_max") if k_max is None else k_max
    tols = resolve_tolerances(opts_in, tolerances)
    options = HierarchyOptions(**tols)
    tic = time.perf_counter()
    if spec.kind == "mrp":
        prob = MrpProblem(spec.K, spec.functionals)
        rep = run_hierarchy(prob, seed=seed, k_min=k_min, k_max=k_max, options=options)
        outcome, records = rep.outcome, rep.records
        if rep.recovered:
            meas = rep.measures[0]
            signs, weights, atoms = np.ones(meas.r), meas.weights, meas.atoms
        else:
            signs = weights = atoms = []
    else:
        front = recover_positive if spec.kind == "trp-positive" else recover_general
        res = front(spec.K, spec.tensors, spec.b, spec.d, seed=seed, k_min=k_min, k_max=k_max,
                    options=options)
        outcome, records = res.outcome, res.report.records
        if res.recovered:
            dec = res.decomposition
            signs, weights, atoms = dec.signs, dec.weights, dec.atoms
        else:
            signs = weights = atoms = []
    seconds = time.perf_counter() - tic
    doc = result_document(spec, str(outcome), signs, weights, atoms, records, seconds, seed, tols)
    return EXIT_CODES[outcome], doc


def cmd_solve(path, seed=None, k_min=None, k_max=None, tol=None):
    spec = load_problem(path)
    return solve_spec(spec, seed, k_min, k_max, {"rank_tol": tol} if tol is not None else None)


def verify_documents(result: dict, spec: ProblemSpec, tol: Optional[float] = None,
                     atom_tol: Optional[float] = None) -> dict:
    """Recompute residuals from the serialised atoms and compare with tolerances."""
    if result["kind"] != spec.kind or result["n"] != spec.n:
        raise FormatError(f"result ({result['kind']}, n={result['n']}) does not match "
                          f"problem ({spec.kind}, n={spec.n})")
    if spec.kind != "mrp" and result.get("d") not in (None, spec.d):
        raise FormatError("result and problem tensor orders differ")
    if tol is None:
        tol = _env_float(ENV_VERIFY_TOL) or DEFAULT_VERIFY_TOL
    if atom_tol is None:
        atom_tol = _env_float(ENV_TOLERANCES["atom_tol"]) or ex.ATOM_TOL
    terms = result["terms"]
    for t in terms:
        if len(t["atom"]) != spec.n:
            raise FormatError(f"atom {t['atom']} does not have {spec.n} entries")
    signs = [t["sign"] for t in terms]
    if spec.kind != "trp-general" and any(s < 0 for s in signs):
        raise FormatError("negative terms are only allowed for trp-general results")
    weights = [t["weight"] for t in terms]
    atoms = [np.asarray(t["atom"], dtype=float) for t in terms]
    func = signed_residual(spec, signs, weights, atoms)
    mem = [float(membership_residual(spec.K, u)) for u in atoms]
    checks = {
        "functional": func <= tol,
        "membership": all(m <= atom_tol for m in mem),
        "weights": all(w > 0 for w in weights),
    }
    return {
        "pass": result["status"] == "recovered" and all(checks.values()),
        "status": result["status"],
        "functional_residual": func,
        "membership": mem,
        "checks": checks,
        "tol": tol,
        "atom_tol": atom_tol,
    }


def cmd_verify(result_path, problem_path, tol=None, atom_tol=None):
    report = verify_documents(load_result(result_path), load_problem(problem_path), tol, atom_tol)
    return (0 if report["pass"] else EXIT_VERIFY_FAILED), report


def cmd_dump_sdp(path, order: int, seed=None) -> tuple[int, str]:
    """Assemble the order-``order`` relaxation of a problem file and render it as text."""
    spec = load_problem(path)
    seed = spec.options.get("seed", 0) if seed is None else seed
    prob = MrpProblem(spec.K, spec.functionals, signed=spec.signed)
    if spec.kind != "mrp" and spec.d is not None and prob.d1 < 2 * -(-spec.d // 2):
        raise FormatError("tensor equations are below the tensor order")
    obj = generic_objective(spec.n, prob.d1, seed, count=prob.n_measures)
    if order < prob.k_min:
        raise FormatError(f"order {order} is below the minimal order {prob.k_min}")
    prog = _assemble(prob, obj.polys, order)
    return 0, dump_program(prog)
