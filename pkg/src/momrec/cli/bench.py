"""Random-instance benchmark: distribution of the recovered length ``r``.

``mrp`` mode follows the random moment problems on the unit sphere: a tms
``y = sum c_i [u_i]_d`` with ``N = binom(n+d, d)`` standard normal points
``u_i`` (not projected onto the sphere) and uniform ``c_i`` in (0, 1], plus
``m`` dense random functionals ``a_i`` with normal coefficients and
``b_i = <a_i, y>``.  Because the points are off the sphere, some instances
admit no sphere-supported solution and end as infeasible; they are counted,
not filtered.  ``sphere_samples=True`` projects the points onto the sphere
first, which makes every instance feasible.

``trp-general`` mode draws ``m`` measurement tensors with standard normal
canonical entries.  By default ``b`` comes from a planted signed sphere
decomposition of length ``ceil(m/2)`` so every instance is feasible;
``b_normal=True`` draws ``b`` standard normal instead.

Every trial gets its own child of ``SeedSequence(seed)``, so results do not
depend on how trials are spread over workers.
"""
from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from math import ceil, comb
from typing import Optional

import numpy as np

from ..polycore import Poly, moment_vectors
from ..relax import MrpProblem, Outcome, run_hierarchy
from ..semialg import SemialgebraicSet
from ..tensorrec import SymTensor, hs_inner, recover_general, residual, sym_size


@dataclass
class TrialResult:
    trial: int
    outcome: str
    r: Optional[int]
    r1: Optional[int]
    k: Optional[int]
    residual: Optional[float]
    seconds: float


def _mrp_trial(n: int, d: int, m: int, rng: np.random.Generator, k_max: Optional[int],
               sphere_samples: bool = False):
    N = comb(n + d, d)
    U = rng.standard_normal((N, n))
    if sphere_samples:
        U /= np.linalg.norm(U, axis=1, keepdims=True)
    c = rng.uniform(0.0, 1.0, N)
    c = np.where(c == 0.0, 1.0, c)
    y = moment_vectors(U, d) @ c
    size = len(y)
    funcs = []
    for _ in range(m):
        coefs = rng.standard_normal(size)
        funcs.append((Poly.from_coefficients(coefs, n, d), float(coefs @ y)))
    prob = MrpProblem(SemialgebraicSet.unit_sphere(n), funcs)
    obj_seed = int(rng.integers(2**32))
    k_max = None if k_max is None else max(k_max, prob.k_min)
    rep = run_hierarchy(prob, seed=obj_seed, k_max=k_max)
    r = rep.r if rep.recovered else None
    return rep.outcome, r, r, rep.k, (rep.functional_residual if rep.recovered else None)


def _trp_trial(n: int, d: int, m: int, rng: np.random.Generator, b_normal: bool, k_max: Optional[int]):
    K = SemialgebraicSet.unit_sphere(n)
    Fs = [SymTensor(n, d, rng.standard_normal(sym_size(n, d))) for _ in range(m)]
    if b_normal:
        b = rng.standard_normal(m)
    else:
        length = ceil(m / 2)
        U = rng.standard_normal((length, n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        lam = rng.uniform(0.5, 1.5, length)
        signs = rng.choice([-1.0, 1.0], length)
        A = SymTensor(n, d, moment_vectors(U, d)[-sym_size(n, d):] @ (signs * lam))
        b = np.array([hs_inner(F, A) for F in Fs])
    obj_seed = int(rng.integers(2**32))
    res = recover_general(K, Fs, b, d, seed=obj_seed, k_max=k_max)
    if res.recovered:
        dec = res.decomposition
        return res.outcome, dec.r, dec.r1, res.report.k, residual(dec, Fs, b)
    return res.outcome, None, None, res.report.k, None


def run_trial(mode: str, n: int, d: int, m: int, trial: int, child: np.random.SeedSequence,
              b_normal: bool = False, k_max: Optional[int] = None,
              sphere_samples: bool = False) -> TrialResult:
    rng = np.random.default_rng(child)
    tic = time.perf_counter()
    if mode == "mrp":
        outcome, r, r1, k, res = _mrp_trial(n, d, m, rng, k_max, sphere_samples)
    elif mode == "trp-general":
        outcome, r, r1, k, res = _trp_trial(n, d, m, rng, b_normal, k_max)
    else:
        raise ValueError(f"unknown bench mode {mode!r}")
    return TrialResult(trial, str(outcome), r, r1, k, res, time.perf_counter() - tic)


def _run_star(args):
    return run_trial(*args)


def run_bench(n: int, d: int, m: int, trials: int, mode: str = "mrp", seed: int = 0,
              b_normal: bool = False, workers: int = 1, k_max: Optional[int] = None,
              sphere_samples: bool = False) -> dict:
    """Run ``trials`` seeded instances and summarise the recovered lengths."""
    if min(n, d, m, trials) < 1:
        raise ValueError("n, d, m and trials must be positive")
    children = np.random.SeedSequence(seed).spawn(trials)
    jobs = [(mode, n, d, m, i, children[i], b_normal, k_max, sphere_samples) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_star, jobs))
    else:
        results = [_run_star(j) for j in jobs]
    results.sort(key=lambda t: t.trial)
    rs = [t.r for t in results if t.outcome == str(Outcome.RECOVERED)]
    hist = Counter(rs)
    feasible = sum(1 for t in results if t.outcome != str(Outcome.INFEASIBLE))
    return {
        "mode": mode, "n": n, "d": d, "m": m, "trials": trials, "seed": seed, "b_normal": b_normal,
        "sphere_samples": sphere_samples,
        "success_rate": len(rs) / trials,
        "feasible_trials": feasible,
        "feasible_success_rate": len(rs) / feasible if feasible else None,
        "r_values": sorted(hist),
        "histogram": {str(k): hist[k] for k in sorted(hist)},
        "mean_r": float(np.mean(rs)) if rs else None,
        "r_le_m": all(r <= m for r in rs),
        "outcomes": dict(Counter(t.outcome for t in results)),
        "results": [asdict(t) for t in results],
    }


def format_table(summary: dict) -> str:
    """Plain-text summary: observed lengths, histogram, mean and success rate."""
    vals = ",".join(str(v) for v in summary["r_values"]) or "-"
    mean = "-" if summary["mean_r"] is None else f"{summary['mean_r']:.2f}"
    lines = [
        f"mode {summary['mode']}  (n,d) = ({summary['n']},{summary['d']})  m = {summary['m']}  "
        f"trials = {summary['trials']}  seed = {summary['seed']}",
        f"  r values     : {vals}",
        f"  histogram    : " + (", ".join(f"r={k}: {v}" for k, v in summary["histogram"].items()) or "-"),
        f"  mean r       : {mean}",
        f"  success rate : {summary['success_rate']:.0%} of all trials, "
        + ("-" if summary["feasible_success_rate"] is None else f"{summary['feasible_success_rate']:.0%}")
        + f" of the {summary['feasible_trials']} not infeasible",
        f"  r <= m       : {'yes' if summary['r_le_m'] else 'NO'}",
        f"  outcomes     : " + ", ".join(f"{k} {v}" for k, v in sorted(summary["outcomes"].items())),
    ]
    return "\n".join(lines)
