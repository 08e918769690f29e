"""``qsep`` command-line interface.

Exit codes: 0 success, 2 malformed input, 3 internal consistency failure,
4 rank violation, 5 decomposition requested for an entangled state.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from qsep import __version__
from qsep.criteria import (
    LOOSE_TOL,
    RECONSTRUCTION_TOL,
    SeparabilityVerdict,
    concurrence_pair,
    concurrence_ratio_screen,
    decide,
    real_case_deltas,
)
from qsep.errors import (
    ConsistencyError,
    FormulaMismatch,
    InvalidInput,
    NotRankTwo,
    NotRealCoefficients,
    QsepError,
)
from qsep.formats import complex_pair, dumps, parse_mixed, parse_state, read_json, state_to_obj
from qsep.invariants import (
    compute_invariants,
    concurrence_paths,
    default_separability_tol,
    extract_product_factors,
    generalized_concurrence,
)
from qsep.oracle import MAX_ORACLE_DIM, oracle_pure_separable
from qsep.quadratic import DEFAULT_REL_TOL, coefficient_arrays
from qsep.state import (
    RANK_TOL,
    DensityMatrix,
    RankTwoState,
    as_profile,
    eigen_residuals,
    low_rank_residual,
    make_pure_state,
    maximally_entangled_state,
    random_product_state,
    random_pure_state,
    rank2_eigendecompose,
)

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_INTERNAL = 3
EXIT_RANK = 4
EXIT_ENTANGLED = 5


class CliExit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _env_tol(default: float) -> float:
    raw = os.environ.get("QSEP_TOL")
    if raw is None or not raw.strip():
        return default
    try:
        return float(raw)
    except ValueError:
        raise CliExit(EXIT_MALFORMED, f"QSEP_TOL={raw!r} is not a number")


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _header(command, digest, dims, tolerances) -> dict:
    return {
        "tool": "qsep",
        "version": __version__,
        "command": command,
        "timestamp": _timestamp(),
        "input_digest": digest,
        "dims": list(dims),
        "tolerances": tolerances,
    }


def _invariants_obj(state) -> dict:
    inv = compute_invariants(state)
    return {
        "I0": inv.i0,
        "I_TS": [{"bipartition": list(c.members), "value": v} for c, v in inv.i_ts],
    }


def _fmt(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}j"


def _state_text(state) -> str:
    parts = []
    for index in zip(*np.nonzero(np.abs(state.amp) > 1e-12)):
        parts.append(f"{''.join(map(str, index))}: {_fmt(state.amp[index])}")
    return "{" + ", ".join(parts) + "}"


# ---------------------------------------------------------------- concurrence

def cmd_concurrence(args) -> tuple[int, dict, str]:
    obj, digest = read_json(args.input)
    state = parse_state(obj, args.paper_indices)
    tol = args.tol if args.tol is not None else _env_tol(default_separability_tol(state))
    c2_minor, c2_inv = concurrence_paths(state)
    c = generalized_concurrence(state)
    inv = _invariants_obj(state)
    report = _header("concurrence", digest, state.dims, {"separability_tol": tol})
    report.update({
        "label": obj.get("label"),
        "concurrence": c,
        "concurrence_sq_minor_sum": c2_minor,
        "concurrence_sq_invariants": c2_inv,
        "separable": c <= tol,
        "invariants": inv,
    })
    lines = [f"C = {c!r}", f"separable: {'yes' if c <= tol else 'no'} (tol {tol:g})", f"I0 = {inv['I0']!r}"]
    lines += [f"I_TS {{{','.join(map(str, it['bipartition']))}}} = {it['value']!r}" for it in inv["I_TS"]]
    return EXIT_OK, report, "\n".join(lines) + "\n"


# ---------------------------------------------------------------------- check

def _load_rank_two(args):
    obj, digest = read_json(args.input)
    form, value = parse_mixed(obj, args.paper_indices)
    info = {"form": form}
    dense = None
    if form == "eigen":
        rho = value
    else:
        dense = value
        rho = rank2_eigendecompose(dense, args.rank_tol)
        info["residuals"] = list(eigen_residuals(dense, rho))
    info["p"] = rho.p
    info["q"] = rho.q
    return digest, rho, dense, info


def _decomposition_obj(verdict: SeparabilityVerdict) -> dict:
    return {
        "mu1": None if verdict.mu1 is None else complex_pair(verdict.mu1),
        "mu2": None if verdict.mu2 is None else complex_pair(verdict.mu2),
        "theta": verdict.theta,
        "p_prime": verdict.p_prime,
        "e1p": state_to_obj(verdict.e1p),
        "e2p": state_to_obj(verdict.e2p),
        "residual": verdict.residual,
        "route": verdict.route,
    }


def _analysis_obj(verdict: SeparabilityVerdict):
    a = verdict.analysis
    if a is None:
        return None
    return {
        "kind": a.kind.value,
        "reason": a.reason,
        "scale": a.scale,
        "reference": None if a.reference is None else a.reference.as_dict(),
        "roots": None if a.mu1 is None else [complex_pair(a.mu1), complex_pair(a.mu2)],
    }


def _self_check(rho: RankTwoState, dense, verdict, coeffs, rel_tol) -> dict:
    out = {}
    ok = True
    for name, e in (("E1", rho.e1), ("E2", rho.e2)):
        c2m, c2i = concurrence_paths(e)
        out[f"concurrence_paths_{name}"] = abs(c2m - c2i)
        ok &= abs(c2m - c2i) <= 1e-9
    if verdict.separable:
        vecs = [verdict.e1p.vector, verdict.e2p.vector]
        weights = [verdict.p_prime, 1.0 - verdict.p_prime]
        if dense is not None:
            rebuilt = (np.stack(vecs, 1) * weights) @ np.stack(vecs, 1).conj().T
            out["reconstruction_vs_input"] = float(np.linalg.norm(rebuilt - dense.entries))
            ok &= out["reconstruction_vs_input"] <= RECONSTRUCTION_TOL
        out["reconstruction_vs_eigenpairs"] = low_rank_residual(
            weights, vecs, [rho.p, rho.q], [rho.e1.vector, rho.e2.vector])
        ok &= out["reconstruction_vs_eigenpairs"] <= RECONSTRUCTION_TOL
        if rho.profile.total_dim <= MAX_ORACLE_DIM:
            out["oracle_product_e1p"] = oracle_pure_separable(verdict.e1p)
            out["oracle_product_e2p"] = oracle_pure_separable(verdict.e2p)
            ok &= out["oracle_product_e1p"] and out["oracle_product_e2p"]
    screen = concurrence_ratio_screen(rho, rel_tol, coeffs)
    out["screen_consistent"] = screen is None or not verdict.separable
    ok &= out["screen_consistent"]
    try:
        deltas = real_case_deltas(rho, rel_tol)
    except NotRealCoefficients:
        out["real_case_agrees"] = None
    else:
        out["real_case_agrees"] = deltas.separable == verdict.separable
        ok &= out["real_case_agrees"]
    out["passed"] = bool(ok)
    return out


def cmd_check(args) -> tuple[int, dict, str]:
    digest, rho, dense, info = _load_rank_two(args)
    rel_tol = args.tol if args.tol is not None else _env_tol(DEFAULT_REL_TOL)
    coeffs = coefficient_arrays(rho.e1, rho.e2)
    verdict = decide(rho, rel_tol, coeffs)
    c1, c2 = concurrence_pair(coeffs)
    screen = concurrence_ratio_screen(rho, rel_tol, coeffs)
    try:
        d = real_case_deltas(rho, rel_tol)
        real = {"delta1": d.delta1, "delta2": d.delta2, "threshold": d.threshold, "separable": d.separable}
    except NotRealCoefficients:
        real = None
    report = _header("check", digest, rho.profile.dims, {
        "rel_tol": rel_tol, "rank_tol": args.rank_tol,
        "reconstruction_tol": RECONSTRUCTION_TOL, "derived_tol": LOOSE_TOL,
    })
    report.update({
        "input": info,
        "verdict": verdict.status.value,
        "witness": None if verdict.witness is None else verdict.witness.as_dict(),
        "decomposition": _decomposition_obj(verdict) if verdict.separable else None,
        "root_analysis": _analysis_obj(verdict),
        "concurrences": {"C1": c1, "C2": c2,
                         "ratio_screen": "pass" if screen is None else "violated"},
        "invariants": {"E1": _invariants_obj(rho.e1), "E2": _invariants_obj(rho.e2)},
        "real_case": real,
    })
    code = EXIT_OK
    if args.self_check:
        report["self_check"] = _self_check(rho, dense, verdict, coeffs, rel_tol)
        if not report["self_check"]["passed"]:
            code = EXIT_INTERNAL

    lines = [f"verdict: {verdict.status.value}", f"p = {rho.p!r}, q = {rho.q!r}"]
    if verdict.separable:
        if verdict.mu1 is not None:
            lines.append(f"roots: mu1 = {_fmt(verdict.mu1)}, mu2 = {_fmt(verdict.mu2)}")
            lines.append(f"theta = {verdict.theta!r}")
        lines.append(f"p' = {verdict.p_prime!r}")
        lines.append(f"E1' = {_state_text(verdict.e1p)}")
        lines.append(f"E2' = {_state_text(verdict.e2p)}")
        lines.append(f"reconstruction residual = {verdict.residual:.3g}")
    else:
        lines.append(f"witness: {verdict.witness.kind.value} ({verdict.witness.detail})")
    lines.append(f"C(E1) = {c1!r}, C(E2) = {c2!r}")
    if args.self_check:
        lines.append(f"self-check: {'passed' if report['self_check']['passed'] else 'FAILED'}")
    return code, report, "\n".join(lines) + "\n"


# ------------------------------------------------------------------ decompose

def cmd_decompose(args) -> tuple[int, dict, str]:
    digest, rho, _, _ = _load_rank_two(args)
    rel_tol = args.tol if args.tol is not None else _env_tol(DEFAULT_REL_TOL)
    verdict = decide(rho, rel_tol)
    if not verdict.separable:
        raise CliExit(EXIT_ENTANGLED, f"state is entangled ({verdict.witness.kind.value}); no decomposition")
    comps = []
    for w, e in ((verdict.p_prime, verdict.e1p), (1.0 - verdict.p_prime, verdict.e2p)):
        factors = extract_product_factors(e)
        comps.append({
            "weight": w,
            "state": state_to_obj(e),
            "factors": [[complex_pair(z) for z in f] for f in factors],
        })
    out = {"dims": list(rho.profile.dims), "mixture": comps, "source_digest": digest}
    with open(args.output, "w") as fh:
        fh.write(dumps(out))
    text = f"wrote {args.output}: p' = {verdict.p_prime!r}\n"
    return EXIT_OK, out, text


# --------------------------------------------------------------------- sample

def _orthonormal_pair(x, y):
    y = y - np.vdot(x, y) * x
    return x, y / np.linalg.norm(y)


def _sample_trial(task):
    """One trial; module-level so it can run in a worker process."""
    trial, entropy, dims, mode, p_fixed, rel_tol = task
    ss = np.random.SeedSequence(entropy)
    s_a, s_b, s_w = ss.spawn(3)
    rng = np.random.default_rng(s_w)
    record = {"trial": trial, "mode": mode}
    try:
        if mode == "product-mix":
            a, b = random_product_state(dims, s_a), random_product_state(dims, s_b)
            w = float(rng.uniform(0.02, 0.98))
            rho = rank2_eigendecompose(DensityMatrix.from_mixture([w, 1 - w], [a, b]))
            record["weight"] = w
            truth = "Separable"
        elif mode == "corollary":
            e2 = maximally_entangled_state(dims)
            x = random_pure_state(dims, s_a).vector
            _, y = _orthonormal_pair(e2.vector, x)
            p = p_fixed if p_fixed is not None else float(rng.uniform(0.01, 0.49))
            rho = RankTwoState(p, make_pure_state(y, dims), e2)
            truth = "Entangled" if p < 0.5 else None
        else:
            x, y = _orthonormal_pair(random_pure_state(dims, s_a).vector, random_pure_state(dims, s_b).vector)
            p = p_fixed if p_fixed is not None else float(rng.uniform(0.05, 0.95))
            rho = RankTwoState(p, make_pure_state(x, dims), make_pure_state(y, dims))
            truth = None
        verdict = decide(rho, rel_tol)
        record.update({
            "p": rho.p,
            "verdict": verdict.status.value,
            "witness": None if verdict.witness is None else verdict.witness.kind.value,
            "residual": verdict.residual,
            "truth": truth,
            "agree": None if truth is None else verdict.status.value == truth,
        })
    except QsepError as exc:
        record.update({"verdict": "Error", "error": f"{type(exc).__name__}: {exc}", "truth": None, "agree": None})
    return record


def cmd_sample(args) -> tuple[int, dict, str]:
    try:
        dims = tuple(int(x) for x in args.dims.replace(" ", "").split(","))
    except ValueError:
        raise CliExit(EXIT_MALFORMED, f"--dims {args.dims!r} is not a comma-separated list of integers")
    as_profile(dims)
    if args.trials < 1:
        raise CliExit(EXIT_MALFORMED, "--trials must be positive")
    if args.p is not None and not 0 < args.p < 1:
        raise CliExit(EXIT_MALFORMED, "--p must lie in (0, 1)")
    rel_tol = args.tol if args.tol is not None else _env_tol(DEFAULT_REL_TOL)
    tasks = [(t, [args.seed, t], dims, args.mode, args.p, rel_tol) for t in range(args.trials)]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(_sample_trial, tasks, chunksize=max(1, args.trials // (4 * args.workers))))
    else:
        records = [_sample_trial(t) for t in tasks]
    counts = {}
    for r in records:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    known = [r["agree"] for r in records if r["agree"] is not None]
    summary = {
        "mode": args.mode,
        "dims": list(dims),
        "trials": args.trials,
        "seed": args.seed,
        "counts": dict(sorted(counts.items())),
        "ground_truth_trials": len(known),
        "agreement": (sum(known) / len(known)) if known else None,
    }
    if args.output:
        with open(args.output, "w") as fh:
            for r in records:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
    lines = [f"mode {args.mode}, dims {list(dims)}, {args.trials} trials, seed {args.seed}"]
    lines += [f"  {k}: {v}" for k, v in summary["counts"].items()]
    if summary["agreement"] is None:
        lines.append("  ground truth: n/a")
    else:
        lines.append(f"  agreement with ground truth: {sum(known)}/{len(known)}")
    return EXIT_OK, summary, "\n".join(lines) + "\n"


# ---------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qsep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol_help):
        p.add_argument("--input", required=True, help="input JSON file")
        p.add_argument("--tol", type=float, default=None, help=tol_help + " (default: $QSEP_TOL or built-in)")
        p.add_argument("--paper-indices", action="store_true", help="amplitude indices in the file are 1-based")

    p = sub.add_parser("concurrence", help="generalized concurrence and invariants of a pure state")
    common(p, "separability threshold on C")
    p.add_argument("--format", choices=["text", "machine"], default="text")
    p.set_defaults(func=cmd_concurrence)

    p = sub.add_parser("check", help="decide separability of a rank-two state")
    common(p, "relative tolerance of the criterion")
    p.add_argument("--rank-tol", type=float, default=RANK_TOL, help="rank test tolerance relative to the top eigenvalue")
    p.add_argument("--self-check", action="store_true", help="run reconstruction and oracle cross-checks")
    p.add_argument("--format", choices=["text", "machine"], default="text")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("decompose", help="write the separable decomposition of a rank-two state")
    common(p, "relative tolerance of the criterion")
    p.add_argument("--rank-tol", type=float, default=RANK_TOL)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_decompose, format="text")

    p = sub.add_parser("sample", help="run the criterion on randomly generated states")
    p.add_argument("--dims", required=True, help="comma-separated mode dimensions, e.g. 2,2,3")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["product-mix", "corollary", "generic"], default="product-mix")
    p.add_argument("--p", type=float, default=None, help="fixed weight of E1 (corollary/generic modes)")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", help="write per-trial records as JSON lines")
    p.add_argument("--format", choices=["text", "machine"], default="text")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, report, text = args.func(args)
    except CliExit as exc:
        print(f"qsep: {exc}", file=sys.stderr)
        return exc.code
    except NotRankTwo as exc:
        spectrum = "" if exc.spectrum is None else " spectrum: " + ", ".join(f"{x:.3g}" for x in exc.spectrum[:6])
        print(f"qsep: rank violation: {exc}.{spectrum}", file=sys.stderr)
        return EXIT_RANK
    except (FormulaMismatch, ConsistencyError) as exc:
        print(f"qsep: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InvalidInput as exc:
        print(f"qsep: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    sys.stdout.write(dumps(report) if args.format == "machine" else text)
    return code


if __name__ == "__main__":
    sys.exit(main())
