"""Command-line interface.

Exit codes: 0 answered/passed, 1 ran but a check failed, 2 usage or
validation error. Every command prints its report as JSON on stdout; all
commands except ``classify`` also write report.json, CSV samples and
manifest.json into the output directory (``--out``, else $CRITEXP_OUTPUT_DIR,
else ./critexp-out). ``classify`` writes files only when a directory is given.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .criterion import (CriterionQuadrature, Gridded, Separable, bump, constant,
                        evaluate_criterion, power_decay)
from .errors import CertificationError, CritexpError
from .exponents import (ProblemParams, Verdict, classify_fujita, classify_second,
                        classify_sigma_example, exponent_set, optimal_scaling,
                        second_critical_exponent)
from .output import OUTPUT_ENV, RunWriter, dumps, resolve_output_dir
from .scaling import QuadratureConfig, verify_lemma
from .simulator import SimConfig, blowup_preset, run, stationary_preset
from .stationary import (StationaryParams, admissible_range, certify,
                         fujita_supercritical_witness)
from .testfunc import CutoffProfile

log = logging.getLogger("critexp")


class UsageError(Exception):
    pass


def _ladder(args):
    if args.points < 5:
        raise UsageError("--points must be at least 5")
    if not 0 < args.tmin < args.tmax:
        raise UsageError("need 0 < --tmin < --tmax")
    return [float(T) for T in np.geomspace(args.tmin, args.tmax, args.points)]


def _config(args):
    skip = {"func", "out"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _writer(args, always=True):
    if not always and args.out is None and not os.environ.get(OUTPUT_ENV):
        return None
    return RunWriter(resolve_output_dir(args.out), args.command, _config(args))


def _emit(report, writer, csvs=()):
    if writer is not None:
        writer.json("report.json", report)
        for name, header, rows in csvs:
            writer.csv(name, header, rows)
        writer.finish()
    sys.stdout.write(dumps(report))


def _params(args):
    return ProblemParams(args.k, args.p, args.q, args.N)


# -- commands -----------------------------------------------------------------

def cmd_classify(args):
    params = _params(args)
    fuj = classify_fujita(params)
    classes = {"fujita": fuj.to_dict()}
    primary = fuj
    if args.sigma is not None:
        primary = classify_sigma_example(params, args.sigma)
        classes["sigma_example"] = primary.to_dict()
    if args.a is not None:
        primary = classify_second(params, args.a)
        classes["second"] = primary.to_dict()
    report = {
        "command": "classify",
        "params": {"k": params.k, "p": params.p, "q": params.q, "N": params.N,
                   "a": args.a, "sigma": args.sigma},
        "exponents": exponent_set(params).to_dict(),
        "classifications": classes,
        "verdict": primary.verdict.value,
        "theorem_tag": primary.theorem_tag,
    }
    _emit(report, _writer(args, always=False))
    return 0


def cmd_verify_lemma(args):
    ell = args.ell if args.ell is not None else 2 * args.m / (args.m - 1)
    cfg = QuadratureConfig(args.nt, args.nr, args.scheme)
    profile = CutoffProfile(args.c1, args.c2)
    rep = verify_lemma(args.lemma, args.m, ell, args.theta, args.N, _ladder(args),
                       args.tol, cfg, profile, workers=args.workers)
    report = {"command": "verify-lemma", **rep.to_dict(),
              "defaults": {"c1": args.c1, "c2": args.c2, "ladder": _ladder(args),
                           "tol": args.tol, "scheme": args.scheme}}
    _emit(report, _writer(args), [("samples.csv", ["T", "value"], rep.samples)])
    return 0 if rep.passed else 1


def _inhomogeneity(args, params):
    theta, _, E = optimal_scaling(params.p, params.q, params.N)
    if args.w == "bump":
        return Separable(constant(1.0), bump(args.amplitude, args.radius)), E + 1
    if args.w == "power":
        if args.a is None:
            raise UsageError("--w power needs --a")
        return (Separable(constant(1.0), power_decay(args.a, args.amplitude)),
                E + 1 + theta * max(params.N - args.a, 0.0))
    if args.w == "separable-power":
        if args.sigma is None:
            raise UsageError("--w separable-power needs --sigma")
        expo = params.q * args.sigma / (params.q - 1)
        f = lambda t: np.asarray(t, float) ** expo  # noqa: E731
        return Separable(f, bump(args.amplitude, args.radius)), E + 1 + expo
    if args.grid is None:
        raise UsageError("--w grid needs --grid FILE")
    return Gridded.from_csv(args.grid), None


def cmd_criterion(args):
    params = _params(args)
    w, predicted = _inhomogeneity(args, params)
    profile = CutoffProfile(args.c1, args.c2)
    cfg = CriterionQuadrature(args.nt, args.nr, args.scheme)
    rep = evaluate_criterion(w, params, _ladder(args), profile, cfg, args.margin,
                             workers=args.workers)
    rep.predicted_slope = predicted
    report = {"command": "criterion", **rep.to_dict(),
              "classification": classify_fujita(params).to_dict(),
              "params": {"k": params.k, "p": params.p, "q": params.q, "N": params.N},
              "w": args.w,
              "out_of_domain": bool(getattr(w, "out_of_domain", False)),
              "defaults": {"c1": args.c1, "c2": args.c2, "ladder": _ladder(args),
                           "margin": args.margin}}
    _emit(report, _writer(args), [("samples.csv", ["T", "J"], rep.values)])
    return 0


def cmd_stationary(args):
    if args.a is None:
        sol = fujita_supercritical_witness(args.N, args.p, r_max=args.r_max,
                                           n_grid=args.n_grid, tol=args.tol)
    else:
        (lo, _), bound = admissible_range(args.N, args.p, args.a)
        delta = lo if args.delta is None else args.delta
        eps = 0.5 * bound(delta) if args.epsilon is None else args.epsilon
        sol = certify(StationaryParams(args.N, args.p, args.a, delta, eps),
                      r_max=args.r_max, n_grid=args.n_grid, tol=args.tol)
    report = {"command": "stationary", **sol.to_dict()}
    t = sol.table
    rows = zip(t["r"], t["u"], t["g"], t["residual"])
    _emit(report, _writer(args), [("samples.csv", ["r", "u", "g", "residual"], rows)])
    return 0


def cmd_simulate(args):
    if args.preset == "stationary-check":
        a = second_critical_exponent(args.p) if args.a is None else args.a
        cfg, init, _ = stationary_preset(args.N, args.p, a, args.q, args.k,
                                         args.n_r, args.t_end, args.r_max)
        tag = "Theorem 3(II)"
    else:
        params = _params(args)
        if args.preset == "blowup":
            cfg, init = blowup_preset(args.N, args.p, args.q, args.k, args.amplitude,
                                      args.radius, args.n_r, args.t_end, args.r_max,
                                      args.threshold)
        else:
            w = (Separable(constant(1.0), bump(args.amplitude, args.radius))
                 if args.amplitude > 0 else None)
            cfg = SimConfig(params, args.r_max or args.t_end + 2 * args.radius, args.n_r,
                            args.t_end, blowup_threshold=args.threshold, w=w,
                            boundary=args.boundary)
            init = lambda r: np.zeros((params.k, r.size))  # noqa: E731
        tag = classify_fujita(params).theorem_tag
    if args.dt is not None or args.snapshot_stride:
        changes = {"snapshot_stride": args.snapshot_stride}
        if args.dt is not None:
            changes["dt"] = args.dt
        cfg = dataclasses.replace(cfg, **changes)
    rep = run(cfg, init)
    if args.preset == "stationary-check":
        passed = (not rep.blew_up) and rep.sup_norm_drift < args.drift_tol
    elif args.preset == "blowup":
        passed = rep.blew_up and bool(rep.refinement_consistent)
    else:
        passed = True
    report = {"command": "simulate", "preset": args.preset, **rep.to_dict(),
              "passed": passed, "theorem_tag": tag,
              "config": {"N": cfg.params.N, "p": cfg.params.p, "q": cfg.params.q,
                         "k": cfg.params.k, "r_max": cfg.r_max, "n_r": cfg.n_r,
                         "dt": cfg.dt, "t_end": cfg.t_end,
                         "blowup_threshold": cfg.blowup_threshold,
                         "boundary": cfg.boundary}}
    csvs = [("samples.csv", ["t", "sup_u"], rep.max_norm_history)]
    if rep.snapshots:
        r = cfg.r
        csvs.append(("snapshots.csv", ["t", "r", "u"],
                     ((t, ri, ui) for t, u in rep.snapshots for ri, ui in zip(r, u))))
    _emit(report, _writer(args), csvs)
    return 0 if passed else 1


# -- sweep ----------------------------------------------------------------------

def _load_config(path):
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"{path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _axis(cfg, key, default=None):
    val = cfg.get(key, default)
    if val is None:
        raise UsageError(f"sweep config needs '{key}'")
    if isinstance(val, (int, float)):
        return [float(val)]
    if isinstance(val, list):
        return [float(v) for v in val]
    if isinstance(val, dict):
        try:
            return [float(v) for v in np.linspace(val["start"], val["stop"], int(val["num"]))]
        except KeyError as exc:
            raise UsageError(f"range for '{key}' needs start, stop, num ({exc})") from None
    raise UsageError(f"cannot parse '{key}' = {val!r}")


def _sweep_cell(idx, N, k, p, q, a, with_criterion, ladder):
    params = ProblemParams(k, p, q, N)
    fuj = classify_fujita(params)
    sec = classify_second(params, a)
    row = {"index": idx, "N": N, "k": k, "p": p, "q": q, "a": a,
           "a_star": second_critical_exponent(p), "fujita_verdict": fuj.verdict.value,
           "second_verdict": sec.verdict.value, "second_tag": sec.theorem_tag}
    if with_criterion:
        rep = evaluate_criterion(Separable(constant(1.0), power_decay(a)), params, ladder)
        row["criterion_slope"] = rep.fitted_slope
        row["criterion_verdict"] = rep.verdict.value
    return row


def cmd_sweep(args):
    cfg = _load_config(args.config)
    try:
        N = int(cfg.get("N", 5))
        k = int(cfg.get("k", 2))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad N or k in sweep config: {exc}") from None
    ps, qs, as_ = _axis(cfg, "p"), _axis(cfg, "q", 2.0), _axis(cfg, "a")
    with_criterion = bool(cfg.get("criterion", False))
    ladder = [float(T) for T in cfg.get("ladder", [2.0**j for j in range(4, 13)])]
    workers = int(cfg.get("workers", args.workers or 1))
    cells = [(i, N, k, p, q, a, with_criterion, ladder)
             for i, (p, q, a) in enumerate((p, q, a) for p in ps for q in qs for a in as_)]
    # validate before fanning out
    ProblemParams(k, ps[0], qs[0], N)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(lambda c: _sweep_cell(*c), cells))
    rows.sort(key=lambda r: r["index"])

    boundary = []
    for p in ps:
        for q in qs:
            sub = [r for r in rows if r["p"] == p and r["q"] == q
                   and r["second_verdict"] != Verdict.OUT_OF_SCOPE.value]
            exist = [r["a"] for r in sub if r["second_verdict"] == Verdict.GLOBAL_EXISTENCE_POSSIBLE.value]
            nonex = [r["a"] for r in sub if r["second_verdict"] == Verdict.NONEXISTENCE.value]
            if exist or nonex:
                boundary.append({"p": p, "q": q, "a_star": second_critical_exponent(p),
                                 "a_max_nonexistence": max(nonex) if nonex else None,
                                 "a_min_existence": min(exist) if exist else None})
    counts = {}
    for r in rows:
        counts[r["second_verdict"]] = counts.get(r["second_verdict"], 0) + 1
    report = {"command": "sweep", "N": N, "k": k, "cells": len(rows),
              "verdict_counts": dict(sorted(counts.items())), "boundary": boundary,
              "theorem_tag": "Theorem 2 / Theorem 3", "config": cfg}
    header = list(rows[0].keys()) if rows else []
    _emit(report, _writer(args), [("samples.csv", header, ([r[h] for h in header] for r in rows))])
    return 0


# -- parser -----------------------------------------------------------------------

def _add_params(p, need_q=True):
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=need_q, default=None if need_q else 2.0)
    p.add_argument("--k", type=int, default=2)


def _add_ladder(p):
    p.add_argument("--tmin", type=float, default=16.0)
    p.add_argument("--tmax", type=float, default=4096.0)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--nt", type=int, default=None)
    p.add_argument("--nr", type=int, default=None)
    p.add_argument("--scheme", choices=["midpoint", "simpson"], default="simpson")
    p.add_argument("--c1", type=float, default=0.25)
    p.add_argument("--c2", type=float, default=0.75)
    p.add_argument("--workers", type=int, default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="critexp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"critexp {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="exponents and region classification")
    _add_params(c)
    c.add_argument("--a", type=float)
    c.add_argument("--sigma", type=float)
    c.set_defaults(func=cmd_classify)

    v = sub.add_parser("verify-lemma", help="measure T-scaling of test-function integrals")
    v.add_argument("--lemma", choices=["L1", "L2"], required=True)
    v.add_argument("--m", type=float, required=True)
    v.add_argument("--N", type=int, default=3)
    v.add_argument("--theta", type=float, default=0.5)
    v.add_argument("--ell", type=float)
    v.add_argument("--tol", type=float, default=0.05)
    _add_ladder(v)
    v.set_defaults(func=cmd_verify_lemma, nt_default=1024)

    k = sub.add_parser("criterion", help="evaluate the blow-up criterion on a T ladder")
    _add_params(k)
    k.add_argument("--w", choices=["bump", "power", "separable-power", "grid"], default="bump")
    k.add_argument("--a", type=float)
    k.add_argument("--sigma", type=float)
    k.add_argument("--amplitude", type=float, default=1.0)
    k.add_argument("--radius", type=float, default=1.0)
    k.add_argument("--grid", type=str)
    k.add_argument("--margin", type=float, default=0.05)
    _add_ladder(k)
    k.set_defaults(func=cmd_criterion, nt_default=512)

    s = sub.add_parser("stationary", help="certify an explicit stationary solution")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--a", type=float)
    s.add_argument("--delta", type=float)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--r-max", type=float, default=100.0)
    s.add_argument("--n-grid", type=int, default=2048)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_stationary)

    m = sub.add_parser("simulate", help="radial method-of-lines run")
    m.add_argument("--preset", choices=["stationary-check", "blowup", "custom"], default="custom")
    m.add_argument("--N", type=int, default=None, help="default 5 for stationary-check, else 3")
    m.add_argument("--p", type=float, default=None, help="default 3 for stationary-check, else 2")
    m.add_argument("--q", type=float, default=2.0)
    m.add_argument("--k", type=int, default=2)
    m.add_argument("--a", type=float, default=None)
    m.add_argument("--n-r", type=int, default=None)
    m.add_argument("--t-end", type=float, default=10.0)
    m.add_argument("--r-max", type=float, default=None)
    m.add_argument("--dt", type=float, default=None)
    m.add_argument("--threshold", type=float, default=1e6)
    m.add_argument("--amplitude", type=float, default=5.0)
    m.add_argument("--radius", type=float, default=1.0)
    m.add_argument("--boundary", choices=["dirichlet_zero", "absorbing_sponge"],
                   default="dirichlet_zero")
    m.add_argument("--snapshot-stride", type=int, default=0)
    m.add_argument("--drift-tol", type=float, default=1e-2)
    m.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="region map over a (p, q, a) grid from a TOML/JSON config")
    w.add_argument("--config", required=True)
    w.add_argument("--workers", type=int, default=None)
    w.set_defaults(func=cmd_sweep)

    for p in (c, v, k, s, m, w):
        p.add_argument("--out", default=None, help=f"output directory (else ${OUTPUT_ENV})")
    return parser


def _fill_defaults(args):
    if getattr(args, "nt", 0) is None:
        args.nt = args.nt_default
    if getattr(args, "nr", 0) is None:
        args.nr = args.nt_default
    if hasattr(args, "nt_default"):
        del args.nt_default
    if args.command == "simulate":
        if args.n_r is None:
            args.n_r = 512 if args.preset == "stationary-check" else 256
        stat = args.preset == "stationary-check"
        if args.N is None:
            args.N = 5 if stat else 3
        if args.p is None:
            args.p = 3.0 if stat else 2.0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: --help is 0, bad flags 2
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _fill_defaults(args)
        return args.func(args)
    except CertificationError as exc:
        print(f"critexp: {exc}", file=sys.stderr)
        return 1
    except (UsageError, CritexpError, OSError) as exc:
        print(f"critexp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
