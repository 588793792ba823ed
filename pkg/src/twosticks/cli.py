"""Command-line driver: certify constants, run stick/strip experiments, emit reports.

Subcommands: certify, sticks, strip, sharpness, atlas, onev.  Every run is
deterministic for a fixed --seed, embeds its full configuration in the
output, and uses the exit-code contract

    0  success
    1  configuration error
    2  degenerate estimate (no informative samples / generation failed)
    3  theorem-bound violation witnessed

so CI can gate directly on violations.  CSV output uses '.' decimals and
round-trip-exact float text; JSON reports carry an ISO-8601 timestamp,
which is the only field excluded from the determinism contract.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .atlas import SiteSet, build_ray_family, generate_strip_pairs
from .convexity import (DegenerateSampleError, estimate_balanced, estimate_doubling,
                        estimate_lambda, estimate_uniform_constants,
                        onev_default_grid, onev_scan)
from .norms import EuclideanNorm, Norm, PNorm
from .reporting import write_csv, write_json
from .sharpness import sharpness_curve
from .sticks import (PreconditionError, euclid_interp_bound_residual,
                     euclid_lipschitz_ratio, euclid_monotonicity, holder_ratio,
                     strip_experiment, two_sticks_check)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DEGENERATE = 2
EXIT_VIOLATION = 3

DEFAULT_TOLERANCES = {
    "emono": 1e-12,
    "lipa": 1e-12,
    "lipb": 1e-9,
    "check": 1e-9,
}


def parse_norm(spec: str, dim: int) -> Norm:
    if spec == "euclidean":
        return EuclideanNorm(dim)
    if spec.startswith("p:"):
        return PNorm(float(spec[2:]), dim)
    raise ValueError(f"unknown norm spec {spec!r}; expected 'euclidean' or 'p:<value>'")


def parse_tolerances(items) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    for item in items or []:
        if "=" not in item:
            raise ValueError(f"bad --tolerance {item!r}; expected name=value")
        key, _, value = item.partition("=")
        tol[key.strip()] = float(value)
    return tol


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func", "config"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _random_family(norm: Norm, rng: np.random.Generator, n_sites: int,
                   n_queries: int, length: float, box: float):
    sites = rng.uniform(-box, box, size=(n_sites, norm.dim))
    queries = rng.uniform(-box, box, size=(n_queries, norm.dim))
    site_set = SiteSet(sites, norm)
    return build_ray_family(site_set, queries, length)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_certify(args) -> int:
    norm = parse_norm(args.norm, args.dim)
    try:
        lam = estimate_lambda(norm, args.r, args.mode, args.samples, args.seed)
        doub = estimate_doubling(norm, args.r, args.mode, args.samples, args.seed + 1)
        bal = estimate_balanced(norm, args.balanced_bound, args.mode,
                                args.samples, args.seed + 2)
    except DegenerateSampleError as exc:
        print(f"degenerate estimate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    payload = {
        "norm": norm.descriptor(),
        "mode": args.mode,
        "samples": args.samples,
        "seed": args.seed,
        "lambda_hat": lam.lambda_hat,
        "r": args.r,
        "t_hat": doub.t_hat,
        "k_hat": bal.k_hat,
        "balanced_bound": args.balanced_bound,
        "witnesses": {
            "lambda": lam.worst_witnesses,
            "doubling": doub.worst_witnesses,
            "balanced": bal.worst_witnesses,
        },
    }
    if args.uniform_p is not None:
        uni = estimate_uniform_constants(norm, args.uniform_p, args.uniform_q,
                                         args.samples, args.seed + 3)
        payload["a_hat"] = uni.a_hat
        payload["p"] = uni.p
        payload["b_hat"] = uni.b_hat
        payload["q"] = uni.q
    write_json(args.out, payload, config=_config_dict(args))
    print(f"certify: lambda_hat={lam.lambda_hat!r} t_hat={doub.t_hat!r} "
          f"k_hat={bal.k_hat!r} -> {args.out}")
    return EXIT_OK


def cmd_sticks(args) -> int:
    norm = parse_norm(args.norm, args.dim)
    tol = parse_tolerances(args.tolerance)
    rng = np.random.default_rng(args.seed)
    family = _random_family(norm, rng, args.sites, args.queries, args.length, args.box)
    sticks = family.sticks
    if len(sticks) < 2:
        print("family has fewer than two sticks; enlarge --queries", file=sys.stderr)
        return EXIT_DEGENERATE

    euclidean = isinstance(norm, EuclideanNorm)
    if euclidean:
        header = ["i", "j", "monotonicity", "interp_residual", "lipschitz_ratio",
                  "s", "t", "violated"]
    else:
        header = ["i", "j", "holder_ratio", "t", "q", "p", "violated"]
        q_exp = args.q if args.q is not None else (2.0 if norm.p >= 2.0 else norm.p)
        p_exp = args.p_exp if args.p_exp is not None else max(norm.p, 2.0)

    rows = []
    violations = 0
    pairs = [(i, j) for i in range(len(sticks)) for j in range(i + 1, len(sticks))]
    if args.pairs is not None and len(pairs) > args.pairs:
        idx = rng.choice(len(pairs), size=args.pairs, replace=False)
        pairs = [pairs[k] for k in sorted(idx)]
    for i, j in pairs:
        l, m = sticks[i], sticks[j]
        t = float(rng.uniform(0.05, 1.0))
        s = float(rng.uniform(t, 1.0))
        if euclidean:
            mono = euclid_monotonicity(l, m)
            resid = max(euclid_interp_bound_residual(l, m, tt)
                        for tt in (0.0, 0.25, 0.5, 0.75, 1.0))
            ratio = euclid_lipschitz_ratio(l, m, s, t)
            scale = 1.0 + float(np.linalg.norm(l.start - m.start))
            bad = (mono < -tol["emono"] * scale or resid > tol["lipa"] * scale
                   or ratio > 1.0 + tol["lipb"])
            rows.append([i, j, mono, resid, ratio, s, t, bad])
        else:
            ratio = holder_ratio(norm, l, m, t, q_exp, p_exp)
            bad = not np.isfinite(ratio)
            rows.append([i, j, ratio, t, q_exp, p_exp, bad])
        violations += bad
    write_csv(args.out, header, rows, config=_config_dict(args))
    print(f"sticks: {len(rows)} pairs, {violations} violations -> {args.out}")
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_strip(args) -> int:
    norm = parse_norm(args.norm, args.dim)
    tol = parse_tolerances(args.tolerance)
    if args.lam <= 2.0:
        raise ValueError("--lambda must exceed 2 (geometric convexity)")
    if args.k < 1.0:
        raise ValueError("--k must be >= 1")
    try:
        configs = generate_strip_pairs(norm, args.count, args.delta, args.rho,
                                       seed=args.seed, endpoint_gap_max=args.big_r)
    except RuntimeError as exc:
        print(f"degenerate generation: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    header = ["index", "delta", "kappa", "bound", "projection",
              "promise_lhs", "promise_rhs", "axya", "passed"]
    rows = []
    failures = 0
    opts = {"n_starts": 8, "max_iter": 80}
    for idx, (l, m, x0) in enumerate(configs):
        rep = strip_experiment(norm, l, m, x0, args.delta, args.rho, args.lam,
                               args.k, args.big_r, tol=tol["check"],
                               modulus_opts=opts, auto_orient=True)
        rows.append([idx, rep.delta, rep.kappa, rep.bound, rep.projection,
                     rep.promise_lhs, rep.promise_rhs, rep.axya_value,
                     rep.passed and rep.axya_ok])
        failures += not (rep.passed and rep.axya_ok)
    write_csv(args.out, header, rows, config=_config_dict(args))
    print(f"strip: {len(rows)} configurations, {failures} failures -> {args.out}")
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_sharpness(args) -> int:
    if args.p <= 1.0:
        raise ValueError("--p must exceed 1")
    if args.p >= 2.0:
        lo = args.param_min if args.param_min is not None else 1e-5
        hi = args.param_max if args.param_max is not None else 1e-2
        grid = np.logspace(np.log10(lo), np.log10(hi), args.points)
    else:
        # parameter is x; the admissible window is 2^-p <= x^p <= 1/2
        xp_lo = 2.0 ** (-args.p) * (1.0 + 1e-9)
        xp_hi = 0.5 * (1.0 - 1e-9)
        if args.param_min is not None:
            xp_lo = max(xp_lo, float(args.param_min) ** args.p)
        if args.param_max is not None:
            xp_hi = min(xp_hi, float(args.param_max) ** args.p)
        grid = np.linspace(xp_lo, xp_hi, args.points) ** (1.0 / args.p)
    curve = sharpness_curve(args.p, grid)
    header = ["parameter", "gap_norm", "m_norm", "ratio"]
    write_csv(args.out, header, curve.to_rows(), config=_config_dict(args))
    print(f"sharpness: p={args.p} band=[{curve.band[0]!r}, {curve.band[1]!r}] "
          f"exponent={curve.exponent!r} -> {args.out}")
    return EXIT_OK


def cmd_atlas(args) -> int:
    norm = parse_norm(args.norm, args.dim)
    rng = np.random.default_rng(args.seed)
    family = _random_family(norm, rng, args.sites, args.queries, args.length, args.box)
    payload = family.to_dict()
    payload["norm"] = norm.descriptor()
    write_json(args.out, payload, config=_config_dict(args))
    if args.csv:
        header = ["index", "site_index"] \
            + [f"start_{k}" for k in range(norm.dim)] \
            + [f"end_{k}" for k in range(norm.dim)]
        rows = [[i, family.site_index[i], *stick.start, *stick.end]
                for i, stick in enumerate(family.sticks)]
        write_csv(args.csv, header, rows, config=_config_dict(args))
    print(f"atlas: {len(family)} sticks ({len(family.skipped)} skipped) -> {args.out}")
    return EXIT_OK


def cmd_onev(args) -> int:
    grid = onev_default_grid(args.points, args.z_min, args.z_max)
    results = {}
    violated = False
    for p in args.p:
        if p <= 1.0:
            raise ValueError("--p must exceed 1")
        scan = onev_scan(p, grid)
        results[repr(float(p))] = scan.to_dict()
        violated |= scan.inf_double_ratio <= 2.0
    write_json(args.out, {"results": results}, config=_config_dict(args))
    print(f"onev: p={args.p} -> {args.out}")
    return EXIT_VIOLATION if violated else EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser, norm: bool = True) -> None:
    if norm:
        sub.add_argument("--norm", required=True,
                         help="norm spec: euclidean | p:<value>")
        sub.add_argument("--dim", type=int, default=3, help="ambient dimension")
    sub.add_argument("--seed", type=int, default=0, help="rng seed")
    sub.add_argument("--samples", type=int, default=100000, help="sample count")
    sub.add_argument("--tolerance", action="append", metavar="NAME=VALUE",
                     help="override a named tolerance (repeatable)")
    sub.add_argument("--out", default=None, help="output path")
    sub.add_argument("--config", default=None,
                     help="JSON config file; overrides flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twosticks",
        description="Numerical experiments on Minkowski-norm stick geometry")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    cert = subs.add_parser("certify", help="estimate convexity/doubling/balance constants")
    _add_common(cert)
    cert.add_argument("--r", type=float, default=0.25, help="sampling radius")
    cert.add_argument("--mode", choices=("full", "tangent"), default="tangent")
    cert.add_argument("--balanced-bound", type=float, default=0.5)
    cert.add_argument("--uniform-p", type=float, default=None)
    cert.add_argument("--uniform-q", type=float, default=2.0)
    cert.set_defaults(func=cmd_certify, default_out="certify.json")

    stk = subs.add_parser("sticks", help="pairwise endpoint-bound checks on a ray family")
    _add_common(stk)
    stk.add_argument("--sites", type=int, default=4)
    stk.add_argument("--queries", type=int, default=40)
    stk.add_argument("--length", type=float, default=1.0)
    stk.add_argument("--box", type=float, default=2.0)
    stk.add_argument("--pairs", type=int, default=None, help="cap on sampled pairs")
    stk.add_argument("--q", type=float, default=None, help="smoothness exponent")
    stk.add_argument("--p-exp", type=float, default=None, help="convexity exponent")
    stk.set_defaults(func=cmd_sticks, default_out="sticks.csv")

    strp = subs.add_parser("strip", help="strip-confinement experiment")
    _add_common(strp)
    strp.add_argument("--count", type=int, default=100)
    strp.add_argument("--lambda", dest="lam", type=float, required=True,
                      help="certified geometric-convexity constant at radius 1")
    strp.add_argument("--k", type=float, required=True, help="certified balanced constant")
    strp.add_argument("--delta", type=float, default=1e-4)
    strp.add_argument("--rho", type=float, default=0.36)
    strp.add_argument("--big-r", type=float, default=0.05,
                      help="balanced-condition radius (endpoint gap cap)")
    strp.set_defaults(func=cmd_strip, default_out="strip.csv")

    shp = subs.add_parser("sharpness", help="Hölder-exponent sharpness curve")
    _add_common(shp, norm=False)
    shp.add_argument("--p", type=float, required=True)
    shp.add_argument("--points", type=int, default=40)
    shp.add_argument("--param-min", type=float, default=None)
    shp.add_argument("--param-max", type=float, default=None)
    shp.set_defaults(func=cmd_sharpness, default_out="sharpness.csv")

    atl = subs.add_parser("atlas", help="build and export a distance-ray family")
    _add_common(atl)
    atl.add_argument("--sites", type=int, default=5)
    atl.add_argument("--queries", type=int, default=50)
    atl.add_argument("--length", type=float, default=1.0)
    atl.add_argument("--box", type=float, default=2.0)
    atl.add_argument("--csv", default=None, help="also export sticks as CSV")
    atl.set_defaults(func=cmd_atlas, default_out="atlas.json")

    onv = subs.add_parser("onev", help="scan the scalar p-norm profile ratios")
    _add_common(onv, norm=False)
    onv.add_argument("--p", type=float, action="append", required=True,
                     help="exponent (repeatable)")
    onv.add_argument("--points", type=int, default=100000)
    onv.add_argument("--z-min", type=float, default=1e-6)
    onv.add_argument("--z-max", type=float, default=1e6)
    onv.set_defaults(func=cmd_onev, default_out="onev.json")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; map to the config-error code
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    if args.config:
        try:
            overrides = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for key, value in overrides.items():
            setattr(args, key.replace("-", "_"), value)
    if args.out is None:
        args.out = args.default_out
    try:
        return args.func(args)
    except (ValueError, PreconditionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateSampleError as exc:
        print(f"degenerate estimate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
