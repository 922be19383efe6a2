"""Command-line experiment harness with deterministic file outputs.

Subcommands (long flags only):

    constants        exact constant table for one order m
    pizzetti         seeded exactness sweep of the ball-average expansion
    green            exact radial Green function of Delta^m on the unit ball
    shoot            integrate one radial trajectory, write CSV + report JSON
    represent        v-profile CSV and u - v polynomial fit JSON
    classify         equivalence-criteria verdicts as JSON
    a2m-check        positivity, scaling covariance, and exp-integrability
    reproduce-paper  fixed verification suite with a summary table

Exit codes: 0 success, 2 usage error, 3 numerical failure.  Identical argv
(and seed) produce byte-identical CSV/JSON outputs.  The default output
directory is $POLYLIOUVILLE_OUT, falling back to the working directory.  An
optional config file holds "key = value" lines (long flag names without the
dashes); explicit flags override it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .classify import classify
from .exactconst import constant_table, format_table, verify_gamma_identity
from .greenball import RadialProfile, exp_integrability, green_ball, navier_solve_radial
from .polyfield import almansi_random, pizzetti_check
from .represent import compute_v, fit_even_polynomial
from .shooter import ShootingConfig, scalar_curvature, shoot, standard_config

__all__ = ["run", "main"]

_SUBCOMMANDS = (
    "constants",
    "pizzetti",
    "green",
    "shoot",
    "represent",
    "classify",
    "a2m-check",
    "reproduce-paper",
)


def _read_config(path: str) -> list[tuple[str, str]]:
    pairs = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        key, value = line.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    return pairs


def _inject_config(argv: list[str]) -> list[str]:
    """Insert config-file pairs as flags ahead of the explicit ones.

    argparse keeps the last occurrence of a repeated flag, so explicit
    command-line flags override the config file.
    """
    if not argv or argv[0] not in _SUBCOMMANDS or "--config" not in argv:
        return argv
    path = argv[argv.index("--config") + 1]
    extra: list[str] = []
    for key, value in _read_config(path):
        flag = "--" + key.replace("_", "-")
        if flag != "--config":
            extra.extend([flag, value])
    return [argv[0]] + extra + argv[1:]


def _resolve_out(args) -> Path:
    out = args.out or os.environ.get("POLYLIOUVILLE_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyliouville",
        description="numerical and exact-arithmetic laboratory for the "
        "polyharmonic Liouville equation on R^{2m}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--out", help="output directory (default $POLYLIOUVILLE_OUT or .)")

    p = sub.add_parser("constants", parents=[common], help="exact constant table")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--digits", type=int, default=30)

    p = sub.add_parser("pizzetti", parents=[common], help="seeded exactness sweep")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-degree", type=int, default=6)

    p = sub.add_parser("green", parents=[common], help="exact Green function data")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--points", type=int, default=0,
                   help="if > 0, also write green_profile.csv with this many radii")

    shooting = argparse.ArgumentParser(add_help=False)
    shooting.add_argument("--m", type=int, required=True)
    shooting.add_argument("--u0", type=float, help="u(0)")
    shooting.add_argument("--d2", type=float, default=0.0, help="u''(0)")
    shooting.add_argument("--d4", type=float, default=0.0, help="u''''(0)")
    shooting.add_argument("--d6", type=float, default=0.0, help="u^(6)(0)")
    shooting.add_argument("--laplacians",
                          help="comma list A_0,...,A_{m-1} of Delta^j u(0), "
                          "alternative to --u0/--d2/...")
    shooting.add_argument("--r-end", type=float, default=1000.0)
    shooting.add_argument("--rel-tol", type=float, default=1e-10)
    shooting.add_argument("--abs-tol", type=float, default=1e-12)
    shooting.add_argument("--blowup-threshold", type=float, default=50.0)

    p = sub.add_parser("shoot", parents=[common, shooting],
                       help="radial trajectory CSV + diagnostic report JSON")

    p = sub.add_parser("represent", parents=[common, shooting],
                       help="v-profile CSV + u-v fit JSON")
    p.add_argument("--radii", help="comma list of evaluation radii")
    p.add_argument("--points", type=int, default=24)

    p = sub.add_parser("classify", parents=[common, shooting],
                       help="equivalence-criteria verdict JSON")

    p = sub.add_parser("a2m-check", parents=[common],
                       help="Navier positivity, scaling covariance, integrability")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--points", type=int, default=801)

    p = sub.add_parser("reproduce-paper", parents=[common],
                       help="fixed verification suite")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers for the independent solve rows")
    p.add_argument("--r-end", type=float, default=1000.0)

    return parser


# -- shared solve/classify pipeline -----------------------------------------


def _initial_data(args) -> dict:
    if args.laplacians is not None:
        values = tuple(float(x) for x in args.laplacians.split(","))
        if len(values) != args.m:
            raise ValueError(f"--laplacians needs exactly m={args.m} values")
        return {"initial_laplacians": values}
    if args.u0 is None:
        raise ValueError("either --u0 (with --d2/--d4/--d6) or --laplacians is required")
    derivs = (args.u0, args.d2, args.d4, args.d6)[: args.m]
    return {"initial_derivatives": derivs}


def _pipeline(cfg: ShootingConfig):
    """shoot -> v-profile -> u-v fit -> classification, for one config."""
    traj, rep = shoot(cfg)
    vprof = None
    if traj.termination == "reached_end" and traj.r_max >= 100.0:
        radii = np.geomspace(max(1.0, traj.r_max / 1000.0), traj.r_max / 2.0, 24)
        vprof = compute_v(traj, radii)
        u = traj.sample_w(0, radii)
        floor = rep.w0_error_estimate
        if not math.isfinite(floor):
            floor = 0.0
        fit = fit_even_polynomial(
            (radii, u - vprof.values), max(2, 2 * cfg.m - 2),
            contribution_floor=10.0 * floor,
        )
    else:
        # truncated run: classification will be inconclusive regardless
        lo = max(float(traj.grid[1]), traj.r_max * 0.05)
        rr = np.linspace(lo, traj.r_max * 0.95, 16)
        fit = fit_even_polynomial((rr, np.zeros(16)), 2)
    verdict = classify(traj, rep, fit)
    return traj, rep, fit, vprof, verdict


def _fit_json(fit) -> dict:
    return {
        "coefficients": [float(c) for c in fit.coeffs],
        "residual_rms": fit.residual_rms,
        "inferred_degree": fit.inferred_degree,
        "r_max": fit.r_max,
    }


# -- subcommand handlers -----------------------------------------------------


def _cmd_constants(args) -> int:
    print(format_table(constant_table(args.m), digits=args.digits))
    return 0


def _cmd_pizzetti(args) -> int:
    ok = 0
    for i in range(args.cases):
        degree = i % (args.max_degree + 1)
        case_seed = args.seed * 100003 + i
        poly = almansi_random(args.m, args.n, degree, case_seed)
        x0 = tuple((((case_seed >> k) % 5) - 2 for k in range(args.n)))
        radius = 1 + (i % 3)
        report = pizzetti_check(poly, args.m, x0, radius)
        if report.exact:
            ok += 1
    print(f"{ok}/{args.cases} exact")
    return 0 if ok == args.cases else 3


def _cmd_green(args) -> int:
    gb = green_ball(args.m)
    print(f"m = {args.m} (ball radius 1, Navier boundary conditions)")
    print(f"log coefficient: {gb.log_coeff}  ({float(gb.log_coeff):.17g})")
    for k, c in enumerate(gb.unit_poly_coeffs()):
        print(f"r^{2 * k} coefficient: {c}  ({float(c):.17g})")
    for i, c in enumerate(gb.sign_constants_exact):
        sign = "> 0" if c.is_positive else "<= 0 (!)"
        print(f"sign constant [{i}]: {c}  {sign}")
    residuals = gb.navier_residuals_exact()
    print("Navier boundary residuals exactly zero:",
          all(r.is_zero for r in residuals))
    if args.points > 0:
        out = _resolve_out(args)
        grid = np.linspace(0.0, 1.0, args.points)[1:]
        prof = RadialProfile(grid=grid, values=gb.evaluate(grid), m=args.m)
        prof.to_csv(out / "green_profile.csv", header=("r", "G"))
        print(f"wrote {out / 'green_profile.csv'}")
    if not all(c.is_positive for c in gb.sign_constants_exact):
        return 3
    return 0


def _cmd_shoot(args) -> int:
    out = _resolve_out(args)
    cfg = ShootingConfig(
        m=args.m,
        r_end=args.r_end,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        blowup_threshold=args.blowup_threshold,
        **_initial_data(args),
    )
    traj, rep, fit, _, verdict = _pipeline(cfg)
    traj.to_csv(out / "trajectory.csv")
    payload = rep.to_json_dict()
    payload["classification"] = verdict.to_json_dict()
    payload["fit"] = _fit_json(fit)
    _write_json(out / "report.json", payload)
    print(f"termination: {traj.termination} at r = {traj.r_max:.17g}")
    print(f"alpha = {traj.alpha_final:.17g}")
    print(f"overall = {verdict.overall}")
    print(f"wrote {out / 'trajectory.csv'} and {out / 'report.json'}")
    return 0


def _cmd_represent(args) -> int:
    out = _resolve_out(args)
    cfg = ShootingConfig(
        m=args.m,
        r_end=args.r_end,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        blowup_threshold=args.blowup_threshold,
        **_initial_data(args),
    )
    traj, rep = shoot(cfg)
    if args.radii is not None:
        radii = np.array(sorted(float(x) for x in args.radii.split(",")))
    else:
        radii = np.geomspace(max(1.0, traj.r_max / 1000.0), traj.r_max / 2.0, args.points)
    vprof = compute_v(traj, radii)
    u = traj.sample_w(0, radii)
    fit = fit_even_polynomial((radii, u - vprof.values), max(2, 2 * args.m - 2))
    vprof.to_csv(out / "v_profile.csv", header=("r", "v", "err_bar"))
    _write_json(out / "fit.json", _fit_json(fit))
    print(f"v evaluated at {radii.size} radii, max err bar {float(np.max(vprof.err)):.3g}")
    print(f"u - v fit: degree {fit.inferred_degree}, residual rms {fit.residual_rms:.3g}")
    print(f"wrote {out / 'v_profile.csv'} and {out / 'fit.json'}")
    return 0


def _cmd_classify(args) -> int:
    out = _resolve_out(args)
    cfg = ShootingConfig(
        m=args.m,
        r_end=args.r_end,
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        blowup_threshold=args.blowup_threshold,
        **_initial_data(args),
    )
    traj, rep, fit, _, verdict = _pipeline(cfg)
    verdict.to_json(out / "classification.json")
    for name, (stat, verd) in verdict.criteria().items():
        print(f"({name}) statistic = {stat:.6g}  verdict = {verd}")
    print(f"overall = {verdict.overall}  agreement = {verdict.agreement}")
    if verdict.deltaa_estimate is not None:
        j, a = verdict.deltaa_estimate
        print(f"deltaa_estimate: Delta^{j} u -> {a:.17g}")
    print(f"wrote {out / 'classification.json'}")
    return 0


def _cmd_a2m_check(args) -> int:
    m = args.m
    n = 2 * m
    grid = np.linspace(0.0, 1.0, args.points)
    f_vals = (1.0 - grid**2) ** 2
    f1 = RadialProfile(grid=grid, values=f_vals, m=m)
    v1 = navier_solve_radial(f1)
    rows = []

    positive = bool(np.all(v1.values >= -1e-14))
    rows.append(("positivity: f >= 0 gives v >= 0 at all nodes", positive))

    i1 = exp_integrability(v1, p=1.0)
    worst = 0.0
    for scale in (2.0, 4.0):
        f_scaled = RadialProfile(grid=scale * grid, values=f_vals / scale**n, m=m)
        v_scaled = navier_solve_radial(f_scaled)
        i_scaled = exp_integrability(v_scaled, p=1.0)
        rel = abs(i_scaled.value - scale**n * i1.value) / (scale**n * i1.value)
        worst = max(worst, rel)
    rows.append((f"scaling covariance I(R) = R^{n} I(1), rel err {worst:.2e} <= 1e-8",
                 worst <= 1e-8))

    omega = float(constant_table(m).omega_n)
    f_mass = omega * float(np.trapezoid(f_vals * grid ** (n - 1), grid))
    gamma = float(constant_table(m).gamma_m)
    p_crit = gamma / (2.0 * f_mass)
    crit = exp_integrability(v1, p=p_crit)
    rows.append((f"exp integrability at p*|f|_L1 = gamma_m/2: I = {crit.value:.6g} finite",
                 math.isfinite(crit.value) and not crit.overflow))

    failed = False
    for label, ok in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {label}")
        failed = failed or not ok
    return 3 if failed else 0


def _reproduce_solve_row(name: str, cfg: ShootingConfig, checks) -> dict:
    traj, rep, fit, _, verdict = _pipeline(cfg)
    lim_dau = rep.delta_limits[0].value if rep.delta_limits else math.nan
    idx = traj.tail_indices()
    rg_tail = scalar_curvature(traj)[idx]
    rg_tail = rg_tail[~np.isnan(rg_tail)]
    min_rg = float(np.min(rg_tail)) if rg_tail.size else math.nan
    row = {
        "name": name,
        "alpha": traj.alpha_final,
        "deg_p": fit.inferred_degree,
        "lim_dau": lim_dau,
        "min_tail_rg": min_rg,
        "verdict": verdict.overall,
    }
    row["ok"] = all(check(row, traj) for check in checks)
    return row


def _cmd_reproduce_paper(args) -> int:
    def is_standard(row, traj):
        return row["verdict"] == "standard" and row["deg_p"] == 0

    def alpha_close(tol):
        return lambda row, traj: abs(row["alpha"] - 1.0) <= tol

    def is_nonstandard(row, traj):
        return (
            row["verdict"] == "nonstandard"
            and row["deg_p"] == 2
            and row["lim_dau"] < 0
        )

    def rg_unbounded(row, traj):
        mask = traj.grid <= 10.0
        rg = scalar_curvature(traj)[mask]
        return float(np.min(rg[~np.isnan(rg)])) < -1e6

    def rg_spherical(row, traj):
        mask = traj.grid <= 10.0
        rg = scalar_curvature(traj)[mask]
        target = 2 * traj.m * (2 * traj.m - 1)
        return float(np.max(np.abs(rg - target))) <= 1e-4

    log2 = math.log(2.0)
    solve_rows = [
        ("standard m=1",
         standard_config(1, r_end=args.r_end),
         [is_standard, alpha_close(1e-3)]),
        ("standard m=2",
         standard_config(2, r_end=args.r_end),
         [is_standard, alpha_close(1e-4), rg_spherical,
          lambda row, traj: abs(row["lim_dau"]) <= 1e-3]),
        # m = 3 runs to 500: far enough that log-growth statistics settle,
        # short enough that float64 r^4-mode noise stays out of the tail
        ("standard m=3",
         standard_config(3, r_end=min(args.r_end, 500.0)),
         [is_standard, alpha_close(1e-3)]),
        ("perturbed m=2 (u''(0) = -2.2)",
         ShootingConfig(m=2, initial_derivatives=(log2, -2.2), r_end=args.r_end),
         [is_nonstandard, rg_unbounded]),
        ("nonstandard m=2 (u''(0) = -3)",
         ShootingConfig(m=2, initial_derivatives=(log2, -3.0), r_end=args.r_end),
         [is_nonstandard, rg_unbounded]),
    ]

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_reproduce_solve_row, name, cfg, checks)
                for name, cfg, checks in solve_rows
            ]
            rows = [f.result() for f in futures]
    else:
        rows = [_reproduce_solve_row(name, cfg, checks) for name, cfg, checks in solve_rows]

    exact_rows = []
    gamma_ok = all(verify_gamma_identity(mm) for mm in range(1, 11))
    exact_rows.append(("gamma-identity m=1..10", gamma_ok))

    ok_count = 0
    cases = 200
    for i in range(cases):
        nn = (2, 3, 4, 6)[i % 4]
        mm = 1 + i % 3
        degree = i % 7
        poly = almansi_random(mm, nn, degree, 7000 + i)
        x0 = tuple((((7000 + i) >> k) % 3) - 1 for k in range(nn))
        if pizzetti_check(poly, mm, x0, 1 + (i % 2)).exact:
            ok_count += 1
    exact_rows.append((f"Pizzetti {ok_count}/{cases}", ok_count == cases))

    signs_ok = all(
        c.is_positive
        for mm in range(1, 6)
        for c in green_ball(mm).sign_constants_exact
    )
    exact_rows.append(("Green signs m<=5", signs_ok))

    width = max(len(r["name"]) for r in rows)
    print(f"{'run':<{width}}  {'alpha':>12}  {'deg p':>5}  {'lim Du':>12}  "
          f"{'min tail Rg':>12}  verdict")
    failed = False
    for row in rows:
        mark = "" if row["ok"] else "  >>> FAIL"
        print(
            f"{row['name']:<{width}}  {row['alpha']:>12.6f}  {row['deg_p']:>5d}  "
            f"{row['lim_dau']:>12.4g}  {row['min_tail_rg']:>12.4g}  "
            f"{row['verdict']}{mark}"
        )
        failed = failed or not row["ok"]
    for label, ok in exact_rows:
        print(f"{label}: {'PASS' if ok else 'FAIL  >>>'}")
        failed = failed or not ok

    if args.out or os.environ.get("POLYLIOUVILLE_OUT"):
        out = _resolve_out(args)
        with open(out / "summary.csv", "w") as fh:
            fh.write("name,alpha,deg_p,lim_dau,min_tail_rg,verdict,ok\n")
            for row in rows:
                fh.write(
                    f"{row['name']},{row['alpha']:.17g},{row['deg_p']},"
                    f"{row['lim_dau']:.17g},{row['min_tail_rg']:.17g},"
                    f"{row['verdict']},{row['ok']}\n"
                )
        print(f"wrote {out / 'summary.csv'}")
    return 3 if failed else 0


_HANDLERS = {
    "constants": _cmd_constants,
    "pizzetti": _cmd_pizzetti,
    "green": _cmd_green,
    "shoot": _cmd_shoot,
    "represent": _cmd_represent,
    "classify": _cmd_classify,
    "a2m-check": _cmd_a2m_check,
    "reproduce-paper": _cmd_reproduce_paper,
}


def run(argv) -> int:
    """Execute one subcommand; returns the process exit code."""
    try:
        argv = _inject_config(list(argv))
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
