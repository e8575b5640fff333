"""Command-line surface: simulate / rates / sweep / verify.

Every command that writes files also writes a run manifest (JSON) whose
config hash covers every numeric parameter that affects the output, so any
artifact can be reproduced byte-for-byte from its manifest.

Exit codes: 0 success, 2 invalid configuration or arguments (message names
the offending field), 3 numeric failure (message names the operation).
Default output directory comes from the CHEMODUO_OUT environment variable
(falling back to the current directory).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, gradostat, invasion, sweep as sweep_mod
from .config import ConfigError, DuoConfig, format_config, load_config
from .core import IntegrationError, Trajectory, simulate_simple_chemostat
from .pdmp import PdmpState, SimOptions, simulate_pdmp

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class NumericFailure(RuntimeError):
    """Wraps a numeric error with the name of the failing operation."""

    def __init__(self, operation: str, cause: Exception):
        super().__init__(f"numeric failure in {operation}: {cause}")
        self.operation = operation


def _fmt(x: float) -> str:
    return "%.17g" % x


def _out_dir(args) -> str:
    out = args.out or os.environ.get("CHEMODUO_OUT") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _parse_seed(text: str) -> int:
    try:
        return int(text, 0)  # decimal or 0x-prefixed hex
    except ValueError:
        raise ConfigError(f"seed: not a decimal or hex integer: {text!r}")


def _config_hash(c: DuoConfig, extra: dict) -> str:
    payload = format_config(c) + "\n" + json.dumps(extra, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def _write_manifest(path, c: DuoConfig, extra: dict, outputs: dict, started: float):
    manifest = {
        "tool": "chemoduo",
        "version": __version__,
        "command_line": sys.argv,
        "config_hash": _config_hash(c, extra),
        "parameters": extra,
        "outputs": outputs,
        "started_at": started,
        "finished_at": time.time(),
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _write_trajectory_csv(path, traj: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "R", "U", "V", "regime"])
        regime = traj.regime
        for k in range(traj.t.size):
            w.writerow(
                [
                    _fmt(traj.t[k]), _fmt(traj.r[k]), _fmt(traj.u[k]), _fmt(traj.v[k]),
                    "" if regime is None else int(regime[k]),
                ]
            )


def _write_gradostat_csv(path, samples: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "R1", "R2", "U1", "U2", "V1", "V2"])
        for row in samples:
            w.writerow([_fmt(x) for x in row])


def _write_jumps_csv(path, jumps: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t_jump", "from", "to"])
        for t, a, b in jumps:
            w.writerow([_fmt(t), int(a), int(b)])


def _parse_init(text: str | None, n: int, default):
    if text is None:
        return default
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != n:
        raise ConfigError(f"init: expected {n} comma-separated numbers, got {len(parts)}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"init: not a number list: {text!r}")


# --- simulate ----------------------------------------------------------------


def cmd_simulate(args) -> int:
    c = load_config(args.config)
    out = _out_dir(args)
    started = time.time()
    seed = _parse_seed(args.seed)
    extra = {
        "kind": args.kind,
        "horizon": args.horizon,
        "seed": seed,
        "tol": args.tol,
        "samples": args.samples,
        "init": args.init,
    }
    outputs = {}
    if args.kind == "pdmp":
        init = _parse_init(args.init, 3, [c.vessel1.r0, 0.1 * c.vessel1.r0, 0.1 * c.vessel1.r0])
        state = PdmpState(t=0.0, r=init[0], u=init[1], v=init[2], regime=1)
        opts = SimOptions(horizon=args.horizon, tol=args.tol, seed=seed, n_samples=args.samples)
        try:
            run = simulate_pdmp(c, state, opts)
        except (RuntimeError, FloatingPointError) as exc:
            raise NumericFailure("simulate_pdmp", exc)
        traj_path = os.path.join(out, "trajectory.csv")
        jumps_path = os.path.join(out, "jumps.csv")
        _write_trajectory_csv(traj_path, run.trajectory)
        _write_jumps_csv(jumps_path, run.jumps)
        outputs = {"trajectory": traj_path, "jumps": jumps_path}
    elif args.kind == "gradostat":
        r1, r2 = c.vessel1.r0, c.vessel2.r0
        init = _parse_init(
            args.init, 6, [r1, r2, 0.1 * r1, 0.1 * r2, 0.1 * r1, 0.1 * r2]
        )
        try:
            samples = gradostat.simulate_gradostat_full(
                c, init, horizon=args.horizon, tol=args.tol, n_samples=args.samples
            )
        except (IntegrationError, ValueError) as exc:
            if isinstance(exc, ValueError):
                raise ConfigError(f"init: {exc}")
            raise NumericFailure("simulate_gradostat_full", exc)
        traj_path = os.path.join(out, "trajectory.csv")
        _write_gradostat_csv(traj_path, samples)
        outputs = {"trajectory": traj_path}
    else:  # simple
        init = _parse_init(args.init, 3, [c.vessel1.r0, 0.1 * c.vessel1.r0, 0.1 * c.vessel1.r0])
        try:
            traj = simulate_simple_chemostat(
                c.vessel1, tuple(init), horizon=args.horizon, tol=args.tol, n_samples=args.samples
            )
        except IntegrationError as exc:
            raise NumericFailure("simulate_simple_chemostat", exc)
        traj_path = os.path.join(out, "trajectory.csv")
        _write_trajectory_csv(traj_path, traj)
        outputs = {"trajectory": traj_path}
    _write_manifest(os.path.join(out, "manifest.json"), c, extra, outputs, started)
    print(f"wrote {', '.join(outputs.values())}")
    return EXIT_OK


# --- rates -------------------------------------------------------------------


def _maybe(fn, operation, notes):
    try:
        return fn()
    except Exception as exc:
        notes.append(f"{operation}: {type(exc).__name__}: {exc}")
        return None


def _pair(t):
    return None if t is None else {"slow": t[0], "fast": t[1]}


def rates_report(c: DuoConfig) -> dict:
    """All invasion rates, their switching/exchange limits, and both verdicts."""
    notes: list[str] = []
    report: dict = {"species": {}, "notes": notes}
    for w in ("u", "v"):
        entry: dict = {}
        entry["lambda0"] = _maybe(lambda: invasion.lambda0(c, w), f"lambda0({w})", notes)
        entry["lambda0_limits"] = _pair(
            _maybe(lambda: invasion.lambda0_limits(c, w), f"lambda0_limits({w})", notes)
        )
        entry["gamma0"] = gradostat.gamma0(c, w)
        entry["gamma0_limits"] = _pair(gradostat.gamma0_limits(c, w))
        if c.equal_inputs:
            entry["lambda_two"] = _maybe(
                lambda: invasion.lambda_two_species(c, w), f"lambda_two_species({w})", notes
            )
            entry["lambda_two_limits"] = _pair(
                _maybe(
                    lambda: invasion.lambda_two_species_limits(c, w),
                    f"lambda_two_species_limits({w})",
                    notes,
                )
            )
            entry["gamma"] = _maybe(
                lambda: gradostat.invasion_gamma(c, w), f"invasion_gamma({w})", notes
            )
            entry["gamma_limits"] = _pair(
                _maybe(
                    lambda: gradostat.invasion_gamma_limits(c, w),
                    f"invasion_gamma_limits({w})",
                    notes,
                )
            )
        report["species"][w] = entry
    if c.vessel1 == c.vessel2:
        notes.append("identical vessels: rates do not depend on s or lambda")
    if c.equal_inputs:
        sv = _maybe(lambda: invasion.classify_switching(c), "classify_switching", notes)
        gv = _maybe(lambda: gradostat.classify_gradostat(c), "classify_gradostat", notes)
        report["verdict_prob"] = None if sv is None else sv.tag
        report["verdict_det"] = None if gv is None else gv.tag
        if sv is not None:
            notes.extend(sv.notes)
        if gv is not None:
            notes.extend(gv.notes)
    else:
        notes.append("unequal resource inputs: two-species rates unavailable")
    return report


def cmd_rates(args) -> int:
    c = load_config(args.config)
    out = _out_dir(args)
    started = time.time()
    report = rates_report(c)
    path = os.path.join(out, "rates.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    _write_manifest(os.path.join(out, "manifest.json"), c, {"command": "rates"}, {"rates": path}, started)
    print(json.dumps(report, indent=2))
    return EXIT_OK


# --- sweep -------------------------------------------------------------------


def cmd_sweep(args) -> int:
    out = _out_dir(args)
    started = time.time()
    grid = sweep_mod.SweepGrid(
        lam_count=args.lam_count,
        lam_min=args.lam_min,
        lam_max=args.lam_max,
        s_count=args.s_count,
        s_min=args.s_min,
        s_max=args.s_max,
    )
    if args.figure is not None:
        if args.figure not in sweep_mod.FIGURE_NAMES:
            raise ConfigError(
                f"figure: unknown name {args.figure!r}; choose from {sweep_mod.FIGURE_NAMES}"
            )
        template, mode = sweep_mod.figure_config(args.figure)
        label = args.figure
    else:
        if args.config is None:
            raise ConfigError("config: either --figure or --config is required")
        template = load_config(args.config)
        mode = args.mode
        label = "custom"
    try:
        table = sweep_mod.sign_map(template, grid, mode=mode, jobs=args.jobs)
    except ValueError as exc:
        raise ConfigError(str(exc))
    signmap_path = os.path.join(out, f"{label}-signmap.csv")
    contours_path = os.path.join(out, f"{label}-contours.csv")
    sweep_mod.write_signmap_csv(signmap_path, table)
    sweep_mod.write_contours_csv(contours_path, table)
    extra = {
        "command": "sweep",
        "figure": args.figure,
        "mode": mode,
        "grid": {
            "lam_count": grid.lam_count, "lam_min": grid.lam_min, "lam_max": grid.lam_max,
            "s_count": grid.s_count, "s_min": grid.s_min, "s_max": grid.s_max,
        },
    }
    outputs = {"signmap": signmap_path, "contours": contours_path}
    _write_manifest(os.path.join(out, "manifest.json"), template, extra, outputs, started)
    print(f"wrote {signmap_path} and {contours_path}")
    return EXIT_OK


# --- verify ------------------------------------------------------------------


def _verify_checks():
    """Fast oracle cross-checks; each yields (name, passed, detail)."""
    rng = np.random.default_rng(20260823)

    def random_config():
        from .config import MonodParams, VesselParams

        vessels = []
        for _ in range(2):
            delta = rng.uniform(0.5, 2.0)
            vessels.append(
                VesselParams(
                    delta=delta,
                    r0=rng.uniform(2.0, 20.0),
                    monod_u=MonodParams(delta + rng.uniform(0.2, 3.0), rng.uniform(0.1, 5.0)),
                    monod_v=MonodParams(delta + rng.uniform(0.2, 3.0), rng.uniform(0.1, 5.0)),
                )
            )
        return DuoConfig(
            vessel1=vessels[0], vessel2=vessels[1],
            s=rng.uniform(0.1, 0.9), lam=float(10 ** rng.uniform(-2, 2)),
        )

    # 1. closed-form gamma0 vs eigensolver
    worst = 0.0
    for _ in range(200):
        c = random_config()
        for w in "uv":
            closed = gradostat.gamma0(c, w)
            eig = float(np.max(np.linalg.eigvals(gradostat.gamma0_matrix(c, w)).real))
            worst = max(worst, abs(closed - eig))
    yield "gamma0 closed form vs eigensolver (200 configs)", worst <= 1e-10, f"max diff {worst:.2e}"

    # 2. one-species rate against its slow/fast limits
    tmpl, _ = sweep_mod.figure_config("fig2-a")
    c = tmpl.with_coupling(s=0.4, lam=1e-6)
    lim0, liminf = invasion.lambda0_limits(c, "u")
    d_slow = abs(invasion.lambda0(c, "u") - lim0)
    d_fast = abs(invasion.lambda0(c.with_coupling(s=0.4, lam=1e6), "u") - liminf)
    ok = d_slow <= 1e-3 and d_fast <= 1e-3
    yield "lambda0 limit agreement (slow/fast)", ok, f"slow {d_slow:.2e}, fast {d_fast:.2e}"

    # 3. two-species self-invasion is exactly zero
    tmpl, _ = sweep_mod.figure_config("fig3-a")
    worst = 0.0
    for lam in (0.1, 1.0, 10.0):
        cc = tmpl.with_coupling(s=0.4, lam=lam)
        # species u invading a resident with identical parameters
        from .config import DuoConfig as DC, VesselParams as VP

        vs = []
        for j in (1, 2):
            v = cc.vessel(j)
            vs.append(VP(delta=v.delta, r0=v.r0, monod_u=v.monod_u, monod_v=v.monod_u))
        c_self = DC(vessel1=vs[0], vessel2=vs[1], s=cc.s, lam=cc.lam)
        worst = max(worst, abs(invasion.lambda_two_species(c_self, "u")))
    yield "two-species self-invasion zero", worst <= 1e-6, f"max |rate| {worst:.2e}"

    # 4. gradostat self-rate zero and stability duality
    worst = 0.0
    for _ in range(100):
        c = random_config()
        if not c.equal_inputs:
            continue
        for w in "uv":
            eq = gradostat.semi_trivial_equilibrium(c, w)
            if eq is None:
                continue
            x1 = c.vessel1.growth(w, eq.r[0])
            x2 = c.vessel2.growth(w, eq.r[1])
            worst = max(worst, abs(gradostat._max_eig_2x2(x1, x2, c.lam1, c.lam2)))
    yield "gradostat self-rate zero at E_w", worst <= 1e-10, f"max |rate| {worst:.2e}"

    # 5. d4 closed form vs direct determinant on the odd-bistability cell
    tmpl, _ = sweep_mod.figure_config("fig4-b")
    c = tmpl.with_coupling(s=0.245, lam=3.936)
    v = gradostat.classify_gradostat(c)
    coex = [e for e in v.equilibria if e.kind == "coexistence"]
    worst = 0.0
    for e in coex:
        jac = gradostat.coexistence_jacobian(c, e)
        sflip = np.diag([1.0, 1.0, -1.0, -1.0])
        d4 = float(np.linalg.det(sflip @ jac @ sflip))
        d4c = gradostat.d4_closed_form(c, e)
        worst = max(worst, abs(d4 - d4c) / max(abs(d4), abs(d4c)))
    ok = bool(coex) and worst <= 1e-8 and v.tag == "odd-bistability"
    yield "d4 closed form + odd-bistability cell", ok, f"tag {v.tag}, rel diff {worst:.2e}"


def cmd_verify(args) -> int:
    failures = 0
    for name, passed, detail in _verify_checks():
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        failures += 0 if passed else 1
    if failures:
        print(f"{failures} check(s) failed")
        return EXIT_NUMERIC
    print("all checks passed")
    return EXIT_OK


# --- entry point -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chemoduo", description=__doc__)
    p.add_argument("--version", action="version", version=f"chemoduo {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one trajectory and write CSV")
    sim.add_argument("kind", choices=["pdmp", "gradostat", "simple"])
    sim.add_argument("--config", required=True)
    sim.add_argument("--seed", default="0", help="decimal or 0x-hex 64-bit seed")
    sim.add_argument("--horizon", type=float, default=100.0)
    sim.add_argument("--tol", type=float, default=1e-9)
    sim.add_argument("--samples", type=int, default=2001)
    sim.add_argument("--init", default=None, help="comma-separated initial state")
    sim.add_argument("--out", "-o", default=None, help="output dir (default $CHEMODUO_OUT or .)")
    sim.set_defaults(func=cmd_simulate)

    rat = sub.add_parser("rates", help="analytic invasion rates + verdicts as JSON")
    rat.add_argument("--config", required=True)
    rat.add_argument("--out", "-o", default=None)
    rat.set_defaults(func=cmd_rates)

    sw = sub.add_parser("sweep", help="(s, lambda) sign-map sweep to CSV")
    sw.add_argument("--figure", default=None, help=f"one of {', '.join(sweep_mod.FIGURE_NAMES)}")
    sw.add_argument("--config", default=None, help="config template for a custom sweep")
    sw.add_argument("--mode", choices=["one-species", "two-species"], default="two-species")
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--lam-count", type=int, default=64)
    sw.add_argument("--lam-min", type=float, default=1e-2)
    sw.add_argument("--lam-max", type=float, default=1e3)
    sw.add_argument("--s-count", type=int, default=63)
    sw.add_argument("--s-min", type=float, default=0.015)
    sw.add_argument("--s-max", type=float, default=0.985)
    sw.add_argument("--out", "-o", default=None)
    sw.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="oracle cross-check table")
    ver.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"{exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
