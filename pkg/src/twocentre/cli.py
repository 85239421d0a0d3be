"""Configuration-driven command line front end.

Subcommands: simulate, portrait, actions, normalform, collision, budget.
Configs are INI-style key/value files parsed strictly: unknown sections or
keys are rejected so that experiment files stay diff-able and reproducible.
"""

import argparse
import configparser
import os
import sys

import numpy as np

from .model import CartesianState, ChartBox, derive_reduced_masses, DomainError
from .dynamics import (IntegratorConfig, flow_two_centre, flow_three_body,
                       euler_drift_report, write_trajectory_csv, outer_period,
                       circular_three_body_state)
from .portrait import sample_level_curve, classify, check_delta
from .actions import g0_hat_scaled, dg0_dEhat, region_of, L0_of_J
from .series import TaylorFourierSeries, FrequencyData
from .normalform import normal_form_N, stability_budget, theorem5_budget
from .collision import sweep_exclusion, write_verdict_csv

KNOWN_KEYS = {
    "scenario": {"name", "kind"},
    "masses": {"m0", "mu", "eps"},
    "initial": {"y_prime", "y", "x_prime", "x", "circular", "a", "r_prime",
                "inner_phase", "outer_phase", "inner_ecc", "outer_ecc",
                "y_tweak", "yp_tweak", "x_tweak", "xp_tweak"},
    "integrator": {"method", "rtol", "atol", "t_final", "outer_periods",
                   "n_samples", "min_separation", "fixed_step"},
    "portrait": {"delta_list", "n_levels", "n_samples"},
    "actions": {"delta_list", "n_levels"},
    "normalform": {"eps_pert", "omega", "omega0", "y0", "steps",
                   "i_width", "y_width", "x_width", "r", "rho", "xi", "s",
                   "delta"},
    "collision": {"safety"},
    "budget": {"eps", "mu", "eta", "kappa", "rho_minus", "rho_plus", "eps0",
               "alpha", "s"},
    "output": {"dir"},
}


class ConfigError(ValueError):
    pass


def load_config(path):
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    if not cp.read(path):
        raise ConfigError(f"cannot read config file {path!r}")
    for section in cp.sections():
        if section not in KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    return cp


def _floats(text):
    return [float(tok) for tok in text.replace(",", " ").split()]


def masses_from(cp):
    sec = cp["masses"] if "masses" in cp else {}
    return derive_reduced_masses(float(sec.get("m0", 1.0)),
                                 float(sec.get("mu", 0.0)),
                                 float(sec.get("eps", 0.0)))


def state_from(cp, masses):
    sec = cp["initial"]
    if sec.get("circular", "no").lower() in ("yes", "true", "1"):
        s = circular_three_body_state(
            masses, float(sec.get("a", 0.25)), float(sec.get("r_prime", 1.0)),
            inner_phase=float(sec.get("inner_phase", 0.0)),
            outer_phase=float(sec.get("outer_phase", 0.0)),
            inner_ecc=float(sec.get("inner_ecc", 0.0)),
            outer_ecc=float(sec.get("outer_ecc", 0.0)))
        for key, attr in (("y_tweak", "y"), ("yp_tweak", "y_prime"),
                          ("x_tweak", "x"), ("xp_tweak", "x_prime")):
            if key in sec:
                d = _floats(sec[key])
                setattr(s, attr, getattr(s, attr) + np.array([d[0], d[1], 0.0]))
        return s
    vecs = {}
    for key in ("y_prime", "y", "x_prime", "x"):
        if key not in sec:
            raise ConfigError(f"[initial] missing {key} (or set circular=yes)")
        vecs[key] = _floats(sec[key])
    return CartesianState.planar(vecs["y_prime"], vecs["y"], vecs["x_prime"],
                                 vecs["x"])


def integrator_from(cp, masses, r_prime=1.0):
    sec = cp["integrator"] if "integrator" in cp else {}
    t_final = sec.get("t_final")
    if t_final is None and "outer_periods" in sec:
        t_final = float(sec["outer_periods"]) * outer_period(masses, r_prime)
    elif t_final is not None:
        t_final = float(t_final)
    else:
        t_final = 10.0
    return IntegratorConfig(
        method=sec.get("method", "dop853"),
        rtol=float(sec.get("rtol", 1e-12)),
        atol=float(sec.get("atol", 1e-12)),
        t_final=t_final,
        n_samples=int(sec.get("n_samples", 1000)),
        min_separation=float(sec.get("min_separation", 1e-6)),
        fixed_step=float(sec.get("fixed_step", 1e-3)),
    )


def _outdir(cp, args):
    out = args.out or (cp["output"]["dir"] if "output" in cp and
                       "dir" in cp["output"] else "out")
    os.makedirs(out, exist_ok=True)
    return out


def cmd_simulate(cp, args):
    masses = masses_from(cp)
    s0 = state_from(cp, masses)
    kind = cp["scenario"].get("kind", "three_body") if "scenario" in cp else "three_body"
    cfg = integrator_from(cp, masses, r_prime=float(np.linalg.norm(s0.x_prime)))
    if kind == "two_centre":
        traj = flow_two_centre(s0, masses, cfg)
    elif kind == "three_body":
        traj = flow_three_body(s0, masses, cfg)
    else:
        raise ConfigError(f"unknown scenario kind {kind!r}")
    out = _outdir(cp, args)
    write_trajectory_csv(os.path.join(out, "trajectory.csv"), traj)
    rep = euler_drift_report(traj, masses)
    H = traj.series("H")
    with open(os.path.join(out, "drift_report.txt"), "w") as fh:
        fh.write("max_drift_E %.17g\n" % rep.max_drift)
        fh.write("normalized_max_drift_E %.17g\n" % rep.normalized_max_drift)
        fh.write("relative_drift_H %.17g\n" % (np.abs(H - H[0]).max() / abs(H[0])))
        fh.write("truncated %d\n" % int(traj.truncated))
    print(f"simulate: {len(traj.samples)} samples, max |E(t)-E(0)| = "
          f"{rep.max_drift:.6e}, output in {out}")
    return 0


def cmd_portrait(cp, args):
    sec = cp["portrait"] if "portrait" in cp else {}
    deltas = _floats(sec.get("delta_list", "0.5 1.0 1.5"))
    n_levels = int(sec.get("n_levels", 9))
    n_samples = int(sec.get("n_samples", 256))
    out = _outdir(cp, args)
    rows = []
    for d in deltas:
        check_delta(d)
        tops = 1.0 + d * d / 4.0
        for E in np.linspace(-d + 1e-3, tops - 1e-3, n_levels):
            cl = classify(float(E), d)
            rows.append((d, float(E), cl.regime))
            lc = sample_level_curve(float(E), d, n_samples)
            fn = os.path.join(out, "curve_delta%.6g_E%.6g.csv" % (d, E))
            with open(fn, "w") as fh:
                fh.write("g,G_hat\n")
                for g, G in lc.points:
                    fh.write("%.17g,%.17g\n" % (g, G))
    with open(os.path.join(out, "portrait_grid.csv"), "w") as fh:
        fh.write("delta,E_hat,regime\n")
        for d, E, reg in rows:
            fh.write("%.17g,%.17g,%s\n" % (d, E, reg))
    # separatrix nesting areas
    from .actions import g0_hat_scaled as area
    with open(os.path.join(out, "separatrix_areas.csv"), "w") as fh:
        fh.write("delta,In_S0,In_S1\n")
        for d in deltas:
            fh.write("%.17g,%.17g,%.17g\n" % (d, area(d, d), area(1.0, d)))
    print(f"portrait: {len(rows)} levels over deltas {deltas}, output in {out}")
    return 0


def cmd_actions(cp, args):
    sec = cp["actions"] if "actions" in cp else {}
    deltas = _floats(sec.get("delta_list", "0.5 1.5"))
    n_levels = int(sec.get("n_levels", 40))
    out = _outdir(cp, args)
    path = os.path.join(out, "action_table.csv")
    with open(path, "w") as fh:
        fh.write("delta,E_hat,G0_scaled,dG0_dE,region\n")
        for d in deltas:
            top = 1.0 + d * d / 4.0
            for E in np.linspace(-d + 1e-3, top - 1e-3, n_levels):
                E = float(E)
                g0 = g0_hat_scaled(E, d)
                lo, hi = min(d, 1.0), max(d, 1.0)
                if E < lo:
                    region = 1
                elif E < hi:
                    region = 2
                else:
                    region = 3
                try:
                    dg = dg0_dEhat(E, d)
                except DomainError:
                    dg = float("nan")
                fh.write("%.17g,%.17g,%.17g,%.17g,%d\n" % (d, E, g0, dg, region))
    print(f"actions: table for deltas {deltas} in {path}")
    return 0


def cmd_normalform(cp, args):
    sec = cp["normalform"] if "normalform" in cp else {}
    epsp = float(sec.get("eps_pert", 1e-4))
    omega = float(sec.get("omega", 1.0))
    omega0 = float(sec.get("omega0", 1.0))
    y0 = float(sec.get("y0", 1.0))
    N = int(sec.get("steps", 3))
    chart = ChartBox(I_center=(1.0,), I_width=(float(sec.get("i_width", 0.02)),),
                     y_center=y0, y_width=float(sec.get("y_width", 0.02)),
                     x_width=float(sec.get("x_width", 0.002)),
                     r=float(sec.get("r", 0.45)), rho=float(sec.get("rho", 0.5)),
                     xi=float(sec.get("xi", 0.012)), s=float(sec.get("s", 0.5)),
                     delta=float(sec.get("delta", 0.1)))
    freq = FrequencyData(omega_y=omega0 * y0, omega_I=(omega,), omega_J=())
    h0 = TaylorFourierSeries(1, 0, chart, freq)
    h0.add_term(omega + omega0 * y0 ** 2 / 2.0)
    h0.add_term(omega, aI=(1,))
    h0.add_term(omega0 * y0, ay=1)
    h0.add_term(omega0 / 2.0, ay=2)
    f = TaylorFourierSeries(1, 0, chart, freq)
    f.add_term(epsp / 2.0, k=(1,), b=1)
    f.add_term(epsp / 2.0, k=(-1,), b=1)
    gN, fN, report = normal_form_N(h0, f, freq, chart, N)
    out = _outdir(cp, args)
    path = os.path.join(out, "normalform_certificates.txt")
    with open(path, "w") as fh:
        fh.write("desk case: eps=%g omega=%g omega0=%g y0=%g N=%d\n"
                 % (epsp, omega, omega0, y0, N))
        for name, ok in report["assumptions"].items():
            fh.write("assumption %s: %s\n" % (name, ok))
        prev = None
        for j, cert in enumerate(report["steps"]):
            fh.write("step %d: |f~| = %.6e -> |f~+| = %.6e"
                     % (j + 1, cert.norms["f_tilde"], cert.norms["f_plus_tilde"]))
            ratio = cert.norms["f_plus_tilde"] / cert.norms["f_tilde"]
            fh.write("  ratio %.4f  halved=%s\n" % (ratio, ratio <= 0.5))
            for nm, chk in cert.checks.items():
                fh.write("    %s: measured %.3e bound %.3e margin %.2f\n"
                         % (nm, chk["measured"], chk["bound"], chk["margin"]))
        fh.write("certified steps: %d  failed: %s\n"
                 % (report["certified_steps"], report["failed"]))
    halved = all(c.norms["f_plus_tilde"] <= 0.5 * c.norms["f_tilde"]
                 for c in report["steps"])
    print(f"normalform: {report['certified_steps']} certified steps, "
          f"per-step halving: {halved}, certificates in {path}")
    return 0


def cmd_collision(cp, args):
    masses = masses_from(cp)
    s0 = state_from(cp, masses)
    cfg = integrator_from(cp, masses, r_prime=float(np.linalg.norm(s0.x_prime)))
    safety = float(cp["collision"].get("safety", 2.0)) if "collision" in cp else 2.0
    traj = flow_three_body(s0, masses, cfg)
    out = _outdir(cp, args)
    write_verdict_csv(os.path.join(out, "verdicts.csv"), traj, masses, safety)
    sweep = sweep_exclusion(traj, masses, safety)
    print(f"collision: entered_band={sweep.entered_band} "
          f"min_margin={sweep.min_margin:.6e} "
          f"max_margin_decay={sweep.max_margin_decay:.6e} "
          f"min_separation={sweep.min_separation:.6e}")
    return 0


def cmd_budget(cp, args):
    sec = cp["budget"] if "budget" in cp else {}
    t5 = theorem5_budget(eps=float(sec.get("eps", 1e-3)),
                         mu=float(sec.get("mu", 1e-3)),
                         eta=float(sec.get("eta", 0.063)),
                         kappa=float(sec.get("kappa", 0.0)),
                         rho_minus=float(sec.get("rho_minus", 1.0)),
                         rho_plus=float(sec.get("rho_plus", 1.5)),
                         eps0=float(sec.get("eps0", 0.5)),
                         alpha=float(sec.get("alpha", 1.0 / 3.0)),
                         s=float(sec.get("s", 0.5)))
    out = _outdir(cp, args)
    path = os.path.join(out, "budget_record.txt")
    with open(path, "w") as fh:
        fh.write("\n".join(t5.summary_lines()) + "\n")
    print(f"budget: epsilon = {t5.budget.epsilon:.6e}, N = {t5.budget.N}, "
          f"T1 = {t5.budget.T1:.6e}, record in {path}")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "portrait": cmd_portrait,
    "actions": cmd_actions,
    "normalform": cmd_normalform,
    "collision": cmd_collision,
    "budget": cmd_budget,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="twocentre",
        description="Planar three-body / two-centre Euler-integral toolkit")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="INI experiment file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized oracles")
    args = parser.parse_args(argv)
    try:
        cp = load_config(args.config)
        np.random.seed(args.seed)
        return COMMANDS[args.command](cp, args)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
