"""Command line front end: classify | solve | validate | sweep | bounds.

Every command reads one TOML config (--config), writes deterministic
artifacts into --out, and communicates success through the exit code:
0 ok, 1 config error, 2 unsupported drive class, 3 validation failure.
Identical configs produce byte-identical outputs; floats are emitted
with 17 significant digits in CSV and round-trip repr in JSON.
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

from . import bounds as bounds_mod
from . import drive as drive_mod
from . import oracle as oracle_mod
from . import propagator as prop_mod
from . import riccati as ricc_mod
from .config import ConfigError, RunConfig, load_config
from .drive import CaseLabel, DriveSpec

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNSUPPORTED = 2
EXIT_VALIDATION = 3


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell)
                              for cell in row))
    path.write_text("\n".join(lines) + "\n")


def _series_rows(name: str, series) -> list[list]:
    rows = []
    for m in series.modes():
        c = series[int(m)]
        rows.append([name, str(int(m)), float(c.real), float(c.imag)])
    return rows


def _say(quiet: bool, msg: str) -> None:
    if not quiet:
        print(msg)


def _analyze(cfg: RunConfig):
    return drive_mod.analyze_drive(cfg.drive, m_max=cfg.m_max, tol_case=cfg.tol_case)


def _solve_pipeline(cfg: RunConfig, qd):
    if qd.case_label is CaseLabel.CASE_I:
        ps = ricc_mod.case1_coefficients(qd, N=cfg.order, alpha_sign=cfg.alpha_branch)
    else:
        ps = ricc_mod.case2_coefficients(qd, N=cfg.order)
    g = ricc_mod.g_series(ps, cfg.epsilon)
    prop = prop_mod.build(cfg.drive, g, cfg.epsilon, p_max=cfg.p_max,
                          tol_res=cfg.tol_res)
    return ps, g, prop


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def cmd_classify(cfg: RunConfig, out: Path, quiet: bool) -> int:
    qd = _analyze(cfg)
    label, diag = drive_mod.classify(qd)
    chi = bounds_mod.fit_chi(qd.Q)
    fit_q = bounds_mod.decay_fit(qd.Q, chi)
    fit_q2 = bounds_mod.decay_fit(qd.Q2, chi)
    report = {
        "case": label.value,
        "gamma_f": qd.gamma_f,
        "M_q2": _pair(qd.M_q2),
        "M_Q1": _pair(qd.M_Q1),
        "abs_M_q2": diag["abs_M_q2"],
        "abs_M_Q1": diag["abs_M_Q1"],
        "threshold": diag["threshold"],
        "m_max": qd.Q.m_max,
        "phi": qd.phi,
        "calN": qd.calN,
        "chi_fit": chi,
        "decay": {
            "Q": {"constant": fit_q.constant, "worst_m": fit_q.worst_m},
            "Q2": {"constant": fit_q2.constant, "worst_m": fit_q2.worst_m},
        },
        "dropped": {"Q": qd.Q.dropped, "Q2": qd.Q2.dropped},
    }
    _write_json(out / "classification.json", report)
    _write_csv(out / "q_tables.csv", ["table", "m", "re", "im"],
               _series_rows("Q", qd.Q) + _series_rows("Q2", qd.Q2))
    _say(quiet, f"case: {label.value}  |M(q^2)|={diag['abs_M_q2']:.6g}  "
                f"|M(Q_1)|={diag['abs_M_Q1']:.6g}")
    return EXIT_OK if label is not CaseLabel.UNSUPPORTED else EXIT_UNSUPPORTED


def cmd_solve(cfg: RunConfig, out: Path, quiet: bool) -> int:
    qd = _analyze(cfg)
    if qd.case_label is CaseLabel.UNSUPPORTED:
        _say(quiet, "drive is outside conditions I and II; nothing to solve")
        return EXIT_UNSUPPORTED
    ps, g, prop = _solve_pipeline(cfg, qd)
    radius = ricc_mod.radius_estimate(ps) if cfg.order >= 4 else math.nan

    ts = cfg.grid()
    u = prop_mod.evaluate_U(prop, ts)
    gram = np.conj(np.swapaxes(u, -1, -2)) @ u
    gram[..., 0, 0] -= 1.0
    gram[..., 1, 1] -= 1.0
    defects = np.linalg.norm(gram, axis=(-2, -1))

    summary = {
        "case": qd.case_label.value,
        "epsilon": cfg.epsilon,
        "order": cfg.order,
        "m_max": qd.Q.m_max,
        "Omega": _pair(prop.Omega),
        "omega_series_G0": [_pair(z) for z in prop_mod.secular_frequency_series(ps)],
        "eps_power_step": ps.eps_power_step,
        "gamma_eps": _pair(prop.gamma_eps),
        "gamma_f": qd.gamma_f,
        "sigma0": _pair(prop.sigma0),
        "g0": _pair(prop.g0),
        "alpha1": _pair(ps.alpha1) if ps.alpha1 is not None else None,
        "calR": _pair(ps.calR) if ps.calR is not None else None,
        "radius_estimate": radius if math.isfinite(radius) else "inf",
        "unitarity_defect": float(np.max(defects)),
        "dropped": {
            "g": g.dropped,
            "R": prop.R.dropped,
            "Rm2": prop.Rm2.dropped,
            "S": prop.S.dropped,
            "V": prop.V.dropped,
        },
    }
    _write_json(out / "summary.json", summary)

    rows = []
    for name, series in [("G", g), ("R", prop.R), ("Rm2", prop.Rm2),
                         ("S", prop.S), ("V", prop.V),
                         ("u11_minus", prop.u11_minus), ("u11_plus", prop.u11_plus),
                         ("u12_minus", prop.u12_minus), ("u12_plus", prop.u12_plus)]:
        rows.extend(_series_rows(name, series))
    _write_csv(out / "tables.csv", ["table", "m", "re", "im"], rows)

    trace_rows = [[float(t), float(u[i, 0, 0].real), float(u[i, 0, 0].imag),
                   float(u[i, 0, 1].real), float(u[i, 0, 1].imag), float(defects[i])]
                  for i, t in enumerate(ts)]
    _write_csv(out / "u_trace.csv",
               ["t", "re_U11", "im_U11", "re_U12", "im_U12", "unitarity_defect"],
               trace_rows)
    _say(quiet, f"Omega = {prop.Omega:.12g}  radius ~ {radius:.4g}  "
                f"unitarity defect {summary['unitarity_defect']:.3e}")
    return EXIT_OK


_VALIDATE_DEFAULTS = {
    "riccati_residual": 1e-6,
    "schrodinger_residual": 1e-6,
    "unitarity": None,             # falls back to tol_unit
    "initial_condition": 1e-9,
    "im_omega": 1e-9,
    "floquet_consistency": 1e-7,
    "oracle_comparison": 1e-6,
    "direct_map": 1e-7,
    "hill_residual": 1e-6,
    "small_order": 1e-10,
}


def cmd_validate(cfg: RunConfig, out: Path, quiet: bool) -> int:
    qd = _analyze(cfg)
    if qd.case_label is CaseLabel.UNSUPPORTED:
        _say(quiet, "drive is outside conditions I and II; nothing to validate")
        return EXIT_UNSUPPORTED
    thresholds = dict(_VALIDATE_DEFAULTS)
    thresholds.update(cfg.validate_thresholds)
    if thresholds["unitarity"] is None:
        thresholds["unitarity"] = cfg.tol_unit
    ps, g, prop = _solve_pipeline(cfg, qd)
    checks: list[dict] = []

    def check(name: str, value: float) -> None:
        thr = float(thresholds[name])
        checks.append({"name": name, "value": float(value),
                       "threshold": thr, "passed": bool(value <= thr)})

    ts_period = np.linspace(0.0, cfg.drive.period, cfg.points_per_period,
                            endpoint=False)
    ts_long = cfg.grid()
    check("riccati_residual",
          ricc_mod.riccati_residual(g, cfg.drive, cfg.epsilon, grid=cfg.points_per_period))
    check("schrodinger_residual", prop_mod.schrodinger_residual(prop, ts_period))
    check("unitarity", prop_mod.unitarity_defect(prop, ts_long))
    check("initial_condition",
          float(np.linalg.norm(prop_mod.evaluate_U(prop, 0.0) - np.eye(2))))
    check("im_omega", abs(prop.Omega.imag) / max(1.0, abs(prop.Omega)))
    check("floquet_consistency",
          max(prop_mod.floquet_consistency(prop, t) for t in (0.3, 1.7, 9.2)))

    h = oracle_mod.Hamiltonian2(cfg.drive, cfg.epsilon)
    _, u_oracle = oracle_mod.integrate_propagator(h, float(ts_long[-1]),
                                                  tol=cfg.oracle_tol, t_eval=ts_long)
    u_floq = prop_mod.evaluate_U(prop, ts_long)
    check("oracle_comparison",
          float(np.max(np.linalg.norm(u_floq - u_oracle, axis=(1, 2)))))

    u_direct = oracle_mod.direct_map_propagator(cfg.drive, g, cfg.epsilon, ts_long)
    check("direct_map",
          float(np.max(np.linalg.norm(u_direct - u_oracle, axis=(1, 2)))))

    traj = oracle_mod.integrate_schrodinger(h, (1.0, 0.0), float(ts_long[-1]),
                                            tol=cfg.oracle_tol,
                                            n_points=len(ts_long))
    check("hill_residual", oracle_mod.hill_residual(traj, cfg.drive, cfg.epsilon))

    if qd.case_label is CaseLabel.CASE_I:
        n_small = min(3, cfg.order)
        cs = oracle_mod.symbolic_small_order(qd, n_small, 4,
                                             alpha_sign=cfg.alpha_branch)
        worst = max(abs(ps.coeff[n - 1][m] - cs[n - 1][m])
                    for n in range(1, n_small + 1) for m in range(-4, 5))
        check("small_order", worst)

    chi = bounds_mod.fit_chi(qd.Q)
    fits = [bounds_mod.decay_fit(tbl, chi) for tbl in
            list(ps.coeff) + list(ps.G)
            + [prop.R, prop.Rm2, prop.S, prop.V]]
    checks.append({"name": "decay_fits_finite",
                   "value": float(max(f.constant for f in fits)),
                   "threshold": math.inf,
                   "passed": bool(all(f.passed for f in fits))})

    ok = all(c["passed"] for c in checks)
    _write_json(out / "validation.json", {"checks": checks, "passed": ok})
    for c in checks:
        _say(quiet, f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: "
                    f"{c['value']:.3e} vs {c['threshold']:.3e}")
    return EXIT_OK if ok else EXIT_VALIDATION


def _sweep_point(cfg: RunConfig, mode: str, param: float):
    if mode == "amplitude":
        scaled = DriveSpec(cfg.drive.omega,
                           tuple((n, param * amp) for n, amp in cfg.drive.harmonics))
        qd = drive_mod.analyze_drive(scaled, tol_case=cfg.tol_case)
    else:
        qd = drive_mod.analyze_drive(cfg.drive, m_max=cfg.m_max, tol_case=cfg.tol_case)
    eps = cfg.epsilon if mode == "amplitude" else param
    omega_val = complex(math.nan, math.nan)
    radius = math.nan
    if qd.case_label is not CaseLabel.UNSUPPORTED:
        try:
            if qd.case_label is CaseLabel.CASE_I:
                ps = ricc_mod.case1_coefficients(qd, N=cfg.order,
                                                 alpha_sign=cfg.alpha_branch)
            else:
                ps = ricc_mod.case2_coefficients(qd, N=cfg.order)
            g0_series = prop_mod.secular_frequency_series(ps)
            omega_val = sum(z * eps ** (ps.eps_power_step * n)
                            for n, z in enumerate(g0_series, start=1))
            if cfg.order >= 4:
                radius = ricc_mod.radius_estimate(ps)
        except ValueError:
            pass       # near the case boundary the recursions may refuse
    return {
        "param": param,
        "abs_M_q2": abs(qd.M_q2),
        "abs_M_Q1": abs(qd.M_Q1),
        "case": qd.case_label.value,
        "omega_val": omega_val,
        "radius": radius,
    }


def cmd_sweep(cfg: RunConfig, out: Path, quiet: bool) -> int:
    sw = cfg.sweep
    mode = sw.get("mode", "epsilon")
    if mode not in ("epsilon", "amplitude"):
        raise ConfigError("sweep mode must be 'epsilon' or 'amplitude'")
    try:
        start = float(sw["start"])
        stop = float(sw.get("stop", start))
        count = int(sw.get("count", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid [sweep] table: {exc}") from exc
    if count < 1:
        raise ConfigError("sweep count must be >= 1")
    params = [start] if count == 1 else \
        [start + (stop - start) * i / (count - 1) for i in range(count)]

    workers = max(int(os.environ.get("FLOQUET_THREADS", "1")), 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda p: _sweep_point(cfg, mode, p), params))
    else:
        results = [_sweep_point(cfg, mode, p) for p in params]

    rows = [[str(i), r["param"], r["abs_M_q2"], r["abs_M_Q1"], r["case"],
             float(r["omega_val"].real), float(r["omega_val"].imag), r["radius"]]
            for i, r in enumerate(results)]
    _write_csv(out / "sweep.csv",
               ["index", "param", "abs_M_q2", "abs_M_Q1", "case",
                "re_Omega", "im_Omega", "radius"], rows)
    n_unsup = sum(1 for r in results if r["case"] == "Unsupported")
    _say(quiet, f"swept {len(results)} points ({mode}); {n_unsup} unsupported")
    return EXIT_OK


def cmd_bounds(cfg: RunConfig, out: Path, quiet: bool) -> int:
    closed = [bounds_mod.catalan(n) for n in range(2, 61)]
    recur = bounds_mod.catalan_recursion(60)
    catalan_ok = recur[1:] == closed
    n_ref = 40
    ratio = (bounds_mod.catalan(n_ref) * 16.0 * math.sqrt(math.pi)
             * n_ref**1.5 / 4.0**n_ref)

    k_report = {}
    for c1, c2 in ((1, 1), (2, 3)):
        K, L = bounds_mod.k_sequence(c1, c2, 30)
        k_report[f"C1={c1},C2={c2}"] = {
            "K": [str(k) for k in K],
            "L": [str(v) for v in L],
            "K_le_L": bool(all(K[i] <= L[i] for i in range(30))),
            "K3_equals_3C2C1sq": bool(K[2] == 3 * c2 * c1 * c1),
        }

    conv_report = {}
    for chi in (0.3, 0.5, 1.0):
        b0 = bounds_mod.b0_constant(chi)
        worst = 0.0
        for m in range(-50, 51):
            lemma = b0 * math.exp(-chi * abs(m)) / bounds_mod.novomod(m) ** 2
            worst = max(worst, bounds_mod.conv_bound(m, chi) / lemma)
        sym = all(bounds_mod.conv_bound(m, chi) == bounds_mod.conv_bound(-m, chi)
                  for m in range(1, 51))
        conv_report[str(chi)] = {"B0": b0, "worst_ratio": worst,
                                 "holds": bool(worst <= 1.0), "symmetric": bool(sym)}

    qd = _analyze(cfg)
    chi_fit = bounds_mod.fit_chi(qd.Q)
    report = {
        "catalan": {"values_2_to_20": [str(c) for c in closed[:19]],
                    "recursion_matches_closed_form_n60": bool(catalan_ok),
                    "asymptotic_ratio_n40": ratio},
        "k_sequences": k_report,
        "convolution_lemma": conv_report,
        "drive_decay": {
            "chi_fit": chi_fit,
            "Q_constant": bounds_mod.decay_fit(qd.Q, chi_fit).constant,
            "Q2_constant": bounds_mod.decay_fit(qd.Q2, chi_fit).constant,
        },
    }
    _write_json(out / "bounds_report.json", report)
    ok = (catalan_ok and abs(ratio - 1.0) <= 0.05
          and all(v["holds"] and v["symmetric"] for v in conv_report.values())
          and all(v["K_le_L"] for v in k_report.values()))
    _say(quiet, f"catalan ok: {catalan_ok}; asymptotic ratio {ratio:.4f}; "
                f"conv lemma holds: {all(v['holds'] for v in conv_report.values())}")
    return EXIT_OK if ok else EXIT_VALIDATION


# ----------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="floquet-tls",
        description="Convergent perturbative Floquet propagators for driven "
                    "two-level systems")
    parser.add_argument("command",
                        choices=["classify", "solve", "validate", "sweep", "bounds"])
    parser.add_argument("--config", required=True, help="TOML run configuration")
    parser.add_argument("--out", default="floquet_out", help="output directory")
    parser.add_argument("--quiet", action="store_true", help="suppress stdout chatter")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        handler = {
            "classify": cmd_classify,
            "solve": cmd_solve,
            "validate": cmd_validate,
            "sweep": cmd_sweep,
            "bounds": cmd_bounds,
        }[args.command]
        return handler(cfg, out, args.quiet)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
