"""Command-line entry point: ``magnonmix <subcommand> [--config FILE] [--out DIR]``.

Exit status is 0 on success, 1 for invalid input (configuration, parameters,
unwritable output) and 2 for numerical failures, including a failed
``verify`` run.
"""
import argparse
from dataclasses import asdict
from pathlib import Path
import sys
import time

import numpy as np

from . import __version__
from ._errors import InvalidParameterError, NumericalError
from .anisotropy import energy_scan, kerr_hamiltonian_coefficients
from .bloch import equilibrium, integrate as integrate_bloch, trajectory_csv, uniform_grid
from .config import COMMANDS, ConfigError, RunManifest, parse_config
from .flow import flow_map
from .intermod import gain_surface
from .io import csv_text, json_text, matrix_csv_text, write_text
from .kerr import find_bop, stability_map
from .lzs import intensity_db, spectral_map
from .oracle import run_suite
from .units import (TWO_PI, derive_quantities, estimate_magnon_number, dbm_to_watt,
                    regime_report)

MHZ = TWO_PI * 1e6


def _prepare_out(path):
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise InvalidParameterError(f"output directory {str(out)!r} is not writable: {exc}") from None
    return out


# subcommands: each returns {file name: text} and a summary line ----------

def cmd_kerr_estimate(cfg):
    mat = cfg.material()
    res = cfg.sections["resonator"]
    dq = derive_quantities(mat, phi=np.deg2rad(res["phi_deg"]))
    gamma_c = res["gamma_c_MHz"] * MHZ
    rep = regime_report(dq, mat, gamma_c)
    coeffs = kerr_hamiltonian_coefficients(mat, dq)
    n_pump = estimate_magnon_number(dbm_to_watt(res["pump_dbm"]), res["omega_c_GHz"] * TWO_PI * 1e9, gamma_c)
    report = {
        "material": asdict(mat),
        "derived": {"V_s_m3": dq.V_s, "N_s": dq.N_s, "omega_K1_over_2pi_Hz": dq.omega_K1 / TWO_PI,
                    "K_M_over_2pi_Hz": dq.K_M / TWO_PI, "Q_M_over_2pi_Hz": dq.Q_M / TWO_PI},
        "regime": asdict(rep),
        "hamiltonian": {"quadratic_over_2pi_Hz": coeffs.quadratic / TWO_PI,
                        "quartic_over_2pi_Hz": coeffs.quartic / TWO_PI},
        "magnons": {"pump_estimate": n_pump, "onset_estimate": rep.onset_magnons},
    }
    lines = [f"{'quantity':<28}{'value':>16}"]
    for group in ("derived", "regime", "magnons"):
        for k, v in report[group].items():
            lines.append(f"{k:<28}{v:>16.6g}")
    return {"kerr_estimate.json": json_text(report)}, "\n".join(lines)


def cmd_energy_scan(cfg):
    s = cfg.sections["energy_scan"]
    phi, e = energy_scan(cfg.material(), n=s["count"], H=s["H_kA_per_m"] * 1e3,
                         theta_MH=np.deg2rad(s["theta_MH_deg"]))
    text = csv_text(["phi_rad", "E_over_V_J_per_m3"], zip(phi, e), meta={"preset": cfg.preset})
    return {"energy_scan.csv": text}, f"{phi.size} angles, min E/V = {e.min():.6g} J/m^3"


def cmd_simulate(cfg):
    s = cfg.sections["simulate"]
    d, dp = cfg.lzs_drive(), cfg.damping()
    t_end = s["t_end_us"] * 1e-6
    t_eval = uniform_grid(d, 0.0, t_end, s["frame"], samples_per_period=s["samples_per_period"])
    traj = integrate_bloch(equilibrium(dp), d, dp, t_end, rel_tol=s["rel_tol"], t_eval=t_eval,
                           frame=s["frame"])
    return {"trajectory.csv": trajectory_csv(traj)}, f"{traj.t.size} samples to t = {t_end:g} s"


def cmd_lzs_map(cfg):
    g = cfg.grid("lzs_map", "omega_mw_GHz")
    d, dp = cfg.lzs_drive(), cfg.damping()
    fm = spectral_map(g.values * TWO_PI * 1e9, d, dp, l_max=cfg.sections["lzs_map"]["l_max"])
    meta = {"omega_m_MHz": d.omega_m / MHZ, "omega_c_GHz": d.omega_c / (TWO_PI * 1e9),
            "value": "intensity_dB"}
    text = matrix_csv_text(intensity_db(fm.values), fm.rows.astype(int), g.values, "l", "omega_mw_GHz", meta)
    side = {"rows": {"name": "l", "values": fm.rows.astype(int)},
            "cols": {"name": "omega_mw_GHz", "values": g.values},
            "value": "10 log10 |P_+|^2", "zeta": fm.metadata["zeta"],
            "drive": asdict(d), "damping": asdict(dp),
            "note": "cell (l, omega_mw) is the line at omega_SA = omega_mw + l omega_m"}
    return {"lzs_map.csv": text, "lzs_map.json": json_text(side)}, f"{fm.values.shape} sideband map"


def cmd_stability_map(cfg):
    p = cfg.kerr_params()
    gd, gb = cfg.grid("stability_map", "delta_ratio"), cfg.grid("stability_map", "b_ratio")
    sm = stability_map(p, gd.values, gb.values)
    text = matrix_csv_text(sm.labels, gb.values, gd.values, "b_ratio", "delta_ratio")
    side = {"rows": {"name": "b_ratio", "values": gb.values},
            "cols": {"name": "delta_ratio", "values": gd.values},
            "bop": {"delta_MHz": sm.bop.delta / MHZ, "b_sqrt_Hz": sm.bop.b, "E": sm.bop.E},
            "labels": sorted(set(sm.labels.ravel().tolist())),
            "normalization": "delta / (-delta_BOP), b / b_BOP"}
    counts = {k: int(np.sum(sm.labels == k)) for k in side["labels"]}
    return ({"stability_map.csv": text, "stability_map.json": json_text(side)},
            f"{sm.labels.shape} map, labels {counts}")


def cmd_flow_map(cfg):
    s = cfg.sections["flow_map"]
    p = cfg.kerr_params()
    bop = find_bop(p)
    q = p.replace(delta=s["delta_ratio"] * bop.delta_norm, b=s["b_ratio"] * bop.b)
    fm = flow_map(q, n_re=s["n_re"], n_im=s["n_im"], rtol=s["rel_tol"])
    stride = s["path_stride"]
    rows = []
    for k in range(fm.paths.shape[1]):
        lab = int(fm.labels.ravel()[k])
        for j in range(0, fm.t.size, stride):
            rows.append((k, lab, fm.t[j], fm.paths[j, k].real, fm.paths[j, k].imag))
    paths = csv_text(["path", "label", "t_s", "re_C", "im_C"], rows,
                     meta={"delta_ratio": s["delta_ratio"], "b_ratio": s["b_ratio"]})
    side = {
        "fixed_points": {k: {"C": v, "kind": fm.verdicts[k].kind,
                             "lambda": [fm.verdicts[k].lambda_1, fm.verdicts[k].lambda_2]}
                         for k, v in fm.attractors.items()},
        "separatrix": fm.separatrix, "saddle_offset": fm.saddle_offset,
        "tolerance": fm.tolerance, "labels": fm.labels, "diagnostics": fm.diagnostics,
    }
    ok = set(np.unique(fm.labels)) <= {1, 3}
    return ({"flow_paths.csv": paths, "flow_map.json": json_text(side)},
            f"{fm.labels.size} trajectories, all settled: {ok}, saddle offset {fm.saddle_offset:.3g}")


def cmd_imd_gain(cfg):
    s = cfg.sections["imd_gain"]
    p, cal = cfg.kerr_params(), cfg.calibration()
    gw, gp = cfg.grid("imd_gain", "omega_MHz"), cfg.grid("imd_gain", "power_dbm")
    surf = gain_surface(gw.values * MHZ, gp.values, s["omega_p_GHz"] * TWO_PI * 1e9, cal, p,
                        mask_width=s["mask_MHz"] * MHZ or None)
    mat = matrix_csv_text(surf.field.values, gp.values, gw.values, "P_p_dBm", "omega_MHz",
                          meta={"omega_p_GHz": s["omega_p_GHz"], "value": "G_I_dB"})
    up, down = surf.overlay
    overlay = csv_text(["P_p_dBm", "im_lambda_1_MHz", "im_lambda_2_MHz", "kind"],
                       zip(gp.values, up / MHZ, down / MHZ, surf.kinds))
    side = {"omega_p_GHz": s["omega_p_GHz"], "delta_model_MHz": surf.delta / MHZ,
            "bifurcation_power_dbm": surf.bifurcation_power, "jump_power_dbm": surf.jump_power,
            "jump_row": surf.jump_index, "diagnostics": surf.diagnostics,
            "calibration": asdict(cal)}
    return ({"imd_gain.csv": mat, "imd_overlay.csv": overlay, "imd_gain.json": json_text(side)},
            f"bifurcation at {surf.bifurcation_power:.4g} dBm, jump at {surf.jump_power:.4g} dBm")


def cmd_verify(cfg):
    rep = run_suite(quick=cfg.sections["verify"]["quick"], n_jobs=cfg.threads)
    failed = [c["name"] for c in rep.checks if not c["passed"]]
    summary = f"{len(rep.checks) - len(failed)}/{len(rep.checks)} checks passed"
    if failed:
        summary += "; failed: " + ", ".join(failed)
    return {"verify.json": json_text(rep.as_dict())}, summary, rep.passed


HANDLERS = {
    "kerr-estimate": cmd_kerr_estimate, "energy-scan": cmd_energy_scan, "simulate": cmd_simulate,
    "lzs-map": cmd_lzs_map, "stability-map": cmd_stability_map, "flow-map": cmd_flow_map,
    "imd-gain": cmd_imd_gain, "verify": cmd_verify,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="magnonmix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="YAML configuration file")
        sp.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
        sp.add_argument("--threads", type=int, help="worker processes for independent runs")
        sp.add_argument("--preset", help="material preset (overrides the config)")
    return parser


def run(cfg, out_dir=None):
    """Execute a parsed configuration; returns ``(manifest, summary, passed)``."""
    out = _prepare_out(out_dir or cfg.output_dir)
    start = time.perf_counter()
    result = HANDLERS[cfg.command](cfg)
    files, summary = result[0], result[1]
    passed = result[2] if len(result) > 2 else True
    digests = {name: write_text(out / name, text) for name, text in files.items()}
    manifest = RunManifest(cfg.command, cfg.resolved(), __version__, cfg.digest,
                           time.perf_counter() - start, digests)
    write_text(out / "manifest.json", json_text(manifest.as_dict()))
    return manifest, summary, passed


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text() if args.config else ""
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text, command=args.command, preset=args.preset)
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("must be at least 1", path="threads")
            cfg.threads = args.threads
        manifest, summary, passed = run(cfg, args.out)
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    print(summary)
    return 0 if passed else 2


if __name__ == "__main__":
    sys.exit(main())
