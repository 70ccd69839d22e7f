"""Command-line entry point: ``quditladder <command> [--config PATH] [--seed N] [--out DIR] [--threads N]``.

Exit codes: 0 success, 2 configuration error, 3 algorithmic failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import logging
import math
import platform
import re
import sys
import time
from functools import reduce
from pathlib import Path

import numpy as np
import scipy

from . import __version__, analytics
from .circuits import (apply_circuit, bell_prep_circuit, branch_fidelity, ccz_circuit, cccz_circuit,
                       computational_indices, noon_prep_circuit, restricted_unitary)
from .dynamics import chevron_scan, find_resonance_ed, measure_two_photon_rate, hold_scan, pair_tones
from .errors import ConfigError, QuditError
from .model import Chain, CouplingSpec, GateKind, QuantumState, QuditParams, index_of, total_dim
from .qpd import export_grid, husimi_q, wigner
from .readout import ConfusionMatrix, ReadoutModel, expected_confusion
from .synthesis import (SynthGateSet, dijkstra_synthesize, cat_circuit, ghz_circuit,
                        kernel_start_target)
from .tomography import (fidelity, mc_results_to_csv, mcweeny_purify, mle_reconstruct, projector_set,
                         shot_noise_mc, simulate_tomography)
from .xeb import simulate_xeb

log = logging.getLogger("quditladder")

EXIT_OK, EXIT_CONFIG, EXIT_ALGO, EXIT_IO = 0, 2, 3, 4
MHZ = 2 * math.pi * 1e6
NS = 1e-9

DEFAULTS: dict = {
    "chain": {
        "qudits": [
            {"dim": 4, "freq01_mhz": 5300.0, "anharmonicity_mhz": 270.0},
            {"dim": 4, "freq01_mhz": 5400.0, "anharmonicity_mhz": 270.0},
        ],
        "couplings": [{"a": 0, "b": 1, "g_mhz": 3.0}],
    },
    "drive": {"amp_mhz": 30.0, "lambda": 1.0, "phases_rad": [0.0, 0.0], "ramp_ns": 100.0, "levels": [0, 0]},
    "scan": {
        "freq_center_mhz": None,
        "freq_span_mhz": 4.0,
        "freq_points": 21,
        "duration_max_ns": 3000.0,
        "duration_points": 61,
        "amps_mhz": [0.0, 10.0, 20.0, 30.0],
        "subspaces": [[0, 0], [1, 1], [2, 2]],
        "ed_dims": [3, 4],
    },
    "tomo": {
        "n_rep": 1000,
        "trials": 100,
        "snr": None,
        "estimator": "mle",
        "max_matrix_elements": 20_000_000,
        "states": ["bell2", "bell3", "bell4", "ghz(2,2)", "ghz(3,2)", "ghz(4,2)"],
    },
    "synth": {"n": 3, "d": 3, "single_cost": 1, "two_cost": 100, "search": False, "max_nodes": 5_000_000},
    "qpd": {"n_theta": 64, "n_phi": 128},
    "xeb": {"gate": "ccz", "depths": [1, 2, 4, 8, 16], "circuits_per_depth": 30, "depol_rate": 0.02,
            "shots": 100000},
    "output": {"directory": "out", "format": "csv"},
    "seed": 0,
}

STATE_NAMES = ("bell2", "bell3", "bell4", "noon4", "cat2", "cat3", "cat(n,d)", "ghz(n,d)")


# ---------------------------------------------------------------------------
# configuration

def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _merge(default, given, path: str):
    if isinstance(default, dict):
        if not isinstance(given, dict):
            raise ConfigError(f"{path or 'config'}: expected an object")
        unknown = sorted(set(given) - set(default))
        if unknown:
            raise ConfigError(f"{path or 'config'}: unknown key(s) {', '.join(unknown)}")
        out = copy.deepcopy(default)
        for k, v in given.items():
            out[k] = _merge(default[k], v, f"{path}.{k}" if path else k)
        return out
    if isinstance(default, list) and default and isinstance(default[0], dict):
        if not isinstance(given, list) or not given:
            raise ConfigError(f"{path}: expected a non-empty list of objects")
        out = []
        for i, item in enumerate(given):
            merged = _merge(default[0], item, f"{path}[{i}]")
            missing = sorted(set(default[0]) - set(item))
            if missing:
                raise ConfigError(f"{path}[{i}]: missing key(s) {', '.join(missing)}")
            out.append(merged)
        return out
    if isinstance(default, list):
        if not isinstance(given, list):
            raise ConfigError(f"{path}: expected a list")
        return given
    if isinstance(default, bool):
        if not isinstance(given, bool):
            raise ConfigError(f"{path}: expected true/false")
        return given
    if _is_number(default):
        if not _is_number(given):
            raise ConfigError(f"{path}: expected a number, got {given!r}")
        return given
    if isinstance(default, str):
        if not isinstance(given, str):
            raise ConfigError(f"{path}: expected a string")
        return given
    return given


def load_config(path: str | None = None, overrides: dict | None = None) -> dict:
    """Defaults merged with the JSON file at ``path`` and flag overrides; unknown keys are errors."""
    given = {}
    if path is not None:
        text = Path(path).read_text()
        try:
            given = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    cfg = _merge(DEFAULTS, given, "")
    for k, v in (overrides or {}).items():
        if v is None:
            continue
        if k == "seed":
            cfg["seed"] = int(v)
        elif k == "out":
            cfg["output"]["directory"] = str(v)
    if cfg["output"]["format"] != "csv":
        raise ConfigError("output.format: only 'csv' is supported")
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def build_chain(cfg: dict) -> Chain:
    c = cfg["chain"]
    try:
        qudits = tuple(QuditParams(int(q["dim"]), q["freq01_mhz"] * MHZ, q["anharmonicity_mhz"] * MHZ)
                       for q in c["qudits"])
        couplings = tuple(CouplingSpec(int(k["a"]), int(k["b"]), k["g_mhz"] * MHZ) for k in c["couplings"])
        return Chain(qudits, couplings)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"chain: {e}") from None


def _positive_int(cfg_section: dict, key: str, path: str) -> int:
    v = cfg_section[key]
    if not _is_number(v) or int(v) != v or v < 1:
        raise ConfigError(f"{path}.{key}: expected a positive integer")
    return int(v)


# ---------------------------------------------------------------------------
# named states

def named_state(name: str) -> tuple[str, QuantumState, list[int]]:
    """(label, ideal state, flat indices of the |k...k> branches) for a state name.

    Auxiliary levels used only during preparation are stripped from the returned state.
    """
    key = name.strip().lower().replace(" ", "")
    m = re.fullmatch(r"(ghz|cat)\((\d+),(\d+)\)", key)
    if key in ("bell2", "bell3", "bell4"):
        d = int(key[-1])
        circ = bell_prep_circuit(d)
        kind, n = "bell", 2
    elif key == "noon4":
        circ, kind, n, d = noon_prep_circuit(4), "noon", 2, 4
    elif key in ("cat2", "cat3"):
        n, d, kind = int(key[-1]), 4, "cat"
        circ = cat_circuit(n, d)
    elif m:
        kind, n, d = m.group(1), int(m.group(2)), int(m.group(3))
        circ = ghz_circuit(n, d) if kind == "ghz" else cat_circuit(n, d)
    else:
        raise ConfigError(f"unknown state '{name}'; options: {', '.join(STATE_NAMES)}")
    psi = apply_circuit(circ, QuantumState.ground(circ.dims)).data
    dims = (d,) * n
    if tuple(circ.dims) != dims:
        psi = psi[computational_indices(circ.dims, d)]
    state = QuantumState.from_vector(dims, psi, normalize=True)
    if kind == "noon":
        branches = [index_of((d - 1, 0), dims), index_of((0, d - 1), dims)]
    elif kind == "cat":
        branches = [0, index_of((d - 1,) * n, dims)]
    else:
        branches = [index_of((k,) * n, dims) for k in range(d)]
    return key, state, branches


def _confusion_for(dims, snr) -> ConfusionMatrix | None:
    if snr is None:
        return None
    singles = [ConfusionMatrix(expected_confusion(ReadoutModel.default(d, snr=float(snr))), (d,)) for d in dims]
    return reduce(lambda a, b: a.kron(b), singles)


# ---------------------------------------------------------------------------
# commands

def _freq_guess(chain: Chain, levels, omega: float, lam: float) -> float:
    wa = chain.qudits[0].transition_freq(levels[0])
    wb = chain.qudits[1].transition_freq(levels[1])
    if wa < wb:
        return analytics.optimal_drive_frequency_2ls(wa, wb, omega, lam)
    return analytics.optimal_drive_frequency_2ls(wb, wa, lam * omega, 1 / lam if lam else 0.0)


def _write(path: Path, text: str, outputs: list) -> None:
    path.write_text(text)
    outputs.append(path.name)


def cmd_chevron(cfg: dict, out: Path, threads: int) -> list:
    chain = build_chain(cfg)
    dr, sc = cfg["drive"], cfg["scan"]
    levels = tuple(int(x) for x in dr["levels"])
    omega, lam = dr["amp_mhz"] * MHZ, float(dr["lambda"])
    npts, nd = sc["freq_points"], sc["duration_points"]
    if not _is_number(npts) or not _is_number(nd) or npts < 1 or nd < 1:
        raise ConfigError("scan.freq_points / scan.duration_points: grids must be non-empty")
    center = sc["freq_center_mhz"] * MHZ if sc["freq_center_mhz"] is not None else _freq_guess(chain, levels, omega, lam)
    half = 0.5 * sc["freq_span_mhz"] * MHZ
    freqs = np.linspace(center - half, center + half, int(npts)) if npts > 1 else np.array([center])
    durs = np.linspace(0.0, sc["duration_max_ns"] * NS, int(nd))
    cmap = chevron_scan(chain, levels, freqs, durs, omega, lam, dr["ramp_ns"] * NS, workers=threads)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["freq_mhz", "duration_ns", "p_target"])
    for j, f in enumerate(freqs):
        for i, t in enumerate(durs):
            w.writerow([f"{f / MHZ:.9g}", f"{t / NS:.9g}", f"{cmap.populations[i, j]:.9g}"])
    outputs: list = []
    _write(out / "chevron.csv", buf.getvalue(), outputs)
    apex = freqs[int(np.nanargmax(np.nanmean(cmap.populations, axis=0)))]
    print(f"resonance estimate: {apex / MHZ:.6f} MHz (closed form {center / MHZ:.6f} MHz)")
    return outputs


def _rate_row(chain, levels, amp_mhz, lam, ramp):
    omega = amp_mhz * MHZ
    if omega == 0:
        w_d = _freq_guess(chain, levels, 0.0, lam)
        tones = pair_tones(chain, w_d, 0.0, lam, levels, ramp)
        traj = hold_scan(chain, tones, QuantumState.basis(chain.dims, list(levels)), np.linspace(0, 2e-6, 21))
        moved = float(np.max(traj.populations[:, index_of([levels[0] + 1, levels[1] + 1], chain.dims)]))
        if moved > 1e-6:
            raise RuntimeError("population moved without drive")
        return w_d, 0.0, 0.0
    w_d = find_resonance_ed(chain, omega, lam, levels=levels)
    k, l = levels
    angles = analytics.drive_angles(w_d, chain.qudits[0].transition_freq(k), chain.qudits[1].transition_freq(l),
                                    omega, lam)
    expected = analytics.two_photon_rate(analytics.coupling_matrix_element(chain.couplings[0].g01, k, l), angles)
    rate = measure_two_photon_rate(chain, omega, lam, levels, w_d=w_d, ramp_time=ramp, expected=expected)
    return w_d, rate, expected


def cmd_rates(cfg: dict, out: Path, threads: int) -> list:
    chain = build_chain(cfg)
    dr, sc = cfg["drive"], cfg["scan"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["subspace", "amp_mhz", "omega_d_mhz", "rate_sim_mhz", "rate_analytic_mhz", "status"])
    for lv in sc["subspaces"]:
        levels = (int(lv[0]), int(lv[1]))
        label = f"{levels[0]}{levels[1]}-{levels[0] + 1}{levels[1] + 1}"
        for amp in sc["amps_mhz"]:
            try:
                w_d, rate, expected = _rate_row(chain, levels, float(amp), float(dr["lambda"]), dr["ramp_ns"] * NS)
                w.writerow([label, f"{amp:.9g}", f"{w_d / MHZ:.9g}", f"{rate / MHZ:.9g}",
                            f"{expected / MHZ:.9g}", "ok"])
            except (QuditError, RuntimeError, np.linalg.LinAlgError) as e:
                log.warning("rates: %s at %s MHz failed: %s", label, amp, e)
                w.writerow([label, f"{amp:.9g}", "nan", "nan", "nan", type(e).__name__])
    outputs: list = []
    _write(out / "rates.csv", buf.getvalue(), outputs)
    return outputs


def cmd_optfreq(cfg: dict, out: Path, threads: int) -> list:
    chain = build_chain(cfg)
    dr, sc = cfg["drive"], cfg["scan"]
    levels = tuple(int(x) for x in dr["levels"])
    lam = float(dr["lambda"])
    ed_dims = [int(d) for d in sc["ed_dims"]]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["amp_mhz", "omega_d_2ls_mhz"] + [f"omega_d_ed_d{d}_mhz" for d in ed_dims])
    for amp in sc["amps_mhz"]:
        omega = float(amp) * MHZ
        row = [f"{amp:.9g}", f"{_freq_guess(chain, levels, omega, lam) / MHZ:.9g}"]
        for d in ed_dims:
            try:
                row.append(f"{find_resonance_ed(chain, omega, lam, dims=(d, d), levels=levels) / MHZ:.9g}")
            except (QuditError, RuntimeError) as e:
                log.warning("optfreq: d=%d at %s MHz failed: %s", d, amp, e)
                row.append("nan")
        w.writerow(row)
    outputs: list = []
    _write(out / "optfreq.csv", buf.getvalue(), outputs)
    return outputs


def prepare_and_tomo(cfg: dict, state_name: str, seed: int) -> dict:
    """Simulated tomography of a named state; falls back to populations when the register is too large."""
    label, state, branches = named_state(state_name)
    tc = cfg["tomo"]
    dims = state.dims
    d = dims[0]
    n_rep = _positive_int(tc, "n_rep", "tomo")
    conf = _confusion_for(dims, tc["snr"])
    ideal_pops = state.probabilities()
    report = {"state": label, "dims": list(dims), "n_rep": n_rep, "snr": tc["snr"], "seed": seed,
              "ideal_branch_populations": [float(ideal_pops[i]) for i in branches]}
    D = total_dim(dims)
    n_settings = (len(projector_set(d)) ** len(dims)) if d in (2, 3, 4) else 0
    if n_settings and n_settings * D ** 3 <= tc["max_matrix_elements"]:
        pset = projector_set(d)
        rec = simulate_tomography(state, pset, n_rep, conf, seed)
        rho = mle_reconstruct(rec, pset)
        raw = fidelity(rho, state)
        try:
            pure = mcweeny_purify(rho)
            purified = fidelity(pure, state)
        except QuditError as e:
            log.warning("purification failed: %s", e)
            purified = None
        pops = np.diag(rho).real
        report.update({"mode": "tomography", "fidelity_raw": raw, "fidelity_purified": purified,
                       "rho_real": rho.real.tolist(), "rho_imag": rho.imag.tolist()})
    else:
        p = ideal_pops if conf is None else conf.apply(ideal_pops)
        counts = np.random.default_rng(seed).multinomial(n_rep, p / p.sum())
        pops = counts / n_rep
        report.update({"mode": "populations", "fidelity_raw": None, "fidelity_purified": None})
    report["branch_populations"] = [float(pops[i]) for i in branches]
    return report


def cmd_prepare(cfg: dict, out: Path, threads: int, state_name: str) -> list:
    report = prepare_and_tomo(cfg, state_name, cfg["seed"])
    outputs: list = []
    safe = re.sub(r"[^a-z0-9]+", "_", report["state"]).strip("_")
    _write(out / f"prepare_{safe}.json", json.dumps(report, indent=2), outputs)
    if report["mode"] == "tomography":
        print(f"{report['state']}: raw fidelity {report['fidelity_raw']:.6f}, "
              f"purified {report['fidelity_purified'] if report['fidelity_purified'] is None else round(report['fidelity_purified'], 6)}")
    else:
        print(f"{report['state']}: register too large for tomography; branch populations "
              + ", ".join(f"{p:.4f}" for p in report["branch_populations"]))
    return outputs


def cmd_synth(cfg: dict, out: Path, threads: int) -> list:
    sc = cfg["synth"]
    n, d = _positive_int(sc, "n", "synth"), _positive_int(sc, "d", "synth")
    circ = ghz_circuit(n, d)
    expected = (n - 1) * (d - 1)
    count = circ.two_photon_count
    if count != expected:
        raise RuntimeError(f"two-photon count {count} differs from (n-1)(d-1) = {expected}")
    psi = apply_circuit(circ, QuantumState.ground(circ.dims)).data
    fid = branch_fidelity(psi, [index_of((k,) * n, circ.dims) for k in range(d)])
    if fid < 1 - 1e-9:
        raise RuntimeError(f"synthesized circuit fidelity {fid} below 1 - 1e-9")
    result = {"n": n, "d": d, "dims": list(circ.dims), "two_photon_gates": count,
              "single_qudit_gates": circ.count(GateKind.SUBSPACE_X), "fidelity": fid,
              "circuit": circ.to_dict()}
    if sc["search"]:
        start, target = kernel_start_target(d)
        gs = SynthGateSet(start.dims, single_cost=int(sc["single_cost"]), two_cost=int(sc["two_cost"]))
        kern = dijkstra_synthesize(start, target, gs, int(sc["max_nodes"]), relaxed=True)
        result["searched_kernel"] = {"two_photon_gates": kern.two_photon_count,
                                     "single_qudit_gates": kern.count(GateKind.SUBSPACE_X),
                                     "circuit": kern.to_dict()}
    outputs: list = []
    _write(out / "synth.json", json.dumps(result, indent=2), outputs)
    print(f"ghz({n},{d}): {count} two-photon gates, fidelity {fid:.12f}")
    return outputs


def cmd_qpd(cfg: dict, out: Path, threads: int, state_name: str, kind: str) -> list:
    label, state, _ = named_state(state_name)
    qc = cfg["qpd"]
    if kind == "husimi":
        grid = husimi_q(state, int(qc["n_theta"]), int(qc["n_phi"]))
    elif kind == "wigner":
        grid = wigner(state, int(qc["n_theta"]), int(qc["n_phi"]))
    else:
        raise ConfigError(f"unknown distribution '{kind}'; options: husimi, wigner")
    outputs: list = []
    safe = re.sub(r"[^a-z0-9]+", "_", label).strip("_")
    path = export_grid(grid, out / f"qpd_{safe}_{kind}.csv")
    outputs.append(path.name)
    print(f"{label} {kind}: min {grid.values.min():.6f}, max {grid.values.max():.6f}")
    return outputs


def _xeb_unitary(gate: str) -> tuple[np.ndarray, tuple[int, ...]]:
    if gate == "ccz":
        c = ccz_circuit()
    elif gate == "cccz":
        c = cccz_circuit()
    else:
        raise ConfigError(f"xeb.gate: unknown gate '{gate}'; options: ccz, cccz")
    n = len(c.dims)
    return restricted_unitary(c.unitary(), c.dims), (2,) * n


def cmd_xeb(cfg: dict, out: Path, threads: int) -> list:
    xc = cfg["xeb"]
    U, dims = _xeb_unitary(xc["gate"])
    shots = None if xc["shots"] is None else _positive_int(xc, "shots", "xeb")
    run = simulate_xeb(U, xc["depths"], _positive_int(xc, "circuits_per_depth", "xeb"), float(xc["depol_rate"]),
                       shots, cfg["seed"], dims, workers=threads)
    outputs: list = []
    _write(out / "xeb.csv", run.to_csv(), outputs)
    _write(out / "xeb_fit.json", run.fit_json(), outputs)
    print(f"{xc['gate']}: per-cycle fidelity {run.fit.fidelity:.6f} +/- {run.fit.fidelity_err:.6f}")
    return outputs


def cmd_shotnoise(cfg: dict, out: Path, threads: int) -> list:
    tc = cfg["tomo"]
    results = []
    for name in tc["states"]:
        label, state, _ = named_state(name)
        d = state.dims[0]
        pset = projector_set(d)
        conf = _confusion_for(state.dims, tc["snr"])
        res = shot_noise_mc(state, pset, _positive_int(tc, "n_rep", "tomo"), _positive_int(tc, "trials", "tomo"),
                            seed=cfg["seed"], confusion=conf, estimator=tc["estimator"], label=label,
                            workers=threads)
        print(f"{label}: mean {res.mean:.4f}, std {res.std:.4f}")
        results.append(res)
    outputs: list = []
    _write(out / "shotnoise.csv", mc_results_to_csv(results), outputs)
    return outputs


# ---------------------------------------------------------------------------
# entry point

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output directory (overrides output.directory)")
    common.add_argument("--threads", type=int, default=1, help="worker cap")
    p = argparse.ArgumentParser(prog="quditladder", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in [("chevron", "population map over drive frequency and duration"),
                       ("rates", "simulated vs closed-form two-photon rates"),
                       ("optfreq", "optimal drive frequency vs amplitude"),
                       ("synth", "GHZ circuit synthesis"),
                       ("xeb", "cross-entropy benchmarking decay"),
                       ("shotnoise", "tomography shot-noise Monte Carlo table")]:
        sub.add_parser(name, parents=[common], help=text)
    pp = sub.add_parser("prepare", parents=[common], help="prepare a named state and run tomography")
    pp.add_argument("state", help="one of " + ", ".join(STATE_NAMES))
    pq = sub.add_parser("qpd", parents=[common], help="quasiprobability grid of a named state")
    pq.add_argument("state", help="one of " + ", ".join(STATE_NAMES))
    pq.add_argument("kind", choices=["husimi", "wigner"])
    return p


def _versions() -> dict:
    return {"quditladder": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else EXIT_OK
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    t0 = time.perf_counter()
    try:
        cfg = load_config(args.config, {"seed": args.seed, "out": args.out})
        out = Path(cfg["output"]["directory"])
        out.mkdir(parents=True, exist_ok=True)
        cmd = args.command
        if cmd == "prepare":
            outputs = cmd_prepare(cfg, out, args.threads, args.state)
        elif cmd == "qpd":
            outputs = cmd_qpd(cfg, out, args.threads, args.state, args.kind)
        else:
            outputs = {"chevron": cmd_chevron, "rates": cmd_rates, "optfreq": cmd_optfreq, "synth": cmd_synth,
                       "xeb": cmd_xeb, "shotnoise": cmd_shotnoise}[cmd](cfg, out, args.threads)
        manifest = {"command": cmd, "config_sha256": config_hash(cfg), "config": cfg, "seed": cfg["seed"],
                    "versions": _versions(), "wall_time_s": time.perf_counter() - t0, "outputs": outputs}
        (out / f"{cmd}_manifest.json").write_text(json.dumps(manifest, indent=2))
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuditError, RuntimeError, np.linalg.LinAlgError) as e:
        print(f"failed: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ALGO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
