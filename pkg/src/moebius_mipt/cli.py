"""Command-line front end: phase diagrams, entropy runs, trace-map orbits, SU(2) checks.

Every run writes a CSV (17 significant digits) plus a JSON sidecar with the
resolved configuration, the package version and the wall time. Exit codes:
0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import CircuitSpec, run_modes
from .entanglement import EntropyProfile, default_ells, entropies, fit_log, fit_power, fourier_coeffs
from .errors import NUMERICAL_ERRORS, ConfigError, DimensionError, DomainError, InsufficientData, NonPositiveEntropy
from .gates import GATE_SETS, block_pair
from .mobius import MomentumGrid
from .scans import phase_diagram, su2_similarity, trace_identity_check
from .sequences import SequenceKind
from .trace_maps import (ESCAPE_THRESHOLD, circuit_triple, escape_time, fib_invariant, fib_step,
                         tm_orbit, tm_seed, TraceOverflow, TraceTriple)

DEFAULTS = {
    "gate_set": "alternating",
    "sequence": "floquet",
    "order": 2,
    "period": "AB",
    "T": float(np.pi / 8),
    "lambda": 0.5,
    "L": 1000,
    "n": 100,
    "ells": None,
    "seed": 0,
    "realizations": 1,
    "out_dir": ".",
    "threads": None,
    # phase-diagram
    "T_min": 0.0, "T_max": float(np.pi / 2), "T_points": 32,
    "lambda_min": 0.0, "lambda_max": 1.0, "lambda_points": 32,
    # entropy
    "fit": "log", "window": None,
    # trace-orbit
    "map": "fibonacci", "k": float(np.pi / 4), "steps": 24, "seed_triple": None, "seed_pair": None,
    "sweep_k": False, "threshold": ESCAPE_THRESHOLD,
    # su2-check
    "points": None,
}

_INT_KEYS = {"order", "L", "n", "seed", "realizations", "threads", "T_points", "lambda_points", "steps"}
_FLOAT_KEYS = {"T", "lambda", "T_min", "T_max", "lambda_min", "lambda_max", "k", "threshold"}


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_meta(path, config, wall, extra=None):
    meta = {"version": __version__, "config": config, "wall_time_s": wall}
    if extra:
        meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _coerce(key, value):
    if value is None:
        return None
    try:
        if key in _INT_KEYS:
            if float(value) != int(float(value)):
                raise ValueError
            return int(float(value))
        if key in _FLOAT_KEYS:
            return float(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"cannot interpret {value!r} as a number") from None
    return value


def load_config(args):
    """Defaults, then the JSON config file, then explicit flags (flags win)."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from None
        if not isinstance(data, dict):
            raise ConfigError("config", "config file must hold a JSON object")
        for key, val in data.items():
            key = key.replace("-", "_")
            if key == "lam":
                key = "lambda"
            if key not in cfg:
                raise ConfigError(key, "unknown configuration key")
            cfg[key] = val
    for key, val in vars(args).items():
        if key in ("command", "config", "func") or val is None:
            continue
        cfg[key] = val
    if cfg["threads"] is None:
        env = os.environ.get("MOEBIUS_MIPT_THREADS")
        cfg["threads"] = env if env else 1
    for key in list(cfg):
        cfg[key] = _coerce(key, cfg[key])
    if cfg["threads"] < 1:
        raise ConfigError("threads", "must be >= 1")
    return cfg


def circuit_spec(cfg):
    seq = SequenceKind(cfg["sequence"], order=cfg["order"], period=cfg["period"])
    ells = cfg["ells"]
    if isinstance(ells, str):
        try:
            ells = [int(e) for e in ells.split(",") if e.strip()]
        except ValueError:
            raise ConfigError("ells", "expected a comma-separated list of integers") from None
    return CircuitSpec(cfg["gate_set"], seq, cfg["T"], cfg["lambda"], cfg["L"], cfg["n"],
                       ells, cfg["seed"], cfg["realizations"])


def _grid(cfg, name):
    lo, hi, num = cfg[f"{name}_min"], cfg[f"{name}_max"], cfg[f"{name}_points"]
    if num < 1:
        raise ConfigError(f"{name}_points", "must be >= 1")
    if hi < lo:
        raise ConfigError(f"{name}_max", f"must be >= {name}_min")
    return np.linspace(lo, hi, num)


def cmd_phase_diagram(cfg, out):
    spec = circuit_spec(cfg)
    Ts, lams = _grid(cfg, "T"), _grid(cfg, "lambda")
    pd = phase_diagram(spec.sequence, Ts, lams, spec.grid, spec.n, spec.gate_set,
                       spec.realizations, spec.seed, cfg["threads"])
    header = ["T", "lambda", "min_lyapunov"] + (["quasi_bounded"] if pd.quasi is not None else [])
    write_csv(out / "phase_diagram.csv", header, pd.rows())
    write_csv(out / "phase_boundary.csv", ["T", "lambda_c"], zip(Ts, pd.boundary))
    return {"spec": spec.to_dict(), "files": ["phase_diagram.csv", "phase_boundary.csv"]}


def _entropy_rows(spec, ells, threads):
    coeffs = [fourier_coeffs(m) for m in run_modes(spec)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.array(list(pool.map(lambda c: entropies(c, ells), coeffs)))


def cmd_entropy(cfg, out):
    spec = circuit_spec(cfg)
    ells = np.asarray(spec.ells if spec.ells else default_ells(spec.L), dtype=int)
    rows = _entropy_rows(spec, ells, cfg["threads"])
    S = rows.mean(axis=0)
    err = rows.std(axis=0, ddof=1) / np.sqrt(len(rows)) if len(rows) > 1 else None
    profile = EntropyProfile(ells, S, err)
    cols = [ells, S] + ([err] if err is not None else [])
    write_csv(out / "entropy.csv", ["ell", "S"] + (["stderr"] if err is not None else []), zip(*cols))
    window = cfg["window"]
    if isinstance(window, str):
        try:
            window = [float(w) for w in window.split(",")]
        except ValueError:
            raise ConfigError("window", "expected lo,hi") from None
    fit = {"kind": cfg["fit"], "window": window}
    try:
        if cfg["fit"] == "log":
            r = fit_log(profile, window)
            fit.update(c_eff=r.c_eff, s0=r.s0, residual=r.residual, stderr=r.stderr)
        elif cfg["fit"] == "power":
            r = fit_power(profile, window)
            fit.update(alpha=r.alpha, prefactor=r.prefactor, residual=r.residual, stderr=r.stderr)
        elif cfg["fit"] != "none":
            raise ConfigError("fit", "choose log, power or none")
    except (InsufficientData, NonPositiveEntropy) as exc:
        fit["error"] = str(exc)
    return {"spec": spec.to_dict(), "fit": fit, "files": ["entropy.csv"]}


def _parse_tuple(cfg, key, size):
    val = cfg[key]
    if isinstance(val, str):
        val = val.split(",")
    try:
        val = [float(v) for v in val]
    except (TypeError, ValueError):
        raise ConfigError(key, "expected numbers") from None
    if len(val) != size:
        raise ConfigError(key, f"expected {size} numbers")
    return val


def _fib_rows(t, steps, threshold):
    rows = []
    for i in range(steps + 1):
        escaped = max(abs(c) for c in t) > threshold
        rows.append((i, *t, fib_invariant(t), escaped))
        if escaped:
            break
        try:
            t = fib_step(t)
        except TraceOverflow:
            break
    return rows


def cmd_trace_orbit(cfg, out):
    T, lam, steps = cfg["T"], cfg["lambda"], cfg["steps"]
    if cfg["map"] == "fibonacci":
        if cfg["sweep_k"]:
            grid = MomentumGrid(cfg["L"])
            n_k = escape_time(circuit_triple(T, lam, grid.k), cfg["threshold"], steps)
            write_csv(out / "escape_times.csv", ["k", "escape_step"], zip(grid.k, n_k))
            return {"files": ["escape_times.csv"]}
        if cfg["seed_triple"] is not None:
            t = TraceTriple(*_parse_tuple(cfg, "seed_triple", 3))
        else:
            t = TraceTriple(*(float(c) for c in circuit_triple(T, lam, cfg["k"])))
        rows = _fib_rows(t, steps, cfg["threshold"])
        write_csv(out / "orbit.csv", ["step", "x", "y", "z", "invariant", "escaped"], rows)
    elif cfg["map"] == "thue_morse":
        if cfg["seed_pair"] is not None:
            s = _parse_tuple(cfg, "seed_pair", 2)
        else:
            s = tm_seed(*block_pair("dipole", T, lam, cfg["k"]))
        rows = tm_orbit(s, steps, cfg["threshold"])
        write_csv(out / "orbit.csv", ["step", "p", "q", "region", "escaped"], rows)
    else:
        raise ConfigError("map", "choose fibonacci or thue_morse")
    return {"files": ["orbit.csv"]}


def cmd_su2_check(cfg, out):
    points = cfg["points"]
    if points is None:
        points = [[cfg["T"], cfg["lambda"], cfg["k"]]]
    elif isinstance(points, str):
        points = [p.split(",") for p in points.split(";") if p.strip()]
    gate_set = cfg["gate_set"]
    if gate_set not in GATE_SETS:
        raise ConfigError("gate_set", f"unknown gate set {gate_set!r}")
    reports = []
    for p in points:
        try:
            T, lam, k = (float(v) for v in p)
        except (TypeError, ValueError):
            raise ConfigError("points", "each point must be T,lambda,k") from None
        m_plus, m_minus = block_pair(gate_set, T, lam, k)
        rep = su2_similarity(m_plus, m_minus)
        d = {"T": T, "lambda": lam, "k": k, **rep.to_dict()}
        if rep.S is not None:
            d["trace_identity_residual"] = trace_identity_check(m_plus, m_minus, rep.sigma)
        reports.append(d)
    with open(out / "su2_report.json", "w") as fh:
        json.dump({"gate_set": gate_set, "reports": reports}, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    rows = [(r["T"], r["lambda"], r["k"], r["conjugation_ok"], r["traces_real"], r["combined_trace_ok"],
             np.nan if r["unitarity_defect"] is None else r["unitarity_defect"]) for r in reports]
    write_csv(out / "su2_report.csv", ["T", "lambda", "k", "conjugation_ok", "traces_real",
                                       "combined_trace_ok", "unitarity_defect"], rows)
    return {"files": ["su2_report.json", "su2_report.csv"]}


COMMANDS = {
    "phase-diagram": cmd_phase_diagram,
    "entropy": cmd_entropy,
    "trace-orbit": cmd_trace_orbit,
    "su2-check": cmd_su2_check,
}


def build_parser():
    p = argparse.ArgumentParser(prog="moebius-mipt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON file of key/value settings; flags override it")
        s.add_argument("--gate-set", dest="gate_set", choices=sorted(GATE_SETS))
        s.add_argument("--sequence")
        s.add_argument("--order", type=int)
        s.add_argument("--period")
        s.add_argument("--T", dest="T", type=float)
        s.add_argument("--lambda", dest="lambda", type=float)
        s.add_argument("--L", dest="L", type=int)
        s.add_argument("--n", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--realizations", type=int)
        s.add_argument("--out-dir", dest="out_dir")
        s.add_argument("--threads", type=int, help="worker threads (fallback: MOEBIUS_MIPT_THREADS)")
        if name == "phase-diagram":
            for key in ("T_min", "T_max", "lambda_min", "lambda_max"):
                s.add_argument("--" + key.replace("_", "-"), dest=key, type=float)
            for key in ("T_points", "lambda_points"):
                s.add_argument("--" + key.replace("_", "-"), dest=key, type=int)
        elif name == "entropy":
            s.add_argument("--ells", help="comma-separated subsystem sizes")
            s.add_argument("--fit", choices=["log", "power", "none"])
            s.add_argument("--window", help="lo,hi range of ell used in the fit")
        elif name == "trace-orbit":
            s.add_argument("--map", choices=["fibonacci", "thue_morse"])
            s.add_argument("--k", type=float)
            s.add_argument("--steps", type=int)
            s.add_argument("--seed-triple", dest="seed_triple", help="x,y,z half traces")
            s.add_argument("--seed-pair", dest="seed_pair", help="p,q Thue-Morse coordinates")
            s.add_argument("--sweep-k", dest="sweep_k", action="store_true", default=None,
                           help="escape time for every grid momentum instead of one orbit")
            s.add_argument("--threshold", type=float)
        elif name == "su2-check":
            s.add_argument("--k", type=float)
            s.add_argument("--points", help="semicolon-separated T,lambda,k triples")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = load_config(args)
        out = Path(cfg["out_dir"])
        out.mkdir(parents=True, exist_ok=True)
        extra = COMMANDS[args.command](cfg, out)
    except (ConfigError, DomainError, DimensionError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS + (TraceOverflow, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    write_meta(out / f"{args.command.replace('-', '_')}.json", cfg, time.perf_counter() - t0, extra)
    return 0


if __name__ == "__main__":
    sys.exit(main())
