"""Batch command-line front end.

Each subcommand validates a RunConfig, runs the corresponding library
routine, and writes a deterministic payload (JSON or CSV) plus a manifest
carrying the config echo, tool version, and wall time.  Payload bytes
depend only on the config and seeds; timestamps live in the manifest.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import analysis, geometry, green, predictions, thermo
from .disorder import sample_rem
from .eigensolve import count_level_clusters, gap_sweep, lanczos_extremal
from .operators import OperatorSpec
from .predictions import BETA_C

SCHEMA_VERSION = 1
DENSE_N_CAP = 13
MATRIX_FREE_N_CAP = 26
SEED_CAP = 10_000


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    format: str = "json"
    out: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(
            command=d["command"], params=dict(d["params"]), format=d["format"], out=d["out"]
        )


def parse_int_range(text: str) -> list[int]:
    """Inclusive integer ranges 'a..b', or a single integer."""
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ConfigError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def resolve_seeds(count: int | None, base: int, seed_list: str | None) -> list[int]:
    if seed_list:
        seeds = [int(tok) for tok in seed_list.split(",") if tok.strip()]
    else:
        seeds = list(range(base, base + (count or 1)))
    if len(seeds) > SEED_CAP:
        raise ConfigError(f"seed count {len(seeds)} exceeds cap {SEED_CAP}")
    return seeds


def _check_n(n: int, dense: bool) -> None:
    cap = DENSE_N_CAP if dense else MATRIX_FREE_N_CAP
    if not 1 <= n <= cap:
        kind = "dense" if dense else "matrix-free"
        raise ConfigError(f"N={n} outside the {kind} cap 1..{cap}")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, names: list[str], definitions: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        writer.writerow(definitions)
        for row in rows:
            writer.writerow(row)


def _output_path(config: RunConfig, default_ext: str) -> str:
    if config.out:
        return config.out
    out_dir = os.environ.get("QREM_OUTPUT_DIR", ".")
    return os.path.join(out_dir, f"{config.command}.{default_ext}")


def _finish(config: RunConfig, payload_path: str, t0: float) -> None:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool": "qrem",
        "tool_version": __version__,
        "config": config.to_dict(),
        "outputs": [payload_path],
        "wall_time_s": time.time() - t0,
        "timestamp_unix": time.time(),
    }
    with open(payload_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------------------------
# command handlers
# --------------------------------------------------------------------------


def _cmd_spectrum(config: RunConfig) -> str:
    p = config.params
    n, gamma, seed, k = p["n"], p["gamma"], p["seed"], p["k"]
    _check_n(n, dense=False)
    field_ = sample_rem(n, seed)
    res = lanczos_extremal(
        OperatorSpec(n=n, gamma=gamma, disorder=field_),
        k=k,
        tol=p["tol"],
        maxiter=p["maxiter"],
        want_vectors=False,
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "spectrum",
        "n": n,
        "gamma": gamma,
        "seed": seed,
        "eigenvalues": res.eigenvalues.tolist(),
        "residuals": res.residuals.tolist(),
        "converged": res.converged.tolist(),
        "solver": res.solver,
    }
    radius = p["cluster_radius"]
    if gamma > BETA_C:
        centers = predictions.paramagnetic_levels(n, gamma, p["eta"])
        usable = [c for c, _ in centers]
        counts, stray = (
            count_level_clusters(res.eigenvalues, usable, radius) if usable else ([], [])
        )
        payload["predicted_centers"] = [
            {"center": c, "multiplicity": m} for c, m in centers
        ]
        payload["clusters"] = {
            "radius": radius,
            "radius_note": "absolute desk-scale window; the asymptotic radius constant is unspecified",
            "counts": counts,
            "stray": stray,
        }
    else:
        order = np.argsort(field_.values, kind="stable")[:k]
        payload["predicted_centers"] = [
            {
                "site": int(b),
                "energy": predictions.spin_glass_ground_energy(
                    n, gamma, float(field_.values[b])
                ),
            }
            for b in order
        ]
    side = []
    for e in res.eigenvalues:
        if gamma > BETA_C:
            preds = [c["center"] for c in payload["predicted_centers"]]
        else:
            preds = [c["energy"] for c in payload["predicted_centers"]]
        nearest = min(preds, key=lambda c: abs(c - e)) if preds else None
        side.append({"measured": float(e), "predicted": nearest})
    payload["side_by_side"] = side
    path = _output_path(config, "json")
    _write_json(path, payload)
    return path


def _cmd_green(config: RunConfig) -> str:
    p = config.params
    n, radius, energy = p["n"], p["radius"], p["energy"]
    _check_n(n, dense=False)
    profile = green.riccati_profile(radius, n, energy)
    report = green.decay_bound_check(profile, "fixed_K")
    oracle = green.dense_green_column(radius, n, energy) if n <= 12 else None
    rows = []
    for d in range(radius + 1):
        oracle_val = "" if oracle is None else f"{oracle[d]:.17g}"
        delta = "" if oracle is None else f"{abs(oracle[d] - profile.green[d]):.3e}"
        rows.append(
            [
                d,
                f"{profile.factors[d]:.17g}",
                f"{profile.green[d]:.17g}",
                f"{profile.renormalized[d]:.17g}",
                f"{report.envelope[d]:.17g}",
                f"{report.ratios[d]:.6g}",
                oracle_val,
                delta,
            ]
        )
    path = _output_path(config, "csv")
    _write_csv(
        path,
        ["d", "factor", "green", "renormalized", "bound", "slack", "oracle", "oracle_delta"],
        [
            "Hamming distance from the ball center (dimensionless)",
            "ratio factor at distance d (1/energy)",
            "Green function value G(d; E) (1/energy)",
            "sqrt(C(N,d)) * G(d; E) (1/energy)",
            "fixed-radius decay envelope with unit constant (1/energy)",
            "green / bound (dimensionless)",
            "dense-resolvent oracle value when N <= 12 (1/energy)",
            "absolute deviation |oracle - green| (1/energy)",
        ],
        rows,
    )
    return path


def _cmd_thermo(config: RunConfig) -> str:
    p = config.params
    n_list = p["n_list"]
    for n in n_list:
        _check_n(n, dense=(p["method"] == "dense"))
    series = thermo.correction_measurement(
        p["beta"],
        p["gamma"],
        n_list,
        p["seeds"],
        method=p["method"],
        dtype=p["dtype"],
        k=p["k"],
    )
    rows = [
        [
            n,
            f"{series.means[i]:.12g}",
            f"{series.stderrs[i]:.6g}",
            f"{series.prediction:.12g}",
            f"{series.means[i] - series.prediction:.6g}",
        ]
        for i, n in enumerate(series.n_list)
    ]
    path = _output_path(config, "csv")
    _write_csv(
        path,
        ["n", "mean", "stderr", "prediction", "gap_to_prediction"],
        [
            "system size (spins)",
            "ensemble mean of the order-one pressure shift (dimensionless)",
            "standard error of the mean (dimensionless)",
            "predicted limit (dimensionless)",
            "mean minus prediction (dimensionless)",
        ],
        rows,
    )
    return path


def _cmd_ensemble(config: RunConfig) -> str:
    p = config.params
    _check_n(p["n"], dense=False)
    summary = analysis.extreme_ensemble(p["n"], p["gamma"], p["seeds"])
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "ensemble",
        "n": summary.n,
        "gamma": summary.gamma,
        "seed_count": summary.seed_count,
        "excluded": summary.excluded,
        "ks_to_gumbel": summary.ks_to_reference,
        "samples": summary.samples.tolist(),
    }
    path = _output_path(config, "json")
    _write_json(path, payload)
    return path


def _cmd_phase(config: RunConfig) -> str:
    p = config.params
    rows = []
    for beta in p["betas"]:
        for gamma in p["gammas"]:
            point = predictions.classify(beta, gamma)
            pressure = max(predictions.p_rem(beta), predictions.p_par(beta * gamma))
            try:
                corr = f"{predictions.free_energy_correction(beta, gamma):.12g}"
            except ValueError:
                corr = ""
            rows.append([f"{beta:g}", f"{gamma:g}", point.regime, f"{pressure:.12g}", corr])
    path = _output_path(config, "csv")
    _write_csv(
        path,
        ["beta", "gamma", "regime", "specific_pressure", "correction"],
        [
            "inverse temperature (1/energy)",
            "transverse field strength (energy)",
            "phase label",
            "limiting pressure per spin (dimensionless)",
            "order-one pressure shift, empty on the critical line (dimensionless)",
        ],
        rows,
    )
    return path


def _cmd_gap(config: RunConfig) -> str:
    p = config.params
    _check_n(p["n"], dense=(p["method"] == "dense"))
    field_ = sample_rem(p["n"], p["seed"])
    result = gap_sweep(
        field_,
        gamma_range=(p["gamma_min"], p["gamma_max"]),
        coarse_points=p["points"],
        refine_tol=p["refine_tol"],
        method=p["method"],
        dtype=p["dtype"],
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "gap",
        "n": p["n"],
        "seed": p["seed"],
        "gamma_grid": result.gamma_grid.tolist(),
        "gaps": result.gaps.tolist(),
        "min_gap": result.min_gap,
        "argmin_gamma": result.argmin_gamma,
        "predicted_gamma": result.predicted_gamma,
        "flagged": result.flagged,
    }
    path = _output_path(config, "json")
    _write_json(path, payload)
    return path


def _cmd_rw(config: RunConfig) -> str:
    p = config.params
    if p["mode"] == "transition":
        prob = analysis.rw_transition(p["n"], p["steps"], p["d"])
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "rw",
            "mode": "transition",
            "n": p["n"],
            "steps": p["steps"],
            "d": p["d"],
            "probability": prob,
        }
    else:
        est = analysis.rw_sojourn(
            p["n"], p["w_size"], p["alpha"], p["t"], p["trials"], seed=p["seed"]
        )
        payload = {
            "schema_version": SCHEMA_VERSION,
            "command": "rw",
            "mode": "sojourn",
            "n": p["n"],
            "w_size": p["w_size"],
            "alpha": p["alpha"],
            "t": p["t"],
            "trials": est.trials,
            "probability": est.probability,
            "stderr": est.stderr,
            "bound": est.bound,
        }
    path = _output_path(config, "json")
    _write_json(path, payload)
    return path


def _cmd_deephole(config: RunConfig) -> str:
    p = config.params
    _check_n(p["n"], dense=False)
    field_ = sample_rem(p["n"], p["seed"])
    alpha = p["alpha"]
    if alpha is None:
        alpha = geometry.max_admissible_alpha(p["epsilon"], p["delta"], p["gamma"])
        if alpha is None or int(alpha * p["n"]) < 1:
            alpha = alpha if alpha and alpha > 0 else 0.1
    report = geometry.check_deep_hole(
        field_, p["epsilon"], p["delta"], alpha, scope=p["scope"]
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "deephole",
        "n": p["n"],
        "seed": p["seed"],
        "report": report.to_json_dict(),
    }
    path = _output_path(config, "json")
    _write_json(path, payload)
    return path


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "green": _cmd_green,
    "thermo": _cmd_thermo,
    "ensemble": _cmd_ensemble,
    "phase": _cmd_phase,
    "gap": _cmd_gap,
    "rw": _cmd_rw,
    "deephole": _cmd_deephole,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qrem", description="Spectral toolkit for the transverse-field REM"
    )
    ap.add_argument("--version", action="version", version=f"qrem {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="extremal spectrum vs predictions")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--k", type=int, default=10)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--maxiter", type=int, default=None)
    sp.add_argument("--eta", type=float, default=0.1)
    sp.add_argument("--cluster-radius", type=float, default=0.5)
    sp.add_argument("--out", default=None)

    gp = sub.add_parser("green", help="radial Green profile on a ball")
    gp.add_argument("--n", type=int, required=True)
    gp.add_argument("--radius", "--k", dest="radius", type=int, required=True)
    gp.add_argument("--energy", type=float, required=True)
    gp.add_argument("--out", default=None)

    tp = sub.add_parser("thermo", help="order-one pressure corrections")
    tp.add_argument("--n", required=True, help="size or inclusive range a..b")
    tp.add_argument("--beta", type=float, required=True)
    tp.add_argument("--gamma", type=float, required=True)
    tp.add_argument("--seeds", type=int, default=10)
    tp.add_argument("--seed-base", type=int, default=0)
    tp.add_argument("--seed-list", default=None)
    tp.add_argument("--method", choices=("dense", "truncated"), default="dense")
    tp.add_argument("--dtype", choices=("float32", "float64"), default=None)
    tp.add_argument("--k", type=int, default=64)
    tp.add_argument("--out", default=None)

    ep = sub.add_parser("ensemble", help="extreme-value statistics across seeds")
    ep.add_argument("--n", type=int, required=True)
    ep.add_argument("--gamma", type=float, required=True)
    ep.add_argument("--seeds", type=int, default=100)
    ep.add_argument("--seed-base", type=int, default=0)
    ep.add_argument("--seed-list", default=None)
    ep.add_argument("--out", default=None)

    pp = sub.add_parser("phase", help="phase diagram sweep")
    pp.add_argument("--betas", required=True, help="comma-separated values")
    pp.add_argument("--gammas", required=True, help="comma-separated values")
    pp.add_argument("--out", default=None)

    qp = sub.add_parser("gap", help="energy-gap sweep over the field strength")
    qp.add_argument("--n", type=int, required=True)
    qp.add_argument("--seed", type=int, default=0)
    qp.add_argument("--gamma-min", type=float, default=0.5)
    qp.add_argument("--gamma-max", type=float, default=2.0)
    qp.add_argument("--points", type=int, default=25)
    qp.add_argument("--refine-tol", type=float, default=1e-4)
    qp.add_argument("--method", choices=("dense", "lanczos"), default="dense")
    qp.add_argument("--dtype", choices=("float32", "float64"), default=None)
    qp.add_argument("--out", default=None)

    rp = sub.add_parser("rw", help="random-walk diagnostics")
    rp.add_argument("--n", type=int, required=True)
    rp.add_argument("--mode", choices=("transition", "sojourn"), default="transition")
    rp.add_argument("--steps", type=int, default=None)
    rp.add_argument("--d", type=int, default=None)
    rp.add_argument("--w-size", type=int, default=4)
    rp.add_argument("--alpha", type=float, default=0.25)
    rp.add_argument("--t", type=float, default=0.125)
    rp.add_argument("--trials", type=int, default=10000)
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--out", default=None)

    dp = sub.add_parser("deephole", help="deep-hole scenario report")
    dp.add_argument("--n", type=int, required=True)
    dp.add_argument("--seed", type=int, default=0)
    dp.add_argument("--epsilon", type=float, default=BETA_C / 2.0)
    dp.add_argument("--delta", type=float, default=0.1)
    dp.add_argument("--alpha", type=float, default=None)
    dp.add_argument("--gamma", type=float, default=0.0)
    dp.add_argument(
        "--scope",
        choices=(geometry.SCOPE_LOCAL, geometry.SCOPE_GLOBAL, geometry.SCOPE_SYMMETRIZED),
        default=geometry.SCOPE_GLOBAL,
    )
    dp.add_argument("--out", default=None)
    return ap


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cmd = args.command
    if cmd == "spectrum":
        params = {
            "n": args.n,
            "gamma": args.gamma,
            "seed": args.seed,
            "k": args.k,
            "tol": args.tol,
            "maxiter": args.maxiter,
            "eta": args.eta,
            "cluster_radius": args.cluster_radius,
        }
        fmt = "json"
    elif cmd == "green":
        params = {"n": args.n, "radius": args.radius, "energy": args.energy}
        fmt = "csv"
    elif cmd == "thermo":
        params = {
            "n_list": parse_int_range(args.n),
            "beta": args.beta,
            "gamma": args.gamma,
            "seeds": resolve_seeds(args.seeds, args.seed_base, args.seed_list),
            "method": args.method,
            "dtype": args.dtype,
            "k": args.k,
        }
        fmt = "csv"
    elif cmd == "ensemble":
        params = {
            "n": args.n,
            "gamma": args.gamma,
            "seeds": resolve_seeds(args.seeds, args.seed_base, args.seed_list),
        }
        fmt = "json"
    elif cmd == "phase":
        params = {"betas": parse_float_list(args.betas), "gammas": parse_float_list(args.gammas)}
        fmt = "csv"
    elif cmd == "gap":
        params = {
            "n": args.n,
            "seed": args.seed,
            "gamma_min": args.gamma_min,
            "gamma_max": args.gamma_max,
            "points": args.points,
            "refine_tol": args.refine_tol,
            "method": args.method,
            "dtype": args.dtype,
        }
        fmt = "json"
    elif cmd == "rw":
        if args.mode == "transition" and (args.steps is None or args.d is None):
            raise ConfigError("transition mode needs --steps and --d")
        params = {
            "n": args.n,
            "mode": args.mode,
            "steps": args.steps,
            "d": args.d,
            "w_size": args.w_size,
            "alpha": args.alpha,
            "t": args.t,
            "trials": args.trials,
            "seed": args.seed,
        }
        fmt = "json"
    elif cmd == "deephole":
        params = {
            "n": args.n,
            "seed": args.seed,
            "epsilon": args.epsilon,
            "delta": args.delta,
            "alpha": args.alpha,
            "gamma": args.gamma,
            "scope": args.scope,
        }
        fmt = "json"
    else:  # pragma: no cover
        raise ConfigError(f"unknown command {cmd!r}")
    return RunConfig(command=cmd, params=params, format=fmt, out=args.out)


def run(config: RunConfig) -> str:
    """Execute one config; returns the payload path."""
    t0 = time.time()
    handler = _HANDLERS[config.command]
    path = handler(config)
    _finish(config, path, t0)
    return path


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
        path = run(config)
    except (ConfigError, ValueError) as exc:
        json.dump(
            {"error": {"type": type(exc).__name__, "message": str(exc)}},
            sys.stderr,
        )
        sys.stderr.write("\n")
        return 2
    print(path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
