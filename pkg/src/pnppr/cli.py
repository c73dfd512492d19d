"""Command-line harness: ``pnppr simulate | run | sweep | compare-symmetry | presets list``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import experiment as ex
from .io import read_complex, read_data, write_complex, write_data, write_json, write_magnitude_png
from .pnp import PnpSolver, RunHistory, SolverDivergence, csv_row
from .operators import CdpOperator

log = logging.getLogger("pnppr")

EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def load_config(args) -> dict:
    raw: dict = {}
    if args.config:
        path = Path(args.config)
        if path.is_file():
            raw = json.loads(path.read_text())
        elif args.config in ex.preset_names():
            raw = ex.load_preset(args.config)
        else:
            raise ex.ConfigError(f"--config: no such file or preset {args.config!r}")
    cfg = ex.resolve(ex.strip_meta(raw), args.override or (), args.seed)
    if args.out:
        cfg["output"]["dir"] = args.out
    return cfg


def out_dir(cfg: dict) -> Path:
    path = Path(cfg["output"]["dir"])
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_config(path: Path, cfg: dict) -> None:
    write_json(path / "config.json", {**cfg, "config_hash": ex.config_hash(cfg)})


def cmd_simulate(cfg: dict) -> ex.Instance:
    """Write the ground truth, operator description and measurements."""
    out = out_dir(cfg)
    inst = ex.simulate(cfg)
    write_config(out, cfg)
    write_complex(out / "ground_truth", inst.ground_truth)
    if cfg["output"]["png"]:
        write_magnitude_png(out / "ground_truth.png", inst.ground_truth)
    write_data(out / "data", inst.data)
    op = inst.op
    desc = {"problem": cfg["problem"], "image_shape": list(op.image_shape),
            "seeds": ex.child_seeds(cfg["seed"])}
    if isinstance(op, CdpOperator):
        desc["K"] = op.K
        n1, n2 = op.image_shape
        write_complex(out / "masks", op.masks.reshape(op.K * n1, n2))
    else:
        desc.update(positions=[list(p) for p in op.positions], wrap=op.wrap,
                    frame=op.frame_size)
        write_complex(out / "probe", op.probe)
    write_json(out / "operator.json", desc)
    return inst


def _stored_hash(out: Path) -> str | None:
    try:
        return json.loads((out / "config.json").read_text()).get("config_hash")
    except (OSError, ValueError):
        return None


def load_instance(cfg: dict) -> ex.Instance:
    """Reuse simulated files in the output directory when they match the config."""
    out = out_dir(cfg)
    have = (out / "data.bin").is_file() and (out / "ground_truth.bin").is_file()
    if not have or _stored_hash(out) != ex.config_hash(cfg):
        cmd_simulate(cfg)
    return ex.Instance(read_complex(out / "ground_truth"), ex.build_operator(cfg),
                       read_data(out / "data"))


def solve(inst: ex.Instance, cfg: dict, csv_path: Path) -> tuple[np.ndarray | None, RunHistory, bool]:
    """Run the solver, streaming history rows to ``csv_path``.

    Returns the final iterate (None after divergence), the history and a
    divergence flag.
    """
    solver = PnpSolver(inst.op, inst.data, ex.pnp_config(cfg), ground_truth=inst.ground_truth)
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(RunHistory.COLUMNS) + "\n")

        def stream(rec):
            fh.write(csv_row(rec) + "\n")
            fh.flush()

        try:
            v, hist = solver.run(callback=stream)
        except SolverDivergence as exc:
            log.error("solver diverged: %s", exc)
            return None, exc.history, True
    return v, hist, False


def _final_snr(hist: RunHistory) -> float:
    return float(hist.records[-1].snr_db) if hist.records else float("nan")


def cmd_run(cfg: dict) -> int:
    out = out_dir(cfg)
    inst = load_instance(cfg)
    t0 = time.perf_counter()
    v, hist, diverged = solve(inst, cfg, out / "history.csv")
    wall = time.perf_counter() - t0
    if v is not None:
        write_complex(out / "reconstruction", v)
        if cfg["output"]["png"]:
            write_magnitude_png(out / "reconstruction.png", v)
    write_json(out / "summary.json", {
        "final_snr_db": _final_snr(hist),
        "iterations": len(hist),
        "wall_seconds": wall,
        "config_hash": ex.config_hash(cfg),
        "diverged": diverged,
    })
    return EXIT_DIVERGED if diverged else 0


def sweep_factors(levels: int) -> list[float]:
    return [2.0 ** k for k in range(-levels, levels + 1)]


def cmd_sweep(cfg: dict, axis: str = "lambda", factors=None) -> int:
    """Scale ``lam`` or ``r`` by each factor, one run per factor."""
    if axis not in ("lambda", "r"):
        raise ex.ConfigError(f"sweep axis must be 'lambda' or 'r', got {axis!r}")
    factors = sweep_factors(5) if factors is None else list(factors)
    out = out_dir(cfg)
    inst = load_instance(cfg)
    key = "lam" if axis == "lambda" else "r"
    base = float(cfg["solver"][key])
    rows = []
    for i, fac in enumerate(factors):
        point = ex.resolve(cfg, [f"solver.{key}={json.dumps(base * fac)}"])
        _, hist, diverged = solve(inst, point, out / f"history_{axis}_{i:02d}.csv")
        rows.append((fac, point["solver"]["lam"], point["solver"]["r"],
                     float("nan") if diverged else _final_snr(hist), len(hist), diverged))
    with open(out / f"sweep_{axis}.csv", "w") as fh:
        fh.write("factor,lam,r,final_snr_db,iterations,diverged\n")
        for fac, lam, r, snr, its, div in rows:
            fh.write(f"{fac!r},{lam!r},{r!r},{snr!r},{its},{int(div)}\n")
    snrs = np.array([row[3] for row in rows])
    best = int(np.nanargmax(snrs)) if np.any(np.isfinite(snrs)) else 0
    peak = snrs[best]
    write_json(out / f"sweep_{axis}.json", {
        "axis": axis,
        "argmax_factor": factors[best],
        "max_snr_db": float(peak),
        "endpoints_below_peak": bool(len(rows) > 2 and snrs[0] < peak and snrs[-1] < peak),
        "config_hash": ex.config_hash(cfg),
    })
    return EXIT_DIVERGED if any(row[5] for row in rows) else 0


def iterations_to_within(snr, tol: float) -> int:
    """First iteration (1-based) after which SNR stays within ``tol`` dB of its final value."""
    snr = np.asarray(snr, dtype=float)
    outside = np.nonzero(np.abs(snr - snr[-1]) > tol)[0]
    return int(outside[-1] + 2) if len(outside) else 1


def cmd_compare_symmetry(cfg: dict, threshold: float = 0.5) -> int:
    out = out_dir(cfg)
    inst = load_instance(cfg)
    result = {"threshold_db": threshold, "config_hash": ex.config_hash(cfg)}
    rows = []
    for name, sym in (("symmetric", True), ("asymmetric", False)):
        point = ex.resolve(cfg, [f"solver.symmetric={json.dumps(sym)}"])
        _, hist, diverged = solve(inst, point, out / f"history_{name}.csv")
        its = None if diverged else iterations_to_within(hist.column("snr_db"), threshold)
        result[f"iterations_{name}"] = its
        result[f"final_snr_db_{name}"] = _final_snr(hist)
        rows.append((name, its, _final_snr(hist), diverged))
    with open(out / "symmetry.csv", "w") as fh:
        fh.write("variant,iterations_to_threshold,final_snr_db,diverged\n")
        for name, its, snr, div in rows:
            fh.write(f"{name},{'' if its is None else its},{snr!r},{int(div)}\n")
    write_json(out / "symmetry.json", result)
    return EXIT_DIVERGED if any(row[3] for row in rows) else 0


def cmd_presets_list(stream=None) -> int:
    stream = stream or sys.stdout
    for name in ex.preset_names():
        stream.write(f"{name:40s} {ex.preset_description(name)}\n")
    return 0


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="config JSON path or preset name")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--override", action="append", metavar="KEY=VALUE",
                   help="set a dotted config field, e.g. solver.lam=5; repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pnppr", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "write ground truth, operator and data"),
                        ("run", "simulate if needed, then reconstruct")):
        _common(sub.add_parser(name, help=help_))
    p = sub.add_parser("sweep", help="scale lambda or r by 2^-l..2^l")
    _common(p)
    p.add_argument("--axis", choices=("lambda", "r"), default="lambda")
    p.add_argument("--levels", type=int, default=5, help="l in 2^-l..2^l")
    p.add_argument("--factors", help="explicit comma-separated factors")
    p = sub.add_parser("compare-symmetry", help="symmetric vs asymmetric multiplier updates")
    _common(p)
    p.add_argument("--threshold", type=float, default=0.5, help="dB band around the final SNR")
    p = sub.add_parser("presets", help="shipped parameter presets")
    p.add_argument("action", choices=("list",))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "presets":
        return cmd_presets_list()
    try:
        cfg = load_config(args)
        if args.command == "simulate":
            cmd_simulate(cfg)
            return 0
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "sweep":
            factors = ([float(x) for x in args.factors.split(",")] if args.factors
                       else sweep_factors(args.levels))
            return cmd_sweep(cfg, args.axis, factors)
        return cmd_compare_symmetry(cfg, args.threshold)
    except ex.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
