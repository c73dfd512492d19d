"""Experiment configuration and the simulate / solve pipeline behind the CLI.

A config is a JSON object with the top-level keys ``problem``,
``geometry``, ``noise``, ``solver``, ``input``, ``output`` and ``seed``.
Missing keys take the values in ``DEFAULT_CONFIG``. One integer seed
drives every random choice: masks, noise and the random initializer each
get an independent child stream.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .denoisers import DenoiserSpec
from .io import read_image
from .noise import (GAUSSIAN, POISSON, NoiseModel, PhaselessData, corrupt_gaussian,
                    corrupt_poisson)
from .operators import make_operator
from .phantoms import NAMES as PHANTOMS, make_phantom
from .pnp import PnpConfig

DEFAULT_CONFIG = {
    "problem": "cdp",
    "geometry": {
        "size": 64,
        "K": 2,
        "frame": 64,
        "stride": 16,
        "n_scan": None,
        "probe_radius": None,
        "probe_curvature": 0.05,
        "wrap": True,
    },
    "noise": {"kind": POISSON, "level": 0.02, "noiseless": False},
    "solver": {
        "lam": 0.0,
        "r": 1e-3,
        "eta": 0.3,
        "T": 50,
        "inner_iters": 5,
        "constraint": "real",
        "denoiser": "identity",
        "denoiser_params": {},
        "symmetric": False,
        "init": "backprojection",
    },
    "input": {"phantom": "shapes", "image": None, "scale": 255.0},
    "output": {"dir": "out", "png": True},
    "seed": 0,
}


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


def _merge(base: dict, extra: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        name = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(f"unknown config field {name!r}")
        if isinstance(base[key], dict) and key != "denoiser_params":
            if not isinstance(val, dict):
                raise ConfigError(f"config field {name!r} must be an object")
            out[key] = _merge(base[key], val, prefix=f"{name}.")
        else:
            out[key] = copy.deepcopy(val)
    return out


def parse_value(text: str):
    """Override values are JSON when they parse as JSON, else plain strings."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg: dict, assignment: str) -> dict:
    """Apply one ``dotted.key=value`` override, returning a new config."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    key, text = assignment.split("=", 1)
    parts = key.strip().split(".")
    patch: dict = {}
    node = patch
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = parse_value(text)
    return _merge(cfg, patch)


def resolve(raw: dict | None = None, overrides=(), seed: int | None = None) -> dict:
    """Fill defaults, apply overrides and the seed, then validate."""
    cfg = _merge(DEFAULT_CONFIG, raw or {})
    for assignment in overrides:
        cfg = apply_override(cfg, assignment)
    if seed is not None:
        cfg["seed"] = int(seed)
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    if cfg["problem"] not in ("cdp", "ptycho"):
        raise ConfigError(f"problem: expected 'cdp' or 'ptycho', got {cfg['problem']!r}")
    geo = cfg["geometry"]
    size = geo["size"]
    sizes = size if isinstance(size, list) else [size, size]
    if len(sizes) != 2 or any(int(s) < 1 for s in sizes):
        raise ConfigError("geometry.size must be a positive integer or a pair")
    if int(geo["K"]) < 1:
        raise ConfigError("geometry.K must be >= 1")
    if int(geo["stride"]) < 1:
        raise ConfigError("geometry.stride must be >= 1")
    if int(geo["frame"]) < 1:
        raise ConfigError("geometry.frame must be >= 1")
    noise = cfg["noise"]
    if noise["kind"] not in (POISSON, GAUSSIAN):
        raise ConfigError(f"noise.kind: expected 'poisson' or 'gaussian', got {noise['kind']!r}")
    if noise["kind"] == POISSON and not float(noise["level"]) > 0:
        raise ConfigError("noise.level (peak) must be positive for Poisson noise")
    inp = cfg["input"]
    if inp["image"] is None and inp["phantom"] not in PHANTOMS:
        raise ConfigError(f"input.phantom: unknown phantom {inp['phantom']!r}")
    if not float(inp["scale"]) > 0:
        raise ConfigError("input.scale must be positive")
    try:
        pnp_config(cfg)
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from exc


def config_hash(cfg: dict) -> str:
    """SHA-256 of the canonical JSON of everything except the output section."""
    body = {k: v for k, v in cfg.items() if k != "output"}
    text = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def child_seeds(seed: int) -> dict:
    streams = np.random.SeedSequence(int(seed)).spawn(3)
    names = ("masks", "noise", "init")
    return {n: int(s.generate_state(1, np.uint32)[0]) for n, s in zip(names, streams)}


def image_shape(cfg: dict) -> tuple[int, int]:
    size = cfg["geometry"]["size"]
    return tuple(int(s) for s in size) if isinstance(size, list) else (int(size),) * 2


def pnp_config(cfg: dict) -> PnpConfig:
    s = cfg["solver"]
    spec = DenoiserSpec(s["denoiser"], 0.0, dict(s["denoiser_params"] or {}))
    return PnpConfig(
        lam=float(s["lam"]), r=float(s["r"]), eta=float(s["eta"]), T=int(s["T"]),
        inner_iters=int(s["inner_iters"]), constraint=s["constraint"], denoiser=spec,
        symmetric=bool(s["symmetric"]), seed=child_seeds(cfg["seed"])["init"],
        init=s["init"],
    )


@dataclass
class Instance:
    """Ground truth, operator and measured data of one experiment."""

    ground_truth: np.ndarray
    op: object
    data: PhaselessData


def load_input(cfg: dict) -> np.ndarray:
    inp = cfg["input"]
    shape = image_shape(cfg)
    if inp["image"] is not None:
        img = read_image(inp["image"]).astype(np.complex128)
        if img.shape != shape:
            raise ConfigError(f"input.image has shape {img.shape}, geometry.size says {shape}")
        return img
    if shape[0] != shape[1]:
        raise ConfigError("phantoms are square; geometry.size must be a single integer")
    return make_phantom(inp["phantom"], shape[0])


def build_operator(cfg: dict):
    geo = cfg["geometry"]
    return make_operator(
        cfg["problem"], image_shape(cfg), child_seeds(cfg["seed"])["masks"],
        K=int(geo["K"]), frame=int(geo["frame"]), stride=int(geo["stride"]),
        n_scan=geo["n_scan"], probe_radius=geo["probe_radius"],
        probe_curvature=float(geo["probe_curvature"]), wrap=bool(geo["wrap"]),
    )


def simulate(cfg: dict) -> Instance:
    """Scale the input, build the operator and corrupt ``|Au|^2``.

    For Poisson noise the image is multiplied by ``scale * peak`` before
    measuring, so the peak level controls the photon count. The returned
    ground truth is that scaled image.
    """
    noise = cfg["noise"]
    u = load_input(cfg) * float(cfg["input"]["scale"])
    if noise["kind"] == POISSON:
        u = u * float(noise["level"])
    op = build_operator(cfg)
    h = np.abs(op.forward(u)).ravel() ** 2
    seed = child_seeds(cfg["seed"])["noise"]
    if noise["kind"] == POISSON:
        data = (PhaselessData(h, NoiseModel(POISSON, float(noise["level"])), seed) if noise["noiseless"]
                else corrupt_poisson(h, seed, float(noise["level"])))
    else:
        level = float("inf") if noise["noiseless"] else float(noise["level"])
        data = corrupt_gaussian(h, level, seed)
    return Instance(u, op, data)


def preset_names() -> list[str]:
    root = resources.files("pnppr").joinpath("presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    path = resources.files("pnppr").joinpath("presets", f"{name}.json")
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}")
    return json.loads(path.read_text())


def preset_description(name: str) -> str:
    return load_preset(name).get("description", "")


def strip_meta(raw: dict) -> dict:
    """Drop documentation keys (``description``, ``_comment``) from a config file."""
    return {k: v for k, v in raw.items() if k not in ("description", "_comment")}
