"""File formats: raw complex images, raw measurement vectors, PNG previews.

Binary payloads are little-endian and row-major; each ``.bin`` file has a
JSON sidecar of the same stem describing its shape and provenance.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from PIL import Image

from .noise import NoiseModel, PhaselessData

C128 = np.dtype("<c16")
F64 = np.dtype("<f8")


def _paths(path) -> tuple[Path, Path]:
    p = Path(path)
    if p.suffix in (".bin", ".json"):
        p = p.with_suffix("")
    return p.with_suffix(".bin"), p.with_suffix(".json")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_complex(path, img) -> Path:
    """Write ``img`` as interleaved (re, im) float64 pairs plus a sidecar."""
    img = np.asarray(img, dtype=np.complex128)
    if img.ndim != 2:
        raise ValueError("expected a 2-D image")
    bin_path, meta_path = _paths(path)
    bin_path.write_bytes(img.astype(C128).tobytes())
    write_json(meta_path, {"height": img.shape[0], "width": img.shape[1], "dtype": "c128"})
    return bin_path


def read_complex(path) -> np.ndarray:
    bin_path, meta_path = _paths(path)
    meta = json.loads(meta_path.read_text())
    if meta.get("dtype") != "c128":
        raise ValueError(f"{meta_path}: unsupported dtype {meta.get('dtype')!r}")
    shape = (int(meta["height"]), int(meta["width"]))
    raw = np.frombuffer(bin_path.read_bytes(), dtype=C128)
    if raw.size != shape[0] * shape[1]:
        raise ValueError(f"{bin_path}: {raw.size} values, sidecar says {shape}")
    return raw.reshape(shape).astype(np.complex128)


def write_data(path, data: PhaselessData) -> Path:
    bin_path, meta_path = _paths(path)
    bin_path.write_bytes(np.asarray(data.f, dtype=F64).tobytes())
    level = data.model.level
    write_json(meta_path, {
        "m": int(data.m),
        "kind": data.kind,
        # JSON has no infinity; null marks noiseless Gaussian data
        "level": None if math.isinf(level) else float(level),
        "seed": data.seed,
    })
    return bin_path


def read_data(path) -> PhaselessData:
    bin_path, meta_path = _paths(path)
    meta = json.loads(meta_path.read_text())
    f = np.frombuffer(bin_path.read_bytes(), dtype=F64).astype(np.float64)
    if f.size != int(meta["m"]):
        raise ValueError(f"{bin_path}: {f.size} values, sidecar says m={meta['m']}")
    level = float("inf") if meta["level"] is None else float(meta["level"])
    return PhaselessData(f, NoiseModel(meta["kind"], level), meta.get("seed"))


def read_image(path) -> np.ndarray:
    """Load an 8-bit grayscale PNG/PGM as a real image scaled to [0, 1]."""
    with Image.open(path) as im:
        if im.mode not in ("L", "P", "RGB", "RGBA", "I;16", "I"):
            raise ValueError(f"{path}: unsupported image mode {im.mode}")
        arr = np.asarray(im.convert("L"), dtype=np.float64)
    return arr / 255.0


def write_magnitude_png(path, img) -> None:
    """8-bit preview of ``|img|`` scaled so the maximum maps to 255."""
    mag = np.abs(np.asarray(img))
    top = mag.max()
    scaled = mag / top if top > 0 else mag
    Image.fromarray(np.round(255 * scaled).astype(np.uint8)).save(path)
