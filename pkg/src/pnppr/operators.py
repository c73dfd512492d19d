"""Unitary 2-D DFT and the two phaseless measurement operators.

Images are 2-D ``complex128`` arrays of shape ``(n1, n2)``; the flat
lexicographic order used in the maths is plain row-major ``ravel``.
A spectrum is stored framewise as a ``(frames, h, w)`` array, so its
length ``m`` is ``frames * h * w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OCTANARY_VALUES = np.array(
    [
        np.sqrt(2) / 2,
        -np.sqrt(2) / 2,
        1j * np.sqrt(2) / 2,
        -1j * np.sqrt(2) / 2,
        np.sqrt(3),
        -np.sqrt(3),
        1j * np.sqrt(3),
        -1j * np.sqrt(3),
    ],
    dtype=np.complex128,
)


class DimensionError(ValueError):
    """Raised when an array does not match the operator geometry."""


def as_image(x) -> np.ndarray:
    img = np.asarray(x, dtype=np.complex128)
    if img.ndim != 2:
        raise DimensionError(f"expected a 2-D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite entries")
    return img


def dft2_unitary(img: np.ndarray) -> np.ndarray:
    """2-D DFT scaled by ``1/sqrt(n)`` over the last two axes."""
    return np.fft.fft2(img, norm="ortho")


def idft2_unitary(spec: np.ndarray) -> np.ndarray:
    return np.fft.ifft2(spec, norm="ortho")


def octanary_masks(shape: tuple[int, int], K: int, seed: int) -> np.ndarray:
    """Draw ``K`` masks with i.i.d. entries uniform over the eight octanary values."""
    if K < 1:
        raise ValueError("K must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(OCTANARY_VALUES), size=(K, *shape))
    return OCTANARY_VALUES[idx]


@dataclass
class CdpOperator:
    """Coded diffraction patterns: frame ``k`` is ``F(w_k * u)``."""

    masks: np.ndarray

    def __post_init__(self):
        self.masks = np.asarray(self.masks, dtype=np.complex128)
        if self.masks.ndim == 2:
            self.masks = self.masks[None]
        if self.masks.ndim != 3 or self.masks.shape[0] < 1:
            raise DimensionError("masks must have shape (K, n1, n2)")

    @classmethod
    def octanary(cls, shape, K: int, seed: int) -> "CdpOperator":
        return cls(octanary_masks(tuple(shape), K, seed))

    @property
    def K(self) -> int:
        return self.masks.shape[0]

    @property
    def image_shape(self) -> tuple[int, int]:
        return self.masks.shape[1:]

    @property
    def spectrum_shape(self) -> tuple[int, int, int]:
        return self.masks.shape

    @property
    def m(self) -> int:
        return self.masks.size

    def forward(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        if u.shape != self.image_shape:
            raise DimensionError(f"image shape {u.shape} != {self.image_shape}")
        return dft2_unitary(self.masks * u[None])

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        z = _check_spectrum(z, self.spectrum_shape)
        return np.sum(np.conj(self.masks) * idft2_unitary(z), axis=0)

    def ata_diagonal(self) -> np.ndarray:
        return np.sum(np.abs(self.masks) ** 2, axis=0)


@dataclass
class PtychoOperator:
    """Ptychographic scan: frame ``j`` is ``F(probe * window_j(u))``.

    ``positions`` are the top-left ``(row, col)`` offsets of each frame.
    With ``wrap=True`` windows are taken periodically; otherwise positions
    are clipped so every window lies inside the image.
    """

    probe: np.ndarray
    positions: list
    image_shape: tuple[int, int]
    wrap: bool = True
    _rows: np.ndarray = field(init=False, repr=False)
    _cols: np.ndarray = field(init=False, repr=False)
    _diag: np.ndarray | None = field(init=False, repr=False, default=None)

    def __post_init__(self):
        self.probe = np.asarray(self.probe, dtype=np.complex128)
        if self.probe.ndim != 2 or self.probe.shape[0] != self.probe.shape[1]:
            raise DimensionError("probe must be a square 2-D array")
        n1, n2 = self.image_shape = tuple(int(s) for s in self.image_shape)
        s = self.probe.shape[0]
        if not self.wrap and (s > n1 or s > n2):
            raise DimensionError("frame larger than image in non-wrapping mode")
        pos = np.asarray(self.positions, dtype=np.int64).reshape(-1, 2)
        if len(pos) == 0:
            raise DimensionError("at least one scan position is required")
        if self.wrap:
            pos = pos % np.array([n1, n2])
        else:
            pos = np.clip(pos, 0, np.array([n1 - s, n2 - s]))
        self.positions = [tuple(int(v) for v in p) for p in pos]
        ar = np.arange(s)
        # (frames, s, 1) and (frames, 1, s) index grids for fancy indexing
        self._rows = ((pos[:, 0, None] + ar[None]) % n1)[:, :, None]
        self._cols = ((pos[:, 1, None] + ar[None]) % n2)[:, None, :]

    @classmethod
    def grid(cls, probe, image_shape, n_scan: int | tuple[int, int], stride: int,
             wrap: bool = True) -> "PtychoOperator":
        ns = (n_scan, n_scan) if np.isscalar(n_scan) else tuple(n_scan)
        pos = [(i * stride, j * stride) for i in range(ns[0]) for j in range(ns[1])]
        return cls(probe, pos, image_shape, wrap=wrap)

    @property
    def frame_size(self) -> int:
        return self.probe.shape[0]

    @property
    def spectrum_shape(self) -> tuple[int, int, int]:
        s = self.frame_size
        return (len(self.positions), s, s)

    @property
    def m(self) -> int:
        return int(np.prod(self.spectrum_shape))

    def frames(self, u: np.ndarray) -> np.ndarray:
        return u[self._rows, self._cols]

    def forward(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        if u.shape != self.image_shape:
            raise DimensionError(f"image shape {u.shape} != {self.image_shape}")
        return dft2_unitary(self.probe[None] * self.frames(u))

    def _scatter(self, frames: np.ndarray) -> np.ndarray:
        n = self.image_shape[0] * self.image_shape[1]
        flat = np.broadcast_to(self._rows * self.image_shape[1] + self._cols,
                               frames.shape).ravel()
        out = np.bincount(flat, weights=frames.real.ravel(), minlength=n)
        if np.iscomplexobj(frames):
            out = out + 1j * np.bincount(flat, weights=frames.imag.ravel(), minlength=n)
        return out.reshape(self.image_shape)

    def adjoint(self, z: np.ndarray) -> np.ndarray:
        z = _check_spectrum(z, self.spectrum_shape)
        return self._scatter(np.conj(self.probe)[None] * idft2_unitary(z))

    def ata_diagonal(self) -> np.ndarray:
        if self._diag is None:
            weight = np.broadcast_to(np.abs(self.probe) ** 2, self.spectrum_shape)
            self._diag = self._scatter(weight)
        return self._diag


def _check_spectrum(z, shape) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != shape:
        if z.size != int(np.prod(shape)):
            raise DimensionError(f"spectrum of size {z.size} does not match m={np.prod(shape)}")
        z = z.reshape(shape)
    return z


def zone_plate_probe(size: int, radius: float | None = None, curvature: float = 0.0,
                     ) -> np.ndarray:
    """Circular aperture of ``radius`` pixels with quadratic phase ``curvature * r^2``.

    ``curvature=0`` gives the flat disk.
    """
    radius = size / 4 if radius is None else radius
    c = (size - 1) / 2
    yy, xx = np.mgrid[:size, :size]
    r2 = (yy - c) ** 2 + (xx - c) ** 2
    aperture = (r2 <= radius ** 2).astype(np.float64)
    return aperture * np.exp(1j * curvature * r2)


def make_operator(kind: str, shape, seed: int = 0, *, K: int = 2, frame: int = 64,
                  stride: int = 16, n_scan=None, probe=None, probe_radius=None,
                  probe_curvature: float = 0.05, wrap: bool = True):
    """Build a CDP or ptychography operator from geometry parameters."""
    shape = tuple(int(s) for s in shape)
    if kind == "cdp":
        return CdpOperator.octanary(shape, K, seed)
    if kind == "ptycho":
        if probe is None:
            probe = zone_plate_probe(frame, probe_radius, probe_curvature)
        if n_scan is None:
            n_scan = (max(1, -(-shape[0] // stride)), max(1, -(-shape[1] // stride)))
        return PtychoOperator.grid(probe, shape, n_scan, stride, wrap=wrap)
    raise ValueError(f"unknown problem kind {kind!r}")
