"""Symmetric plug-and-play ADMM for noisy phase retrieval."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .denoisers import DenoiserSpec, denoise
from .gls import COMPLEX_PLANE, REAL_PLANE, GlsState, gls_solve, project
from .noise import PhaselessData, fidelity

log = logging.getLogger(__name__)

SNR_CAP_DB = 300.0
DIVERGENCE_LIMIT = 1e6


class SolverDivergence(RuntimeError):
    def __init__(self, message: str, history: "RunHistory"):
        super().__init__(message)
        self.history = history


def snr_db(candidate, reference) -> float:
    """SNR in dB after the best unit-modulus alignment of ``candidate``."""
    cand = np.asarray(candidate, dtype=np.complex128)
    ref = np.asarray(reference, dtype=np.complex128)
    if cand.shape != ref.shape:
        raise ValueError("shape mismatch")
    rn = np.linalg.norm(ref)
    if rn == 0:
        raise ValueError("reference image is zero")
    inner = np.vdot(ref, cand)  # sum cand * conj(ref)
    c = np.conj(inner) / abs(inner) if abs(inner) > 0 else 1.0
    err = np.linalg.norm(c * cand - ref) / rn
    if err == 0:
        return SNR_CAP_DB
    return float(min(SNR_CAP_DB, -20.0 * np.log10(err)))


@dataclass
class PnpConfig:
    lam: float = 0.0
    r: float = 1.0
    eta: float = 1.0
    T: int = 50
    inner_iters: int = 5
    constraint: str = COMPLEX_PLANE
    denoiser: DenoiserSpec = field(default_factory=DenoiserSpec)
    symmetric: bool = True
    seed: int = 0
    init: str = "backprojection"

    def __post_init__(self):
        if self.lam < 0 or self.r <= 0 or self.eta <= 0 or self.T < 1:
            raise ValueError("need lam >= 0, r > 0, eta > 0, T >= 1")
        if self.constraint not in (COMPLEX_PLANE, REAL_PLANE):
            raise ValueError(f"unknown constraint {self.constraint!r}")
        if self.init not in ("backprojection", "random"):
            raise ValueError(f"unknown initializer {self.init!r}")

    @property
    def sigma(self) -> float:
        return self.lam / self.r

    def denoiser_spec(self) -> DenoiserSpec:
        return self.denoiser.with_sigma(self.sigma)


@dataclass
class PnpState:
    u: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    inner: GlsState | None = None

    def copy(self) -> "PnpState":
        inner = None if self.inner is None else self.inner.copy()
        return PnpState(self.u.copy(), self.v.copy(), self.lam.copy(), inner)


@dataclass
class IterRecord:
    k: int
    rel_err: float
    snr_db: float
    fidelity: float
    pnp_residual: float


@dataclass
class RunHistory:
    records: list = field(default_factory=list)
    state: PnpState | None = None

    COLUMNS = ("iter", "rel_err", "snr_db", "fidelity", "pnp_residual")

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> np.ndarray:
        attr = "k" if name == "iter" else name
        return np.array([getattr(rec, attr) for rec in self.records])

    def to_csv(self) -> str:
        lines = [",".join(self.COLUMNS)]
        for rec in self.records:
            lines.append(csv_row(rec))
        return "\n".join(lines) + "\n"


def csv_row(rec: IterRecord) -> str:
    return (f"{rec.k},{rec.rel_err!r},{rec.snr_db!r},{rec.fidelity!r},"
            f"{rec.pnp_residual!r}")


def initial_guess(op, data: PhaselessData, cfg: PnpConfig) -> np.ndarray:
    """Backprojection of ``sqrt(f)`` with zero phase, or a seeded random image."""
    if cfg.init == "random":
        rng = np.random.default_rng(cfg.seed)
        shape = op.image_shape
        u = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        scale = np.sqrt(np.sum(np.maximum(data.f, 0)) / np.sum(op.ata_diagonal()))
        u *= scale / np.sqrt(2.0)
    else:
        amp = np.sqrt(np.maximum(data.f, 0)).reshape(op.spectrum_shape)
        diag = op.ata_diagonal()
        back = op.adjoint(amp.astype(np.complex128))
        u = np.where(diag > 0, back / np.where(diag > 0, diag, 1), 0)
    return project(np.asarray(u, dtype=np.complex128), cfg.constraint)


def fidelity_of(op, u, data: PhaselessData) -> float:
    h = np.abs(op.forward(u)) ** 2
    if data.kind == "poisson":
        # guard log(0) where counts are positive but the model predicts nothing
        h = np.maximum(h, np.finfo(float).tiny)
    return fidelity(h, data)


class PnpSolver:
    """Step-wise driver; ``run`` iterates ``step`` and records a history."""

    def __init__(self, op, data: PhaselessData, cfg: PnpConfig, ground_truth=None,
                 u0=None, denoiser_fn=None):
        self.op, self.data, self.cfg = op, data, cfg
        self.ground_truth = ground_truth
        self.spec = cfg.denoiser_spec()
        self.denoiser_fn = denoiser_fn or denoise
        u = initial_guess(op, data, cfg) if u0 is None else np.asarray(u0, np.complex128)
        self.state = PnpState(u.copy(), u.copy(), np.zeros_like(u))
        self.history = RunHistory(state=self.state)
        self.k = 0

    def step(self) -> IterRecord:
        cfg, st = self.cfg, self.state
        u_prev = st.u
        g = st.v - st.lam / cfg.r
        st.inner = gls_solve(self.op, self.data, g, cfg.r, cfg.eta, cfg.constraint,
                             cfg.inner_iters, warm=st.inner)
        u = st.inner.u.copy()
        lam_half = st.lam + cfg.r * (u - st.v) if cfg.symmetric else st.lam
        v = self.denoiser_fn(self.spec, u + lam_half / cfg.r)
        st.lam = lam_half + cfg.r * (u - v)
        st.u, st.v = u, v
        self.k += 1

        un = np.linalg.norm(u)
        rel = float(np.linalg.norm(u - u_prev) / un) if un > 0 else float("inf")
        snr = snr_db(v, self.ground_truth) if self.ground_truth is not None else float("nan")
        rec = IterRecord(self.k, rel, snr, fidelity_of(self.op, u, self.data),
                         float(np.linalg.norm(u - v)))
        self.history.records.append(rec)
        return rec

    def run(self, callback=None) -> tuple[np.ndarray, RunHistory]:
        for _ in range(self.cfg.T):
            rec = self.step()
            if callback is not None:
                callback(rec)
            if not np.isfinite(rec.rel_err) or rec.rel_err > DIVERGENCE_LIMIT:
                raise SolverDivergence(
                    f"relative change {rec.rel_err:.3g} at iteration {rec.k}", self.history)
        return self.state.v.copy(), self.history


def pnp_run(op, data: PhaselessData, cfg: PnpConfig, ground_truth=None, u0=None,
            callback=None) -> tuple[np.ndarray, RunHistory]:
    """Run ``cfg.T`` outer iterations; returns the last denoised iterate and history."""
    return PnpSolver(op, data, cfg, ground_truth, u0=u0).run(callback)


def fixed_point_residual(state: PnpState, op, data: PhaselessData, cfg: PnpConfig,
                         inner_iters: int = 50) -> tuple[float, float, float]:
    """Relative residuals of the three fixed-point equations at ``state``.

    The generalized least-squares prox is evaluated by warm-started inner
    sweeps, so the first entry carries the inner solver's accuracy.
    """
    u, v, lam = state.u, state.v, state.lam
    warm = state.inner.copy() if state.inner is not None else None
    prox_u = gls_solve(op, data, v - lam / cfg.r, cfg.r, cfg.eta, cfg.constraint,
                       inner_iters, warm=warm).u
    den_v = denoise(cfg.denoiser_spec(), u + lam / cfg.r)

    def rel(a, b):
        n = np.linalg.norm(b)
        d = np.linalg.norm(a - b)
        return float(d / n) if n > 0 else float(d)

    return rel(u, prox_u), rel(v, den_v), rel(u, v)
