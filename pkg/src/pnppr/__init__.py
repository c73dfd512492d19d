"""Plug-and-play ADMM phase retrieval from noisy phaseless measurements."""

from .denoisers import DenoiserSpec, denoise
from .gls import COMPLEX_PLANE, REAL_PLANE, GlsState, gls_solve, u_update
from .kernels import BACKEND
from .noise import NoiseModel, PhaselessData, corrupt_gaussian, corrupt_poisson, fidelity
from .operators import CdpOperator, PtychoOperator, dft2_unitary, idft2_unitary
from .pnp import PnpConfig, PnpState, RunHistory, fixed_point_residual, pnp_run, snr_db
from .prox import prox_gaussian, prox_poisson

__version__ = "0.1.0"
