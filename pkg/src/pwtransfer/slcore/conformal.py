"""Closed-form modes when K is constant and q = 0.

The operator reduces to -v0^2 d^2/dy^2 on [-L/2, L/2], so
u_n = sqrt(2 v0 / (L K)) cos(n pi (L + 2y) / 2L) and E_n = pi n v0 / L.
"""
from __future__ import annotations

import numpy as np

from ..errors import InputError
from ..profiles import Constant, TLLModel, coordinate_map
from .modes import EigenMode, count_sign_changes, parity_of_samples
from .spectrum import SLSpectrum

__all__ = ["closed_form_conformal", "is_conformal"]


def is_conformal(model: TLLModel) -> bool:
    return isinstance(model.K, Constant) and model.q is None


def closed_form_conformal(model: TLLModel, n_max: int, eps_parity: float = 1e-6):
    """(spectrum, modes) of a constant-K massless model for any v with finite v0."""
    if not is_conformal(model):
        raise InputError("closed_form_conformal needs constant K and q = 0")
    g = model.geometry
    L = g.L
    K = float(model.K.value)
    cmap = coordinate_map(model.v, geometry=g)
    v0 = cmap.v0
    if v0 is None:
        cmap.y_of_x(0.0)
    n = np.arange(n_max + 1)
    lam = (np.pi * v0 * n / L) ** 2
    amp = np.where(n == 0, np.sqrt(v0 / (L * K)), np.sqrt(2 * v0 / (L * K)))

    def phase(x):
        return np.pi * (L + 2.0 * cmap.y_of_x(np.asarray(x, dtype=float))) / (2 * L)

    def u_of(k):
        return lambda x: amp[k] * np.cos(k * phase(x))

    def U_of(k):
        if k == 0:
            return lambda x: amp[0] * (K / v0) * (cmap.y_of_x(np.asarray(x, dtype=float)) + 0.5 * L)
        return lambda x: amp[k] * (K / v0) * (L / (k * np.pi)) * np.sin(k * phase(x))

    x = g.grid
    th = phase(x)
    modes = []
    for k in range(n_max + 1):
        us = amp[k] * np.cos(k * th)
        Us = U_of(k)(x)
        par, defect = parity_of_samples(x, us, eps_parity)
        modes.append(EigenMode(n=k, lam=float(lam[k]), x=x, u_samples=us, U_samples=Us, parity=par,
                               parity_defect=defect, zero_count=k, _u=u_of(k), _U=U_of(k)))
    spec = SLSpectrum(lambdas=lam, method="closed_form", estimated_error=np.zeros_like(lam),
                      metadata={"family": "conformal", "v0": v0, "K": K, "L": L})
    return spec, modes
