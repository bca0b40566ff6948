"""Model-level forward solve: pick the closed form, shooting, or finite volumes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import interpolate
from scipy.linalg import eigh_tridiagonal

from ..errors import InputError
from ..profiles import Constant, PowerProfile, TLLModel
from .coefficients import SLCoefficients, assemble_coefficients, regularize
from .fd import fd_matrix, solve_spectrum_fd
from .conformal import closed_form_conformal, is_conformal
from .gegenbauer import closed_form_gegenbauer
from .modes import EigenMode, count_sign_changes, eigenmodes, parity_of_samples
from .shooting import solve_spectrum_shooting
from .spectrum import SLSpectrum

__all__ = ["GegenbauerMatch", "match_gegenbauer", "gegenbauer_model", "fd_modes", "solve_model"]


@dataclass(frozen=True)
class GegenbauerMatch:
    alpha: float
    v: float
    K: float
    massive: bool


def gegenbauer_model(alpha: float, v: float = 1.0, K: float = 1.0, L: float = 1.0, massive: bool = False,
                     grid_points: int = 1001) -> TLLModel:
    """Square-root v with power-law K; ``massive`` adds q = -(2 v alpha / L)^2 w."""
    from ..profiles import SystemGeometry

    geo = SystemGeometry(L, grid_points)
    vp = PowerProfile(amplitude=v, alpha=0.5, L=L)
    Kp = Constant(value=K, L=L) if alpha == 0 else PowerProfile(amplitude=K, alpha=alpha, L=L)
    q = None
    if massive and alpha != 0:
        q = PowerProfile(amplitude=-(2 * v * alpha / L) ** 2 * K / v, alpha=alpha - 0.5, L=L)
    return TLLModel(geo, vp, Kp, q=q)


def match_gegenbauer(model: TLLModel) -> Optional[GegenbauerMatch]:
    """Recognize the square-root family from the descriptors alone."""
    v, K, q = model.v, model.K, model.q
    L = model.geometry.L
    if model.mass is not None or not (isinstance(v, PowerProfile) and v.alpha == 0.5 and v.L == L):
        return None
    if isinstance(K, Constant):
        alpha, Kamp = 0.0, K.value
    elif isinstance(K, PowerProfile) and K.L == L:
        alpha, Kamp = K.alpha, K.amplitude
    else:
        return None
    if not alpha > -0.5:
        return None
    if q is None:
        return GegenbauerMatch(alpha, v.amplitude, Kamp, False)
    target = -(2 * v.amplitude * alpha / L) ** 2 * Kamp / v.amplitude
    if (isinstance(q, PowerProfile) and q.alpha == alpha - 0.5
            and abs(q.amplitude - target) <= 1e-12 * abs(target)):
        return GegenbauerMatch(alpha, v.amplitude, Kamp, True)
    return None


def fd_modes(coeffs: SLCoefficients, n_max: int, cells: int = 4096, eps_parity: float = 1e-6) -> list[EigenMode]:
    """Eigenvectors of the finite-volume matrix, interpolated to the shared grid.

    Used for irregular problems where shooting from the endpoint is unavailable.
    """
    cmap = coeffs.coordinate_map()
    d, e, xc, mass = fd_matrix(coeffs, cmap, cells)
    lam, vec = eigh_tridiagonal(d, e, select="i", select_range=(0, n_max))
    x = coeffs.geometry.grid
    L = coeffs.L
    modes = []
    xs = np.concatenate([[-0.5 * L], xc, [0.5 * L]])
    faces = cmap.x_of_y(-0.5 * L + (L / cells) * np.arange(cells + 1))
    for n in range(n_max + 1):
        uc = vec[:, n] / np.sqrt(mass)  # int w u^2 dx = sum mass u^2 = 1
        if uc[0] < 0:
            uc = -uc
        # Neumann ends: flat extrapolation to the boundary nodes
        us = np.concatenate([[uc[0]], uc, [uc[-1]]])
        spl = interpolate.make_interp_spline(xs, us, k=3)
        Uc = np.concatenate([[0.0], np.cumsum(mass * uc)])
        Uspl = interpolate.make_interp_spline(faces, Uc, k=1)
        u = spl(x)
        par, defect = parity_of_samples(x, u, eps_parity)
        modes.append(EigenMode(n=n, lam=float(lam[n]), x=x, u_samples=u, U_samples=Uspl(x), parity=par,
                               parity_defect=defect, zero_count=count_sign_changes(uc),
                               _u=lambda z, s=spl: s(z), _U=lambda z, s=Uspl: s(z)))
    return modes


def solve_model(model: TLLModel, n_max: int, method: str = "auto", eps_parity: float = 1e-6,
                regularization: Optional[float] = None, tol: float = 1e-6):
    """(spectrum, modes) for a model.

    ``auto`` uses a closed form for the square-root family and for constant K,
    shooting for regular problems and extrapolated finite volumes otherwise.
    """
    if method not in ("auto", "closed_form", "shooting", "finite_difference"):
        raise InputError(f"unknown method {method!r}")
    match = match_gegenbauer(model)
    if regularization is None and method in ("auto", "closed_form") and match is None and is_conformal(model):
        return closed_form_conformal(model, n_max, eps_parity=eps_parity)
    if method == "closed_form" or (method == "auto" and match is not None and regularization is None):
        if match is None:
            raise InputError("closed form only available for the square-root family and constant K")
        return closed_form_gegenbauer(match.alpha, match.v, match.K, model.geometry.L, n_max,
                                      massive_shift=match.massive, geometry=model.geometry,
                                      eps_parity=eps_parity)
    coeffs = assemble_coefficients(model)
    if regularization is not None:
        coeffs = regularize(coeffs, regularization)
    if method == "shooting" or (method == "auto" and not coeffs.irregular_endpoint):
        spec = solve_spectrum_shooting(coeffs, n_max)
        return spec, eigenmodes(coeffs, spec, eps_parity)
    spec = solve_spectrum_fd(coeffs, n_max, tol=tol)
    return spec, fd_modes(coeffs, n_max, eps_parity=eps_parity)
