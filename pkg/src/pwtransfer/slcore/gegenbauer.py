"""Closed forms for the square-root velocity family.

v(x) = v sqrt(1 - s^2) and K(x) = K (1 - s^2)^alpha with s = 2x/L give the
weight w = (K/v) (1 - s^2)^(alpha - 1/2) and p = vK (1 - s^2)^(alpha + 1/2).
The eigenfunctions are symmetric Jacobi polynomials P_n^(a, a)(s) with
a = alpha - 1/2 (Gegenbauer C_n^alpha for alpha != 0, Chebyshev T_n at
alpha = 0) and lambda_n = (2v/L)^2 n (n + 2 alpha).  The fine-tuned mass
q = -(2 v alpha / L)^2 w shifts this to (2v/L)^2 (n + alpha)^2.
"""
from __future__ import annotations

import numpy as np
from scipy import special

from ..errors import InputError
from ..profiles import Parity, SystemGeometry
from .modes import EigenMode, count_sign_changes, parity_of_samples
from .spectrum import SLSpectrum

__all__ = ["closed_form_gegenbauer", "symmetric_jacobi", "gegenbauer_lambdas"]


def symmetric_jacobi(n_max: int, a: float, s) -> np.ndarray:
    """P_k^(a, a)(s) for k = 0..n_max by the three-term recurrence; shape (n_max+1, *s.shape)."""
    s = np.asarray(s, dtype=float)
    out = np.empty((n_max + 1,) + s.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = (a + 1.0) * s
    for k in range(2, n_max + 1):
        c = 2 * k + 2 * a
        out[k] = ((c - 1) * c * (c - 2) * s * out[k - 1]
                  - 2 * (k + a - 1) ** 2 * c * out[k - 2]) / (2 * k * (k + 2 * a) * (c - 2))
    return out


def gegenbauer_lambdas(alpha: float, v: float, L: float, n_max: int, massive_shift: bool = False) -> np.ndarray:
    n = np.arange(n_max + 1, dtype=float)
    k2 = (2.0 * v / L) ** 2
    return k2 * (n + alpha) ** 2 if massive_shift else k2 * n * (n + 2 * alpha)


def _incomplete_weight(s: np.ndarray, b: float) -> np.ndarray:
    """int_{-1}^{s} (1 - t^2)^b dt for b > -1."""
    z = np.clip(0.5 * (s + 1.0), 0.0, 1.0)
    return 2.0 ** (2 * b + 1) * special.beta(b + 1, b + 1) * special.betainc(b + 1, b + 1, z)


def closed_form_gegenbauer(alpha: float, v: float = 1.0, K: float = 1.0, L: float = 1.0, n_max: int = 10,
                           massive_shift: bool = False, geometry: SystemGeometry | None = None,
                           eps_parity: float = 1e-6) -> tuple[SLSpectrum, list[EigenMode]]:
    """Exact spectrum and normalized modes of the square-root/power family."""
    if not alpha > -0.5:
        raise InputError("alpha must exceed -1/2")
    if geometry is None:
        geometry = SystemGeometry(L, 1001)
    if geometry.L != L:
        raise InputError("geometry.L differs from L")
    lam = gegenbauer_lambdas(alpha, v, L, n_max, massive_shift)
    a = alpha - 0.5
    c_shift = (2.0 * v * alpha / L) ** 2 if massive_shift else 0.0
    # Gauss-Jacobi with the endpoint exponent of the weight normalizes exactly
    nodes, weights = special.roots_jacobi(n_max + 2, a, a)
    P_nodes = symmetric_jacobi(n_max, a, nodes)
    norms2 = (K / v) * 0.5 * L * np.sum(weights * P_nodes ** 2, axis=1)
    coef = (-1.0) ** np.arange(n_max + 1) / np.sqrt(norms2)  # u_n(-L/2) > 0

    x = geometry.grid
    s_grid = 2.0 * x / L

    def u_all(xx):
        return coef[:, None] * symmetric_jacobi(n_max, a, 2.0 * np.ravel(xx) / L)

    def U_all(xx):
        """U_n = -p u_n' / (lambda_n - c), and the incomplete weight integral for n = 0."""
        ss = 2.0 * np.ravel(np.asarray(xx, dtype=float)) / L
        out = np.zeros((n_max + 1, ss.size))
        one_minus = np.clip((1 - ss) * (1 + ss), 0.0, None)
        if n_max >= 1:
            # d/ds P_k^(a,a) = (k + 2a + 1)/2 P_{k-1}^(a+1,a+1)
            dP = symmetric_jacobi(n_max - 1, a + 1, ss)
            k = np.arange(1, n_max + 1)
            du = coef[1:, None] * ((k + 2 * a + 1) / 2.0)[:, None] * dP * (2.0 / L)
            p = v * K * one_minus ** (alpha + 0.5)
            out[1:] = -p * du / (lam[1:] - c_shift)[:, None]
        # n = 0: direct integral of w u_0 (lambda_0 - c vanishes in the massive case)
        out[0] = coef[0] * (K / v) * 0.5 * L * _incomplete_weight(ss, a)
        return out

    u_grid = u_all(x)
    U_grid = U_all(x)
    modes = []
    for n in range(n_max + 1):
        par, defect = parity_of_samples(x, u_grid[n], eps_parity)
        fine = np.linspace(-0.5 * L, 0.5 * L, max(x.size, 40 * (n + 1)) | 1)
        zc = count_sign_changes(u_all(fine)[n])
        modes.append(EigenMode(n=n, lam=float(lam[n]), x=x, u_samples=u_grid[n], U_samples=U_grid[n],
                               parity=par, parity_defect=defect, zero_count=zc,
                               _u=(lambda z, n=n: u_all(z)[n].reshape(np.shape(z))),
                               _U=(lambda z, n=n: U_all(z)[n].reshape(np.shape(z)))))
    spec = SLSpectrum(lambdas=lam, method="closed_form", estimated_error=np.zeros_like(lam),
                      metadata={"alpha": alpha, "v": v, "K": K, "L": L, "massive_shift": massive_shift,
                                "v0": 2.0 * v / np.pi})
    return spec, modes
