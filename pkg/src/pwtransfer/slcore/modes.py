"""Sampled eigenfunctions u_n with their companion U_n (dU_n/dx = w u_n)."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import InputError, NormalizationError, StiffnessError
from ..profiles import Parity
from .coefficients import SLCoefficients
from .spectrum import SLSpectrum

__all__ = ["EigenMode", "eigenfunction", "eigenmodes", "parity_of_samples", "count_sign_changes",
           "gram_matrix"]


@dataclass(frozen=True, eq=False)
class EigenMode:
    """One normalized mode: int w u^2 dx = 1, u(-L/2 + 0) > 0, U(-L/2) = 0."""

    n: int
    lam: float
    x: np.ndarray
    u_samples: np.ndarray
    U_samples: np.ndarray
    parity: Parity
    parity_defect: float
    zero_count: int
    _u: Optional[Callable] = field(default=None, repr=False)
    _U: Optional[Callable] = field(default=None, repr=False)

    @property
    def energy(self) -> float:
        return float(np.sqrt(max(self.lam, 0.0)))

    def u(self, x) -> np.ndarray:
        """u_n at arbitrary points in [-L/2, L/2]."""
        if self._u is None:
            return np.interp(x, self.x, self.u_samples)
        return self._u(np.asarray(x, dtype=float))

    def U(self, x) -> np.ndarray:
        if self._U is None:
            return np.interp(x, self.x, self.U_samples)
        return self._U(np.asarray(x, dtype=float))


def parity_of_samples(x: np.ndarray, f: np.ndarray, tol: float) -> tuple[Parity, float]:
    """Parity of samples on a grid symmetric under x -> -x; defect relative to max|f|."""
    scale = float(np.max(np.abs(f)))
    if scale == 0.0:
        return Parity.EVEN, 0.0
    g = f[::-1]
    even = float(np.max(np.abs(f - g))) / scale
    odd = float(np.max(np.abs(f + g))) / scale
    if even <= tol and even <= odd:
        return Parity.EVEN, even
    if odd <= tol:
        return Parity.ODD, odd
    return Parity.NEITHER, min(even, odd)


def count_sign_changes(f: np.ndarray, rel_floor: float = 1e-10) -> int:
    """Sign changes of f, ignoring samples within rel_floor * max|f| of zero."""
    scale = float(np.max(np.abs(f)))
    s = np.sign(np.where(np.abs(f) <= rel_floor * scale, 0.0, f))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def eigenfunction(coeffs: SLCoefficients, lam: float, n: int, eps_parity: float = 1e-6,
                  rtol: float = 1e-12) -> EigenMode:
    """Integrate (u, p u', U, int w u^2) at lambda from -L/2 and normalize.

    U and the norm are integrated as extra ODE components, i.e. by adaptive
    quadrature of w u and w u^2 along the same dense solution.
    """
    if coeffs.irregular_endpoint:
        raise InputError("eigenfunction integration needs a regular problem")
    L = coeffs.L
    w, p = coeffs.w, coeffs.p
    has_q = coeffs.q is not None

    def rhs(x, s):
        xx = np.array(x)
        W = float(w(xx))
        Q = float(coeffs.q(xx)) if has_q else 0.0
        u, flux = s[0], s[1]
        return [flux / float(p(xx)), -(lam * W + Q) * u, W * u, W * u * u]

    sol = solve_ivp(rhs, (-0.5 * L, 0.5 * L), [1.0, 0.0, 0.0, 0.0], method="DOP853",
                    rtol=rtol, atol=rtol * 1e-3, dense_output=True)
    if sol.status != 0:
        raise StiffnessError(f"eigenfunction integration failed: {sol.message}")
    norm2 = float(sol.y[3, -1])
    if not norm2 >= 1e-14:
        raise NormalizationError(f"int w u^2 = {norm2:g}: spurious mode")
    c = 1.0 / np.sqrt(norm2)
    dense = sol.sol
    x = coeffs.geometry.grid
    vals = dense(x)
    u = c * vals[0]
    U = c * vals[2]
    fine = np.linspace(-0.5 * L, 0.5 * L, max(x.size, 40 * (n + 1)) | 1)
    zeros = count_sign_changes(dense(fine)[0])
    par, defect = parity_of_samples(x, u, eps_parity)
    return EigenMode(n=n, lam=float(lam), x=x, u_samples=u, U_samples=U, parity=par,
                     parity_defect=defect, zero_count=zeros,
                     _u=lambda z: c * dense(z)[0], _U=lambda z: c * dense(z)[2])


def eigenmodes(coeffs: SLCoefficients, spectrum: SLSpectrum, eps_parity: float = 1e-6) -> list[EigenMode]:
    return [eigenfunction(coeffs, lam, n, eps_parity) for n, lam in enumerate(spectrum.lambdas)]


def gram_matrix(modes: list[EigenMode], w_samples: np.ndarray) -> np.ndarray:
    """G_nm = int w u_n u_m on the grid (composite Simpson)."""
    from scipy.integrate import simpson

    x = modes[0].x
    U = np.array([m.u_samples for m in modes])
    return simpson(w_samples * U[:, None, :] * U[None, :, :], x=x, axis=-1)
