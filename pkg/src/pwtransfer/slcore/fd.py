"""Finite-volume reference solver for the Neumann SL problem.

The operator -(p u')' - q u = lambda w u is discretized cell-centred on a mesh
that is uniform in the conformal coordinate y(x).  In y the problem reads
-(P u_y)_y - Q u = lambda W u with P = v0 K, W = K / v0, Q = q v / v0, so the
mesh automatically concentrates where v is small and square-root endpoints
cost nothing extra.  After symmetric scaling by W^(-1/2) the matrix is
tridiagonal; its eigenvalues come from LAPACK (dpteqr, high relative
accuracy, for moderate sizes; Sturm-sequence bisection otherwise) and are
Romberg-extrapolated over successive mesh doublings.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.linalg.lapack import dpteqr

from ..errors import ConvergenceError, InputError
from ..profiles import CoordinateMap
from .coefficients import SLCoefficients, regularize
from .spectrum import SLSpectrum

__all__ = ["solve_spectrum_fd", "fd_matrix", "regularization_study", "RegularizationStudy"]

_DPTEQR_MAX = 4096


def fd_matrix(coeffs: SLCoefficients, cmap: CoordinateMap, cells: int):
    """Scaled tridiagonal (diag, offdiag), cell centres in x and the mass weights."""
    L = coeffs.L
    v0 = cmap.v0
    h = L / cells
    yc = -0.5 * L + h * (np.arange(cells) + 0.5)
    yf = -0.5 * L + h * np.arange(1, cells)
    xc = cmap.x_of_y(yc)
    xf = cmap.x_of_y(yf)
    P = v0 * coeffs.K(xf)
    W = coeffs.K(xc) / v0
    diag = np.zeros(cells)
    diag[:-1] += P
    diag[1:] += P
    diag /= h
    if coeffs.q is not None:
        diag -= coeffs.q_values(xc) * coeffs.v(xc) / v0 * h
    mass = W * h
    s = 1.0 / np.sqrt(mass)
    d = diag * s * s
    e = -(P / h) * s[:-1] * s[1:]
    return d, e, xc, mass


def _lowest(d: np.ndarray, e: np.ndarray, count: int, shift: float) -> np.ndarray:
    if d.size <= _DPTEQR_MAX:
        vals, _, _, info = dpteqr(d + shift, e, np.zeros((1, 1)), compute_z=0)
        if info == 0:
            return np.sort(vals)[:count] - shift
    return eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, count - 1),
                            tol=2 * np.finfo(float).tiny)


def _romberg(levels: list[np.ndarray]) -> list[list[np.ndarray]]:
    table = [[lv] for lv in levels]
    for i in range(1, len(levels)):
        for k in range(1, i + 1):
            r = 4.0 ** k
            prev = table[i][k - 1]
            table[i].append(prev + (prev - table[i - 1][k - 1]) / (r - 1))
    return table


def _default_cells(n_max: int) -> int:
    target = max(256, 8 * (n_max + 1))
    return int(2 ** np.ceil(np.log2(target)))


def solve_spectrum_fd(coeffs: SLCoefficients, n_max: int, grid_refinements: int = 4,
                      tol: Optional[float] = 1e-6, base_cells: Optional[int] = None,
                      cmap: Optional[CoordinateMap] = None) -> SLSpectrum:
    """Eigenvalues lambda_0..lambda_n_max by extrapolated finite volumes.

    ``grid_refinements`` meshes with base_cells * 2^k cells are solved and
    Romberg-combined (h^2 error expansion).  The error estimate is the change
    between the two most extrapolated entries; ``ConvergenceError`` is raised
    if it exceeds ``tol`` relative to max(lambda_n, (pi v0 / L)^2).
    """
    if n_max < 0:
        raise InputError("n_max must be >= 0")
    if grid_refinements < 2:
        raise InputError("grid_refinements must be >= 2")
    if cmap is None:
        cmap = coeffs.coordinate_map()
    if cmap.v0 is None:
        cmap.y_of_x(0.0)  # raises DivergentV0
    cells0 = base_cells or _default_cells(n_max)
    if cells0 < n_max + 8:
        raise InputError("base_cells must exceed n_max")
    v0, L = cmap.v0, coeffs.L
    scale = (np.pi * v0 / L) ** 2
    levels = []
    noise = 0.0
    for k in range(grid_refinements):
        d, e, xc, mass = fd_matrix(coeffs, cmap, cells0 * 2 ** k)
        # the scaled matrix is bounded below by min(d - |e_l| - |e_r|) (Gershgorin)
        off = np.zeros_like(d)
        off[:-1] += np.abs(e)
        off[1:] += np.abs(e)
        lower = float(np.min(d - off))
        shift = scale + max(0.0, -lower)
        levels.append(_lowest(d, e, n_max + 1, shift))
        # absolute eigenvalue noise of the tridiagonal solve, amplified by Romberg weights
        noise = 4 * np.finfo(float).eps * float(np.max(np.abs(d)) + 2 * np.max(np.abs(e)))
    table = _romberg(levels)
    best = table[-1][-1]
    est = np.abs(best - table[-1][-2]) + 1e-13 * (np.abs(best) + scale) + noise
    meta = {"cells": [cells0 * 2 ** k for k in range(grid_refinements)], "v0": v0, "mesh": "uniform_in_y",
            "raw_finest": levels[-1].tolist()}
    if tol is not None:
        rel = est / np.maximum(np.abs(best), scale)
        if np.any(rel > tol):
            worst = int(np.argmax(rel))
            raise ConvergenceError(
                f"FD error estimate {rel[worst]:.3g} at n = {worst} exceeds tol = {tol:g}")
    return SLSpectrum(lambdas=best, method="finite_difference", estimated_error=est, metadata=meta)


class RegularizationStudy:
    """Spectra of the v -> max(v, eps v_max) regularized problem for a sequence of eps."""

    def __init__(self, eps: Sequence[float], spectra: list[SLSpectrum]):
        self.eps = np.asarray(eps, dtype=float)
        self.spectra = spectra

    @property
    def lambdas(self) -> np.ndarray:
        """Array of shape (len(eps), n_max + 1)."""
        return np.array([s.lambdas for s in self.spectra])

    @property
    def finest(self) -> SLSpectrum:
        return self.spectra[int(np.argmin(self.eps))]

    def extrapolated(self) -> np.ndarray:
        """eps -> 0 limit from the two smallest eps, assuming an O(eps) leading error."""
        order = np.argsort(self.eps)
        e1, e2 = self.eps[order[0]], self.eps[order[1]]
        l1, l2 = self.spectra[order[0]].lambdas, self.spectra[order[1]].lambdas
        return l1 + (l1 - l2) * e1 / (e2 - e1)

    def increments(self) -> np.ndarray:
        """Successive changes |lambda(eps_k+1) - lambda(eps_k)| along decreasing eps."""
        order = np.argsort(self.eps)[::-1]
        lam = self.lambdas[order]
        return np.abs(np.diff(lam, axis=0))


def regularization_study(coeffs: SLCoefficients, n_max: int, eps: Sequence[float] = (1e-2, 1e-3, 1e-4),
                         **fd_kwargs) -> RegularizationStudy:
    """Solve the endpoint-regularized problem for each eps (no convergence check per eps)."""
    fd_kwargs.setdefault("tol", None)
    spectra = [solve_spectrum_fd(regularize(coeffs, e), n_max, **fd_kwargs) for e in eps]
    return RegularizationStudy(eps, spectra)
