"""Sturm-Liouville coefficients of an inhomogeneous TLL and their Liouville normal form.

The eigenproblem is  -(p u')' - q u = lambda w u  on [-L/2, L/2] with
w = K/v, p = vK and Neumann ends p u' = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import interpolate, optimize

from ..errors import DifferentiationNoise, InconsistentInput, InputError, PositivityError
from ..profiles import (Constant, CoordinateMap, Derived, Parity, Profile, SystemGeometry, TLLModel,
                        coordinate_map, interior)

__all__ = ["SLCoefficients", "LiouvilleForm", "assemble_coefficients", "liouville_transform", "regularize"]


@dataclass(frozen=True, eq=False)
class SLCoefficients:
    """Weight ``w``, stiffness ``p`` and potential ``q`` with Neumann ends.

    ``v`` and ``K`` are carried alongside so that solvers can work in the
    conformal coordinate y without re-deriving them from w and p.
    """

    geometry: SystemGeometry
    w: Profile
    p: Profile
    v: Profile
    K: Profile
    q: Optional[Profile] = None
    bc: str = "neumann"
    model: Optional[TLLModel] = field(default=None, repr=False)

    @property
    def L(self) -> float:
        return self.geometry.L

    def q_values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.q is None:
            return np.zeros_like(x)
        return self.q(x)

    @property
    def irregular_endpoint(self) -> bool:
        """True when w or p vanishes or blows up at x = +-L/2."""
        if any(f.endpoint_zero() or f.endpoint_blowup() for f in (self.v, self.K)):
            return True
        ends = np.array([-0.5 * self.L, 0.5 * self.L])
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.concatenate([self.w(ends), self.p(ends), self.q_values(ends)])
        w_p = vals[:4]
        return not (np.all(np.isfinite(vals)) and np.all(w_p > 0))

    def coordinate_map(self, tol: float = 1e-12) -> CoordinateMap:
        return coordinate_map(self.v, tol=tol, geometry=self.geometry)

    def even(self) -> bool:
        """Structural evenness of v, K and q (None counts as unknown -> False)."""
        profs = [self.v, self.K] + ([self.q] if self.q is not None else [])
        return all(f.structural_parity() == Parity.EVEN for f in profs)

    @classmethod
    def from_wpq(cls, geometry: SystemGeometry, w: Profile, p: Profile, q: Optional[Profile] = None):
        par = Parity.EVEN if (w.structural_parity() == Parity.EVEN
                              and p.structural_parity() == Parity.EVEN) else None
        v = Derived(fn=lambda x: np.sqrt(p(x) / w(x)), L=geometry.L, parity=par)
        K = Derived(fn=lambda x: np.sqrt(w(x) * p(x)), L=geometry.L, parity=par)
        return cls(geometry=geometry, w=w, p=p, v=v, K=K, q=q)


def _combined_parity(*profiles) -> Optional[Parity]:
    if all(f.structural_parity() == Parity.EVEN for f in profiles):
        return Parity.EVEN
    return None


def assemble_coefficients(model: TLLModel) -> SLCoefficients:
    """w = K/v, p = vK, q copied or derived from the mass profile."""
    v, K, L = model.v, model.K, model.geometry.L
    par = _combined_parity(v, K)
    ends_zero = v.endpoint_zero() or K.endpoint_zero()
    ends_blow = v.endpoint_blowup() or K.endpoint_blowup()
    w = Derived(fn=lambda x: K(x) / v(x), L=L, parity=par, zero_at_ends=ends_zero, blowup_at_ends=ends_blow)
    p = Derived(fn=lambda x: v(x) * K(x), L=L, parity=par, zero_at_ends=ends_zero, blowup_at_ends=ends_blow)
    q = None
    if model.mass is not None:
        v0 = coordinate_map(model).v0
        M = model.mass
        q = Derived(fn=lambda x: -(v0 ** 2) * M(x) ** 2 * v(x), L=L, parity=_combined_parity(v, M))
    elif model.q is not None:
        q = model.q
    x = interior(model.geometry)
    wv, pv = w(x), p(x)
    if np.any(~(wv > 0)) or np.any(~(pv > 0)):
        raise PositivityError("w and p must be strictly positive on the interior grid")
    vv, kv = v(x), K(x)
    if (np.max(np.abs(wv * pv / kv ** 2 - 1)) > 1e-12
            or np.max(np.abs(pv / wv / vv ** 2 - 1)) > 1e-12):
        raise InconsistentInput("w p = K^2 and p/w = v^2 violated")
    return SLCoefficients(geometry=model.geometry, w=w, p=p, v=v, K=K, q=q, model=model)


def _crossings(f, level: float, L: float, samples: int = 4001) -> tuple:
    """Points where f crosses ``level`` (bracketed on a fine grid, refined by brentq)."""
    x = np.linspace(-0.5 * L, 0.5 * L, samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = f(x) - level
    out = []
    for i in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0):
        out.append(optimize.brentq(lambda s: float(f(np.array(s))) - level, x[i], x[i + 1], xtol=1e-15))
    # a crossing inside the first or last sample interval (zero of f at the end)
    for a, b in ((x[0], x[1]), (x[-1], x[-2])):
        fa = float(f(np.array(a)))
        if not fa > level and float(f(np.array(b))) > level and not any(min(a, b) <= c <= max(a, b) for c in out):
            out.append(optimize.brentq(lambda s: float(f(np.array(s))) - level, a, b, xtol=1e-16))
    return tuple(sorted(out))


def regularize(coeffs: SLCoefficients, eps: float) -> SLCoefficients:
    """Replace v by max(v, eps * max v) and rebuild w, p (K and q untouched)."""
    if not 0 < eps < 1:
        raise InputError("regularization eps must lie in (0, 1)")
    x = coeffs.geometry.grid
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = coeffs.v(x)
    vmax = float(np.max(vals[np.isfinite(vals)]))
    floor = eps * vmax
    v0, K = coeffs.v, coeffs.K
    L = coeffs.L
    par = _combined_parity(v0, K)
    kinks = _crossings(v0, floor, L)
    v = Derived(fn=lambda s: np.maximum(v0(s), floor), L=L, parity=v0.structural_parity(), kinks=kinks)
    kz, kb = K.endpoint_zero(), K.endpoint_blowup()
    w = Derived(fn=lambda s: K(s) / v(s), L=L, parity=par, zero_at_ends=kz, blowup_at_ends=kb)
    p = Derived(fn=lambda s: v(s) * K(s), L=L, parity=par, zero_at_ends=kz, blowup_at_ends=kb)
    return SLCoefficients(geometry=coeffs.geometry, w=w, p=p, v=v, K=K, q=coeffs.q, model=coeffs.model)


# --------------------------------------------------------------------------- Liouville form


@dataclass(frozen=True, eq=False)
class LiouvilleForm:
    """Normal form  -v0^2 u_yy + qhat(y) u = lambda u  sampled on the uniform y-grid."""

    y: np.ndarray
    qhat: np.ndarray
    v0: float
    coordinate_map: CoordinateMap
    error_estimate: np.ndarray
    geometry: SystemGeometry

    @property
    def V(self) -> np.ndarray:
        return self.qhat / self.v0 ** 2

    @property
    def L(self) -> float:
        return self.geometry.L

    def finite(self) -> np.ndarray:
        return np.isfinite(self.qhat)

    def qhat_spline(self, k: int = 5):
        m = self.finite()
        return interpolate.make_interp_spline(self.y[m], self.qhat[m], k=k)

    def as_coefficients(self) -> SLCoefficients:
        """The y-space problem w = 1, p = v0^2, q = -qhat as SL coefficients."""
        spl = self.qhat_spline()
        L = self.L
        q = Derived(fn=lambda y: -spl(y), L=L)
        one = Constant(value=1.0, L=L)
        return SLCoefficients(geometry=self.geometry, w=one, p=Constant(value=self.v0 ** 2, L=L),
                              v=Constant(value=self.v0, L=L), K=Constant(value=self.v0, L=L), q=q)


def _one_sided_weights(points: int, at: int) -> np.ndarray:
    """Weights of the second derivative at node ``at`` from nodes 0..points-1 (unit spacing)."""
    k = np.arange(points, dtype=float) - at
    m = np.arange(points)
    A = k[None, :] ** m[:, None] / np.array([math.factorial(i) for i in m], dtype=float)[:, None]
    rhs = np.zeros(points)
    rhs[2] = 1.0
    return np.linalg.solve(A, rhs)


def _second_derivative(f: np.ndarray, h: float, edge: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """f'' and an error estimate on a uniform grid.

    Inside, centered differences at spacings h and 2h are Richardson-combined
    (their difference is the estimate).  The ``edge`` nodes at each end use
    8-point one-sided stencils, compared against 7-point ones.
    """
    n = f.size
    out = np.full(n, np.nan)
    err = np.full(n, np.nan)
    j = np.arange(edge, n - edge)
    d1 = (f[j + 1] - 2 * f[j] + f[j - 1]) / h ** 2
    d2 = (f[j + 2] - 2 * f[j] + f[j - 2]) / (4 * h ** 2)
    out[j] = (4 * d1 - d2) / 3
    err[j] = np.abs(d1 - d2) / 3
    for k in range(edge):
        for idx in (k + np.arange(8), n - 1 - k - np.arange(8)):
            hi = _one_sided_weights(8, 0) @ f[idx] / h ** 2
            lo = _one_sided_weights(7, 0) @ f[idx[:7]] / h ** 2
            out[idx[0]] = hi
            err[idx[0]] = abs(hi - lo)
    return out, err


def liouville_transform(coeffs: SLCoefficients, cmap: Optional[CoordinateMap] = None,
                        noise_tol: float = 1e-4) -> LiouvilleForm:
    """qhat(y) = -q/w + v0^2 (d^2 sqrt K / dy^2) / sqrt K on the uniform y-grid.

    The second derivative is Richardson-combined from spacings h and 2h in the
    interior and taken from one-sided 8-point stencils at the two outermost
    nodes; lower-order companions provide the error estimate.  At endpoints
    where K vanishes or blows up the samples are left as NaN.
    """
    g = coeffs.geometry
    if cmap is None:
        cmap = coeffs.coordinate_map()
    v0 = cmap.v0
    if v0 is None:
        cmap.y_of_x(0.0)  # raises DivergentV0
    y = g.grid
    h = g.h
    x = cmap.x_of_y(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sqrt(coeffs.K(x))
        curv, cerr = _second_derivative(s, h)
        qhat = v0 ** 2 * curv / s
        err = v0 ** 2 * cerr / np.abs(s)
        if coeffs.q is not None:
            qhat = qhat - coeffs.q_values(x) / coeffs.w(x)
    bad = ~np.isfinite(qhat) | ~(s > 0)
    irregular = coeffs.irregular_endpoint
    check = np.ones(y.size, bool)
    if irregular:
        # derivatives next to a singular end are not meaningful
        bad[[0, -1]] = True
        check[:4] = False
        check[-4:] = False
    qhat = np.where(bad, np.nan, qhat)
    err = np.where(bad, np.nan, err)
    scale = max(float(np.nanmax(np.abs(qhat[check]))) if np.any(check & ~bad) else 0.0,
                (np.pi * v0 / g.L) ** 2)
    worst = float(np.nanmax(err[check])) if np.any(check & ~bad) else 0.0
    if worst > noise_tol * scale:
        raise DifferentiationNoise(
            f"second-derivative error estimate {worst:.3g} exceeds {noise_tol:g} * max|qhat| = {noise_tol * scale:.3g}")
    return LiouvilleForm(y=y, qhat=qhat, v0=v0, coordinate_map=cmap, error_estimate=err, geometry=g)
