"""Weyl asymptotics and Bohr-Sommerfeld diagnostics of the Liouville potential.

In normal form the problem is -u'' + V(y) u = Lambda u on [-L/2, L/2] with
Neumann ends, V = qhat / v0^2 and Lambda = lambda / v0^2.  The quantization
condition phi(Lambda_n) = pi n has no Maslov index; its first two terms are

    phi0 = int sqrt(Lambda - V) dy,   phi1 = (1/8) int V'' (Lambda - V)^(-3/2) dy,

and expanding in 1/Lambda gives

    pi n - L sqrt(Lambda_n) = -a1 L / (2 sqrt Lambda) - (a2 - Delta) L / (8 Lambda^(3/2)) + ...

with a1 = <V>, a2 = <V^2> and Delta = (V'(L/2) - V'(-L/2)) / L.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import simpson

from .errors import InputError, TurningPointError
from .slcore.coefficients import LiouvilleForm, SLCoefficients
from .slcore.spectrum import SLSpectrum

__all__ = ["WeylResult", "WKBReport", "weyl_check", "bs_phase", "moment_conditions", "free_residuals",
           "decay_exponent", "n0_estimate", "wkb_report"]


@dataclass(frozen=True)
class WeylResult:
    weyl_slope: float
    weyl_target: float
    relative_gap: float
    ratio_at_top: float
    ratio_gap: float


def weyl_check(coeffs: SLCoefficients, spectrum: SLSpectrum, min_modes: int = 50) -> WeylResult:
    """Compare dn/dE (fit over the top half) and n/E_n at the top with L / (pi v0)."""
    if len(spectrum) < min_modes:
        raise InputError(f"weyl_check needs at least {min_modes} modes")
    cmap = coeffs.coordinate_map()
    if cmap.v0 is None:
        cmap.y_of_x(0.0)
    target = coeffs.L / (np.pi * cmap.v0)
    E = spectrum.energies
    n = np.arange(E.size)
    top = n >= E.size // 2
    slope = float(np.polyfit(E[top], n[top], 1)[0])
    ratio = float(n[-1] / E[-1])
    return WeylResult(weyl_slope=slope, weyl_target=target, relative_gap=abs(slope - target) / target,
                      ratio_at_top=ratio, ratio_gap=abs(ratio - target) / target)


def _derivatives(V: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """V' and V'' by 4th-order centered differences, one-sided quartic fits at the ends."""
    n = V.size
    d1 = np.empty(n)
    d2 = np.empty(n)
    j = np.arange(2, n - 2)
    d1[j] = (-V[j + 2] + 8 * V[j + 1] - 8 * V[j - 1] + V[j - 2]) / (12 * h)
    d2[j] = (-V[j + 2] + 16 * V[j + 1] - 30 * V[j] + 16 * V[j - 1] - V[j - 2]) / (12 * h * h)
    t = h * np.arange(6)
    for idx, sign in (([0, 1], 1), ([n - 1, n - 2], -1)):
        for k in idx:
            start = k if sign > 0 else k
            pts = start + sign * np.arange(6)
            c = np.polyfit(sign * t, V[pts], 5)
            d1[k] = c[-2]
            d2[k] = 2 * c[-3]
    return d1, d2


def _boundary_slopes(V: np.ndarray, y: np.ndarray, skip: int = 2, window: int = 61,
                     degree: int = 8) -> tuple[float, float]:
    """V'(-L/2) and V'(L/2) from least-squares polynomials extrapolated to the ends.

    The outermost ``skip`` samples carry the largest normal-form error and are
    left out; fitting over a window averages the remaining sample noise.
    """
    m = min(window, max(degree + 4, (V.size - skip) // 4))
    idx = np.arange(skip, skip + m)
    left = Polynomial.fit(y[idx], V[idx], degree).deriv()(y[0])
    idx = V.size - 1 - idx
    right = Polynomial.fit(y[idx], V[idx], degree).deriv()(y[-1])
    return float(left), float(right)


def _grid_values(V: LiouvilleForm) -> tuple[np.ndarray, np.ndarray, float]:
    vals = V.V
    if not np.all(np.isfinite(vals)):
        raise InputError("V has non-finite samples (irregular endpoint)")
    return V.y, vals, V.y[1] - V.y[0]


def bs_phase(V: LiouvilleForm, Lambda: float) -> tuple[float, float]:
    """(phi0, phi1) at Lambda; the Lambda-derivative in phi1 is taken analytically."""
    y, vals, h = _grid_values(V)
    if not Lambda > np.max(vals):
        raise TurningPointError(f"Lambda = {Lambda:g} <= max V = {np.max(vals):g}")
    _, d2 = _derivatives(vals, h)
    gap = Lambda - vals
    phi0 = float(simpson(np.sqrt(gap), x=y))
    phi1 = float(simpson(d2 * gap ** -1.5, x=y)) / 8.0
    return phi0, phi1


def moment_conditions(V: LiouvilleForm, tol_m: Optional[float] = None):
    """(a1, a2, Delta, ok) with ok = |a1| <= tol_m and |a2 - Delta| <= tol_m."""
    y, vals = V.y, V.V
    L = V.L
    if not np.all(np.isfinite(vals)):
        return float("nan"), float("nan"), float("nan"), False
    a1 = float(simpson(vals, x=y)) / L
    a2 = float(simpson(vals ** 2, x=y)) / L
    left, right = _boundary_slopes(vals, y)
    Delta = (right - left) / L
    if tol_m is None:
        tol_m = 1e-6 * max(1.0, float(np.max(np.abs(vals))) * L ** 2)
    ok = abs(a1) <= tol_m and abs(a2 - Delta) <= tol_m
    return a1, a2, Delta, bool(ok)


def free_residuals(Lambdas, L: float) -> np.ndarray:
    """pi n - L sqrt(Lambda_n)."""
    lam = np.asarray(Lambdas, dtype=float)
    return np.pi * np.arange(lam.size) - L * np.sqrt(np.clip(lam, 0.0, None))


def decay_exponent(Lambdas, residuals, n_range: tuple[int, int]) -> float:
    """Least-squares slope of log|r_n| against log Lambda_n for n in [lo, hi]."""
    lo, hi = n_range
    lam = np.asarray(Lambdas, dtype=float)[lo:hi + 1]
    r = np.abs(np.asarray(residuals, dtype=float)[lo:hi + 1])
    if np.any(r == 0) or np.any(lam <= 0):
        raise InputError("residuals must be nonzero and Lambda positive in the fit window")
    return float(np.polyfit(np.log(lam), np.log(r), 1)[0])


def n0_estimate(Lambdas, L: float) -> Optional[int]:
    """First n after which rounding L sqrt(Lambda_n) / pi gives unit gaps to the end of the window."""
    k = np.rint(L * np.sqrt(np.clip(np.asarray(Lambdas, dtype=float), 0.0, None)) / np.pi)
    gaps = np.diff(k)
    bad = np.flatnonzero(gaps != 1)
    if bad.size == 0:
        return 0
    n0 = int(bad[-1] + 1)
    return n0 if n0 < k.size - 1 else None


@dataclass
class WKBReport:
    weyl_slope: float
    weyl_target: float
    a1: float
    a2: float
    Delta: float
    pwt_moment_ok: bool
    Lambdas: list
    phi: list
    phase_residuals: list
    free_residuals: list
    n0_estimate: Optional[int]
    extra: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "Lambda", "phi", "residual", "free_residual"])
        for n, (lam, ph, r, fr) in enumerate(zip(self.Lambdas, self.phi, self.phase_residuals,
                                                 self.free_residuals)):
            wr.writerow([n, repr(lam), repr(ph), repr(r), repr(fr)])
        return buf.getvalue()

    def summary(self) -> dict:
        d = asdict(self)
        for key in ("Lambdas", "phi", "phase_residuals", "free_residuals"):
            d.pop(key)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(_finite(self.summary()), sort_keys=True, **kw)


def _finite(obj):
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def wkb_report(coeffs: SLCoefficients, spectrum: SLSpectrum, V: LiouvilleForm) -> WKBReport:
    """Weyl check, moments and per-mode quantization residuals in one report."""
    lam = spectrum.lambdas / V.v0 ** 2
    L = V.L
    weyl = weyl_check(coeffs, spectrum, min_modes=min(50, len(spectrum)))
    a1, a2, Delta, ok = moment_conditions(V)
    phis, res = [], []
    finite = np.all(np.isfinite(V.V))
    vmax = float(np.max(V.V)) if finite else np.inf
    for n, Lam in enumerate(lam):
        if finite and Lam > vmax:
            p0, p1 = bs_phase(V, Lam)
            phis.append(p0 + p1)
            res.append(p0 + p1 - np.pi * n)
        else:
            phis.append(float("nan"))
            res.append(float("nan"))
    return WKBReport(weyl_slope=weyl.weyl_slope, weyl_target=weyl.weyl_target, a1=a1, a2=a2, Delta=Delta,
                     pwt_moment_ok=ok, Lambdas=lam.tolist(), phi=phis, phase_residuals=res,
                     free_residuals=free_residuals(lam, L).tolist(), n0_estimate=n0_estimate(lam, L),
                     extra={"weyl_relative_gap": weyl.relative_gap, "weyl_ratio_gap": weyl.ratio_gap})
