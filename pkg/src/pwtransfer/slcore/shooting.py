"""Prüfer-phase shooting for the Neumann SL problem.

With u = rho sin(theta) / sqrt(S) and p u' = rho sqrt(S) cos(theta) for a
constant S > 0 the phase obeys

    theta' = (S/p) cos^2 theta + ((lambda w + q)/S) sin^2 theta,

theta(-L/2) = pi/2 encodes p u' = 0, and lambda_n is the unique root of
theta(L/2; lambda) = pi/2 + n pi.  All requested modes are integrated together
in one adaptive Runge-Kutta system, along with d theta / d lambda for Newton
steps; brackets from the phase count keep every step safe.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp, trapezoid

from ..errors import BracketError, ConvergenceError, InputError, StiffnessError
from .coefficients import SLCoefficients
from .spectrum import SLSpectrum

__all__ = ["solve_spectrum_shooting", "prufer_phase"]


def _require_regular(coeffs: SLCoefficients):
    if coeffs.irregular_endpoint:
        raise InputError("shooting needs w, p > 0 and finite on the closed interval; "
                         "use the finite-difference solver or the closed form")


def prufer_phase(coeffs: SLCoefficients, lambdas, S, rtol: float = 1e-13):
    """theta(L/2) and d theta(L/2) / d lambda for each lambda (vectorized)."""
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    S = np.broadcast_to(np.asarray(S, dtype=float), lam.shape)
    m = lam.size
    L = coeffs.L
    w, p = coeffs.w, coeffs.p
    has_q = coeffs.q is not None

    def rhs(x, state):
        th = state[:m]
        dl = state[m:]
        xx = np.array(x)
        W = float(w(xx))
        P = float(p(xx))
        Q = float(coeffs.q(xx)) if has_q else 0.0
        s = np.sin(th)
        c = np.cos(th)
        g = (lam * W + Q) / S
        f = (S / P) * c * c + g * s * s
        dfdth = 2.0 * s * c * (g - S / P)
        return np.concatenate([f, dfdth * dl + (W / S) * s * s])

    y0 = np.concatenate([np.full(m, 0.5 * np.pi), np.zeros(m)])
    sol = solve_ivp(rhs, (-0.5 * L, 0.5 * L), y0, method="DOP853", rtol=rtol, atol=rtol,
                    first_step=None)
    if sol.status != 0:
        raise StiffnessError(f"phase integration failed: {sol.message}")
    steps = np.diff(sol.t)
    if steps.size and np.min(steps) < 1e-12 * L:
        raise StiffnessError("step size collapsed below L * 1e-12")
    return sol.y[:m, -1], sol.y[m:, -1]


def solve_spectrum_shooting(coeffs: SLCoefficients, n_max: int, tol: float = 1e-12,
                            max_iter: int = 60, rtol_ode: float = 1e-13) -> SLSpectrum:
    """lambda_0..lambda_n_max by safeguarded Newton on the Prüfer phase.

    Stops when every |delta lambda| <= tol * max(|lambda|, (pi v0 / L)^2).
    """
    _require_regular(coeffs)
    if n_max < 0:
        raise InputError("n_max must be >= 0")
    L = coeffs.L
    n = np.arange(n_max + 1)
    target = 0.5 * np.pi + np.pi * n
    x = coeffs.geometry.grid
    vx = coeffs.v(x)
    wx = coeffs.w(x)
    qx = coeffs.q_values(x)
    # Weyl guess with the mean potential shift
    inv_v0 = float(trapezoid(1.0 / vx, x)) / L
    scale = (np.pi / (inv_v0 * L)) ** 2
    shift = -float(trapezoid(qx, x) / trapezoid(wx, x))
    lam = scale * n ** 2 + shift
    kbar = float(np.sqrt(np.mean(wx * coeffs.p(x))))
    # lower bound on all eigenvalues: min(-q/w)
    floor = float(np.min(-qx / wx)) - scale
    lo = np.full(n.size, floor)
    hi = np.full(n.size, np.inf)
    S = kbar * np.sqrt(np.maximum(np.abs(lam), scale))
    last = np.full(n.size, np.inf)
    for it in range(max_iter):
        th, dth = prufer_phase(coeffs, lam, S, rtol=rtol_ode)
        if np.any(dth <= 0):
            raise BracketError("Prüfer phase not increasing in lambda")
        res = th - target
        lo = np.where(res < 0, np.maximum(lo, lam), lo)
        hi = np.where(res > 0, np.minimum(hi, lam), hi)
        step = -res / dth
        new = lam + step
        outside = (new <= lo) | (new >= hi)
        # bisect inside a known bracket, otherwise expand away from the bad side
        bisect = 0.5 * (lo + hi)
        expand = np.where(res < 0, lam + 2 * np.maximum(np.abs(step), scale),
                          lam - 2 * np.maximum(np.abs(step), scale))
        new = np.where(outside, np.where(np.isfinite(hi), bisect, expand), new)
        last = np.abs(new - lam)
        lam = new
        if np.all(last <= tol * np.maximum(np.abs(lam), scale)):
            break
    else:
        raise ConvergenceError(f"shooting did not converge in {max_iter} iterations")
    # phase error ~ rtol_ode * theta translates into lambda through d theta / d lambda
    est = last + rtol_ode * np.maximum(target, 1.0) / dth
    meta = {"iterations": it + 1, "rtol_ode": rtol_ode}
    return SLSpectrum(lambdas=lam, method="shooting", estimated_error=est, metadata=meta)
