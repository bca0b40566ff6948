"""Inverse problem: an even Liouville potential from a Neumann spectrum, then K from the potential.

The potential is q̂(y) = c0 + sum_{k=1}^M c_k cos(2 pi k y / L).  The cosine
coefficients are the unknowns of interest; the mean c0 is fitted alongside
them, anchored by the n = 0 residual (weight 10), so that a massless target
(E_0 = 0) pins the additive gauge.  K then follows from v0^2 s'' = q̂ s with
s = sqrt K even, integrated outward from y = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import (DivergedFit, InputError, RankDeficient, SignChange, StiffnessError)
from .profiles import (Constant, CoordinateMap, Derived, FourierSeries, Parity, Profile, SystemGeometry,
                       TLLModel, coordinate_map)
from .slcore.coefficients import SLCoefficients, assemble_coefficients
from .slcore.fd import solve_spectrum_fd
from .slcore.modes import eigenmodes
from .slcore.shooting import solve_spectrum_shooting

__all__ = ["InverseProblem", "ReconstructionResult", "FitTrace", "forward_lambdas", "fit_qhat",
           "recover_K", "roundtrip_validate", "reconstruct", "qhat_series"]

_N0_WEIGHT = 10.0


@dataclass(frozen=True)
class InverseProblem:
    target_energies: tuple
    v: Profile
    basis_size: int
    geometry: SystemGeometry = field(default_factory=SystemGeometry)
    regularization: float = 0.0
    K0: float = 1.0

    def __post_init__(self):
        E = np.asarray(self.target_energies, dtype=float)
        if E.ndim != 1 or E.size < 3:
            raise InputError("need at least three target energies")
        if np.any(np.diff(E) <= 0):
            raise InputError("target energies must be strictly increasing")
        if E[0] < 0:
            raise InputError("E_0 must be nonnegative")
        if self.basis_size < 1:
            raise InputError("basis_size must be at least 1")
        if E.size - 1 < 2 * self.basis_size:
            raise InputError(f"{E.size - 1} nonzero modes cannot determine {self.basis_size} coefficients "
                             "(need N >= 2M)")
        if self.regularization < 0 or self.K0 <= 0:
            raise InputError("regularization must be >= 0 and K0 > 0")

    @property
    def E(self) -> np.ndarray:
        return np.asarray(self.target_energies, dtype=float)

    @property
    def v0(self) -> float:
        cm = coordinate_map(self.v, geometry=self.geometry)
        if cm.v0 is None:
            cm.y_of_x(0.0)
        return cm.v0


def qhat_series(mean: float, coefficients: Sequence[float], L: float) -> FourierSeries:
    """c0 + sum_k c_k cos(2 pi k y / L) as a profile in y (index 2k counts half-wavelengths)."""
    cos = [0.0] * (2 * len(coefficients) + 1)
    cos[0] = float(mean)
    for k, c in enumerate(coefficients, start=1):
        cos[2 * k] = float(c)
    return FourierSeries(cos=tuple(cos), L=L)


def _liouville_coefficients(params: np.ndarray, v0: float, geometry: SystemGeometry) -> SLCoefficients:
    """-v0^2 u'' + q̂ u = lambda u with Neumann ends, written as an SL problem with v = K = v0."""
    L = geometry.L
    q = qhat_series(-params[0], -params[1:], L)
    c = Constant(value=v0, L=L)
    return SLCoefficients(geometry=geometry, w=Constant(value=1.0, L=L), p=Constant(value=v0 ** 2, L=L),
                          v=c, K=c, q=q)


def forward_lambdas(params: np.ndarray, v0: float, geometry: SystemGeometry, n_max: int,
                    accurate: bool = True) -> np.ndarray:
    """lambda_0..lambda_n_max for (c0, c_1..c_M); ``accurate`` selects shooting over coarse FD."""
    coeffs = _liouville_coefficients(np.asarray(params, dtype=float), v0, geometry)
    if accurate:
        return solve_spectrum_shooting(coeffs, n_max, tol=1e-13).lambdas
    return solve_spectrum_fd(coeffs, n_max, grid_refinements=3, tol=None).lambdas


def _energies(lam: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(lam, 0.0, None))


@dataclass
class FitTrace:
    iterations: list = field(default_factory=list)  # (iteration, stage, params, cost, damping)

    def record(self, it, stage, params, cost, damping):
        self.iterations.append((int(it), stage, [float(p) for p in params], float(cost), float(damping)))


def _residuals(params, problem: InverseProblem, v0: float, accurate: bool) -> np.ndarray:
    E_t = problem.E
    N = E_t.size - 1
    lam = forward_lambdas(params, v0, problem.geometry, N, accurate)
    r = np.empty(N + 1)
    # the n = 0 residual is taken on lambda (in energy units) so it stays smooth through E_0 = 0
    scale = np.pi * v0 / problem.geometry.L
    r[0] = _N0_WEIGHT * (lam[0] - E_t[0] ** 2) / scale
    r[1:] = _energies(lam[1:]) - E_t[1:]
    return r


def _jacobian(params, r0, problem, v0, accurate):
    J = np.empty((r0.size, params.size))
    for k in range(params.size):
        h = 1e-6 * max(1.0, abs(params[k]))
        p = params.copy()
        p[k] += h
        J[:, k] = (_residuals(p, problem, v0, accurate) - r0) / h
    return J


def fit_qhat(problem: InverseProblem, max_iters: int = 50, tol: float = 1e-12,
             start: Optional[Sequence[float]] = None, polish: bool = True):
    """Levenberg-Marquardt fit of (c0, c_1..c_M).

    Returns (params, trace, condition).  The loop runs on coarse finite
    differences first and is then polished with the shooting solver.
    """
    v0 = problem.v0
    M = problem.basis_size
    params = np.zeros(M + 1) if start is None else np.asarray(start, dtype=float).copy()
    if params.size != M + 1:
        raise InputError(f"start needs {M + 1} entries (mean first)")
    rho = problem.regularization
    trace = FitTrace()
    scale = float(np.max(problem.E))
    cond = np.nan
    it = 0
    for stage, accurate in (("coarse", False), ("polish", True)) if polish else (("polish", True),):
        mu = 1e-3
        r = _residuals(params, problem, v0, accurate)
        cost = float(r @ r + rho * params[1:] @ params[1:])
        trace.record(it, stage, params, cost, mu)
        for _ in range(max_iters):
            if np.sqrt(cost) <= 1e-14 * scale:
                break
            J = _jacobian(params, r, problem, v0, accurate)
            cond = float(np.linalg.cond(J))
            if not np.isfinite(cond) or cond > 1e12:
                raise RankDeficient(f"Jacobian condition number {cond:.3g}: spectrum window under-informative")
            A = J.T @ J
            g = J.T @ r
            reg = np.zeros_like(params)
            reg[1:] = rho
            g = g + reg * params
            stalled = False
            while True:
                lhs = A + mu * np.diag(np.diag(A)) + np.diag(reg)
                step = np.linalg.solve(lhs, -g)
                if np.linalg.norm(step) <= 1e-13 * max(1.0, float(np.linalg.norm(params))):
                    # the residual sits at the forward solver's noise floor
                    stalled = True
                    break
                trial = params + step
                r_new = _residuals(trial, problem, v0, accurate)
                cost_new = float(r_new @ r_new + rho * trial[1:] @ trial[1:])
                if cost_new < cost:
                    mu = max(mu / 3.0, 1e-12)
                    break
                mu *= 4.0
                if mu > 1e12:
                    raise DivergedFit(f"damping exceeded 1e12 at cost {cost:.3g}")
            if stalled:
                break
            it += 1
            decrease = np.sqrt(cost) - np.sqrt(cost_new)
            params, r, cost = trial, r_new, cost_new
            trace.record(it, stage, params, cost, mu)
            if decrease <= tol * max(1.0, scale):
                break
    return params, trace, cond


# --------------------------------------------------------------------------- K from the potential

@dataclass(frozen=True, eq=False)
class RecoveredK:
    K: Profile
    s_of_y: Callable
    bc_defect: float
    positivity_ok: bool


def recover_K(qhat: Union[Callable, np.ndarray], cmap: CoordinateMap, K0: float, L: float,
              rtol: float = 1e-12) -> RecoveredK:
    """Integrate v0^2 s'' = q̂(y) s from y = 0 with s(0) = sqrt(K0), s'(0) = 0; K(x) = s(y(x))^2.

    ``qhat`` is a callable of y or samples on the uniform y-grid of ``cmap``.
    """
    v0 = cmap.v0
    if v0 is None:
        cmap.y_of_x(0.0)
    if callable(qhat):
        qf = qhat
    else:
        samples = np.asarray(qhat, dtype=float)
        y = np.linspace(-0.5 * L, 0.5 * L, samples.size)
        qf = CubicSpline(y, samples)

    def rhs(_y, z):
        return [z[1], float(qf(_y)) * z[0] / v0 ** 2]

    def crossing(_y, z):
        return z[0]
    crossing.terminal = True

    sols = []
    for end in (0.5 * L, -0.5 * L):
        sol = solve_ivp(rhs, (0.0, end), [np.sqrt(K0), 0.0], method="DOP853", rtol=rtol,
                        atol=1e-14 * np.sqrt(K0), dense_output=True, events=crossing)
        if sol.status == 1:
            raise SignChange(f"sqrt K vanishes at y = {sol.t_events[0][0]:.6g}")
        if sol.status != 0:
            raise StiffnessError(sol.message)
        sols.append(sol)
    right, left = sols
    bc = max(abs(right.y[1, -1]), abs(left.y[1, -1]))

    def s_of_y(y):
        y = np.asarray(y, dtype=float)
        out = np.where(y >= 0, right.sol(np.clip(y, 0, 0.5 * L))[0], left.sol(np.clip(y, -0.5 * L, 0))[0])
        return out

    def K_of_x(x):
        return s_of_y(cmap.y_of_x(np.asarray(x, dtype=float))) ** 2

    grid = np.linspace(-0.5 * L, 0.5 * L, 2001)
    positive = bool(np.min(s_of_y(grid)) > 0)
    return RecoveredK(K=Derived(fn=K_of_x, parity=Parity.EVEN if _even(cmap) else None, L=L),
                      s_of_y=s_of_y, bc_defect=float(bc), positivity_ok=positive)


def _even(cmap: CoordinateMap) -> bool:
    return abs(cmap.offset) <= 1e-12 * float(cmap.x[-1] - cmap.x[0])


# --------------------------------------------------------------------------- pipeline

@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    coefficients: np.ndarray       # c_1..c_M
    mean: float                    # c0
    qhat_fit: np.ndarray           # samples on the y-grid
    K_recovered: Optional[Profile]
    spectral_residual: float
    positivity_ok: bool
    bc_defect: float
    trace: FitTrace
    condition: float
    fitted_energies: np.ndarray

    def summary(self) -> dict:
        return {"coefficients": [float(c) for c in self.coefficients], "mean": float(self.mean),
                "spectral_residual": float(self.spectral_residual), "positivity_ok": self.positivity_ok,
                "bc_defect": float(self.bc_defect), "condition": float(self.condition),
                "iterations": len(self.trace.iterations)}


def reconstruct(problem: InverseProblem, max_iters: int = 50, tol: float = 1e-12) -> ReconstructionResult:
    """fit_qhat, then recover_K; K is only emitted when sqrt K stays positive."""
    params, trace, cond = fit_qhat(problem, max_iters=max_iters, tol=tol)
    g = problem.geometry
    L = g.L
    q = qhat_series(params[0], params[1:], L)
    y = g.grid
    lam = forward_lambdas(params, problem.v0, g, problem.E.size - 1)
    E_fit = _energies(lam)
    rel = (E_fit[1:] - problem.E[1:]) / problem.E[1:]
    cmap = coordinate_map(problem.v, geometry=g)
    try:
        rec = recover_K(q, cmap, problem.K0, L)
        K, pos, bc = (rec.K if rec.positivity_ok else None), rec.positivity_ok, rec.bc_defect
    except SignChange:
        K, pos, bc = None, False, float("nan")
    return ReconstructionResult(coefficients=params[1:].copy(), mean=float(params[0]), qhat_fit=q(y),
                                K_recovered=K, spectral_residual=float(np.sqrt(np.mean(rel ** 2))),
                                positivity_ok=pos, bc_defect=bc, trace=trace, condition=cond,
                                fitted_energies=E_fit)


def roundtrip_validate(result: ReconstructionResult, v: Profile, target_energies, geometry: SystemGeometry,
                       n_check: Optional[int] = None, eps_spec: float = 1e-7) -> dict:
    """Forward-solve (v, K_recovered) with shooting and compare with the target; also classify PWT."""
    from .pwt import classify_pwt

    if result.K_recovered is None or not result.positivity_ok:
        raise InputError("no positive K was recovered")
    E_t = np.asarray(target_energies, dtype=float)
    n_check = E_t.size - 1 if n_check is None else min(n_check, E_t.size - 1)
    model = TLLModel(geometry, v, result.K_recovered)
    coeffs = assemble_coefficients(model)
    spec = solve_spectrum_shooting(coeffs, n_check)
    E = spec.energies
    rel = np.abs(E[1:] - E_t[1:n_check + 1]) / E_t[1:n_check + 1]
    report = {"per_mode_relative_error": rel.tolist(), "max_relative_error": float(np.max(rel)),
              "E0": float(E[0]), "n_check": int(n_check)}
    if n_check >= 8:
        verdict = classify_pwt(model, spec, eigenmodes(coeffs, spec), eps_spec=eps_spec)
        report["pwt"] = verdict.to_dict()
    return report
