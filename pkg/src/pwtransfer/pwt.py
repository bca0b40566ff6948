"""Perfect-wave-transfer decision from a spectrum and mode parities.

A channel transfers every wave to its mirror image at time T when the profiles
are even and E_n T / pi are integers m_n with m_n = n (mod 2), 0 = m_0 < m_1 < ...
(for a massive channel m~_n = m_n + c with an even shift c).
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InconsistentInput, InputError, InsufficientModes
from .profiles import Parity, TLLModel, parity_check
from .slcore.modes import EigenMode
from .slcore.spectrum import SLSpectrum

__all__ = ["PeriodMatch", "PWTVerdict", "detect_period", "classify_pwt", "correlation_reflection_test",
           "reflection_symmetric"]


@dataclass(frozen=True)
class PeriodMatch:
    T: float
    m: list
    defects: list
    c_shift: int = 0


def _labels_ok(m: np.ndarray, c: int) -> bool:
    n = np.arange(m.size)
    return bool(np.all(np.diff(m) > 0) and np.all((m - c - n) % 2 == 0))


def detect_period(energies: Sequence[float], eps_spec: float = 1e-7, m_search: int = 199,
                  massive: bool = False, c_max: int = 8) -> Optional[PeriodMatch]:
    """Smallest T with E_n T / pi integer-valued in the PWT pattern, or None.

    Candidates T = pi m_1 / E_1 for odd m_1 = 1, 3, ..., m_search.  A label m_n
    is accepted when |E_n T / pi - m_n| <= eps_spec * max(1, m_n), i.e. the
    tolerance is relative to each energy.  Massless channels need m_0 = 0;
    massive ones take c = m~_0, which must be even and at most ``c_max``.
    """
    E = np.asarray(energies, dtype=float)
    if E.ndim != 1 or np.any(~np.isfinite(E)) or np.any(E < 0):
        raise InputError("energies must be finite and nonnegative")
    if np.count_nonzero(E > 0) < 3:
        raise InsufficientModes("need at least 3 nonzero energies")
    if np.any(np.diff(E) <= 0):
        raise InputError("energies must be strictly increasing")
    if eps_spec <= 0 or m_search < 1:
        raise InputError("eps_spec and m_search must be positive")
    E1 = E[1]
    for m1 in range(1, m_search + 1, 2):
        T = np.pi * m1 / E1
        r = E * T / np.pi
        m = np.rint(r)
        defects = np.abs(r - m)
        if np.any(defects > eps_spec * np.maximum(1.0, m)):
            continue
        c = int(m[0])
        if massive:
            if c % 2 or c > c_max:
                continue
        elif c != 0:
            continue
        if not _labels_ok(m, c):
            continue
        return PeriodMatch(T=float(T), m=[int(k) for k in m], defects=defects.tolist(), c_shift=c)
    return None


@dataclass
class PWTVerdict:
    is_pwt: bool
    T: Optional[float]
    m: list
    c_shift: int
    defects: list
    parity_ok: bool
    reflection_ok: bool
    condition_b_ok: Optional[bool]
    reason: str
    parity_defects: list = field(default_factory=list)
    profile_defects: dict = field(default_factory=dict)
    eps_spec: float = 1e-7
    eps_parity: float = 1e-6

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    def summary(self) -> str:
        if self.is_pwt:
            shift = f", c = {self.c_shift}" if self.c_shift else ""
            return f"PWT: yes, T = {self.T:.10g}{shift}"
        return f"PWT: no ({self.reason})"


def reflection_symmetric(model: TLLModel, tol: float) -> tuple[bool, dict]:
    """v, K and q even on the grid within ``tol``; returns (ok, defects by name)."""
    defects = {}
    ok = True
    g = model.geometry
    for name in ("v", "K"):
        par, d = parity_check(getattr(model, name), tol=tol, geometry=g)
        defects[name] = d if par != Parity.EVEN else d
        ok &= par == Parity.EVEN
    if model.has_potential:
        x = g.grid
        with np.errstate(divide="ignore", invalid="ignore"):
            qv = model.q_values(x)
        fin = np.isfinite(qv) & np.isfinite(qv[::-1])
        scale = float(np.max(np.abs(qv[fin]))) if np.any(fin) else 0.0
        d = float(np.max(np.abs(qv[fin] - qv[::-1][fin]))) / scale if scale > 0 else 0.0
        defects["q"] = d
        ok &= d <= tol
    return bool(ok), defects


def _condition_b(m: list, c: int) -> Optional[bool]:
    """Sublinear |m_n - n| on the computed window: d_n / n must not grow from mid-window to the end."""
    d = np.abs(np.asarray(m) - c - np.arange(len(m)))
    N = len(m) - 1
    if N < 4:
        return None
    if d[-1] == 0:
        return True
    half = N // 2
    return bool(d[N] / N <= d[half] / half)


def classify_pwt(model: TLLModel, spectrum: SLSpectrum, modes: Sequence[EigenMode], eps_spec: float = 1e-7,
                 eps_parity: float = 1e-6, m_search: int = 199) -> PWTVerdict:
    """Combine reflection symmetry, mode parities and spectral commensurability."""
    if len(modes) != len(spectrum):
        raise InconsistentInput(f"{len(modes)} modes for {len(spectrum)} eigenvalues")
    if len(spectrum) < 9:
        raise InsufficientModes("classify_pwt needs n_max >= 8")
    refl, prof_def = reflection_symmetric(model, eps_parity)
    pdef = [float(md.parity_defect) for md in modes]
    expected = [Parity.EVEN if md.n % 2 == 0 else Parity.ODD for md in modes]
    parity_ok = all(md.parity == ex and md.parity_defect <= eps_parity for md, ex in zip(modes, expected))
    massive = model.has_potential
    E = spectrum.energies
    match = None
    try:
        match = detect_period(E, eps_spec=eps_spec, m_search=m_search, massive=massive)
    except InputError:
        match = None
    reasons = []
    if not refl:
        reasons.append("profiles not reflection symmetric")
    if not parity_ok:
        reasons.append("mode parities do not alternate")
    if match is None:
        reasons.append("no commensurate T within eps_spec")
    is_pwt = refl and parity_ok and match is not None
    if match is not None:
        return PWTVerdict(is_pwt=is_pwt, T=match.T if is_pwt else None, m=match.m, c_shift=match.c_shift,
                          defects=match.defects, parity_ok=parity_ok, reflection_ok=refl,
                          condition_b_ok=_condition_b(match.m, match.c_shift),
                          reason="; ".join(reasons) or "all conditions met", parity_defects=pdef,
                          profile_defects=prof_def, eps_spec=eps_spec, eps_parity=eps_parity)
    return PWTVerdict(is_pwt=False, T=None, m=[], c_shift=0, defects=[], parity_ok=parity_ok,
                      reflection_ok=refl, condition_b_ok=None, reason="; ".join(reasons),
                      parity_defects=pdef, profile_defects=prof_def, eps_spec=eps_spec, eps_parity=eps_parity)


def correlation_reflection_test(modes: Sequence[EigenMode], energies: Sequence[float], T: float, n_modes: int,
                                grid: Optional[np.ndarray] = None, x_prime: Optional[float] = None) -> float:
    """max_x |C(x, T; x', 0) - C(-x, 0; x', 0)| for the truncated mode sum.

    C(x, t; x', 0) = sum_n pi / (2 E_n) u_n(x) u_n(x') exp(-i E_n t) over the
    first ``n_modes`` modes with E_n > 0 (the zero mode is left out).
    ``grid`` must be symmetric under x -> -x; it defaults to the modes' grid.
    """
    E = np.asarray(energies, dtype=float)
    if grid is None:
        grid = modes[0].x
    grid = np.asarray(grid, dtype=float)
    if np.max(np.abs(grid + grid[::-1])) > 1e-12 * np.max(np.abs(grid)):
        raise InputError("grid must be symmetric about 0")
    L = grid[-1] - grid[0]
    if x_prime is None:
        x_prime = -3.0 * L / 8.0
    keep = [k for k in range(min(len(modes), E.size)) if E[k] > 1e-12 * np.max(E)][:n_modes]
    if len(keep) < n_modes:
        raise InsufficientModes(f"only {len(keep)} nonzero modes available, {n_modes} requested")
    Ek = E[keep]
    U = np.array([modes[k].u(grid) for k in keep])
    up = np.array([float(modes[k].u(np.array(x_prime))) for k in keep])
    amp = (np.pi / (2 * Ek)) * up
    at_T = (amp * np.exp(-1j * Ek * T)) @ U
    mirrored = amp @ U[:, ::-1]
    return float(np.max(np.abs(at_T - mirrored)))
