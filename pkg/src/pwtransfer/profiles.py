"""Inhomogeneity profiles v(x), K(x), q(x) and the conformal coordinate map.

Profiles are immutable descriptors rather than closures, so parity and
endpoint behaviour of the named families can be decided structurally.  Every
descriptor evaluates vectorized on numpy arrays via ``p(x)``.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, interpolate

from ._cumulative import CumulativeMap
from .errors import DivergentV0, DomainError, InputError, PositivityError, QuadratureFailure, SingularValue

__all__ = [
    "SystemGeometry", "Profile", "Constant", "PowerProfile", "FourierSeries", "ExpCosineSeries",
    "Tabulated", "Derived", "sqrt_profile", "power_profile", "cosine_series", "TLLModel", "CoordinateMap",
    "Parity", "Regularity", "eval_profile", "coordinate_map", "parity_check", "regularity_classify",
    "load_tabulated_csv", "profile_to_dict", "profile_from_dict",
]


@dataclass(frozen=True)
class SystemGeometry:
    """Interval [-L/2, L/2] with a uniform odd-sized grid shared by all modules."""

    L: float = 1.0
    grid_points: int = 1001

    def __post_init__(self):
        if not (self.L > 0 and np.isfinite(self.L)):
            raise InputError(f"L must be positive, got {self.L}")
        if self.grid_points < 17 or self.grid_points % 2 == 0:
            raise InputError(f"grid_points must be odd and >= 17, got {self.grid_points}")

    @property
    def h(self) -> float:
        return self.L / (self.grid_points - 1)

    @property
    def grid(self) -> np.ndarray:
        # built from symmetric integers so that x -> -x is an exact involution
        m = (self.grid_points - 1) // 2
        x = np.arange(-m, m + 1) * self.h
        x[0], x[-1] = -0.5 * self.L, 0.5 * self.L
        return x


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"
    NEITHER = "neither"


class Regularity(str, Enum):
    REGULAR = "regular"
    IRREGULAR_ENDPOINT = "irregular_endpoint"
    IRREGULAR_AFTER_UNFOLDING = "irregular_after_unfolding"


@dataclass(frozen=True)
class Profile:
    """Base descriptor.  Subclasses implement ``_eval`` on arrays."""

    L: float = field(default=1.0, kw_only=True)
    parity_hint: str = field(default="none", kw_only=True)

    kind = "abstract"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self._eval(x)

    def _eval(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def structural_parity(self) -> Optional[Parity]:
        """Parity known from the descriptor alone, or None."""
        return Parity.EVEN if self.parity_hint == "even" else None

    def endpoint_zero(self) -> bool:
        """True if the profile vanishes at x = +-L/2 by construction."""
        return False

    def endpoint_blowup(self) -> bool:
        return False

    def breakpoints(self) -> tuple:
        """Interior points where the profile has a kink (derivative jump)."""
        return ()


@dataclass(frozen=True)
class Constant(Profile):
    value: float = 1.0
    kind = "constant"

    def _eval(self, x):
        return np.full_like(x, self.value, dtype=float)

    def structural_parity(self):
        return Parity.EVEN


@dataclass(frozen=True)
class PowerProfile(Profile):
    """``amplitude * [1 - (2x/L)^2]^alpha``; alpha = 1/2 is the square-root profile."""

    amplitude: float = 1.0
    alpha: float = 0.5
    kind = "power_profile"

    def _eval(self, x):
        r = 2.0 * x / self.L
        base = np.clip((1.0 - r) * (1.0 + r), 0.0, None)
        if self.alpha == 0:
            return np.full_like(x, self.amplitude, dtype=float)
        with np.errstate(divide="ignore"):
            return self.amplitude * base ** self.alpha

    def structural_parity(self):
        return Parity.EVEN

    def endpoint_zero(self):
        return self.alpha > 0

    def endpoint_blowup(self):
        return self.alpha < 0


@dataclass(frozen=True)
class FourierSeries(Profile):
    """``sum_k cos[k] cos(k pi x / L) + sum_k sin[k] sin(k pi x / L)``.

    Index k counts half-wavelengths on the interval: k = 2 is one full period.
    Even k cosines have vanishing slope at the endpoints.
    """

    cos: tuple = (1.0,)
    sin: tuple = ()
    kind = "cosine_series"

    def _eval(self, x):
        t = np.pi * x / self.L
        out = np.zeros_like(x, dtype=float)
        for k, c in enumerate(self.cos):
            if c:
                out = out + c * np.cos(k * t)
        for k, s in enumerate(self.sin):
            if s:
                out = out + s * np.sin(k * t)
        return out

    def structural_parity(self):
        if not any(self.sin):
            return Parity.EVEN
        if not any(self.cos):
            return Parity.ODD
        return None


@dataclass(frozen=True)
class ExpCosineSeries(Profile):
    """``scale * exp(sum_k c[k] cos(k pi x / L))``: positive by construction."""

    coefficients: tuple = ()
    scale: float = 1.0
    kind = "exp_cosine_series"

    def _eval(self, x):
        t = np.pi * x / self.L
        e = np.zeros_like(x, dtype=float)
        for k, c in enumerate(self.coefficients):
            if c:
                e = e + c * np.cos(k * t)
        return self.scale * np.exp(e)

    def structural_parity(self):
        return Parity.EVEN


@dataclass(frozen=True, eq=False)
class Tabulated(Profile):
    """Samples on the shared grid, interpolated by a spline of ``order``."""

    samples: tuple = ()
    order: int = 3
    kind = "tabulated"

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(float(s) for s in self.samples))
        n = len(self.samples)
        if n < 17 or n % 2 == 0:
            raise InputError(f"tabulated profile needs an odd sample count >= 17, got {n}")
        if self.order not in (1, 3, 5):
            raise InputError("interpolation order must be 1, 3 or 5")
        xs = SystemGeometry(self.L, n).grid
        spline = interpolate.make_interp_spline(xs, np.array(self.samples), k=self.order)
        object.__setattr__(self, "_spline", spline)

    def _eval(self, x):
        return self._spline(x)

    @property
    def grid_points(self) -> int:
        return len(self.samples)


@dataclass(frozen=True, eq=False)
class Derived(Profile):
    """Wraps a vectorized callable built from other profiles (not serializable)."""

    fn: Callable = None
    parity: Optional[Parity] = None
    zero_at_ends: bool = False
    blowup_at_ends: bool = False
    kinks: tuple = ()
    kind = "derived"

    def breakpoints(self):
        return tuple(self.kinks)

    def _eval(self, x):
        return np.asarray(self.fn(x), dtype=float) * np.ones_like(x)

    def structural_parity(self):
        return self.parity

    def endpoint_zero(self):
        return self.zero_at_ends

    def endpoint_blowup(self):
        return self.blowup_at_ends


def sqrt_profile(v: float = 1.0, L: float = 1.0) -> PowerProfile:
    return PowerProfile(amplitude=v, alpha=0.5, L=L)


def power_profile(K: float = 1.0, alpha: float = 1.0, L: float = 1.0) -> PowerProfile:
    return PowerProfile(amplitude=K, alpha=alpha, L=L)


def cosine_series(coefficients: Sequence[float], L: float = 1.0) -> FourierSeries:
    return FourierSeries(cos=tuple(coefficients), L=L)


def tabulated_from(fn, geometry: SystemGeometry, order: int = 3) -> Tabulated:
    return Tabulated(samples=tuple(np.asarray(fn(geometry.grid), dtype=float)), order=order, L=geometry.L)


def load_tabulated_csv(path, geometry: SystemGeometry, order: int = 3) -> Tabulated:
    """Two-column CSV (x, value); ``#`` lines and a non-numeric header are skipped."""
    xs, vals = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                xs.append(float(row[0]))
                vals.append(float(row[1]))
            except (ValueError, IndexError):
                if xs:
                    raise InputError(f"{path}: malformed row {row!r}")
    if len(vals) != geometry.grid_points:
        raise InputError(f"{path}: {len(vals)} samples, grid has {geometry.grid_points}")
    if np.max(np.abs(np.array(xs) - geometry.grid)) > 1e-9 * geometry.L:
        raise InputError(f"{path}: x column does not match the grid")
    return Tabulated(samples=tuple(vals), order=order, L=geometry.L)


_KINDS = {"constant": Constant, "power_profile": PowerProfile, "cosine_series": FourierSeries,
          "exp_cosine_series": ExpCosineSeries, "tabulated": Tabulated}


def profile_to_dict(p: Profile) -> dict:
    d = {"kind": p.kind, "L": p.L, "parity_hint": p.parity_hint}
    if isinstance(p, Constant):
        d["value"] = p.value
    elif isinstance(p, PowerProfile):
        d.update(amplitude=p.amplitude, alpha=p.alpha)
    elif isinstance(p, FourierSeries):
        d.update(cos=list(p.cos), sin=list(p.sin))
    elif isinstance(p, ExpCosineSeries):
        d.update(coefficients=list(p.coefficients), scale=p.scale)
    elif isinstance(p, Tabulated):
        d.update(samples=list(p.samples), order=p.order)
    return d


def profile_from_dict(d: dict) -> Profile:
    d = dict(d)
    kind = d.pop("kind")
    if kind == "sqrt_profile":
        return sqrt_profile(d.get("v", d.get("amplitude", 1.0)), d.get("L", 1.0))
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise InputError(f"unknown profile kind {kind!r}") from None
    for key in ("cos", "sin", "coefficients", "samples"):
        if key in d:
            d[key] = tuple(d[key])
    try:
        return cls(**d)
    except TypeError as exc:
        raise InputError(f"bad parameters for {kind}: {exc}") from None


@dataclass(frozen=True)
class TLLModel:
    """Inhomogeneous Tomonaga-Luttinger liquid on [-L/2, L/2].

    ``q`` is the potential term of the SL operator.  With ``mass`` given
    instead, q(x) = -v0^2 M(x)^2 v(x) is derived (``mass_convention = 'via_mass'``).
    """

    geometry: SystemGeometry
    v: Profile
    K: Profile
    q: Optional[Profile] = None
    mass: Optional[Profile] = None

    def __post_init__(self):
        x = interior(self.geometry)
        for name in ("v", "K"):
            vals = getattr(self, name)(x)
            if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
                raise PositivityError(f"{name}(x) must be finite and > 0 on the interior grid")
        if self.q is not None and self.mass is not None:
            raise InputError("give either q or mass, not both")

    @property
    def mass_convention(self) -> str:
        return "via_mass" if self.mass is not None else "direct"

    def q_values(self, x, v0: Optional[float] = None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.mass is not None:
            if v0 is None:
                v0 = coordinate_map(self).v0
            return -(v0 ** 2) * self.mass(x) ** 2 * self.v(x)
        if self.q is None:
            return np.zeros_like(x)
        return self.q(x)

    @property
    def has_potential(self) -> bool:
        return self.q is not None or self.mass is not None


def interior(geometry: SystemGeometry) -> np.ndarray:
    return geometry.grid[1:-1]


def eval_profile(p: Profile, x, strict: bool = False):
    """Evaluate ``p`` at x in [-L/2, L/2].

    With ``strict`` a non-positive value (a boundary zero of the square-root
    or power families) raises :class:`SingularValue`.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 0.5 * p.L * (1 + 1e-12)):
        raise DomainError(f"x outside [-L/2, L/2] for L = {p.L}")
    val = p(xa)
    if strict and np.any(~(val > 0)):
        raise SingularValue("profile is not strictly positive at the requested point")
    return val if xa.ndim else float(val)


# --------------------------------------------------------------------------- coordinate map


@dataclass(frozen=True, eq=False)
class CoordinateMap:
    """v0 and the monotone map y(x) = -L/2 + int_{-L/2}^x v0/v(s) ds tabulated on the grid.

    y runs over [-L/2, L/2]; for even v it is odd, so y(0) = 0.
    """

    v0: Optional[float]
    x: np.ndarray
    y_of_x_table: Optional[np.ndarray]
    convergent: bool
    _map: Optional[CumulativeMap] = field(default=None, repr=False)
    _branches: tuple = field(default=(), repr=False)
    offset: float = 0.0  # y(0)

    @property
    def x_of_y_table(self) -> np.ndarray:
        """x at the images y of the grid nodes, i.e. the inverse table."""
        return self.x

    def y_of_x(self, x):
        self._require()
        return self._map(x) + self.offset

    def x_of_y(self, y):
        """Inverse map: dense ODE solution of dx/dy = v/v0, Newton-polished off the singular panels."""
        self._require()
        y = np.asarray(y, dtype=float)
        flat = np.atleast_1d(y).ravel()
        half = 0.5 * self.x[-1] - 0.5 * self.x[0]
        yc = np.clip(flat, -half, half)
        right, left = self._branches
        up = yc >= self.offset
        x0 = np.empty_like(yc)
        if np.any(up):
            x0[up] = right(yc[up])[0]
        if np.any(~up):
            x0[~up] = left(yc[~up])[0]
        x0 = np.clip(x0, -half, half)
        x = self._map.polish(yc - self.offset, x0)
        return x.reshape(y.shape) if y.ndim else float(x[0])

    def _require(self):
        if not self.convergent:
            raise DivergentV0("1/v0 diverges; the coordinate map does not exist")


def _endpoint_singular(v: Profile, L: float) -> tuple[int, ...]:
    ends = np.array([-0.5 * L, 0.5 * L])
    with np.errstate(divide="ignore"):
        vals = v(ends)
    return tuple(i for i, val in zip((0, -1), vals) if not (val > 0) or not np.isfinite(1.0 / val))


def _diverges(g, a: float, b: float, tol: float) -> bool:
    """Halve the offset from the singular end ``a`` twice; growing increments mean divergence."""
    sign = 1.0 if b > a else -1.0
    width = abs(b - a)

    def partial(delta):
        lo, hi = sorted((a + sign * delta, b))
        val, _ = integrate.quad(lambda s: float(g(np.array(s))), lo, hi, limit=200)
        return val

    d0 = 1e-3 * width
    i0, i1, i2 = partial(d0), partial(d0 / 2), partial(d0 / 4)
    inc1, inc2 = i1 - i0, i2 - i1
    scale = max(abs(i2), 1e-300)
    return inc1 > tol * scale and inc2 > tol * scale and inc2 >= 0.999 * inc1


def coordinate_map(model_or_v, tol: float = 1e-12, geometry: Optional[SystemGeometry] = None) -> CoordinateMap:
    """Compute v0 = L / int ds/v and the map y(x) on the grid.

    Accepts a :class:`TLLModel` or a velocity profile plus ``geometry``.
    """
    if isinstance(model_or_v, TLLModel):
        v, geometry = model_or_v.v, model_or_v.geometry
    else:
        v = model_or_v
        if geometry is None:
            raise InputError("geometry required when passing a bare profile")
    if tol <= 0:
        raise InputError("tol must be positive")
    L = geometry.L
    x = geometry.grid

    def rate(s):
        with np.errstate(divide="ignore"):
            return 1.0 / v(s)

    singular = _endpoint_singular(v, L)
    for idx in singular:
        a = -0.5 * L if idx == 0 else 0.5 * L
        if _diverges(rate, a, 0.0, tol):
            return CoordinateMap(v0=None, x=x, y_of_x_table=None, convergent=False)
    kinks = sorted(v.breakpoints())
    # panel sums (Gauss-Legendre, substitution near singular ends) define v0 so
    # that y(L/2) - y(-L/2) = L holds by construction; adaptive quad cross-checks it
    unit = CumulativeMap(rate, x, origin=0.0, scale=1.0, singular=singular, breaks=kinks)
    total = float(unit.table[-1] - unit.table[0])
    if not kinks:
        # QUADPACK extrapolation misreads near-singular behaviour just past a
        # kink, so the independent check only runs on kink-free profiles
        check = 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            for a, b in ((-0.5 * L, 0.0), (0.0, 0.5 * L)):
                val, _ = integrate.quad(lambda s: float(rate(np.array(s))), a, b,
                                        epsabs=0.0, epsrel=min(tol, 1e-13), limit=400)
                check += val
        rel_tol = max(10 * tol, 1e-9) if singular else max(10 * tol, 1e-12)
        if not np.isfinite(check) or abs(check - total) > rel_tol * abs(total):
            raise QuadratureFailure(
                f"int ds/v: panel sum {total!r} and adaptive quadrature {check!r} disagree")
    v0 = L / total
    cmap = CumulativeMap(rate, x, origin=0.0, scale=v0, singular=singular, breaks=kinks)
    # anchor y(-L/2) = -L/2; for even v the two half-sums agree and the offset is rounding
    offset = -0.5 * L - float(cmap.table[0])

    def slope(_y, xx):
        return np.clip(v(np.clip(xx, -0.5 * L, 0.5 * L)), 0.0, None) / v0

    branches = []
    for end in (0.5 * L, -0.5 * L):
        sol = integrate.solve_ivp(slope, (offset, end), [0.0], method="DOP853", rtol=1e-13,
                                  atol=1e-15 * L, dense_output=True)
        if sol.status != 0:
            raise QuadratureFailure(f"inverse coordinate map integration failed: {sol.message}")
        branches.append(sol.sol)
    return CoordinateMap(v0=v0, x=x, y_of_x_table=cmap.table + offset, convergent=True, _map=cmap,
                         _branches=tuple(branches), offset=offset)


# --------------------------------------------------------------------------- classification


def parity_check(p: Profile, tol: float = 1e-10, geometry: Optional[SystemGeometry] = None):
    """Classify ``p`` as even/odd/neither on the grid; returns (parity, defect).

    ``defect`` is the smaller of the even and odd defects
    max|p(x) - sigma p(-x)| / max|p|.
    """
    if geometry is None:
        n = p.grid_points if isinstance(p, Tabulated) else 1001
        geometry = SystemGeometry(p.L, n)
    x = geometry.grid
    with np.errstate(divide="ignore", invalid="ignore"):
        a = p(x)
        b = p(-x)
    finite = np.isfinite(a) & np.isfinite(b)
    a, b = a[finite], b[finite]
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0:
        return Parity.EVEN, 0.0
    even = float(np.max(np.abs(a - b)) / scale)
    odd = float(np.max(np.abs(a + b)) / scale)
    if even <= tol:
        return Parity.EVEN, even
    if odd <= tol:
        return Parity.ODD, odd
    return Parity.NEITHER, min(even, odd)


def _d1(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def qhat_of_x(model: TLLModel, x, h: Optional[float] = None, v0: Optional[float] = None) -> np.ndarray:
    """Liouville potential expressed through x-derivatives.

    With s = sqrt(K):  qhat = -q/w + v (v s')' / s,  which equals
    v0^2 (d^2 s / dy^2) / s without needing v0 (v0 only enters -q/w via a mass).
    """
    L = model.geometry.L
    if h is None:
        h = 1e-3 * L
    x = np.asarray(x, dtype=float)
    v, K = model.v, model.K

    def s(z):
        return np.sqrt(K(z))

    def flux(z):
        return v(z) * _d1(s, z, h)

    val = v(x) * _d1(flux, x, h) / s(x)
    if model.has_potential:
        w = K(x) / v(x)
        val = val - model.q_values(x, v0=v0) / w
    return val


def _endpoint_slope(f, end, inward, delta, start=0):
    """One-sided derivative at ``end`` from a quartic through 5 inward samples."""
    d = delta * np.arange(start, start + 5)
    vals = np.asarray(f(end + inward * d), dtype=float)
    coef = np.polyfit(d, vals, 4)
    return inward * coef[-2]


def regularity_classify(model: TLLModel, tol: float = 1e-6) -> Regularity:
    """Regular / irregular at the endpoints / irregular once unfolded to the circle."""
    g = model.geometry
    L = g.L
    ends = np.array([-0.5 * L, 0.5 * L])
    profiles = [model.v, model.K]
    for p in profiles:
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = p(ends)
        if p.endpoint_zero() or p.endpoint_blowup() or not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            return Regularity.IRREGULAR_ENDPOINT
    if model.has_potential:
        with np.errstate(divide="ignore", invalid="ignore"):
            qv = model.q_values(ends)
        if not np.all(np.isfinite(qv)):
            return Regularity.IRREGULAR_ENDPOINT
    # continuity of p = vK and its derivative: jumps show up as large second differences
    h = g.h
    x = g.grid
    pvals = model.v(x) * model.K(x)
    dp = np.gradient(pvals, h)
    jump = np.max(np.abs(np.diff(dp))) / max(np.max(np.abs(dp)), 1e-300)
    if jump > 0.5:
        return Regularity.IRREGULAR_ENDPOINT
    # unfolding to the circle: even reflection about +-L/2 must keep K' = 0
    # and qhat C^1, i.e. their one-sided slopes must vanish at the ends
    delta = 2e-3 * L
    Kscale = max(float(np.max(np.abs(model.K(x)))), 1e-300)
    qscale = max(float(np.max(np.abs(qhat_of_x(model, x[1:-1:8], h=delta / 4)))), 1.0 / L ** 2)
    for end, inward in ((-0.5 * L, 1.0), (0.5 * L, -1.0)):
        kslope = _endpoint_slope(model.K, end, inward, delta, start=0)
        if abs(kslope) * L / Kscale > 100 * tol:
            return Regularity.IRREGULAR_AFTER_UNFOLDING
        qslope = _endpoint_slope(lambda z: qhat_of_x(model, z, h=delta / 4), end, inward, delta, start=1)
        if abs(qslope) * L / qscale > 100 * tol:
            return Regularity.IRREGULAR_AFTER_UNFOLDING
    return Regularity.REGULAR
