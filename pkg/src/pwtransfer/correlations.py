"""Ground-state correlators of inhomogeneous TLLs and one-particle overlaps of inhomogeneous CFTs.

Two independent ingredients live here:

* mode sums over Sturm-Liouville eigenpairs (phi-phi, phi-theta, theta-theta)
  and the closed form of the phi-phi correlator for constant K;
* the unfolding of [-L/2, L/2] onto a circle of length 2L, the chiral kernel
  G_FF and the double integrals giving <Phi_j|Phi_j> and F(t) for wave packets.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BranchCutProximity, InputError, NonConvergentSeries, NonIntegrableWeights, QuadratureFailure
from .profiles import CoordinateMap, Profile, TLLModel, coordinate_map

__all__ = [
    "UnfoldedMap", "unfold", "g_ff", "g_ff_minus", "CorrelatorRequest", "SeriesValue", "phi_phi_series",
    "theta_correlators", "phi_phi_closed_form", "WavePacketPair", "gaussian_packet", "specular_pair",
    "OverlapResult", "overlap_norm", "overlap_F", "mode_matrix",
]


# --------------------------------------------------------------------------- unfolding

@dataclass(frozen=True, eq=False)
class UnfoldedMap:
    """Reflected velocity on [-L/2, 3L/2] and the map fbar(x) = int_0^x vbar0 / vbar.

    ``x`` holds the nodes of the doubled grid, ``fbar`` the map there and
    ``fbar_inv`` the inverse sampled at ``y_nodes`` (uniform in fbar).
    """

    L: float
    v: Profile
    x: np.ndarray
    fbar: np.ndarray
    y_nodes: np.ndarray
    fbar_inv: np.ndarray
    vbar0: float
    fbar_L: float
    cmap: CoordinateMap = field(repr=False)

    @property
    def f_lo(self) -> float:
        """fbar(-L/2)."""
        return -0.5 * self.L - self.cmap.offset

    def vbar(self, x) -> np.ndarray:
        x = self._reduce(np.asarray(x, dtype=float))[0]
        first = x <= 0.5 * self.L
        return np.where(first, self.v(np.where(first, x, 0.0)), self.v(np.where(first, 0.0, self.L - x)))

    def _reduce(self, x: np.ndarray):
        k = np.floor((x + 0.5 * self.L) / (2 * self.L))
        return x - 2 * self.L * k, k

    def f(self, x) -> np.ndarray:
        """fbar on the universal cover: fbar(x + 2L) = fbar(x) + 2L."""
        x = np.asarray(x, dtype=float)
        xr, k = self._reduce(x)
        first = xr <= 0.5 * self.L
        base = np.where(first, xr, self.L - xr)
        val = self.cmap.y_of_x(np.clip(base, -0.5 * self.L, 0.5 * self.L)) - self.cmap.offset
        val = np.where(first, val, self.fbar_L - val)
        return val + 2 * self.L * k

    def fprime(self, x) -> np.ndarray:
        return self.vbar0 / self.vbar(x)

    def f_inv(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        k = np.floor((y - self.f_lo) / (2 * self.L))
        yr = y - 2 * self.L * k
        half = 0.5 * self.L - self.cmap.offset  # fbar(L/2)
        first = yr <= half
        target = np.where(first, yr, self.fbar_L - yr)
        xb = self.cmap.x_of_y(np.clip(target + self.cmap.offset, -0.5 * self.L, 0.5 * self.L))
        return np.where(first, xb, self.L - xb) + 2 * self.L * k

    def x_t(self, x, t, sign: int = 1) -> np.ndarray:
        """x_t^{+-}(x) = fbar^{-1}(fbar(x) +- vbar0 t)."""
        return self.f_inv(self.f(x) + sign * self.vbar0 * t)

    def identity_defects(self, times: Sequence[float] = (0.1, 0.37)) -> dict:
        """Max defects of the four reflection identities on the doubled grid."""
        L = self.L
        x = self.x
        d_v = float(np.max(np.abs(self.vbar(L - x) - self.vbar(x))))
        d_f = float(np.max(np.abs(self.f(L - x) - (self.fbar_L - self.f(x)))))
        y = self.fbar
        d_inv = float(np.max(np.abs(self.f_inv(self.fbar_L - y) - (L - self.f_inv(y)))))
        d_t = 0.0
        for t in times:
            for s in (1, -1):
                d_t = max(d_t, float(np.max(np.abs(self.x_t(L - x, t, s) - (L - self.x_t(x, t, -s))))))
        return {"vbar": d_v, "fbar": d_f, "fbar_inv": d_inv, "x_t": d_t}

    def y_of_x(self, x) -> np.ndarray:
        """The Liouville coordinate y in [-L/2, L/2], i.e. fbar shifted so y(-L/2) = -L/2."""
        return self.f(x) + self.cmap.offset


def unfold(model: Union[TLLModel, Profile], geometry=None, tol: float = 1e-9) -> UnfoldedMap:
    """Build the unfolded map; the four reflection identities are checked on the doubled grid."""
    if isinstance(model, TLLModel):
        v, geometry = model.v, model.geometry
    else:
        v = model
        if geometry is None:
            raise InputError("unfold needs a geometry when given a bare profile")
    cmap = coordinate_map(v, geometry=geometry)
    if cmap.v0 is None:
        cmap.y_of_x(0.0)  # raises DivergentV0
    L = geometry.L
    # int over the doubled interval is twice the original one, so vbar0 = v0
    vbar0 = cmap.v0
    fbar_L = L - 2 * cmap.offset
    g = geometry.grid
    x2 = np.concatenate([g, L - g[::-1][1:]])
    half = cmap.y_of_x_table - cmap.offset
    fb = np.concatenate([half, fbar_L - half[::-1][1:]])
    y_nodes = np.linspace(fb[0], fb[-1], x2.size)
    um = UnfoldedMap(L=L, v=v, x=x2, fbar=fb, y_nodes=y_nodes, fbar_inv=np.empty(0), vbar0=vbar0,
                     fbar_L=fbar_L, cmap=cmap)
    object.__setattr__(um, "fbar_inv", um.f_inv(y_nodes))
    defects = um.identity_defects()
    worst = max(defects.values())
    if worst > tol * L:
        raise QuadratureFailure(f"unfolding identities violated: {defects}")
    return um


# --------------------------------------------------------------------------- kernels

def g_ff(x, L: float, epsilon: float) -> np.ndarray:
    """Right-moving free-fermion kernel on the circle of length 2L, pole shifted by +i epsilon."""
    x = np.asarray(x, dtype=float)
    # exact reduction to [-L, L): the kernel has period 2L
    x = np.remainder(x + L, 2 * L) - L
    k = np.pi / (2 * L)
    return 1j * np.pi * np.exp(-1j * k * x) / (2 * L * np.sin(k * (x + 1j * epsilon)))


def g_ff_minus(x, L: float, epsilon: float) -> np.ndarray:
    """Left-moving partner G^-(x) = G^+(-x)."""
    return g_ff(-np.asarray(x, dtype=float), L, epsilon)


# --------------------------------------------------------------------------- mode sums

@dataclass(frozen=True)
class CorrelatorRequest:
    x: Union[float, np.ndarray]
    xp: float
    t: float = 0.0
    tp: float = 0.0
    n_modes: int = 64
    epsilon: float = 1e-2
    casimir_phase: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InputError("epsilon must be positive")
        if self.n_modes < 1:
            raise InputError("n_modes must be at least 1")


@dataclass(frozen=True)
class SeriesValue:
    value: Union[complex, np.ndarray]
    truncation: float
    converged: bool
    terms: int


def mode_matrix(modes, x, which: str = "u") -> np.ndarray:
    """Rows u_n(x) (or U_n(x)) for every mode."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([np.asarray(m.u(x) if which == "u" else m.U(x), dtype=float).reshape(x.shape)
                     for m in modes])


def _positive(modes, energies, n_modes: int):
    E = np.asarray(energies, dtype=float)
    if len(modes) != E.size:
        raise InputError("modes and energies differ in length")
    keep = [i for i in range(E.size) if E[i] > 0][:n_modes]
    return [modes[i] for i in keep], E[keep]


def _summed(terms: np.ndarray, rtol: float, strict: bool, what: str) -> SeriesValue:
    """Sum rows of ``terms``; the truncation estimate is the spread of the last-decade partial sums."""
    partial = np.cumsum(terms, axis=0)
    total = partial[-1]
    n = terms.shape[0]
    tail = partial[max(0, n - max(1, n // 10)) - 1:] if n > 1 else partial
    spread = float(np.max(np.abs(tail - total))) if n > 1 else float(np.max(np.abs(total)))
    ok = spread <= rtol * max(1.0, float(np.max(np.abs(total))))
    if strict and not ok:
        raise NonConvergentSeries(f"{what}: last-decade spread {spread:.3g}")
    value = complex(total[0]) if total.size == 1 else total
    return SeriesValue(value=value, truncation=spread, converged=bool(ok), terms=n)


def phi_phi_series(modes, energies, req: CorrelatorRequest, abel_eta: float = 0.0, rtol: float = 1e-6,
                   strict: bool = False) -> SeriesValue:
    """sum_{n>=1} pi/(2 E_n) u_n(x) u_n(x') exp(-i E_n (t - t')), zero modes omitted.

    ``abel_eta`` > 0 multiplies term n by exp(-eta E_n).
    """
    ms, E = _positive(modes, energies, req.n_modes)
    ux = mode_matrix(ms, req.x)
    uxp = mode_matrix(ms, req.xp)[:, 0]
    phase = np.exp(-1j * E * (req.t - req.tp) - abel_eta * E)
    terms = (np.pi / (2 * E) * uxp * phase)[:, None] * ux
    return _summed(terms, rtol, strict, "phi-phi")


def theta_correlators(modes, energies, req: CorrelatorRequest, abel_eta: float = 0.0, rtol: float = 1e-6,
                      strict: bool = False) -> tuple[SeriesValue, SeriesValue]:
    """(phi-theta, theta-theta) mode sums; theta-theta is distributional at coincident points."""
    ms, E = _positive(modes, energies, req.n_modes)
    ux = mode_matrix(ms, req.x)
    Ux = mode_matrix(ms, req.x, "U")
    Uxp = mode_matrix(ms, req.xp, "U")[:, 0]
    phase = np.exp(-1j * E * (req.t - req.tp) - abel_eta * E)
    pt = 1j * (np.pi / 2 * Uxp * phase)[:, None] * ux
    tt = (np.pi * E / 2 * Uxp * phase)[:, None] * Ux
    return _summed(pt, rtol, strict, "phi-theta"), _summed(tt, rtol, strict, "theta-theta")


def phi_phi_closed_form(cmap: Union[CoordinateMap, UnfoldedMap], x, xp: float, t: float, tp: float,
                        epsilon: float, K: float = 1.0, L: Optional[float] = None) -> np.ndarray:
    """Constant-K phi-phi correlator summed in closed form.

    Each of the four image terms is sum_n exp(i n z)/n = -log(1 - exp(i z)) with
    Im z = pi epsilon / L, evaluated on the principal branch (the argument has
    positive real part, so this is exactly the regularized series).
    """
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    if isinstance(cmap, UnfoldedMap):
        L = cmap.L
        v0 = cmap.vbar0
        y_of = cmap.y_of_x
    else:
        if L is None:
            L = float(cmap.x[-1] - cmap.x[0])
        v0 = cmap.v0
        y_of = cmap.y_of_x
    y = np.asarray(y_of(np.asarray(x, dtype=float)), dtype=float)
    yp = float(y_of(np.asarray(xp, dtype=float)))
    tau = np.pi * v0 * (t - tp) / L
    a = np.pi * (y - yp) / L
    b = np.pi * (y + yp + L) / L
    total = np.zeros(np.shape(y), dtype=complex)
    for z in (a - tau, -a - tau, b - tau, -b - tau):
        arg = 1.0 - np.exp(1j * z - np.pi * epsilon / L)
        if np.any(np.abs(arg) < 1e-12):
            warnings.warn("log argument within 1e-12 of the branch point", BranchCutProximity, stacklevel=2)
        total = total - np.log(arg)
    out = total / (4.0 * K)
    return complex(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------- wave packets

PacketFn = Optional[Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True, eq=False)
class WavePacketPair:
    """Right/left amplitudes of two one-particle states; ``None`` means identically zero."""

    xi1_plus: PacketFn
    xi1_minus: PacketFn
    xi2_plus: PacketFn
    xi2_minus: PacketFn
    L: float = 1.0
    k: float = 0.0
    weights: tuple = (0.5, 0.0)

    @classmethod
    def from_samples(cls, grid: np.ndarray, xi1p, xi1m, xi2p, xi2m, **kw) -> "WavePacketPair":
        def interp(s):
            if s is None:
                return None
            s = np.asarray(s, dtype=complex)
            if not np.all(np.isfinite(s)):
                raise InputError("packet samples must be finite")
            re, im = CubicSpline(grid, s.real), CubicSpline(grid, s.imag)
            return lambda x: re(x) + 1j * im(x)
        L = float(grid[-1] - grid[0])
        return cls(interp(xi1p), interp(xi1m), interp(xi2p), interp(xi2m), L=L, **kw)

    def _eval(self, fn: PacketFn, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape, complex) if fn is None else np.asarray(fn(x), dtype=complex)

    def is_specular(self, tol: float = 1e-12, probes: int = 201) -> bool:
        x = np.linspace(-0.5 * self.L, 0.5 * self.L, probes)
        pairs = ((self.xi2_plus, self.xi1_minus), (self.xi2_minus, self.xi1_plus))
        scale = max(1.0, max(float(np.max(np.abs(self._eval(f, x)))) for f in
                             (self.xi1_plus, self.xi1_minus, self.xi2_plus, self.xi2_minus)))
        return all(float(np.max(np.abs(self._eval(a, x) - self._eval(b, -x)))) <= tol * scale for a, b in pairs)


def gaussian_packet(center: float, sigma: float, k0: float = 0.0) -> Callable:
    return lambda x: np.exp(-0.5 * ((np.asarray(x, dtype=float) - center) / sigma) ** 2 + 1j * k0 * np.asarray(x))


def specular_pair(xi_plus: PacketFn, xi_minus: PacketFn, L: float = 1.0, k: float = 0.0,
                  weights: tuple = (0.5, 0.0)) -> WavePacketPair:
    """State 1 = (xi_plus, xi_minus); state 2 the mirror image xi2^{+-}(x) = xi1^{-+}(-x)."""
    def mirror(fn):
        return None if fn is None else (lambda x: fn(-np.asarray(x, dtype=float)))
    return WavePacketPair(xi_plus, xi_minus, mirror(xi_minus), mirror(xi_plus), L=L, k=k, weights=weights)


# --------------------------------------------------------------------------- overlap quadrature

_GL_CACHE: dict = {}


def _gl(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _nodes(breaks: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = _gl(order)
    a, b = breaks[:-1], breaks[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return (mid[:, None] + half[:, None] * t).ravel(), (half[:, None] * w).ravel()


def _graded(lo: float, hi: float, base_panels: int, centers, widths) -> np.ndarray:
    """Uniform breakpoints plus geometric clusters x* +- width * 2^j around each centre."""
    pts = [np.linspace(lo, hi, base_panels + 1)]
    span = hi - lo
    for c, w in zip(centers, widths):
        if not np.isfinite(c) or w <= 0:
            continue
        j = np.arange(-2, int(np.ceil(np.log2(max(span / w, 1.0)))) + 1)
        d = w * 2.0 ** j
        pts.append(c + d)
        pts.append(c - d)
        pts.append(np.array([c]))
    bp = np.concatenate(pts)
    bp = np.unique(np.clip(bp, lo, hi))
    keep = np.concatenate([[True], np.diff(bp) > 1e-14 * span])
    return bp[keep]


@dataclass(frozen=True)
class _Term:
    outer: PacketFn   # conjugated, at x2
    inner: PacketFn   # at x1
    s2: int           # sign of fbar(x2) in the kernel argument
    s1: int           # sign of fbar(x1)
    c: float          # constant part of the argument at t = 0 (multiple of fbar(L))
    k2: int           # exp(i k k2 x2)
    k1: int           # exp(i k k1 x1)


def _terms(p: WavePacketPair, j_out: int, j_in: int, fL: float) -> list[_Term]:
    out_p = p.xi1_plus if j_out == 1 else p.xi2_plus
    out_m = p.xi1_minus if j_out == 1 else p.xi2_minus
    in_p = p.xi1_plus if j_in == 1 else p.xi2_plus
    in_m = p.xi1_minus if j_in == 1 else p.xi2_minus
    terms = [
        _Term(out_p, in_p, 1, -1, 0.0, 1, -1),
        _Term(out_p, in_m, 1, 1, -fL, 1, 1),
        _Term(out_m, in_p, -1, -1, fL, -1, -1),
        _Term(out_m, in_m, -1, 1, 0.0, -1, 1),
    ]
    return [t for t in terms if t.outer is not None and t.inner is not None]


def _kernel(X_plus, X_minus, L, eps, weights):
    dp, dm = weights
    out = np.ones(np.shape(X_plus), dtype=complex)
    if dp:
        g = g_ff(X_plus, L, eps)
        out = out * (g if 2 * dp == 1 else g ** (2 * dp))
    if dm:
        g = g_ff_minus(X_minus, L, eps)
        out = out * (g if 2 * dm == 1 else g ** (2 * dm))
    return out


def _poles(um: UnfoldedMap, zs: np.ndarray, L: float) -> np.ndarray:
    """x in [-L/2, L/2] with fbar(x) congruent to zs mod 2L (NaN when no image lies near the interval)."""
    lo, hi = um.f_lo, um.f_lo + L
    zr = lo + np.mod(zs - lo, 2 * L)
    # an image just below lo sits near 2L above it
    zr = np.where(zr > hi + 0.5 * L, zr - 2 * L, zr)
    inside = (zr >= lo - 0.25 * L) & (zr <= hi + 0.25 * L)
    x = um.f_inv(np.clip(zr, lo, hi))
    return np.where(inside, x, np.nan)


def _double_integral(term: _Term, um: UnfoldedMap, p: WavePacketPair, shift: float, eps: float,
                     order: int, base_panels: int) -> complex:
    """(1/2 pi) int int conj(a(x2)) b(x1) kernel over [-L/2, L/2]^2 for one term."""
    L = um.L
    lo, hi = -0.5 * L, 0.5 * L
    dsum = sum(p.weights)
    dp, dm = p.weights
    if max(2 * dp, 2 * dm) >= 2:
        raise NonIntegrableWeights("2 Delta >= 2: the epsilon -> 0 limit diverges")
    fp_lo = float(np.min(um.fprime(np.linspace(lo, hi, 257))))
    # kernel arguments: X+- = s2 fbar(x2) + s1 fbar(x1) + c -+ shift
    consts = []
    if dp:
        consts.append(term.c - shift)
    if dm:
        consts.append(term.c + shift)
    if not consts:
        consts = [term.c]
    # outer mesh: refine where an inner pole crosses x1 = +-L/2
    crit = []
    for c in consts:
        for xb in (lo, hi):
            z2 = -term.s2 * (term.s1 * float(um.f(xb)) + c)
            crit.append(float(_poles(um, np.array([z2]), L)[0]))
    wx = eps / max(fp_lo, 1e-300)
    outer_bp = _graded(lo, hi, base_panels, crit, [wx] * len(crit))
    x2, w2 = _nodes(outer_bp, order)
    f2 = um.f(x2)
    a = np.conj(p._eval(term.outer, x2)) * np.exp(1j * p.k * term.k2 * x2) * um.fprime(x2) ** dsum
    vals = np.zeros(x2.size, dtype=complex)
    active = np.flatnonzero(np.abs(a) > 0)
    if active.size == 0:
        return 0j
    # inner meshes graded toward the (epsilon-shifted) poles; f and packets evaluated in one batch
    pole_x = np.array([_poles(um, -term.s1 * (term.s2 * f2[active] + c), L) for c in consts])
    fin = np.isfinite(pole_x)
    pole_w = np.zeros_like(pole_x)
    pole_w[fin] = eps / um.fprime(pole_x[fin])
    meshes = []
    for col in range(active.size):
        bp = _graded(lo, hi, base_panels, pole_x[:, col], pole_w[:, col])
        meshes.append(_nodes(bp, order))
    sizes = np.array([m[0].size for m in meshes])
    x1 = np.concatenate([m[0] for m in meshes])
    w1 = np.concatenate([m[1] for m in meshes])
    f1 = um.f(x1)
    b = p._eval(term.inner, x1) * np.exp(1j * p.k * term.k1 * x1) * um.fprime(x1) ** dsum
    owner = np.repeat(np.arange(active.size), sizes)
    base = term.s2 * f2[active][owner] + term.s1 * f1 + term.c
    ker = _kernel(base - shift, base + shift, L, eps, p.weights)
    vals[active] = np.bincount(owner, weights=(w1 * b * ker).real, minlength=active.size) + \
        1j * np.bincount(owner, weights=(w1 * b * ker).imag, minlength=active.size)
    total = np.sum(w2 * a * vals) / (2 * np.pi)
    if not np.isfinite(total):
        raise QuadratureFailure("overlap integrand produced non-finite values")
    return complex(total)


@dataclass(frozen=True)
class OverlapResult:
    value: complex                 # epsilon-extrapolated
    raw: dict                      # epsilon -> value at that regularization
    quadrature_error: float        # |extrapolated(order) - extrapolated(order_low)|
    extrapolation_error: float     # distance to the two-level extrapolant
    epsilon: float

    @property
    def modulus(self) -> float:
        return abs(self.value)

    @property
    def tolerance(self) -> float:
        return self.quadrature_error + self.extrapolation_error


def _sweep(evaluate: Callable[[float, int], complex], epsilon: float, order: int) -> OverlapResult:
    eps = (epsilon, epsilon / 2, epsilon / 4)
    I = [evaluate(e, order) for e in eps]
    rich = (8 * I[2] - 6 * I[1] + I[0]) / 3
    two = 2 * I[2] - I[1]
    low = max(4, order - 4)
    I_low = [evaluate(e, low) for e in eps]
    rich_low = (8 * I_low[2] - 6 * I_low[1] + I_low[0]) / 3
    return OverlapResult(value=complex(rich), raw=dict(zip(eps, I)), quadrature_error=abs(rich - rich_low),
                         extrapolation_error=abs(rich - two), epsilon=epsilon)


def _default_eps(um: UnfoldedMap) -> float:
    return 4.0 * float(np.max(np.diff(um.fbar)))


def overlap_F(packets: WavePacketPair, um: UnfoldedMap, t: float, epsilon: Optional[float] = None,
              casimir_phase: float = 0.0, order: int = 16, base_panels: int = 8) -> OverlapResult:
    """F(t) = <Phi_2| exp(-i H t) |Phi_1>, extrapolated over epsilon, epsilon/2, epsilon/4."""
    if t < 0:
        raise InputError("t must be nonnegative")
    eps0 = _default_eps(um) if epsilon is None else float(epsilon)
    terms = _terms(packets, 2, 1, um.fbar_L)
    shift = um.vbar0 * t
    phase = np.exp(-1j * casimir_phase * t)

    def evaluate(eps, order_):
        return phase * sum(_double_integral(tm, um, packets, shift, eps, order_, base_panels) for tm in terms)

    return _sweep(evaluate, eps0, order)


def overlap_norm(packets: WavePacketPair, um: UnfoldedMap, j: int = 1, epsilon: Optional[float] = None,
                 order: int = 16, base_panels: int = 8) -> OverlapResult:
    """<Phi_j|Phi_j>, extrapolated over epsilon, epsilon/2, epsilon/4."""
    if j not in (1, 2):
        raise InputError("j must be 1 or 2")
    eps0 = _default_eps(um) if epsilon is None else float(epsilon)
    terms = _terms(packets, j, j, um.fbar_L)

    def evaluate(eps, order_):
        return sum(_double_integral(tm, um, packets, 0.0, eps, order_, base_panels) for tm in terms)

    return _sweep(evaluate, eps0, order)
