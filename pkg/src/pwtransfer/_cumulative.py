"""Accurate cumulative integrals of a positive rate on a fixed grid.

The coordinate map y(x) and the unfolded map fbar(x) are both of the form
``F(x) = scale * int_origin^x g(s) ds`` with ``g > 0``.  This module builds the
table on the grid with Gauss-Legendre panels (adaptive quadrature on panels
that touch an integrable endpoint singularity), evaluates F off-grid and
inverts it with a safeguarded Newton iteration.
"""
from __future__ import annotations

import warnings
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import QuadratureFailure

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _gl_panels(g: Callable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integral of g over each panel [a_i, b_i] (vectorized, 12-point rule)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[..., None] + half[..., None] * _GL_NODES
    return half * np.sum(g(nodes) * _GL_WEIGHTS, axis=-1)


def _adaptive_panels(g: Callable, a: np.ndarray, b: np.ndarray, rtol: float = 1e-14,
                     depth: int = 0, parent_err=None) -> np.ndarray:
    """12-point GL per panel, bisected where it disagrees with the two-half rule.

    Refinement stops once the disagreement no longer shrinks (rounding noise
    in g, e.g. next to a zero of v).
    """
    whole = _gl_panels(g, a, b)
    if depth >= 30 or whole.size == 0:
        return whole
    m = 0.5 * (a + b)
    halves = _gl_panels(g, a, m) + _gl_panels(g, m, b)
    err = np.abs(whole - halves)
    bad = err > rtol * np.abs(halves) + 1e-300
    if parent_err is not None:
        # near-singular panels shrink slowly (about 1/sqrt(2) per level); noise does not shrink
        bad &= err < 0.9 * parent_err
    out = halves
    if np.any(bad):
        out = out.copy()
        pe = err[bad]
        out[bad] = (_adaptive_panels(g, a[bad], m[bad], rtol, depth + 1, pe)
                    + _adaptive_panels(g, m[bad], b[bad], rtol, depth + 1, pe))
    return out


def _quad(g: Callable, a: float, b: float, rtol: float = 1e-13, atol: float = 1e-14,
          accept: float = 1e-10) -> float:
    if a == b:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(lambda s: float(g(np.array(s))), a, b,
                                  epsabs=0.0, epsrel=rtol, limit=400)
    if not np.isfinite(val) or err > max(accept * abs(val), atol):
        raise QuadratureFailure(f"quad on [{a}, {b}] did not converge (err={err:g})")
    return val


def _quad_from_singular(g: Callable, a: float, b: float, rtol: float = 1e-13) -> float:
    """int_a^b g with an integrable singularity at ``a``, via s = a +- t^2.

    Below t0 ~ 1e-6 the argument a +- t^2 is swamped by rounding of ``a``; that
    sliver is integrated with the midpoint value (error O(t0^3) for a
    square-root zero of 1/g).
    """
    if a == b:
        return 0.0
    sign = 1.0 if b > a else -1.0
    tmax = np.sqrt(abs(b - a))
    t0 = min(1e-6 * np.sqrt(max(abs(a), abs(b), 1e-300)), 0.5 * tmax)

    def integrand(t):
        return 2.0 * t * g(a + sign * t * t)

    head = t0 * float(integrand(np.array(0.5 * t0)))
    return sign * (head + _quad(integrand, t0, tmax, rtol, atol=1e-10, accept=1e-8))


class CumulativeMap:
    """F(x) = scale * int_origin^x g(s) ds tabulated on ``grid``.

    ``singular`` lists grid indices (0 and/or -1) whose adjacent panel contains
    an integrable endpoint singularity of g.  ``origin`` must be a grid node.
    """

    def __init__(self, g: Callable, grid: np.ndarray, origin: float, scale: float = 1.0,
                 singular: tuple[int, ...] = (), breaks=()):
        self.g = g
        self.breaks = np.sort(np.asarray(breaks, dtype=float))
        self.grid = np.asarray(grid, dtype=float)
        self.scale = float(scale)
        n = self.grid.size
        self._sing_panels = set()
        for idx in singular:
            self._sing_panels.add(0 if idx == 0 else n - 2)
        panels = np.empty(n - 1)
        regular = np.array([i not in self._sing_panels for i in range(n - 1)])
        panels[regular] = self._segments(self.grid[:-1][regular], self.grid[1:][regular])
        for i in self._sing_panels:
            a, b = self.grid[i], self.grid[i + 1]
            panels[i] = (_quad_from_singular(g, a, b) if i == 0 else -_quad_from_singular(g, b, a))
        self.panels = panels
        i0 = int(np.argmin(np.abs(self.grid - origin)))
        if abs(self.grid[i0] - origin) > 1e-12 * max(1.0, abs(origin)):
            raise ValueError("origin must be a grid node")
        self.origin_index = i0
        raw = np.zeros(n)
        # accumulate outward from the origin so mirrored panels give mirrored sums
        raw[i0 + 1:] = np.cumsum(panels[i0:])
        raw[:i0] = -np.cumsum(panels[:i0][::-1])[::-1]
        self.table = self.scale * raw

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        idx = np.clip(np.searchsorted(self.grid, flat, side="right") - 1, 0, self.grid.size - 2)
        # integrate from the nearer panel end
        left = self.grid[idx]
        right = self.grid[idx + 1]
        use_right = (right - flat) < (flat - left)
        base = np.where(use_right, self.table[idx + 1], self.table[idx])
        start = np.where(use_right, right, left)
        out = np.empty_like(flat)
        sing = np.array([i in self._sing_panels for i in idx]) if self._sing_panels else np.zeros(flat.size, bool)
        reg = ~sing
        out[reg] = base[reg] + self.scale * self._segments(start[reg], flat[reg])
        last = self.grid.size - 1
        for k in np.flatnonzero(sing):
            # integrate from the singular end itself
            end = 0 if idx[k] == 0 else last
            out[k] = self.table[end] + self.scale * _quad_from_singular(self.g, self.grid[end], flat[k])
        return out.reshape(x.shape) if x.ndim else out[0]

    def _segments(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """GL integrals over [a_i, b_i], split at any kink lying strictly inside."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        vals = _adaptive_panels(self.g, a, b)
        for k in self.breaks:
            hit = np.flatnonzero((np.minimum(a, b) < k) & (k < np.maximum(a, b)))
            if hit.size:
                kk = np.full(hit.size, k)
                vals[hit] = (_adaptive_panels(self.g, a[hit], kk)
                             + _adaptive_panels(self.g, kk, b[hit]))
        return vals

    def in_singular_panel(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, self.grid.size - 2)
        return np.isin(idx, list(self._sing_panels))

    def polish(self, y, x0, iters: int = 2) -> np.ndarray:
        """Newton steps on F(x) = y from ``x0`` (points in singular panels are left alone)."""
        y = np.asarray(y, dtype=float)
        x = np.array(x0, dtype=float, copy=True)
        ok = ~self.in_singular_panel(x)
        if not np.any(ok):
            return x
        xs, ys = x[ok], y[ok]
        lo, hi = self.grid[0], self.grid[-1]
        for _ in range(iters):
            res = self(xs) - ys
            rate = self.scale * np.asarray(self.g(xs), dtype=float)
            step = np.where(rate > 0, res / rate, 0.0)
            xs = np.clip(xs - step, lo, hi)
        x[ok] = xs
        return x

    def inverse(self, y) -> np.ndarray:
        """Solve F(x) = y for x inside the tabulated range."""
        y = np.asarray(y, dtype=float)
        flat = np.atleast_1d(y).ravel()
        tab = self.table
        idx = np.clip(np.searchsorted(tab, flat, side="right") - 1, 0, tab.size - 2)
        lo = self.grid[idx].copy()
        hi = self.grid[idx + 1].copy()
        dy = tab[idx + 1] - tab[idx]
        frac = np.where(dy > 0, (flat - tab[idx]) / np.where(dy > 0, dy, 1.0), 0.0)
        x = lo + np.clip(frac, 0.0, 1.0) * (hi - lo)
        width = self.grid[-1] - self.grid[0]
        for _ in range(60):
            fx = self(x)
            res = fx - flat
            lo = np.where(res < 0, x, lo)
            hi = np.where(res > 0, x, hi)
            rate = self.scale * np.asarray(self.g(x), dtype=float)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(np.isfinite(rate) & (rate > 0), res / rate, np.nan)
            xn = x - step
            bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
            xn = np.where(bad, 0.5 * (lo + hi), xn)
            done = np.abs(res) <= 1e-15 * width
            x = np.where(done, x, xn)
            if np.all(done | (hi - lo <= 4e-16 * width)):
                break
        return x.reshape(y.shape) if y.ndim else x[0]
