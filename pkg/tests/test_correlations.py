import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pwtransfer.correlations import (CorrelatorRequest, WavePacketPair, gaussian_packet, g_ff, g_ff_minus,
                                     overlap_F, overlap_norm, phi_phi_closed_form, phi_phi_series,
                                     specular_pair, theta_correlators, unfold)
from pwtransfer.errors import InputError, NonIntegrableWeights
from pwtransfer.profiles import Constant, FourierSeries, SystemGeometry, TLLModel, coordinate_map, sqrt_profile
from pwtransfer.slcore import closed_form_conformal

G = SystemGeometry(1.0, 1001)
L = 1.0


def _kernel_modes(x, eps, M=20000):
    # G+(X) = (pi / L) sum_m exp(-pi eps (m + 1/2) / L) exp(i pi m X / L)
    m = np.arange(M)[:, None]
    return (np.pi / L) * np.sum(np.exp(-np.pi * eps * (m + 0.5) / L + 1j * np.pi * m * x / L), axis=0)


def test_kernel_mode_expansion():
    x = np.linspace(-1.9, 1.9, 13)
    assert np.allclose(g_ff(x, L, 0.05), _kernel_modes(x, 0.05), rtol=1e-12, atol=1e-12)


def test_kernel_periodicity_and_reflection(rng):
    x = rng.uniform(-5, 5, 100)
    g = g_ff(x, L, 1e-2)
    assert np.max(np.abs(g_ff(x + 2 * L, L, 1e-2) - g) / np.abs(g)) <= 1e-14
    assert np.array_equal(g_ff_minus(x, L, 1e-2), g_ff(-x, L, 1e-2))


@given(st.floats(0.0, 0.4), st.floats(-0.25, 0.25), st.floats(-0.1, 0.1))
def test_unfolding_identities(a, b, c):
    v = FourierSeries(cos=(1.0, 0.0, a, 0.0, c), sin=(0.0, b))
    um = unfold(TLLModel(SystemGeometry(1.0, 401), v, Constant(value=1.0)))
    d = um.identity_defects()
    assert max(d.values()) <= 1e-9 * L
    assert um.f(um.x[0] + 2 * L) == pytest.approx(um.f(um.x[0]) + 2 * L, abs=1e-13)
    assert um.vbar0 == pytest.approx(coordinate_map(v, geometry=SystemGeometry(1.0, 401)).v0, rel=1e-15)


def test_unfolded_sqrt_profile():
    um = unfold(TLLModel(G, sqrt_profile(1.0), Constant(value=1.0)))
    x = np.linspace(-0.49, 0.49, 15)
    assert np.allclose(um.f(x), np.arcsin(2 * x) / np.pi, atol=1e-10)
    assert um.fbar_L == pytest.approx(L, abs=1e-14)
    # second sheet: fbar(x) = fbar(L) - fbar(L - x)
    assert np.allclose(um.f(L - x), L - np.arcsin(2 * x) / np.pi, atol=1e-10)


def _conformal(v=FourierSeries(cos=(1.0, 0.0, 0.3)), K=1.0, n=512):
    m = TLLModel(G, v, Constant(value=K))
    spec, modes = closed_form_conformal(m, n)
    return m, spec, modes


def test_closed_form_matches_damped_series():
    eps = 1e-2
    for K in (1.0, 2.5):
        m, spec, modes = _conformal(K=K)
        cm = coordinate_map(m)
        x = np.linspace(-0.45, 0.45, 11)
        for t in (0.0, 0.3, 0.77):
            req = CorrelatorRequest(x=x, xp=-0.375, t=t, n_modes=512, epsilon=eps)
            sv = phi_phi_series(modes, spec.energies, req, abel_eta=eps / cm.v0)
            cf = phi_phi_closed_form(cm, x, -0.375, t, 0.0, eps, K=K)
            assert np.max(np.abs(sv.value - cf)) < 1e-8


def test_closed_form_period():
    m, spec, _ = _conformal()
    cm = coordinate_map(m)
    x = np.linspace(-0.5, 0.5, 21)
    a = phi_phi_closed_form(cm, x, 0.1, 0.0, 0.0, 1e-2)
    b = phi_phi_closed_form(cm, x, 0.1, 2 * L / cm.v0, 0.0, 1e-2)
    assert np.max(np.abs(a - b)) < 1e-12


def test_series_hermiticity():
    m, spec, modes = _conformal(n=64)
    E = spec.energies
    a = phi_phi_series(modes, E, CorrelatorRequest(x=0.2, xp=-0.1, t=0.4, tp=0.1)).value
    b = phi_phi_series(modes, E, CorrelatorRequest(x=-0.1, xp=0.2, t=0.1, tp=0.4)).value
    assert a == pytest.approx(np.conj(b), abs=1e-13)


def test_series_reflection_at_T():
    m, spec, modes = _conformal(n=64)
    T = L / coordinate_map(m).v0
    x = G.grid[::50]
    c0 = phi_phi_series(modes, spec.energies, CorrelatorRequest(x=-x, xp=-0.375, t=0.0)).value
    cT = phi_phi_series(modes, spec.energies, CorrelatorRequest(x=x, xp=-0.375, t=T)).value
    assert np.max(np.abs(cT - c0)) <= 1e-9


def test_theta_correlators_shapes():
    m, spec, modes = _conformal(n=32)
    pt, tt = theta_correlators(modes, spec.energies, CorrelatorRequest(x=np.array([0.1, 0.2]), xp=-0.3,
                                                                        t=0.2, n_modes=32))
    assert pt.value.shape == (2,) and tt.value.shape == (2,) and pt.terms == 32


def _packet_oracle(pk, um, t, eps):
    """Mode-sum value of the free-fermion overlap at fixed eps (dense Gauss-Legendre in x)."""
    tq, wq = np.polynomial.legendre.leggauss(20)
    br = np.linspace(-L / 2, L / 2, 301)
    a, b = br[:-1], br[1:]
    xs = (((a + b) / 2)[:, None] + ((b - a) / 2)[:, None] * tq).ravel()
    ws = (((b - a) / 2)[:, None] * wq).ravel()
    f = um.f(xs)
    sq = np.sqrt(um.fprime(xs))
    mm = np.arange(int(40 * L / (np.pi * eps)) + 1)
    B = np.array([np.sum(ws * pk.xi1_plus(xs) * sq * np.exp(-1j * np.pi * k * f / L)) for k in mm])
    C = np.array([np.sum(ws * pk.xi2_minus(xs) * sq * np.exp(1j * np.pi * k * f / L)) for k in mm])
    damp = np.exp(-np.pi * eps * (mm + 0.5) / L)
    F = np.sum(damp * np.exp(1j * np.pi * mm * (um.fbar_L - um.vbar0 * t) / L) * np.conj(C) * B) / (2 * L)
    N = np.sum(damp * np.abs(B) ** 2) / (2 * L)
    return F, N


@pytest.mark.parametrize("sin", [(), (0.0, 0.2)])
def test_overlap_against_mode_sum(sin):
    um = unfold(TLLModel(G, FourierSeries(cos=(1.0, 0.0, 0.3), sin=sin), Constant(value=1.0)))
    pk = specular_pair(gaussian_packet(-3 * L / 8, L / 20), None, L=L)
    eps = 0.02
    T = L / um.vbar0
    for t in (T, 0.9 * T):
        F_ref, N_ref = _packet_oracle(pk, um, t, eps)
        F = overlap_F(pk, um, t, epsilon=eps).raw[eps]
        N = overlap_norm(pk, um, epsilon=eps).raw[eps]
        assert abs(F - F_ref) <= 1e-10 * abs(N_ref)
        assert abs(N - N_ref) <= 1e-10 * abs(N_ref)


def test_overlap_epsilon_consistency():
    um = unfold(TLLModel(G, FourierSeries(cos=(1.0, 0.0, 0.3)), Constant(value=1.0)))
    pk = specular_pair(gaussian_packet(-3 * L / 8, L / 20), None, L=L)
    res = overlap_norm(pk, um)
    e = sorted(res.raw, reverse=True)
    d1 = abs(res.raw[e[0]] - res.raw[e[1]])
    d2 = abs(res.raw[e[1]] - res.raw[e[2]])
    assert d1 < 4 * d2


def test_packet_pair_helpers():
    pk = specular_pair(gaussian_packet(-0.3, 0.05), gaussian_packet(0.1, 0.05), L=L)
    assert pk.is_specular()
    skew = WavePacketPair(gaussian_packet(-0.3, 0.05), None, gaussian_packet(0.3, 0.05), None, L=L)
    assert not skew.is_specular()
    x = G.grid
    s = WavePacketPair.from_samples(x, np.exp(-((x + 0.3) / 0.05) ** 2), None, None, None)
    assert abs(s.xi1_plus(np.array([-0.3]))[0] - 1.0) < 1e-8


def test_overlap_input_errors():
    um = unfold(TLLModel(G, Constant(value=1.0), Constant(value=1.0)))
    pk = specular_pair(gaussian_packet(-0.3, 0.05), None, L=L, weights=(1.0, 0.0))
    with pytest.raises(NonIntegrableWeights):
        overlap_norm(pk, um)
    with pytest.raises(InputError):
        overlap_F(specular_pair(gaussian_packet(-0.3, 0.05), None, L=L), um, -1.0)
    with pytest.raises(InputError):
        CorrelatorRequest(x=0.0, xp=0.0, epsilon=0.0)
