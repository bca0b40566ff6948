import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from pwtransfer.errors import InputError
from pwtransfer.profiles import (Constant, ExpCosineSeries, FourierSeries, Parity, SystemGeometry, TLLModel,
                                 power_profile, sqrt_profile)
from pwtransfer.slcore import (assemble_coefficients, closed_form_conformal, closed_form_gegenbauer, eigenmodes,
                               gegenbauer_lambdas, gram_matrix, liouville_transform, regularization_study,
                               solve_model, solve_spectrum_fd, solve_spectrum_shooting, symmetric_jacobi)

G = SystemGeometry(1.0, 1001)


def _model(v, K, q=None):
    return TLLModel(G, v, K, q=q)


def test_constant_spectrum_both_solvers():
    c = assemble_coefficients(_model(Constant(value=1.0), Constant(value=1.0)))
    n = np.arange(1, 31)
    for spec in (solve_spectrum_shooting(c, 30), solve_spectrum_fd(c, 30)):
        assert np.max(np.abs(spec.energies[1:] - np.pi * n) / (np.pi * n)) < 1e-9
        assert abs(spec.lambdas[0]) < 1e-8


def test_conformal_spectrum_is_linear():
    # constant K, any even v: E_n = pi n v0 / L with v0 = sqrt(1 - a^2) for the cosine bump
    a = 0.3
    c = assemble_coefficients(_model(FourierSeries(cos=(1.0, 0.0, a)), Constant(value=2.0)))
    spec = solve_spectrum_shooting(c, 20)
    n = np.arange(1, 21)
    assert np.allclose(spec.energies[1:], np.pi * n * np.sqrt(1 - a * a), rtol=1e-10)


def test_conformal_closed_form_matches_shooting():
    m = _model(FourierSeries(cos=(1.0, 0.0, 0.3), sin=(0.0, 0.15)), Constant(value=1.7))
    spec, modes = closed_form_conformal(m, 6)
    c = assemble_coefficients(m)
    ref = solve_spectrum_shooting(c, 6)
    assert np.allclose(spec.lambdas, ref.lambdas, rtol=1e-10, atol=1e-10)
    x = np.linspace(-0.5, 0.5, 41)
    for mode, other in zip(modes[1:], eigenmodes(c, ref)[1:]):
        assert np.max(np.abs(mode.u(x) - other.u(x))) < 1e-8
        assert np.max(np.abs(mode.U(x) - other.U(x))) < 1e-8


@given(st.floats(0.0, 0.4), st.floats(-0.5, 0.5), st.floats(-0.4, 0.4))
def test_fd_and_shooting_agree(a, b, c):
    m = _model(FourierSeries(cos=(1.0, 0.0, a)), ExpCosineSeries(coefficients=(0.0, 0.0, b, 0.0, c)))
    co = assemble_coefficients(m)
    s = solve_spectrum_shooting(co, 12)
    f = solve_spectrum_fd(co, 12)
    tol = s.estimated_error + f.estimated_error + 1e-9 * np.maximum(np.abs(s.lambdas), 1.0)
    assert np.all(np.abs(s.lambdas - f.lambdas) <= tol * 10)


def test_liouville_isospectral():
    m = _model(FourierSeries(cos=(1.0, 0.0, 0.25)), ExpCosineSeries(coefficients=(0.0, 0.0, 0.4)))
    co = assemble_coefficients(m)
    lf = liouville_transform(co)
    direct = solve_spectrum_shooting(co, 15).lambdas
    normal = solve_spectrum_shooting(lf.as_coefficients(), 15).lambdas
    assert np.allclose(direct, normal, rtol=1e-7, atol=1e-7)


def test_modes_orthonormal_with_zero_counts_and_parities():
    m = _model(FourierSeries(cos=(1.0, 0.0, 0.3)), ExpCosineSeries(coefficients=(0.0, 0.0, 0.5)))
    co = assemble_coefficients(m)
    spec = solve_spectrum_shooting(co, 19)
    modes = eigenmodes(co, spec)
    Gm = gram_matrix(modes, co.w(G.grid))
    assert np.max(np.abs(Gm - np.eye(20))) < 1e-6
    assert [md.zero_count for md in modes] == list(range(20))
    assert all(md.parity == (Parity.EVEN if md.n % 2 == 0 else Parity.ODD) for md in modes)
    assert all(md.u(np.array(-0.5)) > 0 for md in modes)
    assert all(abs(md.U(np.array(-0.5))) < 1e-12 for md in modes)


def test_U_is_integral_of_w_u():
    co = assemble_coefficients(_model(FourierSeries(cos=(1.0, 0.0, 0.3)), ExpCosineSeries(coefficients=(0, 0, .3))))
    modes = eigenmodes(co, solve_spectrum_shooting(co, 4))
    x = np.linspace(-0.45, 0.45, 19)
    h = 1e-5
    for md in modes:
        dU = (md.U(x + h) - md.U(x - h)) / (2 * h)
        assert np.max(np.abs(dU - co.w(x) * md.u(x))) < 1e-6


def test_skewed_profile_breaks_parity():
    m = _model(FourierSeries(cos=(1.0, 0.0, 0.3), sin=(0.0, 0.2)), ExpCosineSeries(coefficients=(0, 0.3)))
    co = assemble_coefficients(m)
    modes = eigenmodes(co, solve_spectrum_shooting(co, 6))
    assert any(md.parity == Parity.NEITHER for md in modes)


def test_symmetric_jacobi_matches_scipy():
    s = np.linspace(-1, 1, 9)
    for a in (-0.5, 0.0, 0.5, 1.5):
        P = symmetric_jacobi(10, a, s)
        for k in range(11):
            assert np.allclose(P[k], special.eval_jacobi(k, a, a, s), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_gegenbauer_lambdas_formula(alpha):
    n = np.arange(11)
    v0 = 2 / np.pi
    expected = (np.pi * v0) ** 2 * n * (n + 2 * alpha)
    assert np.allclose(gegenbauer_lambdas(alpha, 1.0, 1.0, 10), expected, rtol=1e-12, atol=1e-12)


def test_legendre_modes_are_legendre_polynomials():
    _, modes = closed_form_gegenbauer(0.5, n_max=4, geometry=G)
    x = np.linspace(-0.45, 0.45, 13)
    for md in modes:
        P = special.eval_legendre(md.n, 2 * x)
        ratio = md.u(x)[np.abs(P) > 1e-3] / P[np.abs(P) > 1e-3]
        assert np.ptp(ratio) < 1e-10 * np.max(np.abs(ratio))


def test_closed_form_modes_normalized():
    # w = K / v = (1 - s^2)^(alpha - 1/2); check the Gram matrix with Gauss-Jacobi nodes
    for alpha in (0.0, 0.5, 1.0):
        _, modes = closed_form_gegenbauer(alpha, n_max=6, geometry=G)
        a = alpha - 0.5
        s, wq = special.roots_jacobi(20, a, a)
        U = np.array([md.u(0.5 * s) for md in modes])
        Gm = 0.5 * (U * wq) @ U.T
        assert np.max(np.abs(Gm - np.eye(7))) < 1e-12


def test_regularization_study_converges_for_legendre():
    m = TLLModel(G, sqrt_profile(1.0), power_profile(1.0, 0.5))
    st_ = regularization_study(assemble_coefficients(m), 6, eps=(1e-3, 1e-4, 1e-5))
    n = np.arange(1, 7)
    exact = 4 * n * (n + 1.0)
    rel = np.abs(st_.finest.lambdas[1:] - exact) / exact
    assert np.max(rel) < 1e-4
    inc = st_.increments()
    assert np.all(inc[-1] <= inc[0])


def test_solve_model_dispatch():
    spec, _ = solve_model(TLLModel(G, sqrt_profile(1.0), Constant(value=1.0)), 8)
    assert spec.method == "closed_form"
    spec, _ = solve_model(_model(FourierSeries(cos=(1.0, 0.0, 0.3)), ExpCosineSeries(coefficients=(0, 0, .3))), 4)
    assert spec.method == "shooting"
    with pytest.raises(InputError):
        solve_model(_model(Constant(value=1.0), ExpCosineSeries(coefficients=(0, 0, .3))), 4, method="closed_form")
