import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pwtransfer.errors import TurningPointError
from pwtransfer.profiles import Constant, ExpCosineSeries, FourierSeries, SystemGeometry, TLLModel
from pwtransfer.semiclassics import (bs_phase, decay_exponent, free_residuals, moment_conditions, n0_estimate,
                                     weyl_check, wkb_report)
from pwtransfer.slcore import assemble_coefficients, liouville_transform, solve_spectrum_fd

G = SystemGeometry(1.0, 1001)


def _normal_form(model):
    co = assemble_coefficients(model)
    return co, liouville_transform(co)


def test_constant_potential_phase_is_exact():
    # v = K = 1 and q = c: qhat = -c, Lambda_n = (pi n)^2 - c, phi0 = sqrt(Lambda + c) = pi n, phi1 = 0
    c = 3.0
    _, V = _normal_form(TLLModel(G, Constant(value=1.0), Constant(value=1.0), q=Constant(value=c)))
    assert np.allclose(V.V, -c, atol=1e-9)
    for n in (1, 5, 20):
        p0, p1 = bs_phase(V, (np.pi * n) ** 2 - c)
        assert p0 == pytest.approx(np.pi * n, rel=1e-12)
        assert abs(p1) < 1e-6


def test_turning_point_rejected():
    _, V = _normal_form(TLLModel(G, Constant(value=1.0), ExpCosineSeries(coefficients=(0.0, 0.0, 0.5))))
    with pytest.raises(TurningPointError):
        bs_phase(V, float(np.max(V.V)) - 1.0)


@given(st.floats(0.1, 1.0))
def test_moments_of_exp_cosine_K(A):
    # v = 1, sqrt K = exp((A/2) cos 2 pi y): V = -2 A pi^2 cos + A^2 pi^2 sin^2
    _, V = _normal_form(TLLModel(G, Constant(value=1.0), ExpCosineSeries(coefficients=(0.0, 0.0, A))))
    a1, a2, Delta, ok = moment_conditions(V)
    pi = np.pi
    assert a1 == pytest.approx(A * A * pi * pi / 2, rel=1e-8)
    assert a2 == pytest.approx(2 * A * A * pi ** 4 + 3 * A ** 4 * pi ** 4 / 8, rel=1e-8)
    assert abs(Delta) < 1e-6 * a2
    assert not ok


def test_moments_vanish_for_conformal_model():
    _, V = _normal_form(TLLModel(G, FourierSeries(cos=(1.0, 0.0, 0.3)), Constant(value=1.0)))
    a1, a2, Delta, ok = moment_conditions(V)
    assert ok and abs(a1) < 1e-10 and abs(a2) < 1e-10


def test_free_residuals_and_exponent():
    n = np.arange(1, 60)
    lam = np.concatenate([[0.0], (np.pi * n) ** 2 * (1 + 1.0 / n ** 3)])
    r = free_residuals(lam, 1.0)
    assert r[0] == 0.0
    assert np.allclose(r[1:], np.pi * n - np.pi * n * np.sqrt(1 + 1.0 / n ** 3), rtol=1e-12)
    # |r| ~ n^-2 ~ Lambda^-1
    assert decay_exponent(lam, r, (30, 59)) == pytest.approx(-1.0, abs=0.02)


def test_n0_estimate():
    lam = (np.pi * np.arange(20)) ** 2
    assert n0_estimate(lam, 1.0) == 0
    lam[3] = (np.pi * 4.6) ** 2
    lam[4] = (np.pi * 4.7) ** 2
    assert n0_estimate(lam, 1.0) == 5


def test_weyl_slope_constant_model():
    co = assemble_coefficients(TLLModel(G, Constant(value=2.0), Constant(value=1.0)))
    spec = solve_spectrum_fd(co, 60)
    w = weyl_check(co, spec)
    assert w.weyl_target == pytest.approx(1 / (2 * np.pi), rel=1e-12)
    assert w.relative_gap < 1e-6


def test_report_exports():
    co, V = _normal_form(TLLModel(G, Constant(value=1.0), ExpCosineSeries(coefficients=(0.0, 0.0, 0.4))))
    spec = solve_spectrum_fd(co, 60)
    rep = wkb_report(co, spec, V)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "n,Lambda,phi,residual,free_residual"
    assert len(lines) == 62
    d = json.loads(rep.to_json())
    assert d["pwt_moment_ok"] is False
    assert set(d) >= {"a1", "a2", "Delta", "weyl_slope", "weyl_target", "n0_estimate"}
    # low modes sit below max V and have no phase
    assert d and rep.phi[0] != rep.phi[0]
