from dataclasses import replace

import numpy as np
import pytest

from pwtransfer.errors import InputError, SignChange
from pwtransfer.inverse import (InverseProblem, fit_qhat, forward_lambdas, qhat_series, reconstruct,
                                recover_K, roundtrip_validate)
from pwtransfer.profiles import (Constant, ExpCosineSeries, FourierSeries, SystemGeometry, TLLModel,
                                 coordinate_map)
from pwtransfer.slcore import assemble_coefficients, liouville_transform

G = SystemGeometry(1.0, 1001)
V = FourierSeries(cos=(1.0, 0.0, 0.3))
V0 = np.sqrt(1 - 0.09)


def _target(coefficients, n_max=12):
    params = np.array([0.0, *coefficients])
    params[0] = -forward_lambdas(params, V0, G, 0)[0]
    return params, np.sqrt(np.clip(forward_lambdas(params, V0, G, n_max), 0.0, None))


@pytest.mark.parametrize("E, M", [
    ([0.0, 1.0], 1),                       # too short
    ([0.0, 2.0, 1.0, 3.0], 1),             # not increasing
    ([-1.0, 2.0, 3.0], 1),                 # negative E_0
    ([0.0, 1.0, 2.0, 3.0], 2),             # N = 3 < 2M
    ([0.0, 1.0, 2.0, 3.0], 0),
])
def test_problem_validation(E, M):
    with pytest.raises(InputError):
        InverseProblem(tuple(E), V, M, G)


def test_qhat_series_values():
    q = qhat_series(0.5, (0.3, -0.1), 1.0)
    y = np.linspace(-0.5, 0.5, 9)
    assert np.allclose(q(y), 0.5 + 0.3 * np.cos(2 * np.pi * y) - 0.1 * np.cos(4 * np.pi * y), atol=1e-15)


def test_forward_free_spectrum():
    n = np.arange(11)
    lam = forward_lambdas(np.zeros(3), V0, G, 10)
    assert np.allclose(lam, (np.pi * n * V0) ** 2, rtol=1e-10, atol=1e-9)


def test_fit_started_at_truth_stays():
    truth, E = _target((0.3, -0.1))
    params, trace, cond = fit_qhat(InverseProblem(tuple(E), V, 2, G), start=truth)
    assert np.max(np.abs(params - truth)) < 1e-9
    assert np.isfinite(cond)


def test_fit_recovers_coefficients():
    truth, E = _target((0.2, 0.05))
    res = reconstruct(InverseProblem(tuple(E), V, 2, G))
    assert np.allclose(res.coefficients, truth[1:], atol=1e-8)
    assert res.spectral_residual < 1e-10
    assert res.positivity_ok and res.K_recovered is not None


def test_recover_K_analytic_potential():
    # v = 1, sqrt K = exp((A/2) cos 2 pi y) solves s'' = (A^2 pi^2 sin^2 - 2 A pi^2 cos) s
    A = 0.4
    cm = coordinate_map(Constant(value=1.0), geometry=G)

    def q(y):
        th = 2 * np.pi * y
        return A * A * np.pi ** 2 * np.sin(th) ** 2 - 2 * A * np.pi ** 2 * np.cos(th)

    rec = recover_K(q, cm, 1.0, 1.0)
    x = np.linspace(-0.5, 0.5, 41)
    assert np.allclose(rec.K(x), np.exp(A * (np.cos(2 * np.pi * x) - 1)), rtol=1e-9)
    assert rec.bc_defect < 1e-9 and rec.positivity_ok


def test_recover_K_from_liouville_samples():
    K_gen = ExpCosineSeries(coefficients=(0.0, 0.0, 0.35, 0.0, -0.1))
    m = TLLModel(G, V, K_gen)
    lf = liouville_transform(assemble_coefficients(m))
    rec = recover_K(lf.qhat, lf.coordinate_map, 1.0, 1.0)
    x = np.linspace(-0.5, 0.5, 41)
    assert np.allclose(rec.K(x), K_gen(x) / K_gen(np.array(0.0)), rtol=1e-6)


def test_recover_K_sign_change():
    cm = coordinate_map(Constant(value=1.0), geometry=G)
    with pytest.raises(SignChange):
        recover_K(qhat_series(-50.0, (), 1.0), cm, 1.0, 1.0)


def test_roundtrip_needs_positive_K():
    truth, E = _target((0.2, 0.05))
    res = reconstruct(InverseProblem(tuple(E), V, 2, G))
    rep = roundtrip_validate(res, V, E, G, n_check=10)
    assert rep["max_relative_error"] < 1e-8 and rep["pwt"]["is_pwt"] is False
    with pytest.raises(InputError):
        roundtrip_validate(replace(res, K_recovered=None), V, E, G)
