import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pwtransfer.errors import InconsistentInput, InputError, InsufficientModes
from pwtransfer.profiles import Constant, ExpCosineSeries, FourierSeries, SystemGeometry, TLLModel
from pwtransfer.pwt import classify_pwt, correlation_reflection_test, detect_period, reflection_symmetric
from pwtransfer.slcore import gegenbauer_model, solve_model

G = SystemGeometry(1.0, 1001)


@given(st.floats(0.5, 5.0), st.integers(1, 3))
def test_detect_period_linear_spectrum(T, odd):
    # E_n = pi m1 n / T: the shortest period is T / m1 with labels m_n = n
    m1 = 2 * odd - 1
    E = np.pi * m1 * np.arange(12) / T
    match = detect_period(E)
    assert match is not None
    assert match.T == pytest.approx(T / m1, rel=1e-12)
    assert match.m == list(range(12))


def test_detect_period_requires_parity_pattern():
    # E_n ~ 2n - 1: every commensurate T gives m_n - n of alternating parity
    E = np.concatenate([[0.0], np.pi * (2 * np.arange(1, 10) - 1) / 2.0])
    assert detect_period(E) is None


def test_detect_period_rejects_quadratic_spectrum():
    n = np.arange(12)
    assert detect_period(np.pi * np.sqrt(n * (n + 1.0))) is None


def test_detect_period_tolerance_is_relative():
    E = np.pi * np.arange(12) * 2.0
    E[7] *= 1 + 5e-8
    assert detect_period(E, eps_spec=1e-7) is not None
    E[7] *= 1 + 1e-6
    assert detect_period(E, eps_spec=1e-7) is None


def test_detect_period_massive_shift():
    E = np.pi * (np.arange(10) + 2.0)
    assert detect_period(E) is None
    match = detect_period(E, massive=True)
    assert match.c_shift == 2 and match.m[:3] == [2, 3, 4]


def test_detect_period_input_errors():
    with pytest.raises(InsufficientModes):
        detect_period([0.0, 1.0])
    with pytest.raises(InputError):
        detect_period([0.0, 2.0, 1.0, 3.0])


@pytest.mark.parametrize("alpha, expect", [(0.0, True), (0.5, False), (1.0, False)])
def test_gegenbauer_trichotomy(alpha, expect):
    m = gegenbauer_model(alpha)
    spec, modes = solve_model(m, 70)
    verdict = classify_pwt(m, spec, modes)
    assert verdict.is_pwt is expect
    defect = correlation_reflection_test(modes, spec.energies, np.pi / 2, 64)
    if expect:
        assert verdict.T == pytest.approx(np.pi / 2, rel=1e-12)
        assert verdict.m[:6] == list(range(6))
        assert defect <= 1e-9
    else:
        assert verdict.reason == "no commensurate T within eps_spec"
        assert defect >= 1e-2


def test_massive_alpha_two():
    m = gegenbauer_model(2.0, massive=True)
    spec, modes = solve_model(m, 20)
    verdict = classify_pwt(m, spec, modes)
    assert verdict.is_pwt and verdict.c_shift == 2
    assert verdict.m[:5] == [2, 3, 4, 5, 6]


def test_conformal_models_are_pwt():
    m = TLLModel(G, FourierSeries(cos=(1.0, 0.0, 0.3)), Constant(value=1.0))
    spec, modes = solve_model(m, 20)
    verdict = classify_pwt(m, spec, modes)
    assert verdict.is_pwt
    assert verdict.T == pytest.approx(1 / np.sqrt(1 - 0.09), rel=1e-10)


def test_skewed_velocity_is_not_pwt():
    m = TLLModel(G, FourierSeries(cos=(1.0, 0.0, 0.3), sin=(0.0, 0.0, 0.1)), Constant(value=1.0))
    ok, defects = reflection_symmetric(m, 1e-6)
    assert not ok and defects["v"] > 1e-2
    spec, modes = solve_model(m, 12)
    verdict = classify_pwt(m, spec, modes)
    assert not verdict.is_pwt and not verdict.reflection_ok


def test_nonconstant_K_is_not_pwt():
    m = TLLModel(G, Constant(value=1.0), ExpCosineSeries(coefficients=(0.0, 0.0, 0.3)))
    spec, modes = solve_model(m, 12)
    verdict = classify_pwt(m, spec, modes)
    assert verdict.reflection_ok and verdict.parity_ok and not verdict.is_pwt


def test_classify_input_checks():
    m = gegenbauer_model(0.0)
    spec, modes = solve_model(m, 10)
    with pytest.raises(InconsistentInput):
        classify_pwt(m, spec, modes[:5])
    spec5, modes5 = solve_model(m, 5)
    with pytest.raises(InsufficientModes):
        classify_pwt(m, spec5, modes5)


def test_verdict_summary_text():
    m = gegenbauer_model(0.0)
    spec, modes = solve_model(m, 16)
    assert classify_pwt(m, spec, modes).summary().startswith("PWT: yes, T = 1.5707963")
