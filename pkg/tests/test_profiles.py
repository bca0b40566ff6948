import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from pwtransfer.errors import DivergentV0, InputError, PositivityError
from pwtransfer.profiles import (Constant, ExpCosineSeries, FourierSeries, Parity, PowerProfile, Regularity,
                                 SystemGeometry, Tabulated, TLLModel, coordinate_map, load_tabulated_csv,
                                 parity_check, profile_from_dict, profile_to_dict, regularity_classify,
                                 sqrt_profile)


def test_geometry_grid_is_symmetric(geometry):
    x = geometry.grid
    assert x[0] == -0.5 and x[-1] == 0.5
    assert np.array_equal(x, -x[::-1])


@pytest.mark.parametrize("L, n", [(0.0, 101), (1.0, 100), (1.0, 15), (-1.0, 101)])
def test_geometry_rejects_bad_input(L, n):
    with pytest.raises(InputError):
        SystemGeometry(L, n)


def test_constant_velocity_map(geometry):
    cm = coordinate_map(Constant(value=2.5), geometry=geometry)
    assert cm.v0 == pytest.approx(2.5, rel=1e-14)
    assert np.allclose(cm.y_of_x_table, geometry.grid, atol=1e-14)


def test_cosine_bump_v0_matches_period_integral(geometry):
    # int over one period of 1 / (1 + a cos) is 1 / sqrt(1 - a^2)
    a = 0.3
    cm = coordinate_map(FourierSeries(cos=(1.0, 0.0, a)), geometry=geometry)
    assert cm.v0 == pytest.approx(np.sqrt(1 - a * a), rel=1e-13)


def test_sqrt_profile_v0_and_map(geometry):
    cm = coordinate_map(sqrt_profile(1.0), geometry=geometry)
    assert cm.v0 == pytest.approx(2 / np.pi, rel=1e-10)
    x = np.linspace(-0.49, 0.49, 23)
    # dy/dx = (2/pi) / sqrt(1 - 4x^2)
    assert np.allclose(cm.y_of_x(x), np.arcsin(2 * x) / np.pi, atol=1e-10)


def test_divergent_map_raises(geometry):
    cm = coordinate_map(PowerProfile(amplitude=1.0, alpha=1.0), geometry=geometry)
    assert not cm.convergent and cm.v0 is None
    with pytest.raises(DivergentV0):
        cm.y_of_x(0.1)


@given(st.floats(0.0, 0.45), st.floats(-0.2, 0.2))
def test_map_inverse_roundtrip(a, b):
    g = SystemGeometry(1.0, 401)
    v = FourierSeries(cos=(1.0, 0.0, a), sin=(0.0, b))
    cm = coordinate_map(v, geometry=g)
    x = np.linspace(-0.5, 0.5, 37)
    y = cm.y_of_x(x)
    assert y[0] == pytest.approx(-0.5, abs=1e-12) and y[-1] == pytest.approx(0.5, abs=1e-12)
    assert np.all(np.diff(y) > 0)
    assert np.allclose(cm.x_of_y(y), x, atol=1e-11)


def test_skewed_map_against_quad(geometry):
    v = FourierSeries(cos=(1.0, 0.0, 0.3), sin=(0.0, 0.2))
    cm = coordinate_map(v, geometry=geometry)
    total, _ = integrate.quad(lambda s: 1 / v(s), -0.5, 0.5, epsabs=0, epsrel=1e-13)
    assert cm.v0 == pytest.approx(1 / total, rel=1e-12)
    for x in (-0.3, 0.0, 0.27):
        part, _ = integrate.quad(lambda s: 1 / v(s), -0.5, x, epsabs=0, epsrel=1e-13)
        assert float(cm.y_of_x(x)) == pytest.approx(-0.5 + cm.v0 * part, abs=1e-12)


@pytest.mark.parametrize("p, expected", [
    (FourierSeries(cos=(1.0, 0.0, 0.3)), Parity.EVEN),
    (FourierSeries(cos=(), sin=(0.0, 0.4)), Parity.ODD),
    (FourierSeries(cos=(1.0,), sin=(0.0, 0.4)), Parity.NEITHER),
    (ExpCosineSeries(coefficients=(0.0, 0.2, 0.1)), Parity.EVEN),
])
def test_parity_check(p, expected):
    par, _ = parity_check(p)
    assert par == expected


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=5), st.lists(st.floats(-1, 1), max_size=3))
def test_profile_dict_roundtrip(cos, sin):
    p = FourierSeries(cos=tuple(cos), sin=tuple(sin), L=2.0)
    q = profile_from_dict(profile_to_dict(p))
    x = np.linspace(-1, 1, 11)
    assert np.array_equal(p(x), q(x))


def test_profile_from_dict_rejects_unknown():
    with pytest.raises(InputError):
        profile_from_dict({"kind": "spline"})
    with pytest.raises(InputError):
        profile_from_dict({"kind": "constant", "amplitude": 2.0})


def test_tabulated_csv(tmp_path):
    g = SystemGeometry(1.0, 101)
    x = g.grid
    path = tmp_path / "v.csv"
    path.write_text("# comment\nx,v\n" + "".join(f"{float(a)!r},{float(1 + 0.2 * np.cos(2 * np.pi * a))!r}\n" for a in x))
    p = load_tabulated_csv(path, g)
    assert isinstance(p, Tabulated)
    assert np.allclose(p(x), 1 + 0.2 * np.cos(2 * np.pi * x), atol=1e-14)
    bad = tmp_path / "bad.csv"
    bad.write_text("x,v\n0.0,1.0\nfoo,bar\n")
    with pytest.raises(InputError):
        load_tabulated_csv(bad, g)


def test_model_positivity(geometry):
    with pytest.raises(PositivityError):
        TLLModel(geometry, FourierSeries(cos=(0.5, 0.0, 1.0)), Constant(value=1.0))


@pytest.mark.parametrize("v, K, expected", [
    (Constant(value=1.0), Constant(value=1.0), Regularity.REGULAR),
    (FourierSeries(cos=(1.0, 0.0, 0.3)), ExpCosineSeries(coefficients=(0.0, 0.0, 0.4)), Regularity.REGULAR),
    (sqrt_profile(1.0), Constant(value=1.0), Regularity.IRREGULAR_ENDPOINT),
    (Constant(value=1.0), ExpCosineSeries(coefficients=(0.0, 0.4)), Regularity.IRREGULAR_AFTER_UNFOLDING),
])
def test_regularity(geometry, v, K, expected):
    assert regularity_classify(TLLModel(geometry, v, K)) == expected
