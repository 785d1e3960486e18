"""Closed-form contact physics: frozen reference values and properties.

Expected numbers come from three independent sources, noted inline:
hand-evaluated formulas, math.erf as an error-function reference, and the
finite-difference solver (exercised separately in test_fdm.py and the
acceptance suite).
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import thermotouch as tt
from thermotouch.physics import ContactState, temp_gradient

DB = tt.default_db()
WATER = tt.water_props()

# hand evaluation of e = sqrt(lambda*rho*c) for water (0.6, 998, 4182)
WATER_EFFUSIVITY = 1582.4606156236557


def test_water_props_frozen():
    assert WATER.conductivity == 0.6
    assert WATER.effusivity == pytest.approx(WATER_EFFUSIVITY, rel=1e-12)
    # alpha = (lambda/e)^2
    assert WATER.diffusivity == pytest.approx((0.6 / WATER_EFFUSIVITY) ** 2,
                                              rel=1e-12)


def test_effusivity_definition():
    assert tt.effusivity(0.6, 998.0, 4182.0) == pytest.approx(
        math.sqrt(0.6 * 998.0 * 4182.0), rel=1e-15)
    assert tt.effusivity(1.0, 1.0, 1.0) == 1.0


def test_thermal_props_consistency_enforced():
    with pytest.raises(ValueError):
        tt.ThermalProps(conductivity=1.0, effusivity=1.0, diffusivity=2.0)
    p = tt.ThermalProps.from_conductivity_effusivity(386.0, 3.64e4)
    # alpha = lambda^2 / e^2, hand-computed
    assert p.diffusivity == pytest.approx(386.0 ** 2 / 3.64e4 ** 2, rel=1e-12)


def test_thermal_props_rejects_nonpositive():
    for bad in (0.0, -1.0, math.nan, math.inf):
        with pytest.raises(ValueError):
            tt.ThermalProps.from_conductivity_effusivity(bad, 100.0)
        with pytest.raises(ValueError):
            tt.ThermalProps.from_conductivity_effusivity(1.0, bad)


# ---------------------------------------------------------------------------
# error function

def test_erf_reference_values():
    # reference: Abramowitz & Stegun-grade constant, also math.erf(1.0)
    assert tt.erf(1.0) == pytest.approx(0.8427007929497149, abs=1e-12)
    assert tt.erf(0.0) == 0.0
    assert tt.erf(-1.0) == -tt.erf(1.0)
    assert tt.erf(10.0) == pytest.approx(1.0, abs=1e-15)


def test_erf_against_math_erf_dense_grid():
    zs = np.concatenate([np.linspace(-8.0, 8.0, 4001),
                         [1e-300, 1e-12, 3.999999, 4.000001, -30.0, 30.0]])
    worst = max(abs(tt.erf(float(z)) - math.erf(float(z))) for z in zs)
    assert worst < 1e-7          # stated accuracy budget
    assert worst < 1e-9          # measured headroom, kept as a regression bound


@given(st.floats(min_value=-30.0, max_value=30.0, allow_nan=False))
def test_erf_odd_and_bounded(z):
    v = tt.erf(z)
    assert -1.0 <= v <= 1.0
    assert tt.erf(-z) == pytest.approx(-v, abs=1e-15)


@given(st.floats(min_value=-6.0, max_value=6.0), st.floats(min_value=-6.0, max_value=6.0))
def test_erf_monotone(a, b):
    lo, hi = sorted((a, b))
    assert tt.erf(lo) <= tt.erf(hi)


# ---------------------------------------------------------------------------
# contact temperature

def test_contact_state_copper_frozen():
    # Ts = (T_mat + T_dev*gamma)/(1+gamma), hand-evaluated with
    # gamma = e_water/e_copper = 1582.4381.../3.64e4
    st_ = tt.make_contact_state(WATER, DB.props("Copper"), 23.0, 43.0)
    assert st_.gamma == pytest.approx(WATER_EFFUSIVITY / 3.64e4, rel=1e-12)
    assert st_.surface_temp == pytest.approx(42.16674139064454, abs=1e-9)


def test_contact_state_wood_frozen():
    st_ = tt.make_contact_state(WATER, DB.props("Wood"), 23.0, 43.0)
    assert st_.gamma == pytest.approx(WATER_EFFUSIVITY / 367.0, rel=1e-12)
    assert st_.surface_temp == pytest.approx(26.765144030699922, abs=1e-9)


def test_contact_temp_weights_toward_higher_effusivity():
    # copper (huge effusivity) pins the interface near its own temperature;
    # wood leaves the interface near the device temperature
    cu = tt.make_contact_state(WATER, DB.props("Copper"), 23.0, 43.0)
    wd = tt.make_contact_state(WATER, DB.props("Wood"), 23.0, 43.0)
    assert abs(cu.surface_temp - 43.0) < 1.0
    assert abs(wd.surface_temp - 23.0) < 4.0
    assert cu.surface_temp > wd.surface_temp


materials_strategy = st.sampled_from(DB.names())
temps = st.floats(min_value=-50.0, max_value=200.0)
gammas = st.floats(min_value=1e-6, max_value=1e6)


@given(temps, temps, gammas)
def test_interval_containment(t_mat, t_dev, g):
    ts = tt.contact_surface_temp(t_mat, t_dev, g)
    assert min(t_mat, t_dev) <= ts <= max(t_mat, t_dev)


@given(temps, gammas)
def test_equal_temps_identity(t, g):
    # equal initial temperatures leave the interface exactly there
    assert tt.contact_surface_temp(t, t, g) == t


@given(temps, temps, gammas)
def test_gamma_recoverable_from_temps(t_mat, t_dev, g):
    # gamma = (Ts - T_mat)/(T_dev - Ts) whenever the denominator is live
    ts = tt.contact_surface_temp(t_mat, t_dev, g)
    denom = t_dev - ts
    if abs(denom) > 1e-6 * max(1.0, abs(t_dev)):
        assert (ts - t_mat) / denom == pytest.approx(g, rel=1e-9)


@given(materials_strategy, temps, temps)
def test_contact_state_consistency(name, t_dev, t_mat):
    st_ = tt.make_contact_state(WATER, DB.props(name), t_dev, t_mat)
    assert st_.delta_T == t_dev - t_mat
    assert min(t_dev, t_mat) <= st_.surface_temp <= max(t_dev, t_mat)


def test_contact_state_rejects_bad_temps():
    with pytest.raises(ValueError):
        tt.make_contact_state(WATER, DB.props("Copper"), -300.0, 20.0)
    with pytest.raises(ValueError):
        ContactState(material_temp=20.0, device_temp=30.0,
                     surface_temp=50.0, gamma=1.0, delta_T=10.0)


# ---------------------------------------------------------------------------
# depth profile

def test_profile_limits():
    cu = DB.props("Copper")
    st_ = tt.make_contact_state(WATER, cu, 23.0, 43.0)
    # x=0 recovers the surface temperature at any t>0
    assert tt.temp_profile(cu, 43.0, st_.surface_temp, 0.0, 5.0) == pytest.approx(
        st_.surface_temp, abs=1e-12)
    # far from the surface the initial temperature survives
    assert tt.temp_profile(cu, 43.0, st_.surface_temp, 10.0, 1.0) == pytest.approx(
        43.0, abs=1e-9)
    # t=0 returns the initial condition, not the x=0 jump
    assert tt.temp_profile(cu, 43.0, st_.surface_temp, 0.01, 0.0) == 43.0


@given(st.floats(min_value=1e-5, max_value=0.05),
       st.floats(min_value=0.01, max_value=20.0))
def test_profile_between_surface_and_initial(x, t):
    cu = DB.props("Copper")
    v = tt.temp_profile(cu, 43.0, 42.0, x, t)
    assert 42.0 - 1e-12 <= v <= 43.0 + 1e-12


def test_profile_monotone_in_depth():
    wd = DB.props("Wood")
    xs = np.linspace(0.0, 0.01, 50)
    vals = [tt.temp_profile(wd, 43.0, 26.77, float(x), 5.0) for x in xs]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


@given(st.floats(min_value=5e-4, max_value=5e-3),
       st.floats(min_value=0.5, max_value=10.0))
@settings(max_examples=30)
def test_gradient_matches_finite_difference(x, t):
    # central difference of the profile vs the closed-form space derivative;
    # meaningful only away from erf saturation, where the difference of two
    # near-equal profile values is not pure rounding noise
    wd = DB.props("Wood")
    assume(x / (2.0 * math.sqrt(wd.diffusivity * t)) < 2.0)
    h = 1e-7
    fd = (tt.temp_profile(wd, 43.0, 26.77, x + h, t)
          - tt.temp_profile(wd, 43.0, 26.77, x - h, t)) / (2.0 * h)
    an = temp_gradient(wd, 43.0, 26.77, x, t)
    assert fd == pytest.approx(an, rel=1e-5)


# ---------------------------------------------------------------------------
# heat flux

def test_flux_spot_value_frozen():
    # hand evaluation: Q = lam*A*dT/((1+gamma)*sqrt(pi*alpha*t)) for water
    # against copper, dT=20, A=4e-4, t=10
    g = tt.gamma(WATER, DB.props("Copper"))
    q = tt.heat_flux_device(WATER, 20.0, g, 4.0e-4, 10.0)
    assert q == pytest.approx(2.1645431515970057, rel=1e-12)


def test_flux_sign_follows_delta():
    g = tt.gamma(WATER, DB.props("Copper"))
    assert tt.heat_flux_device(WATER, 20.0, g, 4e-4, 1.0) > 0.0   # device hotter
    assert tt.heat_flux_device(WATER, -20.0, g, 4e-4, 1.0) < 0.0  # device colder
    assert tt.heat_flux_device(WATER, 0.0, g, 4e-4, 1.0) == 0.0


@given(materials_strategy,
       st.floats(min_value=1e-3, max_value=40.0), st.booleans(),
       st.floats(min_value=1e-5, max_value=1e-2),
       st.floats(min_value=0.01, max_value=100.0))
def test_flux_antisymmetry(name, magnitude, hotter, area, t):
    # the material loses exactly what the device gains: compute each side's
    # flux from its own surface offset and properties.  Sub-millikelvin
    # differences are excluded: there T_dev - T_s is pure cancellation noise.
    delta = magnitude if hotter else -magnitude
    mat = DB.props(name)
    st_ = tt.make_contact_state(WATER, mat, 10.0 + delta, 10.0)
    q_dev = tt.surface_heat_flux(WATER, st_.device_temp, st_.surface_temp,
                                 area, t)
    q_mat = tt.surface_heat_flux(mat, st_.material_temp, st_.surface_temp,
                                 area, t)
    if abs(q_dev) > 1e-12:
        assert q_mat == pytest.approx(-q_dev, rel=1e-9)


def test_flux_monotone_in_delta_and_area():
    g = tt.gamma(WATER, DB.props("Iron"))
    deltas = np.linspace(0.0, 40.0, 21)
    qs = [abs(tt.heat_flux_device(WATER, float(d), g, 4e-4, 2.0))
          for d in deltas]
    assert all(a <= b + 1e-15 for a, b in zip(qs, qs[1:]))
    areas = np.linspace(1e-5, 1e-3, 21)
    qa = [abs(tt.heat_flux_device(WATER, 20.0, g, float(a), 2.0))
          for a in areas]
    assert all(x <= y + 1e-15 for x, y in zip(qa, qa[1:]))


def test_flux_decays_like_inverse_sqrt_t():
    g = tt.gamma(WATER, DB.props("Copper"))
    q1 = tt.heat_flux_device(WATER, 20.0, g, 4e-4, 1.0)
    q4 = tt.heat_flux_device(WATER, 20.0, g, 4e-4, 4.0)
    assert q4 == pytest.approx(q1 / 2.0, rel=1e-12)


def test_flux_rejects_nonpositive_time():
    g = tt.gamma(WATER, DB.props("Copper"))
    with pytest.raises(ValueError):
        tt.heat_flux_device(WATER, 20.0, g, 4e-4, 0.0)


# ---------------------------------------------------------------------------
# sensor response traces

def test_sensor_response_shape_and_endpoints():
    tr = tt.device_sensor_response(WATER, DB.props("Copper"), 23.0, 43.0,
                                   sensor_depth=5e-4, duration=10.0,
                                   sample_rate=15.0, label="Copper")
    assert tr.samples.size == 151
    assert tr.samples[0] == 23.0
    assert tr.dt == pytest.approx(1.0 / 15.0)
    # frozen endpoint, hand-checked: T_dev + (Ts-T_dev)*erfc(x/(2 sqrt(a t)))
    assert tr.samples[-1] == pytest.approx(37.72178312838763, abs=1e-9)


def test_sensor_response_monotone_toward_surface_temp():
    tr = tt.device_sensor_response(WATER, DB.props("Wood"), 23.0, 43.0)
    st_ = tt.make_contact_state(WATER, DB.props("Wood"), 23.0, 43.0)
    d = np.diff(tr.samples)
    assert np.all(d >= -1e-12)
    assert np.all(tr.samples <= st_.surface_temp + 1e-12)


def test_sensor_response_equal_temps_is_flat():
    tr = tt.device_sensor_response(WATER, DB.props("Iron"), 31.0, 31.0)
    assert np.all(tr.samples == 31.0)


def test_sensor_depth_zero_is_step_response():
    tr = tt.device_sensor_response(WATER, DB.props("Iron"), 23.0, 43.0,
                                   sensor_depth=0.0)
    st_ = tt.make_contact_state(WATER, DB.props("Iron"), 23.0, 43.0)
    assert tr.samples[0] == 23.0
    assert np.allclose(tr.samples[1:], st_.surface_temp, atol=1e-12)


def test_wood_reads_cooler_than_copper_on_hot_materials():
    # the low-effusivity material barely moves a cold device's sensor
    cu = tt.device_sensor_response(WATER, DB.props("Copper"), 23.0, 43.0)
    wd = tt.device_sensor_response(WATER, DB.props("Wood"), 23.0, 43.0)
    assert np.all(cu.samples[1:] > wd.samples[1:])
