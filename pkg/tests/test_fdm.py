"""Finite-difference solver: scheme invariants and frozen settle errors.

The solver is the numerical ground truth for the closed-form physics, so
these tests avoid leaning on physics.py results wherever an invariant can
stand on its own (conservation, maximum principle, symmetry).  The settle
and convergence numbers below were measured once on the named grids and
frozen; they are regression pins, not derivations.
"""

import functools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import thermotouch as tt
from thermotouch.fdm import (BOUNDARY_DRIFT_LIMIT_C, FdConfig, FdDomainError,
                             FdStabilityError, solve_contact, suggest_config)

DB = tt.default_db()
WATER = tt.water_props()


def props(name):
    return tt.to_thermal_props(DB.get(name))


@functools.lru_cache(maxsize=None)
def copper_run():
    """Shared 2 s copper/water solve on a 1000-point grid."""
    cfg = suggest_config(WATER, props("Copper"), 2.0, points=1000)
    sol = solve_contact(WATER, props("Copper"), 43.0, 23.0, cfg,
                        sample_times=tuple(np.linspace(0.2, 2.0, 10)))
    return cfg, sol


# ---------------------------------------------------------------- configs

def test_config_validation():
    with pytest.raises(ValueError):
        FdConfig(half_length=0.0, points=100, dt=1e-4, total_time=1.0)
    with pytest.raises(ValueError):
        FdConfig(half_length=0.2, points=7, dt=1e-4, total_time=1.0)
    with pytest.raises(ValueError):
        FdConfig(half_length=0.2, points=100, dt=0.0, total_time=1.0)
    with pytest.raises(ValueError):
        FdConfig(half_length=0.2, points=100, dt=1e-4, total_time=5e-5)


def test_refined_keeps_cfl_number():
    cfg = FdConfig(half_length=0.2, points=100, dt=1e-3, total_time=1.0)
    fine = cfg.refined(2)
    assert fine.points == 200
    assert fine.dt == pytest.approx(cfg.dt / 4.0, rel=1e-15)
    assert fine.half_length == cfg.half_length
    r0 = cfg.dt / cfg.dx ** 2
    r1 = fine.dt / fine.dx ** 2
    assert r1 == pytest.approx(r0, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(total_time=st.floats(0.05, 30.0),
       points=st.integers(8, 3000),
       name=st.sampled_from(["Copper", "Zinc", "Brass", "Iron", "Wood"]))
def test_suggest_config_satisfies_both_validity_checks(total_time, points,
                                                       name):
    mat = props(name)
    cfg = suggest_config(WATER, mat, total_time, points=points)
    alpha_max = max(WATER.diffusivity, mat.diffusivity)
    # stability, with the snap-to-integer-steps only ever shrinking dt
    assert alpha_max * cfg.dt / cfg.dx ** 2 <= 0.4 + 1e-12
    # whole number of steps covers total_time exactly
    nsteps = cfg.total_time / cfg.dt
    assert abs(nsteps - round(nsteps)) < 1e-6
    assert cfg.half_length >= 0.2
    # far boundary stays quiet even for a 40 degC initial step
    for body in (WATER, mat):
        arg = cfg.half_length / (2.0 * math.sqrt(body.diffusivity
                                                 * cfg.total_time))
        assert 40.0 * math.erfc(arg) <= BOUNDARY_DRIFT_LIMIT_C


def test_suggest_config_rejects_bad_inputs():
    with pytest.raises(ValueError):
        suggest_config(WATER, props("Copper"), 0.0)
    with pytest.raises(ValueError):
        suggest_config(WATER, props("Copper"), 1.0, safety=0.9)


# ---------------------------------------------------------------- stepping

def test_equilibrium_is_exact():
    cfg = FdConfig(half_length=0.2, points=200, dt=1e-3, total_time=0.1)
    sol = solve_contact(WATER, props("Copper"), 30.0, 30.0, cfg,
                        sample_times=[0.05, 0.1])
    assert np.all(sol.snapshots == 30.0)
    assert np.all(sol.interface_flux() == 0.0)


def test_maximum_principle():
    _, sol = copper_run()
    assert sol.snapshots.min() >= 23.0
    assert sol.snapshots.max() <= 43.0


def test_interface_settles_onto_surface_temperature():
    # measured 1.97e-3 degC on this grid; the acceptance suite pins the
    # tight tolerance on the production grids
    _, sol = copper_run()
    ts = tt.contact_surface_temp(23.0, 43.0, tt.gamma(WATER, props("Copper")))
    assert np.abs(sol.interface_temps - ts).max() < 5e-3


def test_interface_temps_are_between_initials():
    _, sol = copper_run()
    assert np.all(sol.interface_temps > 23.0)
    assert np.all(sol.interface_temps < 43.0)


def test_initial_interface_temp_is_capacity_weighted_mix():
    _, sol = copper_run()
    cu = props("Copper")
    rc_cu = cu.volumetric_heat_capacity
    rc_w = WATER.volumetric_heat_capacity
    mix = (rc_w * 43.0 + rc_cu * 23.0) / (rc_w + rc_cu)
    assert sol.initial_interface_temp == pytest.approx(mix, rel=1e-12)


def test_mirrored_temperatures_mirror_the_field():
    # the scheme is affine in temperature, so swapping the two initial
    # temperatures complements the whole field and negates the flux
    cfg = suggest_config(WATER, props("Copper"), 1.0, points=500)
    hot = solve_contact(WATER, props("Copper"), 43.0, 23.0, cfg,
                        sample_times=[0.5, 1.0])
    cold = solve_contact(WATER, props("Copper"), 23.0, 43.0, cfg,
                         sample_times=[0.5, 1.0])
    assert np.abs(hot.snapshots + cold.snapshots - 66.0).max() < 1e-9
    q = hot.interface_flux()
    assert np.abs(q + cold.interface_flux()).max() < 1e-9 * np.abs(q).max()
    assert q.min() > 0.0  # hot device sheds heat


def test_enthalpy_changes_are_antisymmetric():
    _, sol = copper_run()
    dev, mat = sol.enthalpy_changes()
    assert np.all(dev < 0.0)  # hot device loses enthalpy
    assert np.all(mat > 0.0)
    rel = np.abs(dev + mat) / np.abs(dev)
    assert rel.max() < 1e-10


def test_flux_decays_like_inverse_sqrt_time():
    # between t and 4t the closed form halves the flux; the coarse grid is
    # measured at ratio 1.929, so allow several percent around 2
    _, sol = copper_run()
    q = sol.interface_flux()
    i_a = int(np.argmin(np.abs(sol.times - 0.4)))
    i_b = int(np.argmin(np.abs(sol.times - 1.6)))
    assert q[i_a] / q[i_b] == pytest.approx(2.0, rel=0.08)


def test_interface_error_shrinks_faster_than_3x_per_halving():
    wood = props("Wood")
    alpha_max = max(WATER.diffusivity, wood.diffusivity)
    dx = 0.2 / 250
    dt0 = 0.4 * dx * dx / alpha_max
    nsteps = math.ceil(0.5 / dt0)
    base = FdConfig(0.2, 250, 0.5 / nsteps, 0.5)
    ts = tt.contact_surface_temp(23.0, 43.0, tt.gamma(WATER, wood))

    def err(cfg):
        sol = solve_contact(WATER, wood, 43.0, 23.0, cfg, sample_times=[0.5])
        return abs(float(sol.interface_temps[-1]) - ts)

    coarse = err(base)
    fine = err(base.refined(2))
    assert coarse > 0.1  # the coarse grid is genuinely unresolved
    assert fine < coarse / 3.0


# ---------------------------------------------------------------- guards

def test_unstable_step_is_rejected():
    cu = props("Copper")
    cfg = FdConfig(half_length=0.2, points=1000, dt=1.0, total_time=2.0)
    assert cu.diffusivity * cfg.dt / cfg.dx ** 2 > 0.5
    with pytest.raises(FdStabilityError):
        solve_contact(WATER, cu, 43.0, 23.0, cfg)


def test_short_domain_is_rejected():
    cu = props("Copper")
    dx = 0.01 / 64
    cfg = FdConfig(half_length=0.01, points=64,
                   dt=0.4 * dx * dx / cu.diffusivity, total_time=10.0)
    with pytest.raises(FdDomainError):
        solve_contact(WATER, cu, 43.0, 23.0, cfg)


def test_temperature_validation():
    cfg = FdConfig(half_length=0.2, points=100, dt=1e-3, total_time=0.01)
    with pytest.raises(ValueError):
        solve_contact(WATER, props("Copper"), float("nan"), 23.0, cfg)
    with pytest.raises(ValueError):
        solve_contact(WATER, props("Copper"), 43.0, -300.0, cfg)


# ---------------------------------------------------------------- sampling

def test_temperature_lookup_matches_snapshots():
    cfg, sol = copper_run()
    n = cfg.points
    snap = sol.snapshots[-1]
    t = float(sol.times[-1])
    # exact node depths on both sides
    assert sol.temperature("device", 3 * cfg.dx, t) == pytest.approx(
        snap[n - 3], abs=1e-12)
    assert sol.temperature("material", 5 * cfg.dx, t) == pytest.approx(
        snap[n + 5], abs=1e-12)
    assert sol.temperature("device", 0.0, t) == pytest.approx(snap[n],
                                                              abs=1e-12)
    # midpoints interpolate linearly
    mid = sol.temperature("material", 2.5 * cfg.dx, t)
    assert mid == pytest.approx(0.5 * (snap[n + 2] + snap[n + 3]), abs=1e-12)


def test_temperature_lookup_rejects_bad_queries():
    cfg, sol = copper_run()
    t = float(sol.times[-1])
    with pytest.raises(ValueError):
        sol.temperature("sideways", 0.01, t)
    with pytest.raises(ValueError):
        sol.temperature("device", 2 * cfg.half_length, t)
    with pytest.raises(ValueError):
        sol.temperature("device", 0.01, t + 0.5)  # never recorded


def test_sample_times_snap_to_step_multiples():
    cfg = FdConfig(half_length=0.2, points=100, dt=1e-3, total_time=0.02)
    sol = solve_contact(WATER, props("Copper"), 43.0, 23.0, cfg,
                        sample_times=[0.0101, 0.0199])
    steps = sol.times / cfg.dt
    assert np.allclose(steps, np.round(steps), atol=1e-9)
    assert sol.times[0] == pytest.approx(0.010, abs=1e-12)
    assert sol.times[1] == pytest.approx(0.020, abs=1e-12)
