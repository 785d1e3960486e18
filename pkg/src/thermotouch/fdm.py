"""Explicit finite-difference oracle for the two-half-space contact problem.

This module deliberately avoids every closed-form result in physics.py: it
integrates the heat equation directly so the erf solution, the surface
temperature and the 1/sqrt(t) flux law can be checked against an
independent route.

Geometry: one uniform 1-d grid straddling the contact plane.

    index:      0 .. N-1        N         N+1 .. 2N
    body:       device          shared    material
    position:   x = -L .. -dx   x = 0     x = +dx .. +L

Interior nodes use the standard explicit stencil with their own body's
diffusivity.  The shared interface node is a control volume made of half a
cell of each body: conductances lambda/dx on both flanks, heat capacity
(rho c_dev + rho c_mat)/2 * dx.  Its update conserves total enthalpy exactly
(up to far-boundary leakage), and the per-side enthalpy changes are equal
and opposite by construction.  Far boundaries are held at the initial
temperatures, valid while the domain is long enough to stay unreached.

The interface node starts at the enthalpy-weighted mix of the two initial
temperatures and settles onto the physical surface temperature within a few
steps; nothing here assumes what that temperature should be.
"""

import dataclasses
import math

import numpy as np

from .physics import ThermalProps
from .traces import ABSOLUTE_ZERO_C

# Far-boundary temperatures may move at most this much over a run for the
# semi-infinite-solid idealization to hold.
BOUNDARY_DRIFT_LIMIT_C = 1.0e-6


class FdStabilityError(ValueError):
    """Explicit-scheme stability bound violated; refusing to step."""


class FdDomainError(ValueError):
    """Domain too short to emulate semi-infinite bodies for this run."""


@dataclasses.dataclass(frozen=True)
class FdConfig:
    """Grid for one solve.

    half_length  domain length per side, m
    points       grid intervals per side (node spacing dx = half_length/points)
    dt           time step, s
    total_time   simulated span, s
    """

    half_length: float
    points: int
    dt: float
    total_time: float

    def __post_init__(self):
        if not (np.isfinite(self.half_length) and self.half_length > 0.0):
            raise ValueError(f"half_length must be positive, got {self.half_length}")
        if self.points < 8:
            raise ValueError(f"points must be at least 8, got {self.points}")
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (np.isfinite(self.total_time) and self.total_time >= self.dt):
            raise ValueError("total_time must be at least one time step")

    @property
    def dx(self) -> float:
        return self.half_length / self.points

    def refined(self, factor: int = 2) -> "FdConfig":
        """Same domain with dx/factor and dt/factor^2 (keeps the CFL number)."""
        return FdConfig(self.half_length, self.points * factor,
                        self.dt / factor ** 2, self.total_time)


def suggest_config(device: ThermalProps, material: ThermalProps,
                   total_time: float, points: int = 4000,
                   safety: float = 0.4,
                   min_half_length: float = 0.2) -> FdConfig:
    """Pick a grid that satisfies both validity checks for this pair.

    The domain is sized so the fastest-diffusing body cannot push a
    measurable signal to the far boundary within total_time (erfc argument
    about 3.95 leaves drift below 1e-6 of the temperature step), with a
    0.2 m floor.  dt comes from the explicit stability bound with a safety
    factor; the fastest diffusivity is the binding one.
    """
    if not total_time > 0.0:
        raise ValueError(f"total_time must be positive, got {total_time}")
    if not 0.0 < safety <= 0.5:
        raise ValueError(f"safety must be in (0, 0.5], got {safety}")
    alpha_max = max(device.diffusivity, material.diffusivity)
    half_length = max(min_half_length,
                      7.9 * math.sqrt(alpha_max * total_time))
    dx = half_length / points
    dt = safety * dx * dx / alpha_max
    nsteps = max(1, int(math.ceil(total_time / dt)))
    return FdConfig(half_length, points, total_time / nsteps, total_time)


def _validate(cfg: FdConfig, device: ThermalProps, material: ThermalProps,
              device_temp: float, material_temp: float) -> None:
    dx = cfg.dx
    for label, body in (("device", device), ("material", material)):
        r = body.diffusivity * cfg.dt / (dx * dx)
        if r > 0.5 + 1e-12:
            raise FdStabilityError(
                f"{label} side violates the stability bound: "
                f"alpha*dt/dx^2 = {r:.4f} > 0.5")
    # conservative reach estimate: could the full initial step make it to a wall?
    step = abs(device_temp - material_temp)
    if step > 0.0:
        for label, body in (("device", device), ("material", material)):
            arg = cfg.half_length / (2.0 * math.sqrt(body.diffusivity
                                                     * cfg.total_time))
            drift = step * math.erfc(arg)
            if drift > BOUNDARY_DRIFT_LIMIT_C:
                raise FdDomainError(
                    f"{label}-side far boundary would drift about "
                    f"{drift:.2e} degC over {cfg.total_time} s; "
                    f"lengthen the domain (half_length={cfg.half_length} m)")


@dataclasses.dataclass
class FdSolution:
    """Recorded output of one solve.

    times            recorded instants, s (exact step multiples)
    interface_temps  shared-node temperature at those instants, degC
    snapshots        full field at those instants, shape (len(times), 2N+1)
    """

    device: ThermalProps
    material: ThermalProps
    device_temp: float
    material_temp: float
    config: FdConfig
    times: np.ndarray
    interface_temps: np.ndarray
    snapshots: np.ndarray
    initial_interface_temp: float

    def _time_index(self, t: float) -> int:
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 0.51 * self.config.dt + 1e-12:
            raise ValueError(f"time {t} s was not recorded "
                             f"(nearest is {self.times[idx]} s)")
        return idx

    def temperature(self, side: str, depth: float, t: float) -> float:
        """Field value at a given depth into one body at a recorded time."""
        if not 0.0 <= depth <= self.config.half_length:
            raise ValueError(f"depth {depth} m outside the domain")
        n = self.config.points
        snap = self.snapshots[self._time_index(t)]
        pos = depth / self.config.dx
        lo = min(int(pos), n - 1)
        frac = pos - lo
        if side == "device":
            a, b = snap[n - lo], snap[n - lo - 1]
        elif side == "material":
            a, b = snap[n + lo], snap[n + lo + 1]
        else:
            raise ValueError(f"side must be 'device' or 'material', got {side!r}")
        return float(a + frac * (b - a))

    def interface_flux(self) -> np.ndarray:
        """One-sided device-side flux density at the interface, W/m^2.

        -lambda_dev * (T[N] - T[N-1]) / dx, positive when heat leaves the
        device (+x direction), matching the closed-form sign convention.
        """
        n = self.config.points
        return (-self.device.conductivity
                * (self.snapshots[:, n] - self.snapshots[:, n - 1])
                / self.config.dx)

    def enthalpy_changes(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-side enthalpy change (J/m^2) from t=0 to each recorded time.

        Each side owns its interior nodes plus half of the shared cell.  The
        two series should be equal and opposite to within far-boundary
        leakage.
        """
        n = self.config.points
        dx = self.config.dx
        rc_dev = self.device.volumetric_heat_capacity
        rc_mat = self.material.volumetric_heat_capacity
        dev = rc_dev * dx * (
            np.sum(self.snapshots[:, :n] - self.device_temp, axis=1)
            + 0.5 * (self.snapshots[:, n] - self.initial_interface_temp))
        mat = rc_mat * dx * (
            np.sum(self.snapshots[:, n + 1:] - self.material_temp, axis=1)
            + 0.5 * (self.snapshots[:, n] - self.initial_interface_temp))
        return dev, mat


def solve_contact(device: ThermalProps, material: ThermalProps,
                  device_temp: float, material_temp: float,
                  cfg: FdConfig, sample_times=None) -> FdSolution:
    """March the coupled pair from first contact to cfg.total_time.

    sample_times lists the instants to record (snapped to step multiples);
    by default 100 evenly spaced instants ending at total_time.
    """
    for label, v in (("device_temp", device_temp),
                     ("material_temp", material_temp)):
        if not np.isfinite(v) or v < ABSOLUTE_ZERO_C:
            raise ValueError(f"{label}={v} is below absolute zero or not finite")
    _validate(cfg, device, material, device_temp, material_temp)

    n = cfg.points
    dx = cfg.dx
    dt = cfg.dt
    nsteps = int(round(cfg.total_time / dt))
    if sample_times is None:
        sample_times = np.linspace(cfg.total_time / 100.0, cfg.total_time, 100)
    sample_steps = sorted({min(nsteps, max(1, int(round(t / dt))))
                           for t in np.atleast_1d(sample_times)})

    r_dev = device.diffusivity * dt / (dx * dx)
    r_mat = material.diffusivity * dt / (dx * dx)
    rc_dev = device.volumetric_heat_capacity
    rc_mat = material.volumetric_heat_capacity
    rc_if = 0.5 * (rc_dev + rc_mat)
    mu_dev = dt * device.conductivity / (dx * dx * rc_if)
    mu_mat = dt * material.conductivity / (dx * dx * rc_if)

    T = np.empty(2 * n + 1)
    T[:n] = device_temp
    T[n + 1:] = material_temp
    T[n] = (rc_dev * device_temp + rc_mat * material_temp) / (rc_dev + rc_mat)
    t_if0 = float(T[n])

    times = np.empty(len(sample_steps))
    iface = np.empty(len(sample_steps))
    snaps = np.empty((len(sample_steps), 2 * n + 1))
    record = {step: slot for slot, step in enumerate(sample_steps)}

    for step in range(1, nsteps + 1):
        # grab the interface's neighbours before the interior sweeps move
        # them: every edge flux this step must see the same old field, else
        # the two half-cells stop balancing exactly
        left, right = T[n - 1], T[n + 1]
        T[1:n] += r_dev * (T[2:n + 1] - 2.0 * T[1:n] + T[:n - 1])
        T[n + 1:2 * n] += r_mat * (T[n + 2:] - 2.0 * T[n + 1:2 * n]
                                   + T[n:2 * n - 1])
        T[n] += mu_dev * (left - T[n]) + mu_mat * (right - T[n])
        slot = record.get(step)
        if slot is not None:
            times[slot] = step * dt
            iface[slot] = T[n]
            snaps[slot] = T

    return FdSolution(device=device, material=material,
                      device_temp=float(device_temp),
                      material_temp=float(material_temp),
                      config=cfg, times=times, interface_temps=iface,
                      snapshots=snaps, initial_interface_temp=t_if0)
