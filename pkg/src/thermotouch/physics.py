"""Closed-form contact conduction between a tempered gripper and a grasped object.

Both bodies are treated as semi-infinite solids that touch at t=0 across a
plane.  With perfect contact the shared surface jumps to a constant
temperature T_s fixed by the effusivity ratio of the two bodies, and each
half-space then relaxes along the classical erf profile

    T(x, t) = T_s + (T_i - T_s) * erf(x / (2*sqrt(alpha*t)))

where x is depth into the body, T_i its initial temperature and alpha its
thermal diffusivity.  T_s, the sensor response inside the device, and the
surface heat flow all follow from this one solution.

Temperatures are degC, lengths m, times s.  Material behaviour enters only
through conductivity  lambda [W/(m K)],  effusivity  e [J/(m^2 K sqrt(s))]
and diffusivity  alpha = (lambda/e)^2 [m^2/s].
"""

import dataclasses
import math

import numpy as np

from .traces import ABSOLUTE_ZERO_C, TemperatureTrace

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)

# Relative slack allowed between stored diffusivity and (conductivity/effusivity)^2.
PROPS_CONSISTENCY_RTOL = 1.0e-9


def erf(z: float) -> float:
    """Gauss error function.

    Maclaurin series for |z| <= 4, asymptotic complement expansion beyond.
    Absolute error stays below 1e-10 everywhere (worst near the series/
    asymptotic switch at |z|=4), comfortably inside the 1e-7 budget the
    rest of the package assumes.
    """
    z = float(z)
    if math.isnan(z):
        return math.nan
    if z < 0.0:
        return -erf(-z)
    if z <= 4.0:
        # sum z^(2n+1) / (n! (2n+1)) with alternating sign
        total = 0.0
        power = z  # z^(2n+1) / n!
        n = 0
        while True:
            term = power / (2 * n + 1)
            total += -term if (n & 1) else term
            n += 1
            power *= z * z / n
            if power < 1.0e-17 * (2 * n + 1):
                break
        return _TWO_OVER_SQRT_PI * total
    # erfc asymptotic: exp(-z^2)/(z sqrt(pi)) * (1 - 1/(2 z^2) + 3/(2 z^2)^2 - ...)
    inv2zz = 1.0 / (2.0 * z * z)
    term = 1.0
    total = 1.0
    for n in range(1, 40):
        nxt = term * (2 * n - 1) * inv2zz
        if nxt >= abs(term):  # divergent tail reached
            break
        term = nxt
        total += -term if (n & 1) else term
        if abs(term) < 1.0e-18:
            break
    erfc = math.exp(-z * z) / (z * math.sqrt(math.pi)) * total
    return 1.0 - erfc


def effusivity(conductivity: float, density: float, specific_heat: float) -> float:
    """e = sqrt(lambda * rho * c), the contact-matching property of a material."""
    for label, v in (("conductivity", conductivity), ("density", density),
                     ("specific_heat", specific_heat)):
        if not (np.isfinite(v) and v > 0.0):
            raise ValueError(f"{label} must be positive and finite, got {v}")
    return math.sqrt(conductivity * density * specific_heat)


@dataclasses.dataclass(frozen=True)
class ThermalProps:
    """Conductivity, effusivity and diffusivity of one body.

    Only this triple matters for plane-contact conduction; density and
    specific heat never need to be stored separately.  The three values must
    agree: alpha = (lambda/e)^2.
    """

    conductivity: float   # W/(m K)
    effusivity: float     # J/(m^2 K sqrt(s))
    diffusivity: float    # m^2/s

    def __post_init__(self):
        for label, v in (("conductivity", self.conductivity),
                         ("effusivity", self.effusivity),
                         ("diffusivity", self.diffusivity)):
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError(f"{label} must be positive and finite, got {v}")
        implied = (self.conductivity / self.effusivity) ** 2
        if abs(self.diffusivity - implied) > PROPS_CONSISTENCY_RTOL * implied:
            raise ValueError(
                f"inconsistent properties: diffusivity {self.diffusivity} vs "
                f"(conductivity/effusivity)^2 = {implied}")

    @property
    def volumetric_heat_capacity(self) -> float:
        """rho * c = lambda / alpha, J/(m^3 K)."""
        return self.conductivity / self.diffusivity

    @classmethod
    def from_conductivity_effusivity(cls, conductivity: float, effusivity: float):
        if not (np.isfinite(effusivity) and effusivity > 0.0):
            raise ValueError(f"effusivity must be positive and finite, got {effusivity}")
        return cls(conductivity, effusivity, (conductivity / effusivity) ** 2)

    @classmethod
    def from_base_properties(cls, conductivity: float, density: float,
                             specific_heat: float):
        e = effusivity(conductivity, density, specific_heat)
        return cls(conductivity, e, conductivity / (density * specific_heat))


def water_props() -> ThermalProps:
    """Near-body-temperature water, the default device-side medium.

    The tempered gripper is modelled as the circulating water behind its thin
    high-conductivity skin: lambda = 0.6 W/(m K), rho = 998 kg/m^3,
    c = 4182 J/(kg K), giving e of about 1582.
    """
    return ThermalProps.from_base_properties(0.6, 998.0, 4182.0)


def gamma(device: ThermalProps, material: ThermalProps) -> float:
    """Effusivity ratio e_device / e_material that sets the surface temperature."""
    return device.effusivity / material.effusivity


def _check_temp(label: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value < ABSOLUTE_ZERO_C:
        raise ValueError(f"{label}={value} is below absolute zero or not finite")
    return value


def contact_surface_temp(material_temp: float, device_temp: float,
                         gamma_ratio: float) -> float:
    """Shared surface temperature of the two half-spaces.

    T_s = (T_material + T_device * gamma) / (1 + gamma): an effusivity-
    weighted mean, so it always lies between the two initial temperatures and
    sits closer to the material side when gamma < 1 (material the stronger
    body, e.g. a metal against the water-backed gripper).
    """
    material_temp = _check_temp("material_temp", material_temp)
    device_temp = _check_temp("device_temp", device_temp)
    if not (np.isfinite(gamma_ratio) and gamma_ratio > 0.0):
        raise ValueError(f"gamma must be positive and finite, got {gamma_ratio}")
    ts = (material_temp + device_temp * gamma_ratio) / (1.0 + gamma_ratio)
    # the exact mean lies in [min, max] but the rounded one can escape by an
    # ulp; clamp so containment (and the equal-temperature identity) is exact
    lo, hi = sorted((material_temp, device_temp))
    return min(max(ts, lo), hi)


@dataclasses.dataclass(frozen=True)
class ContactState:
    """Resolved initial-contact quantities for one device/material pairing.

    delta_T is signed, device minus material, so the surface offset
    identities hold without case analysis:
        T_s - T_device   = -delta_T / (1 + gamma)
        T_s - T_material = +delta_T * gamma / (1 + gamma)
    """

    material_temp: float   # degC
    device_temp: float     # degC
    surface_temp: float    # degC
    gamma: float           # e_device / e_material
    delta_T: float         # degC, device_temp - material_temp

    def __post_init__(self):
        lo = min(self.material_temp, self.device_temp)
        hi = max(self.material_temp, self.device_temp)
        if not (lo <= self.surface_temp <= hi):
            raise ValueError("surface_temp must lie between the initial temperatures")
        if abs(self.delta_T - (self.device_temp - self.material_temp)) > 1e-9:
            raise ValueError("delta_T must equal device_temp - material_temp")


def make_contact_state(device: ThermalProps, material: ThermalProps,
                       device_temp: float, material_temp: float) -> ContactState:
    g = gamma(device, material)
    ts = contact_surface_temp(material_temp, device_temp, g)
    return ContactState(material_temp=float(material_temp),
                        device_temp=float(device_temp),
                        surface_temp=ts, gamma=g,
                        delta_T=float(device_temp) - float(material_temp))


def temp_profile(props: ThermalProps, initial_temp: float, surface_temp: float,
                 depth: float, t: float) -> float:
    """Temperature at depth x inside one half-space at time t after contact.

    T = T_s + (T_i - T_s) * erf(x / (2 sqrt(alpha t))) for x >= 0, t > 0;
    the value always lies between T_s and T_i.  At t = 0 the initial
    condition is returned for every depth: the x = 0, t = 0 corner is a
    genuine discontinuity and the pre-contact state is the useful limit.
    """
    initial_temp = _check_temp("initial_temp", initial_temp)
    surface_temp = _check_temp("surface_temp", surface_temp)
    if depth < 0.0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0.0:
        return initial_temp
    arg = depth / (2.0 * math.sqrt(props.diffusivity * t))
    return surface_temp + (initial_temp - surface_temp) * erf(arg)


def temp_gradient(props: ThermalProps, initial_temp: float, surface_temp: float,
                  depth: float, t: float) -> float:
    """Spatial derivative dT/dx of temp_profile, K/m.

    (T_i - T_s) / sqrt(pi alpha t) * exp(-x^2 / (4 alpha t)); the Gaussian
    factor is 1 at the surface, where the gradient is steepest.
    """
    if depth < 0.0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    if not t > 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    at = props.diffusivity * t
    return ((initial_temp - surface_temp) / math.sqrt(math.pi * at)
            * math.exp(-depth * depth / (4.0 * at)))


def surface_heat_flux(props: ThermalProps, initial_temp: float,
                      surface_temp: float, area: float, t: float) -> float:
    """Heat flow out of one body through its contact surface, W.

    -lambda * A * dT/dx at x=0, which reduces to
    lambda * A * (T_i - T_s) / sqrt(pi alpha t): positive while the body is
    hotter than the surface, decaying like 1/sqrt(t).
    """
    if not (np.isfinite(area) and area > 0.0):
        raise ValueError(f"area must be positive and finite, got {area}")
    if not t > 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    initial_temp = _check_temp("initial_temp", initial_temp)
    surface_temp = _check_temp("surface_temp", surface_temp)
    return (props.conductivity * area * (initial_temp - surface_temp)
            / math.sqrt(math.pi * props.diffusivity * t))


def heat_flux_device(device: ThermalProps, delta_T: float, gamma_ratio: float,
                     area: float, t: float) -> float:
    """Heat flow the device loses to the grasped object, W.

    With signed delta_T = T_device - T_material the surface offset is
    T_device - T_s = delta_T / (1 + gamma), so

        Q = lambda_dev * A * delta_T / ((1 + gamma) sqrt(pi alpha_dev t))

    Positive when the device is the hotter body (heat leaving the device),
    negative when the device is pre-cooled and absorbs heat.
    """
    if not (np.isfinite(area) and area > 0.0):
        raise ValueError(f"area must be positive and finite, got {area}")
    if not (np.isfinite(gamma_ratio) and gamma_ratio > 0.0):
        raise ValueError(f"gamma must be positive and finite, got {gamma_ratio}")
    if not t > 0.0:
        raise ValueError(f"t must be > 0, got {t}")
    return (device.conductivity * area * delta_T
            / ((1.0 + gamma_ratio) * math.sqrt(math.pi * device.diffusivity * t)))


def device_sensor_response(device: ThermalProps, material: ThermalProps,
                           device_temp: float, material_temp: float,
                           sensor_depth: float = 1.0e-3,
                           duration: float = 10.0,
                           sample_rate: float = 10.0,
                           label: str = "") -> TemperatureTrace:
    """Sampled reading of a sensor embedded sensor_depth into the device.

    The sensor sits on the device side of the contact, so its reading relaxes
    from T_device toward the pair-specific surface temperature T_s along the
    device-side erf profile.  Sample k is taken at t = k / sample_rate; the
    k=0 sample is the undisturbed device temperature.  Trace length is
    ceil(duration * sample_rate) + 1.
    """
    if sensor_depth < 0.0:
        raise ValueError(f"sensor_depth must be >= 0, got {sensor_depth}")
    if not duration > 0.0:
        raise ValueError(f"duration must be > 0, got {duration}")
    if not sample_rate > 0.0:
        raise ValueError(f"sample_rate must be > 0, got {sample_rate}")
    state = make_contact_state(device, material, device_temp, material_temp)
    n = int(math.ceil(duration * sample_rate)) + 1
    dt = 1.0 / sample_rate
    samples = np.empty(n)
    samples[0] = device_temp
    for k in range(1, n):
        samples[k] = temp_profile(device, device_temp, state.surface_temp,
                                  sensor_depth, k * dt)
    return TemperatureTrace(label=label, samples=samples, dt=dt)
