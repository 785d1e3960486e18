"""Grasp-episode containers shared by the physics and dataset layers.

A grasp episode is the temperature history seen by a sensor embedded in the
tempered gripper surface while it holds an object.  Episodes are stored as
plain sample arrays with enough metadata to regenerate them.
"""

import dataclasses
import numpy as np

ABSOLUTE_ZERO_C = -273.15


@dataclasses.dataclass(frozen=True)
class ContactConfig:
    """Everything needed to synthesize one clean grasp episode.

    material      name of the grasped object in the material table
    material_temp initial object temperature, degC
    device_temp   initial gripper (device) temperature, degC
    sensor_depth  sensor distance behind the contact surface, m
    duration      grasp length, s
    sample_rate   sensor sampling rate, Hz
    area          contact patch area, m^2 (2 cm x 2 cm blocks by default)
    """

    material: str
    material_temp: float
    device_temp: float
    sensor_depth: float = 1.0e-3
    duration: float = 10.0
    sample_rate: float = 10.0
    area: float = 4.0e-4

    def __post_init__(self):
        if not self.material:
            raise ValueError("material name must be non-empty")
        # normalize numerics to plain floats so serialized configs are uniform
        for name in ("material_temp", "device_temp", "sensor_depth",
                     "duration", "sample_rate", "area"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for label, temp in (("material_temp", self.material_temp),
                            ("device_temp", self.device_temp)):
            if not np.isfinite(temp) or temp < ABSOLUTE_ZERO_C:
                raise ValueError(f"{label}={temp} is below absolute zero or not finite")
        if not self.sensor_depth >= 0.0:
            raise ValueError(f"sensor_depth must be >= 0, got {self.sensor_depth}")
        for label, value in (("duration", self.duration),
                             ("sample_rate", self.sample_rate),
                             ("area", self.area)):
            if not (np.isfinite(value) and value > 0.0):
                raise ValueError(f"{label} must be positive and finite, got {value}")

    @property
    def n_samples(self) -> int:
        # one sample at t=0 plus ceil(duration * rate) more, sample k at t = k/rate
        return int(np.ceil(self.duration * self.sample_rate)) + 1


@dataclasses.dataclass
class TemperatureTrace:
    """One sampled temperature history.

    label    class label ("" for unlabeled traces)
    samples  sensor readings, degC, sample k taken at t = k*dt
    dt       sampling interval, s
    meta     the ContactConfig the trace came from, if known
    """

    label: str
    samples: np.ndarray
    dt: float
    meta: ContactConfig | None = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise ValueError("a trace needs a 1-d array of at least two samples")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("trace contains non-finite samples")
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.samples.size)


def write_trace_csv(trace: TemperatureTrace, path) -> None:
    """Write one trace as a two-column CSV (time_s, temperature_c)."""
    with open(path, "w", encoding="utf-8") as fh:
        if trace.label:
            fh.write(f"# label={trace.label}\n")
        fh.write("time_s,temperature_c\n")
        for t, v in zip(trace.times, trace.samples):
            # plain-float repr: shortest string that round-trips exactly
            fh.write(f"{float(t)!r},{float(v)!r}\n")


def read_trace_csv(path, label: str = "") -> TemperatureTrace:
    """Read a trace written by write_trace_csv; the sampling step is inferred."""
    times = []
    temps = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("time_s"):
                if line.startswith("# label=") and not label:
                    label = line.split("=", 1)[1]
                continue
            t_str, v_str = line.split(",")
            times.append(float(t_str))
            temps.append(float(v_str))
    if len(temps) < 2:
        raise ValueError(f"{path}: trace file has fewer than two samples")
    dt = times[1] - times[0]
    return TemperatureTrace(label=label, samples=np.array(temps), dt=dt)
