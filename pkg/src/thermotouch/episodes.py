"""Synthetic grasp episodes: clean traces, noisy augmentation, datasets.

The measurement chain follows the hardware protocol: grasp for a fixed
duration, record the embedded-sensor temperature, then multiply each clean
episode into a labelled batch by adding per-sample Gaussian sensor noise
plus one constant per-trace offset drawn uniformly (trial-to-trial level
wander).  Every random draw is keyed by (seed, stream, trace index), so
traces can be produced in any order, or in parallel, without changing the
result.
"""

import dataclasses

import numpy as np

from .materials import MaterialDb
from .physics import ThermalProps, device_sensor_response, water_props
from .traces import ContactConfig, TemperatureTrace

DATASET_FORMAT_VERSION = 1


class DatasetFormatError(ValueError):
    """Raised for unreadable or malformed dataset files."""


@dataclasses.dataclass(frozen=True)
class AugmentationSpec:
    """How one clean episode becomes a batch of noisy ones.

    noise_sigma  per-sample Gaussian noise std, degC (instrument band)
    shift_range  half-width of the uniform per-trace constant offset, degC
    multiplier   traces generated per clean episode
    rng_seed     base seed for all draws
    """

    noise_sigma: float = 0.5
    shift_range: float = 1.0
    multiplier: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        if self.noise_sigma < 0.0 or not np.isfinite(self.noise_sigma):
            raise ValueError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.shift_range < 0.0 or not np.isfinite(self.shift_range):
            raise ValueError(f"shift_range must be >= 0, got {self.shift_range}")
        if self.multiplier < 1:
            raise ValueError(f"multiplier must be >= 1, got {self.multiplier}")
        if self.rng_seed < 0:
            raise ValueError(f"rng_seed must be >= 0, got {self.rng_seed}")


def synthesize_episode(config: ContactConfig, db: MaterialDb,
                       device: ThermalProps | None = None) -> TemperatureTrace:
    """One clean (noise-free) grasp episode for a material in the table."""
    record = db.get(config.material)
    material = db.props(config.material)
    if device is None:
        device = water_props()
    trace = device_sensor_response(
        device, material,
        device_temp=config.device_temp, material_temp=config.material_temp,
        sensor_depth=config.sensor_depth, duration=config.duration,
        sample_rate=config.sample_rate, label=record.name)
    trace.meta = config
    return trace


def augment(base: TemperatureTrace, spec: AugmentationSpec,
            stream: int = 0) -> list[TemperatureTrace]:
    """Make spec.multiplier noisy copies of one clean trace.

    Trace k draws from its own generator seeded by
    (rng_seed, stream, k): first the constant offset, then the per-sample
    noise.  Identical inputs give identical batches regardless of how the
    work is ordered or distributed.
    """
    out = []
    for k in range(spec.multiplier):
        rng = np.random.default_rng([spec.rng_seed, stream, k])
        offset = rng.uniform(-spec.shift_range, spec.shift_range)
        noise = rng.normal(0.0, spec.noise_sigma, base.samples.size)
        out.append(TemperatureTrace(label=base.label,
                                    samples=base.samples + offset + noise,
                                    dt=base.dt, meta=base.meta))
    return out


@dataclasses.dataclass
class Dataset:
    """Labelled train/test traces plus the provenance needed to rebuild them."""

    train: list[TemperatureTrace]
    test: list[TemperatureTrace]
    class_names: list[str]
    split_seed: int
    augmentation: AugmentationSpec | None = None

    def __post_init__(self):
        if not self.class_names:
            raise ValueError("class_names must be non-empty")
        known = set(self.class_names)
        for trace in self.train + self.test:
            if trace.label not in known:
                raise ValueError(f"trace labelled {trace.label!r} is not in "
                                 f"class_names {self.class_names}")

    def label_indices(self, traces) -> np.ndarray:
        lookup = {name: i for i, name in enumerate(self.class_names)}
        return np.array([lookup[t.label] for t in traces], dtype=int)


def build_dataset(class_configs: list[ContactConfig], db: MaterialDb,
                  spec: AugmentationSpec, test_fraction: float = 0.2,
                  seed: int = 0,
                  device: ThermalProps | None = None) -> Dataset:
    """Synthesize, augment and split one dataset.

    Each class contributes exactly spec.multiplier traces, split
    class-balanced into round(multiplier * test_fraction) test traces and
    the rest for training.  Class i augments on stream i and splits with a
    generator keyed by (seed, i), so datasets are reproducible end to end.
    """
    if len(class_configs) < 2:
        raise ValueError("need at least two classes to build a dataset")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    n_test = int(round(spec.multiplier * test_fraction))
    if n_test < 1 or n_test >= spec.multiplier:
        raise ValueError(f"test_fraction {test_fraction} leaves an empty split "
                         f"at multiplier {spec.multiplier}")
    labels = []
    train: list[TemperatureTrace] = []
    test: list[TemperatureTrace] = []
    for ci, config in enumerate(class_configs):
        base = synthesize_episode(config, db, device)
        if base.label in labels:
            raise ValueError(f"duplicate class label {base.label!r}")
        labels.append(base.label)
        batch = augment(base, spec, stream=ci)
        order = np.random.default_rng([seed, ci]).permutation(spec.multiplier)
        test.extend(batch[i] for i in order[:n_test])
        train.extend(batch[i] for i in order[n_test:])
    return Dataset(train=train, test=test, class_names=labels,
                   split_seed=seed, augmentation=spec)


# ---------------------------------------------------------------------------
# dataset file format, version 1
#
# Plain text.  A header block of "key<TAB>value..." lines, then per trace a
# tab-separated metadata line followed by one line of space-separated
# samples.  Floats are written with repr() and round-trip exactly.

_TRACE_FIELDS = ("split", "label", "material", "material_temp", "device_temp",
                 "sensor_depth", "duration", "sample_rate", "area")


def save_dataset(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# thermotouch dataset\n")
        fh.write(f"format_version\t{DATASET_FORMAT_VERSION}\n")
        fh.write("classes\t" + "\t".join(ds.class_names) + "\n")
        fh.write(f"split_seed\t{ds.split_seed}\n")
        if ds.augmentation is not None:
            a = ds.augmentation
            fh.write(f"augmentation\t{a.noise_sigma!r}\t{a.shift_range!r}"
                     f"\t{a.multiplier}\t{a.rng_seed}\n")
        fh.write(f"trace_count\t{len(ds.train) + len(ds.test)}\n")
        for split, traces in (("train", ds.train), ("test", ds.test)):
            for trace in traces:
                meta = trace.meta
                if meta is None:
                    raise ValueError(
                        f"trace {trace.label!r} has no contact metadata; "
                        "only synthesized datasets can be saved")
                fields = (split, trace.label, meta.material,
                          repr(meta.material_temp), repr(meta.device_temp),
                          repr(meta.sensor_depth), repr(meta.duration),
                          repr(meta.sample_rate), repr(meta.area))
                fh.write("trace\t" + "\t".join(fields) + "\n")
                fh.write(" ".join(repr(float(v)) for v in trace.samples) + "\n")


def load_dataset(path) -> Dataset:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DatasetFormatError(f"cannot read dataset {path}: {exc}") from None

    header: dict[str, list[str]] = {}
    i = 0
    n = len(lines)
    while i < n:
        line = lines[i]
        if not line.strip() or line.startswith("#"):
            i += 1
            continue
        if line.startswith("trace\t"):
            break
        parts = line.split("\t")
        header[parts[0]] = parts[1:]
        i += 1

    def need(key):
        if key not in header:
            raise DatasetFormatError(f"{path}: missing header line {key!r}")
        return header[key]

    version = need("format_version")[0]
    if version != str(DATASET_FORMAT_VERSION):
        raise DatasetFormatError(
            f"{path}: unsupported format_version {version!r} "
            f"(this build reads version {DATASET_FORMAT_VERSION})")
    class_names = need("classes")
    split_seed = int(need("split_seed")[0])
    augmentation = None
    if "augmentation" in header:
        a = header["augmentation"]
        if len(a) != 4:
            raise DatasetFormatError(f"{path}: malformed augmentation line")
        augmentation = AugmentationSpec(noise_sigma=float(a[0]),
                                        shift_range=float(a[1]),
                                        multiplier=int(a[2]),
                                        rng_seed=int(a[3]))
    trace_count = int(need("trace_count")[0])

    train: list[TemperatureTrace] = []
    test: list[TemperatureTrace] = []
    seen = 0
    while i < n:
        line = lines[i]
        if not line.strip() or line.startswith("#"):
            i += 1
            continue
        parts = line.split("\t")
        if parts[0] != "trace" or len(parts) != 1 + len(_TRACE_FIELDS):
            raise DatasetFormatError(f"{path}:{i + 1}: expected a trace line, "
                                     f"got {line[:60]!r}")
        if i + 1 >= n:
            raise DatasetFormatError(f"{path}: truncated file, trace {seen} "
                                     "has no sample line")
        split, label, mat, mt, dev, depth, dur, rate, area = parts[1:]
        if split not in ("train", "test"):
            raise DatasetFormatError(f"{path}:{i + 1}: bad split {split!r}")
        config = ContactConfig(material=mat, material_temp=float(mt),
                               device_temp=float(dev),
                               sensor_depth=float(depth), duration=float(dur),
                               sample_rate=float(rate), area=float(area))
        samples = np.array([float(v) for v in lines[i + 1].split()])
        expected = config.n_samples
        if samples.size != expected:
            raise DatasetFormatError(
                f"{path}:{i + 2}: trace has {samples.size} samples, "
                f"config implies {expected}")
        trace = TemperatureTrace(label=label, samples=samples,
                                 dt=1.0 / config.sample_rate, meta=config)
        (train if split == "train" else test).append(trace)
        seen += 1
        i += 2
    if seen != trace_count:
        raise DatasetFormatError(f"{path}: header promises {trace_count} "
                                 f"traces but file holds {seen}")
    return Dataset(train=train, test=test, class_names=class_names,
                   split_seed=split_seed, augmentation=augmentation)
