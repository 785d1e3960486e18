"""Command-line harness: simulate traces, build datasets, train and score
the classifier, and run whole experiments from JSON spec files.

Exit codes: 0 success, 1 validation error (bad flags, malformed files,
unknown materials), 2 runtime or numerical failure (diverged training,
unstable grid). Every artifact the harness writes is a documented format:
trace CSV, dataset TSV, confusion CSV, checkpoint binary, summary JSON.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import classifier, episodes, fdm, materials, physics
from .traces import ContactConfig, write_trace_csv


class CliValidationError(ValueError):
    """User input that fails validation before any computation runs."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the harness reserves 2 for
    # runtime failures, so remap usage problems to the validation code.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliValidationError(message)


# ---------------------------------------------------------------------------
# experiment spec files

@dataclasses.dataclass
class ExperimentSpec:
    """Everything needed to rerun one classification experiment.

    The JSON form of this record is the harness's reproducibility contract:
    two runs from equal spec files produce byte-identical artifacts.
    """

    name: str
    materials: list[str]
    material_temp: float        # °C, shared by every class
    device_temp: float          # °C
    sensor_depth: float = 1.0e-3   # m
    duration: float = 10.0      # s
    sample_rate: float = 10.0   # Hz
    area: float = 4.0e-4        # m^2
    noise_sigma: float = 0.5    # °C
    shift_range: float = 1.0    # °C
    multiplier: int = 100
    augment_seed: int = 0
    test_fraction: float = 0.2
    split_seed: int = 0
    hidden_size: int = 32
    epochs: int = 2000
    batch_size: int = 100
    learning_rate: float = 0.05
    lr_decay: float = 0.02
    momentum: float = 0.9
    weight_decay: float = 1.0e-4
    clip_norm: float = 5.0
    train_seed: int = 0

    def __post_init__(self):
        if not self.name:
            raise ValueError("experiment name must be non-empty")
        if len(self.materials) < 2:
            raise ValueError("an experiment needs at least 2 materials")

    @classmethod
    def from_json(cls, text: str, source: str = "<string>") -> "ExperimentSpec":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CliValidationError(f"{source}: invalid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise CliValidationError(f"{source}: spec must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise CliValidationError(
                f"{source}: unknown spec fields {sorted(unknown)}; "
                f"known fields: {sorted(known)}")
        for req in ("name", "materials", "material_temp", "device_temp"):
            if req not in raw:
                raise CliValidationError(f"{source}: missing required field {req!r}")
        try:
            return cls(**raw)
        except (TypeError, ValueError) as exc:
            raise CliValidationError(f"{source}: {exc}") from None

    def to_json(self) -> str:
        # sort_keys so serialized specs are canonical and diffable
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"

    def contact_configs(self) -> list[ContactConfig]:
        return [ContactConfig(material=m, material_temp=self.material_temp,
                              device_temp=self.device_temp,
                              sensor_depth=self.sensor_depth,
                              duration=self.duration,
                              sample_rate=self.sample_rate, area=self.area)
                for m in self.materials]

    def augmentation(self) -> episodes.AugmentationSpec:
        return episodes.AugmentationSpec(noise_sigma=self.noise_sigma,
                                         shift_range=self.shift_range,
                                         multiplier=self.multiplier,
                                         rng_seed=self.augment_seed)

    def train_config(self) -> classifier.TrainConfig:
        return classifier.TrainConfig(hidden_size=self.hidden_size,
                                      epochs=self.epochs,
                                      batch_size=self.batch_size,
                                      learning_rate=self.learning_rate,
                                      lr_decay=self.lr_decay,
                                      momentum=self.momentum,
                                      weight_decay=self.weight_decay,
                                      clip_norm=self.clip_norm,
                                      seed=self.train_seed)


def load_experiment_spec(path) -> ExperimentSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliValidationError(f"cannot read spec file: {exc}") from None
    return ExperimentSpec.from_json(text, source=str(path))


def bundled_spec_path(name: str) -> Path:
    """Path of a spec shipped with the package, e.g. 'case-2c'."""
    from importlib.resources import files
    p = files("thermotouch") / "specs" / f"{name}.json"
    return Path(str(p))


def run_experiment(spec: ExperimentSpec, db: materials.MaterialDb,
                   outdir: Path) -> dict:
    """Dataset -> train -> evaluate; writes all artifacts under outdir.

    Returns the summary dict (also written as summary.json). The summary
    embeds the fully resolved spec so the run is reproducible from the
    summary alone.
    """
    outdir.mkdir(parents=True, exist_ok=True)
    ds = episodes.build_dataset(spec.contact_configs(), db, spec.augmentation(),
                                test_fraction=spec.test_fraction,
                                seed=spec.split_seed)
    episodes.save_dataset(ds, outdir / "dataset.tsv")
    model, history = classifier.train(ds, spec.train_config())
    classifier.save_model(model, outdir / "model.ckpt")
    with open(outdir / "history.csv", "w", encoding="utf-8") as fh:
        fh.write("epoch,loss\n")
        for e, loss in enumerate(history):
            fh.write(f"{e},{loss!r}\n")
    cm = classifier.evaluate(model, ds)
    cm.write_csv(outdir / "confusion.csv")
    nc = classifier.nearest_centroid_classify(ds.train, ds.test,
                                              class_names=ds.class_names)
    summary = {
        "spec": dataclasses.asdict(spec),
        "class_names": ds.class_names,
        "dataset_size": len(ds.train) + len(ds.test),
        "initial_loss": history[0],
        "final_loss": history[-1],
        "test_accuracy": cm.accuracy,
        "nearest_centroid_accuracy": nc.accuracy,
        "confusion": cm.counts.tolist(),
    }
    with open(outdir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


# ---------------------------------------------------------------------------
# subcommands

def _load_db(args) -> materials.MaterialDb:
    if args.db is not None:
        return materials.load_db(args.db)
    return materials.default_db()


def _add_db_arg(p):
    p.add_argument("--db", default=None,
                   help="material database file (default: bundled database)")


def _add_contact_args(p):
    p.add_argument("--material-temp", type=float, required=True,
                   help="initial material temperature, °C")
    p.add_argument("--device-temp", type=float, required=True,
                   help="initial device surface temperature, °C")
    p.add_argument("--sensor-depth", type=float, default=1.0e-3,
                   help="sensor depth below the contact face, m (default 1 mm)")
    p.add_argument("--duration", type=float, default=10.0,
                   help="grasp duration, s (default 10)")
    p.add_argument("--rate", type=float, default=10.0,
                   help="sample rate, Hz (default 10)")
    p.add_argument("--area", type=float, default=4.0e-4,
                   help="contact area, m^2 (default 4e-4: a 2x2 cm pad)")


def _cmd_simulate(args) -> int:
    db = _load_db(args)
    cfg = ContactConfig(material=args.material, material_temp=args.material_temp,
                        device_temp=args.device_temp,
                        sensor_depth=args.sensor_depth, duration=args.duration,
                        sample_rate=args.rate, area=args.area)
    trace = episodes.synthesize_episode(cfg, db)
    write_trace_csv(trace, args.output)
    state = physics.make_contact_state(physics.water_props(),
                                       db.props(args.material),
                                       args.device_temp, args.material_temp)
    print(f"wrote {trace.samples.size} samples to {args.output} "
          f"(contact temperature {state.surface_temp:.4f} C)")
    return 0


def _dataset_from_args(args, db) -> episodes.Dataset:
    names = [m.strip() for m in args.materials.split(",") if m.strip()]
    configs = [ContactConfig(material=m, material_temp=args.material_temp,
                             device_temp=args.device_temp,
                             sensor_depth=args.sensor_depth,
                             duration=args.duration, sample_rate=args.rate,
                             area=args.area) for m in names]
    spec = episodes.AugmentationSpec(noise_sigma=args.sigma,
                                     shift_range=args.shift,
                                     multiplier=args.multiplier,
                                     rng_seed=args.aug_seed)
    return episodes.build_dataset(configs, db, spec,
                                  test_fraction=args.test_fraction,
                                  seed=args.split_seed)


def _add_augment_args(p):
    p.add_argument("--sigma", type=float, default=0.5,
                   help="Gaussian noise std, °C (default 0.5)")
    p.add_argument("--shift", type=float, default=1.0,
                   help="uniform trace-offset half-width, °C (default 1.0)")
    p.add_argument("--multiplier", type=int, default=100,
                   help="augmented traces per class (default 100)")
    p.add_argument("--aug-seed", type=int, default=0)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--split-seed", type=int, default=0)


def _cmd_gen_dataset(args) -> int:
    db = _load_db(args)
    ds = _dataset_from_args(args, db)
    episodes.save_dataset(ds, args.output)
    print(f"wrote dataset: {len(ds.train)} train / {len(ds.test)} test traces, "
          f"classes {ds.class_names}")
    return 0


def _add_train_args(p):
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--batch", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--lr-decay", type=float, default=0.02,
                   help="learning-rate multiplier reached at the last epoch")
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--weight-decay", type=float, default=1.0e-4)
    p.add_argument("--clip", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)


def _train_config_from_args(args) -> classifier.TrainConfig:
    return classifier.TrainConfig(hidden_size=args.hidden, epochs=args.epochs,
                                  batch_size=args.batch, learning_rate=args.lr,
                                  lr_decay=args.lr_decay,
                                  momentum=args.momentum,
                                  weight_decay=args.weight_decay,
                                  clip_norm=args.clip, seed=args.seed)


def _cmd_train(args) -> int:
    ds = episodes.load_dataset(args.dataset)
    model, history = classifier.train(ds, _train_config_from_args(args))
    classifier.save_model(model, args.output)
    if args.history:
        with open(args.history, "w", encoding="utf-8") as fh:
            fh.write("epoch,loss\n")
            for e, loss in enumerate(history):
                fh.write(f"{e},{loss!r}\n")
    print(f"trained {args.epochs} epochs: loss {history[0]:.4f} -> "
          f"{history[-1]:.4f}; model saved to {args.output}")
    return 0


def _cmd_eval(args) -> int:
    ds = episodes.load_dataset(args.dataset)
    model = classifier.load_model(args.model)
    if model.n_classes != len(ds.class_names):
        raise CliValidationError(
            f"model has {model.n_classes} classes, dataset has "
            f"{len(ds.class_names)}")
    cm = classifier.evaluate(model, ds)
    if args.output:
        cm.write_csv(args.output)
    print(f"test accuracy: {cm.accuracy:.4f} "
          f"({int(np.trace(cm.counts))}/{cm.total})")
    for name, row in zip(cm.class_names, cm.counts):
        print(f"  {name}: " + " ".join(str(v) for v in row))
    return 0


def _cmd_sweep_dt(args) -> int:
    db = _load_db(args)
    deltas = [float(s) for s in args.delta_ts.split(",") if s.strip()]
    if not deltas:
        raise CliValidationError("--delta-ts produced an empty list")
    names = [m.strip() for m in args.materials.split(",") if m.strip()]
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for dt_md in deltas:
        spec = ExperimentSpec(
            name=f"sweep-dt-{dt_md:g}", materials=names,
            material_temp=args.material_temp,
            device_temp=args.material_temp + dt_md,
            sensor_depth=args.sensor_depth, duration=args.duration,
            sample_rate=args.rate, area=args.area, noise_sigma=args.sigma,
            shift_range=args.shift, multiplier=args.multiplier,
            augment_seed=args.aug_seed, test_fraction=args.test_fraction,
            split_seed=args.split_seed, hidden_size=args.hidden,
            epochs=args.epochs, batch_size=args.batch, learning_rate=args.lr,
            lr_decay=args.lr_decay, momentum=args.momentum,
            weight_decay=args.weight_decay, clip_norm=args.clip,
            train_seed=args.seed)
        summary = run_experiment(spec, db, outdir / spec.name)
        rows.append((dt_md, summary))
        print(f"delta_T={dt_md:g}: accuracy {summary['test_accuracy']:.4f} "
              f"(nearest-centroid {summary['nearest_centroid_accuracy']:.4f})")
    with open(outdir / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write("delta_t_c,device_temp_c,material_temp_c,"
                 "test_accuracy,nearest_centroid_accuracy\n")
        for dt_md, s in rows:
            fh.write(f"{dt_md!r},{s['spec']['device_temp']!r},"
                     f"{s['spec']['material_temp']!r},"
                     f"{s['test_accuracy']!r},"
                     f"{s['nearest_centroid_accuracy']!r}\n")
    print(f"sweep summary written to {outdir / 'sweep.csv'}")
    return 0


def _cmd_experiment(args) -> int:
    if args.bundled:
        spec = ExperimentSpec.from_json(
            bundled_spec_path(args.spec).read_text(encoding="utf-8"),
            source=f"bundled:{args.spec}")
    else:
        spec = load_experiment_spec(args.spec)
    db = _load_db(args)
    summary = run_experiment(spec, db, Path(args.output))
    print(f"experiment {spec.name}: test accuracy "
          f"{summary['test_accuracy']:.4f} over {summary['dataset_size']} traces "
          f"({len(spec.materials)} classes)")
    print(f"artifacts in {args.output}")
    return 0


def _cmd_flux_surface(args) -> int:
    db = _load_db(args)
    mat = db.props(args.material)
    dev = physics.water_props()
    g = physics.gamma(dev, mat)
    deltas = [float(s) for s in args.delta_ts.split(",") if s.strip()]
    times = np.linspace(args.t_min, args.t_max, args.t_steps)
    if args.t_min <= 0.0:
        raise CliValidationError("--t-min must be > 0 (flux diverges at t=0)")
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("delta_t_c,time_s,heat_flux_w\n")
        for dt_md in deltas:
            for t in times:
                q = physics.heat_flux_device(dev, dt_md, g, args.area, float(t))
                fh.write(f"{dt_md!r},{float(t)!r},{float(q)!r}\n")
    print(f"wrote {len(deltas) * times.size} flux samples to {args.output}")
    return 0


def _cmd_check_grid(args) -> int:
    db = _load_db(args)
    mat = db.props(args.material)
    dev = physics.water_props()
    cfg = fdm.suggest_config(dev, mat, total_time=args.duration,
                             points=args.points)
    sol = fdm.solve_contact(dev, mat, args.device_temp, args.material_temp, cfg)
    state = physics.make_contact_state(dev, mat, args.device_temp,
                                       args.material_temp)
    err = float(np.max(np.abs(sol.interface_temps - state.surface_temp)))
    print(f"grid: half_length={cfg.half_length!r} m, points={cfg.points}, "
          f"dt={cfg.dt!r} s ({round(cfg.total_time / cfg.dt)} steps)")
    print(f"max |T_interface - T_s| over sampled times: {err:.6f} C "
          f"(analytic T_s = {state.surface_temp:.6f} C)")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="thermotouch",
                     description="Thermal contact simulation and material "
                                 "classification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[], help="write one closed-form "
                       "sensor trace as CSV")
    p.add_argument("--material", required=True)
    _add_contact_args(p)
    _add_db_arg(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("gen-dataset", help="synthesize an augmented "
                       "train/test dataset file")
    p.add_argument("--materials", required=True,
                   help="comma-separated class material names")
    _add_contact_args(p)
    _add_augment_args(p)
    _add_db_arg(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen_dataset)

    p = sub.add_parser("train", help="train the LSTM on a dataset file")
    p.add_argument("--dataset", required=True)
    _add_train_args(p)
    p.add_argument("-o", "--output", required=True, help="checkpoint path")
    p.add_argument("--history", default=None, help="optional loss CSV")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="score a checkpoint on a dataset's "
                       "test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("-o", "--output", default=None, help="confusion CSV path")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep-dt", help="run one experiment per device-"
                       "material temperature difference")
    p.add_argument("--delta-ts", required=True,
                   help="comma-separated device-minus-material offsets, °C")
    p.add_argument("--materials", required=True)
    p.add_argument("--material-temp", type=float, default=23.0)
    p.add_argument("--sensor-depth", type=float, default=1.0e-3)
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--rate", type=float, default=10.0)
    p.add_argument("--area", type=float, default=4.0e-4)
    _add_augment_args(p)
    _add_train_args(p)
    _add_db_arg(p)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=_cmd_sweep_dt)

    p = sub.add_parser("experiment", help="run a JSON experiment spec "
                       "end to end")
    p.add_argument("spec", help="spec file path, or bundled name with "
                   "--bundled (e.g. case-1a)")
    p.add_argument("--bundled", action="store_true",
                   help="treat the spec argument as a bundled spec name")
    _add_db_arg(p)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("flux-surface", help="tabulate device heat flux over "
                       "a (delta_T, time) grid")
    p.add_argument("--material", required=True)
    p.add_argument("--delta-ts", default="0,5,10,15,20",
                   help="comma-separated temperature differences, °C")
    p.add_argument("--t-min", type=float, default=0.1)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--t-steps", type=int, default=100)
    p.add_argument("--area", type=float, default=4.0e-4)
    _add_db_arg(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_flux_surface)

    p = sub.add_parser("check-grid", help="compare the finite-difference "
                       "solver against the closed-form contact temperature")
    p.add_argument("--material", required=True)
    p.add_argument("--material-temp", type=float, default=43.0)
    p.add_argument("--device-temp", type=float, default=23.0)
    p.add_argument("--duration", type=float, default=10.0)
    p.add_argument("--points", type=int, default=4000)
    _add_db_arg(p)
    p.set_defaults(func=_cmd_check_grid)

    return parser


# FdStabilityError and FdDomainError subclass ValueError but are numerical
# failures, not input validation; the clause order below sorts them out.
VALIDATION_ERRORS = (CliValidationError, materials.MaterialDbError,
                     episodes.DatasetFormatError,
                     classifier.CheckpointFormatError, OSError, ValueError)
RUNTIME_ERRORS = (classifier.TrainingDivergedError, fdm.FdStabilityError,
                  fdm.FdDomainError, FloatingPointError, ArithmeticError,
                  RuntimeError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
