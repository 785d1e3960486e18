"""thermotouch: thermal contact simulation and material classification.

A temperature-controlled gripper surface touches an object; the contact
interface jumps to a temperature set by the effusivity ratio of the two
bodies, and the transient measured inside the gripper identifies the
object's material. This package provides the closed-form half-space
physics, a finite-difference reference solver, synthetic grasp-episode
datasets, a small LSTM classifier built on numpy, and a CLI harness that
runs whole experiments from JSON spec files.
"""

from .classifier import (
    CheckpointFormatError,
    ConfusionMatrix,
    LstmModel,
    TrainConfig,
    TrainingDivergedError,
    evaluate,
    forward,
    gradient_check,
    load_model,
    nearest_centroid_classify,
    predict,
    save_model,
    train,
)
from .episodes import (
    AugmentationSpec,
    Dataset,
    DatasetFormatError,
    augment,
    build_dataset,
    load_dataset,
    save_dataset,
    synthesize_episode,
)
from .fdm import (
    FdConfig,
    FdDomainError,
    FdSolution,
    FdStabilityError,
    solve_contact,
    suggest_config,
)
from .materials import (
    MaterialDb,
    MaterialDbError,
    MaterialRecord,
    default_db,
    load_db,
    parse_db,
    to_thermal_props,
    write_db,
)
from .physics import (
    ContactState,
    ThermalProps,
    contact_surface_temp,
    device_sensor_response,
    effusivity,
    erf,
    gamma,
    heat_flux_device,
    make_contact_state,
    surface_heat_flux,
    temp_gradient,
    temp_profile,
    water_props,
)
from .traces import (
    ContactConfig,
    TemperatureTrace,
    read_trace_csv,
    write_trace_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentationSpec",
    "CheckpointFormatError",
    "ConfusionMatrix",
    "ContactConfig",
    "ContactState",
    "Dataset",
    "DatasetFormatError",
    "FdConfig",
    "FdDomainError",
    "FdSolution",
    "FdStabilityError",
    "LstmModel",
    "MaterialDb",
    "MaterialDbError",
    "MaterialRecord",
    "TemperatureTrace",
    "ThermalProps",
    "TrainConfig",
    "TrainingDivergedError",
    "augment",
    "build_dataset",
    "contact_surface_temp",
    "default_db",
    "device_sensor_response",
    "effusivity",
    "erf",
    "evaluate",
    "forward",
    "gamma",
    "gradient_check",
    "heat_flux_device",
    "load_dataset",
    "load_db",
    "load_model",
    "make_contact_state",
    "nearest_centroid_classify",
    "parse_db",
    "predict",
    "read_trace_csv",
    "save_dataset",
    "save_model",
    "solve_contact",
    "suggest_config",
    "surface_heat_flux",
    "synthesize_episode",
    "temp_gradient",
    "to_thermal_props",
    "temp_profile",
    "train",
    "water_props",
    "write_db",
    "write_trace_csv",
    "__version__",
]
