"""Tikhonov functional, optimizers and reconstruction experiments."""
from .models import (
    AdmissibleBox,
    GradientPair,
    GroundTruth,
    IterationRecord,
    Measurement,
    OptimizerConfig,
    ReconstructionResult,
    RunStatus,
    SeparableSource,
    StepRule,
)
from .functional import (
    cost,
    cost_regularized,
    cost_spatial,
    gradient_full,
    gradient_spatial,
    lipschitz_constant,
)
from .metrics import acc_error, conv_error, lagged_norm
from .optimizer import cg_reconstruct, gradient_descent, project_admissible, stop_value
from .experiment import (
    EXAMPLES,
    ExampleReport,
    NoiseRun,
    add_noise,
    run_example,
    run_example_async,
    run_examples_async,
    synthesize_measurement,
)

__all__ = [
    "AdmissibleBox",
    "GradientPair",
    "GroundTruth",
    "IterationRecord",
    "Measurement",
    "OptimizerConfig",
    "ReconstructionResult",
    "RunStatus",
    "SeparableSource",
    "StepRule",
    "cost",
    "cost_regularized",
    "cost_spatial",
    "gradient_full",
    "gradient_spatial",
    "lipschitz_constant",
    "acc_error",
    "conv_error",
    "lagged_norm",
    "cg_reconstruct",
    "gradient_descent",
    "project_admissible",
    "stop_value",
    "EXAMPLES",
    "ExampleReport",
    "NoiseRun",
    "add_noise",
    "run_example",
    "run_example_async",
    "run_examples_async",
    "synthesize_measurement",
]
