"""Fast margin maximization for linear classifiers via dual acceleration."""

from .certify import (
    CertificateInterval,
    OracleResult,
    margin_certificate,
    max_margin_oracle,
)
from .data import (
    DataError,
    Dataset,
    LabeledExample,
    build_dataset,
    load_dense_csv,
    load_sparse_text,
    margin,
)
from .dual import DualState, Schedule, amd_step, default_schedule, md_step, phi
from .kernel import Kernel, gram, linear_kernel, rbf_kernel, run_kernel
from .losses import Loss, exponential_loss, grad_psi, logistic_loss, psi, risk
from .multiclass import (
    FlattenedReduction,
    MulticlassProblem,
    multiclass_margin,
    reduce_to_binary,
)
from .solvers import METHODS, ConfigError, SolverConfig, make_config, run
from .trace import TraceRow, read_trace_csv, write_trace_csv

__version__ = "0.1.0"

__all__ = [
    "CertificateInterval",
    "ConfigError",
    "DataError",
    "Dataset",
    "DualState",
    "FlattenedReduction",
    "Kernel",
    "LabeledExample",
    "Loss",
    "METHODS",
    "MulticlassProblem",
    "OracleResult",
    "Schedule",
    "SolverConfig",
    "TraceRow",
    "amd_step",
    "build_dataset",
    "default_schedule",
    "exponential_loss",
    "grad_psi",
    "gram",
    "linear_kernel",
    "load_dense_csv",
    "load_sparse_text",
    "logistic_loss",
    "make_config",
    "margin",
    "margin_certificate",
    "max_margin_oracle",
    "md_step",
    "multiclass_margin",
    "phi",
    "psi",
    "rbf_kernel",
    "read_trace_csv",
    "reduce_to_binary",
    "risk",
    "run",
    "run_kernel",
    "write_trace_csv",
]
