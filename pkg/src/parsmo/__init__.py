"""Parallel decomposition solver for the dual SVM quadratic program."""

from .blocks import BlockSolution, BlockSolveError, BlockSubproblem, build_block, is_descent_block, solve_block
from .data import (
    Dataset,
    DatasetError,
    Sample,
    dump_libsvm,
    load_libsvm,
    parse_libsvm,
    save_libsvm,
    take_subset,
)
from .driver import (
    IterationReport,
    SolverConfig,
    StepsizeRule,
    TrainResult,
    iterate,
    train,
)
from .kernel import ColumnCache, KernelSpec, default_gamma, get_column, kernel_value
from .model import SvmModel
from .qp import (
    InfeasibleStepError,
    ProblemSpec,
    QPState,
    ViolationView,
    apply_step,
    full_gradient,
    init_zero,
    is_stopped,
    objective,
    relative_error,
    violation_view,
)

__all__ = [
    "BlockSolution",
    "BlockSolveError",
    "BlockSubproblem",
    "ColumnCache",
    "Dataset",
    "DatasetError",
    "InfeasibleStepError",
    "IterationReport",
    "KernelSpec",
    "ProblemSpec",
    "QPState",
    "Sample",
    "SolverConfig",
    "StepsizeRule",
    "SvmModel",
    "TrainResult",
    "ViolationView",
    "apply_step",
    "build_block",
    "default_gamma",
    "dump_libsvm",
    "full_gradient",
    "get_column",
    "init_zero",
    "is_descent_block",
    "is_stopped",
    "iterate",
    "kernel_value",
    "load_libsvm",
    "objective",
    "parse_libsvm",
    "relative_error",
    "save_libsvm",
    "solve_block",
    "take_subset",
    "train",
    "violation_view",
]

__version__ = "0.1.0"
