"""Robust adaptive gradient optimization with student-t first-moment estimation.

The package provides:

- ``tadam.optim``: per-step update rules (SGD, Adam/AMSGrad, and the
  student-t variants) over named parameter groups.
- ``tadam.mlp``: a minimal float64 fully-connected network with exact
  reverse-mode gradients, enough for the regression benchmark.
- ``tadam.data``: deterministic generation of the sin(2*pi*x) regression
  dataset under student-t/Bernoulli target corruption.
- ``tadam.verify``: Monte-Carlo checks of the optimizer's distributional
  claims and an empirical regret-bound evaluation on projected online
  convex problems.
- ``tadam.bench``: the experiment harness behind the ``tadam-bench`` CLI.
"""

from tadam.optim import (
    GroupState,
    Optimizer,
    OptimizerConfig,
    StepDiagnostics,
    adam_step,
    effective_decay,
    init_state,
    sgd_step,
    tadam_step,
)

__version__ = "0.1.0"

__all__ = [
    "GroupState",
    "Optimizer",
    "OptimizerConfig",
    "StepDiagnostics",
    "adam_step",
    "effective_decay",
    "init_state",
    "sgd_step",
    "tadam_step",
    "__version__",
]
