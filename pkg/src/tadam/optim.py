"""Per-step update rules for SGD, Adam/AMSGrad, and their student-t variants.

The student-t rule treats each incoming gradient as one observation from a
heavy-tailed population and folds it into the first moment with a data
dependent weight w_t instead of Adam's fixed (1 - beta1).  The weight is
large for gradients close to the current mean estimate (inliers, w_t > 1)
and decays toward zero as the normalized squared deviation D_t grows, so a
single wild gradient barely moves the momentum.  As nu -> infinity the
weight pins to 1 and the rule degenerates to Adam exactly.

All step functions are pure: they never mutate their inputs and return
fresh state, so a caller that replays the same (state, grad, config) gets
bit-identical results.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

ALGORITHMS = ("sgd", "adam", "tadam")

#: Sentinel for OptimizerConfig.nu: resolve to the group's element count at
#: registration time.
NU_AUTO = "auto"


@dataclass(frozen=True)
class OptimizerConfig:
    """Hyperparameters shared by every update rule.

    ``nu`` (degrees of freedom) may be the string ``"auto"``, in which case
    each parameter group resolves it to its own element count when the group
    is registered; it never changes after that.
    """

    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    nu: float | str = NU_AUTO
    amsgrad: bool = False
    algorithm: str = "adam"

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        # alpha = 0 is allowed: it advances state without moving parameters.
        if not (np.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be a finite nonnegative real, got {self.alpha}")
        if not (0.0 <= self.beta1 < 1.0):
            raise ValueError(f"beta1 must lie in [0, 1), got {self.beta1}")
        if not (0.0 <= self.beta2 < 1.0):
            raise ValueError(f"beta2 must lie in [0, 1), got {self.beta2}")
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be a small positive real, got {self.epsilon}")
        if isinstance(self.nu, str):
            if self.nu != NU_AUTO:
                raise ValueError(f"nu must be a positive real or {NU_AUTO!r}, got {self.nu!r}")
        elif not (np.isfinite(self.nu) and self.nu > 0):
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.algorithm == "tadam" and self.beta1 < 0.5:
            # The weight-mass decay (2*beta1 - 1)/beta1 would turn negative
            # and W could dip below zero.
            raise ValueError(
                f"tadam requires beta1 >= 0.5, got {self.beta1}")

    def resolved(self, d: int) -> "OptimizerConfig":
        """Return a copy with nu="auto" replaced by the group size d."""
        if self.nu == NU_AUTO:
            return dataclasses.replace(self, nu=float(d))
        return self


@dataclass(frozen=True)
class GroupState:
    """Optimizer state for one parameter group.

    ``m``/``v``/``v_hat`` share the parameter tensor's shape; ``d`` is the
    element count.  ``W`` is the accumulated student-t weight mass, unused
    by the plain Adam path.  Treat instances as immutable values.
    """

    m: np.ndarray
    v: np.ndarray
    v_hat: np.ndarray
    W: float
    t: int
    d: int


@dataclass(frozen=True)
class StepDiagnostics:
    """Per-step observables of a student-t update."""

    w_t: float      # sample weight (nu + d) / (nu + D_t), in (0, (nu+d)/nu]
    D_t: float      # normalized squared deviation of the gradient
    beta_w: float   # effective first-moment decay W/(W + w_t)


def init_state(shape: int | tuple[int, ...], config: OptimizerConfig) -> GroupState:
    """Fresh zero state for a group of the given shape.

    The student-t weight mass starts at beta1/(1 - beta1), the value it
    would hold forever if every observed weight were exactly 1.
    """
    if isinstance(shape, (int, np.integer)):
        shape = (int(shape),)
    m = np.zeros(shape, dtype=np.float64)
    if m.size == 0:
        raise ValueError("parameter group must contain at least one element")
    W0 = config.beta1 / (1.0 - config.beta1) if config.algorithm == "tadam" else 0.0
    return GroupState(m=m, v=np.zeros_like(m), v_hat=np.zeros_like(m),
                      W=W0, t=0, d=m.size)


def _checked(arr: np.ndarray, name: str, like: np.ndarray | None = None) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.float64)
    if like is not None and arr.shape != like.shape:
        raise ValueError(
            f"{name} shape {arr.shape} does not match parameter shape {like.shape}")
    if not np.all(np.isfinite(arr)):
        bad = int(np.count_nonzero(~np.isfinite(arr)))
        raise ValueError(f"{name} contains {bad} non-finite entries")
    return arr


def _corrected_delta(m: np.ndarray, denom_v: np.ndarray, t: int,
                     config: OptimizerConfig) -> np.ndarray:
    # Shared Adam-form parameter shift with both zero-init bias corrections.
    first = 1.0 - config.beta1 ** t
    second = 1.0 - config.beta2 ** t
    return config.alpha * m / (first * (np.sqrt(denom_v / second) + config.epsilon))


def sgd_step(params: np.ndarray, grad: np.ndarray, alpha: float) -> np.ndarray:
    """Plain gradient descent: params - alpha * grad."""
    params = _checked(params, "params")
    grad = _checked(grad, "grad", like=params)
    if not (np.isfinite(alpha) and alpha >= 0):
        raise ValueError(f"alpha must be a finite nonnegative real, got {alpha}")
    return params - alpha * grad


def adam_step(state: GroupState, params: np.ndarray, grad: np.ndarray,
              config: OptimizerConfig) -> tuple[GroupState, np.ndarray]:
    """One Adam (optionally AMSGrad) update; returns (new state, new params)."""
    if config.algorithm != "adam":
        raise ValueError(f"adam_step requires algorithm='adam', got {config.algorithm!r}")
    params = _checked(params, "params")
    grad = _checked(grad, "grad", like=state.m)
    if params.shape != state.m.shape:
        raise ValueError(
            f"params shape {params.shape} does not match state shape {state.m.shape}")

    t = state.t + 1
    m = config.beta1 * state.m + (1.0 - config.beta1) * grad
    v = config.beta2 * state.v + (1.0 - config.beta2) * grad * grad
    if config.amsgrad:
        v_hat = np.maximum(state.v_hat, v)
        denom_v = v_hat
    else:
        v_hat = state.v_hat
        denom_v = v
    new_params = params - _corrected_delta(m, denom_v, t, config)
    new_state = GroupState(m=m, v=v, v_hat=v_hat, W=state.W, t=t, d=state.d)
    return new_state, new_params


def tadam_step(state: GroupState, params: np.ndarray, grad: np.ndarray,
               config: OptimizerConfig) -> tuple[GroupState, np.ndarray, StepDiagnostics]:
    """One student-t update; returns (new state, new params, diagnostics).

    Order of operations within a step:

    1. D_t: squared deviation of the gradient from the current mean,
       normalized per element by v_{t-1} + epsilon.
    2. w_t = (nu + d)/(nu + D_t).
    3. First moment: convex mix of m_{t-1} and the gradient with weights
       W_{t-1} and w_t.
    4. Weight mass decay: W_t = ((2*beta1 - 1)/beta1) * W_{t-1} + w_t.
    5. Second moment and the Adam-form parameter shift, unchanged.
    """
    if config.algorithm != "tadam":
        raise ValueError(f"tadam_step requires algorithm='tadam', got {config.algorithm!r}")
    if isinstance(config.nu, str):
        raise ValueError("nu='auto' must be resolved to a group size before stepping")
    params = _checked(params, "params")
    grad = _checked(grad, "grad", like=state.m)
    if params.shape != state.m.shape:
        raise ValueError(
            f"params shape {params.shape} does not match state shape {state.m.shape}")

    nu = float(config.nu)
    t = state.t + 1
    resid = grad - state.m
    D_t = float(np.sum(resid * resid / (state.v + config.epsilon)))
    w_t = (nu + state.d) / (nu + D_t)
    beta_w = state.W / (state.W + w_t)
    m = beta_w * state.m + (w_t / (state.W + w_t)) * grad
    W = ((2.0 * config.beta1 - 1.0) / config.beta1) * state.W + w_t
    v = config.beta2 * state.v + (1.0 - config.beta2) * grad * grad
    if config.amsgrad:
        v_hat = np.maximum(state.v_hat, v)
        denom_v = v_hat
    else:
        v_hat = state.v_hat
        denom_v = v
    new_params = params - _corrected_delta(m, denom_v, t, config)
    new_state = GroupState(m=m, v=v, v_hat=v_hat, W=W, t=t, d=state.d)
    return new_state, new_params, StepDiagnostics(w_t=w_t, D_t=D_t, beta_w=beta_w)


def effective_decay(state: GroupState, w_t: float) -> float:
    """The decay beta_w = W/(W + w_t) a weight of w_t would receive now.

    Equal to beta1 whenever the weight mass sits at its fixed point
    beta1/(1 - beta1) and w_t = 1; below beta1 for inliers (w_t > 1) and
    above it for outliers (w_t < 1).
    """
    if not (np.isfinite(w_t) and w_t > 0):
        raise ValueError(f"w_t must be a positive real, got {w_t}")
    if state.W < 0:
        raise ValueError(f"weight mass must be nonnegative, got {state.W}")
    return state.W / (state.W + w_t)


class Optimizer:
    """Applies one configured update rule across named parameter groups.

    Groups are registered once (resolving nu="auto" to each group's element
    count) and stepped together.  ``step`` returns the updated parameter
    arrays plus per-group diagnostics for student-t runs; callers own the
    arrays and write them back wherever they live.
    """

    def __init__(self, config: OptimizerConfig):
        self.config = config
        self._states: dict[str, GroupState] = {}
        self._configs: dict[str, OptimizerConfig] = {}

    @property
    def group_names(self) -> list[str]:
        return list(self._states)

    def register(self, name: str, shape: int | tuple[int, ...]) -> None:
        if name in self._states:
            raise ValueError(f"parameter group {name!r} already registered")
        state = init_state(shape, self.config)
        self._states[name] = state
        self._configs[name] = self.config.resolved(state.d)

    def state(self, name: str) -> GroupState:
        return self._states[name]

    def resolved_config(self, name: str) -> OptimizerConfig:
        return self._configs[name]

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray],
             ) -> tuple[dict[str, np.ndarray], dict[str, StepDiagnostics]]:
        """Advance every registered group by one update.

        Returns (new params by name, diagnostics by name); the diagnostics
        dict is empty for non-student-t algorithms.
        """
        missing = [n for n in self._states if n not in grads or n not in params]
        if missing:
            raise KeyError(f"missing params/grads for groups: {missing}")
        new_params: dict[str, np.ndarray] = {}
        diags: dict[str, StepDiagnostics] = {}
        for name, state in self._states.items():
            cfg = self._configs[name]
            if cfg.algorithm == "sgd":
                new_params[name] = sgd_step(params[name], grads[name], cfg.alpha)
            elif cfg.algorithm == "adam":
                self._states[name], new_params[name] = adam_step(
                    state, params[name], grads[name], cfg)
            else:
                self._states[name], new_params[name], diags[name] = tadam_step(
                    state, params[name], grads[name], cfg)
        return new_params, diags
