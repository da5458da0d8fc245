"""Minimal fully-connected network: ReLU hidden layers, identity output,
mean-squared-error loss, exact reverse-mode gradients, float64 throughout.

Parameters live in named groups ("layer0.w", "layer0.b", ...) so the
optimizer can keep independent state per tensor; the group order is fixed
by construction and shared with gradient dictionaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tadam.rng import stream


@dataclass
class Batch:
    """A block of training pairs; rows are samples."""

    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self) -> None:
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=np.float64))
        self.targets = np.atleast_2d(np.asarray(self.targets, dtype=np.float64))
        if self.inputs.shape[0] == 0:
            raise ValueError("batch must contain at least one sample")
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise ValueError(
                f"inputs have {self.inputs.shape[0]} rows but targets have "
                f"{self.targets.shape[0]}")
        if not (np.all(np.isfinite(self.inputs)) and np.all(np.isfinite(self.targets))):
            raise ValueError("batch entries must be finite")

    def __len__(self) -> int:
        return self.inputs.shape[0]


class MlpModel:
    """Layer weights/biases plus the cache of the most recent forward pass."""

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        if len(weights) != len(biases) or not weights:
            raise ValueError("need one bias vector per weight matrix, at least one layer")
        self.weights = [np.array(W, dtype=np.float64) for W in weights]
        self.biases = [np.array(b, dtype=np.float64) for b in biases]
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.ndim != 2 or b.ndim != 1 or W.shape[1] != b.shape[0]:
                raise ValueError(f"layer {i}: weight {W.shape} and bias {b.shape} disagree")
            if i > 0 and self.weights[i - 1].shape[1] != W.shape[0]:
                raise ValueError(
                    f"layer {i - 1} outputs {self.weights[i - 1].shape[1]} features "
                    f"but layer {i} expects {W.shape[0]}")
        # (activations fed to each layer, pre-activations) of the last forward
        self._cache: tuple[list[np.ndarray], list[np.ndarray]] | None = None

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [W.shape[1] for W in self.weights]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def parameter_groups(self) -> dict[str, np.ndarray]:
        """Named parameters in a fixed, documented order."""
        groups: dict[str, np.ndarray] = {}
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            groups[f"layer{i}.w"] = W
            groups[f"layer{i}.b"] = b
        return groups

    def set_parameters(self, params: dict[str, np.ndarray]) -> None:
        for i in range(self.n_layers):
            W = params[f"layer{i}.w"]
            b = params[f"layer{i}.b"]
            if W.shape != self.weights[i].shape or b.shape != self.biases[i].shape:
                raise ValueError(f"layer {i}: replacement parameter shape mismatch")
            self.weights[i] = np.asarray(W, dtype=np.float64)
            self.biases[i] = np.asarray(b, dtype=np.float64)


def init_model(layer_sizes: list[int], seed: int) -> MlpModel:
    """Build a model with fan-in-scaled uniform init, deterministic per seed.

    Weights and biases of a layer with fan_in inputs are drawn uniformly
    from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    """
    if len(layer_sizes) < 2:
        raise ValueError("need at least an input and an output width")
    if any(int(s) < 1 for s in layer_sizes):
        raise ValueError(f"zero-width layer in {layer_sizes}")
    rng = stream(seed, "init")
    weights = []
    biases = []
    for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpModel(weights, biases)


def forward(model: MlpModel, inputs: np.ndarray) -> np.ndarray:
    """Predictions for a matrix of inputs; caches per-layer values for backward."""
    a = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if a.shape[1] != model.weights[0].shape[0]:
        raise ValueError(
            f"inputs have width {a.shape[1]}, model expects {model.weights[0].shape[0]}")
    acts = [a]
    pre = []
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = acts[-1] @ W + b
        pre.append(z)
        if i < model.n_layers - 1:
            acts.append(np.maximum(z, 0.0))
        else:
            acts.append(z)
    model._cache = (acts, pre)
    return acts[-1]


def mse_loss_and_grad(model: MlpModel, batch: Batch,
                      ) -> tuple[float, dict[str, np.ndarray]]:
    """Mean squared error over the batch and its gradient per parameter group.

    Gradient keys and ordering match ``model.parameter_groups()``.
    """
    preds = forward(model, batch.inputs)
    if preds.shape != batch.targets.shape:
        raise ValueError(
            f"model emits {preds.shape}, targets are {batch.targets.shape}")
    err = preds - batch.targets
    loss = float(np.mean(err * err))

    acts, pre = model._cache
    grads: dict[str, np.ndarray] = {}
    delta = 2.0 * err / err.size
    for i in range(model.n_layers - 1, -1, -1):
        grads[f"layer{i}.w"] = acts[i].T @ delta
        grads[f"layer{i}.b"] = delta.sum(axis=0)
        if i > 0:
            # ReLU passes gradient only where the pre-activation was positive
            delta = (delta @ model.weights[i].T) * (pre[i - 1] > 0.0)
    ordered = {name: grads[name] for name in model.parameter_groups()}
    return loss, ordered
