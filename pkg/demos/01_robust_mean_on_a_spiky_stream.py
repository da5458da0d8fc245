"""
Robust mean tracking on a contaminated stream
=============================================

A scalar parameter chases a constant target through noisy gradients.
Five percent of the rounds spike the noise by two orders of magnitude;
the heavy-tail-aware update shrugs those rounds off while the plain
adaptive baseline gets yanked around.
"""

import numpy as np

from tadam.optim import NU_AUTO, Optimizer, OptimizerConfig
from tadam.rng import stream

TARGET = 3.0
ROUNDS = 2000
ALPHA = 0.05

rng = stream(seed=7, tag="noise")
noise = rng.normal(0.0, 0.3, size=ROUNDS)
spikes = rng.random(ROUNDS) < 0.05
noise[spikes] += rng.normal(0.0, 30.0, size=int(spikes.sum()))

engines = {
    "adam": Optimizer(OptimizerConfig(alpha=ALPHA, algorithm="adam")),
    "tadam": Optimizer(OptimizerConfig(alpha=ALPHA, nu=NU_AUTO,
                                       algorithm="tadam")),
}
thetas = {name: np.zeros(1) for name in engines}
for engine in engines.values():
    engine.register("theta", shape=1)

for t in range(ROUNDS):
    for name, engine in engines.items():
        grad = (thetas[name] - TARGET) + noise[t]
        new_params, _ = engine.step({"theta": thetas[name]}, {"theta": grad})
        thetas[name] = new_params["theta"]

print(f"target                  {TARGET:.4f}")
for name, theta in thetas.items():
    print(f"{name:<6} after {ROUNDS} rounds {float(theta[0]):.4f} "
          f"(error {abs(float(theta[0]) - TARGET):.4f})")
print(f"spiked rounds           {int(spikes.sum())} of {ROUNDS}")
