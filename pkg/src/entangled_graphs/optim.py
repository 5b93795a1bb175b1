"""First-order optimizer with decoupled weight decay and linear warm-up.

Adaptive moments follow the usual (0.9, 0.999) convention; weight decay is
applied to the parameter directly, not through the gradient, and the learning
rate ramps linearly over the first ``warmup_steps`` updates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor


@dataclass
class OptimConfig:
    learning_rate: float = 3e-4
    weight_decay: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    warmup_steps: int = 10


class DecoupledAdam:
    """Adam moments + decoupled decay; deterministic given call order."""

    def __init__(self, params: list[Tensor], config: OptimConfig):
        self.params = params
        self.config = config
        self.step_count = 0
        self._m = [np.zeros_like(p.data) for p in params]
        self._v = [np.zeros_like(p.data) for p in params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def current_lr(self) -> float:
        c = self.config
        if c.warmup_steps <= 0:
            return c.learning_rate
        return c.learning_rate * min(1.0, (self.step_count + 1) / c.warmup_steps)

    def step(self) -> None:
        c = self.config
        lr = self.current_lr()
        self.step_count += 1
        t = self.step_count
        for i, p in enumerate(self.params):
            g = p.grad
            self._m[i] = c.beta1 * self._m[i] + (1 - c.beta1) * g
            self._v[i] = c.beta2 * self._v[i] + (1 - c.beta2) * g * g
            m_hat = self._m[i] / (1 - c.beta1 ** t)
            v_hat = self._v[i] / (1 - c.beta2 ** t)
            p.data -= lr * (m_hat / (np.sqrt(v_hat) + c.eps) + c.weight_decay * p.data)
