"""Feed-forward network and Adam optimiser on numpy arrays.

The network has tanh hidden layers and a linear output layer. Parameters
are kept as a list of arrays so they can be flattened for checkpoints and
finite-difference checks.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np


@dataclass
class ForwardCache:
    """Layer inputs and activations kept for the backward pass."""

    inputs: list[np.ndarray]
    activations: list[np.ndarray]


class Mlp:
    """Multi-layer perceptron with tanh hidden units.

    Attributes:
        sizes: Input size, hidden sizes and output size.
        params: Alternating weight matrices and bias vectors.
    """

    def __init__(
        self,
        sizes: Sequence[int],
        rng: np.random.Generator,
        output_scale: float = 1.0,
    ) -> None:
        """Initialise weights with scaled normal draws and zero biases.

        Args:
            sizes: Layer sizes from input to output, at least two entries.
            rng: Generator used for the initial weights.
            output_scale: Extra factor on the output layer weights.
        """
        if len(sizes) < 2:
            raise ValueError("A network needs an input and an output size")
        self.sizes = tuple(int(s) for s in sizes)
        self.params: list[np.ndarray] = []
        last = len(self.sizes) - 2
        for i, (fan_in, fan_out) in enumerate(zip(self.sizes, self.sizes[1:])):
            scale = np.sqrt(1.0 / fan_in) * (output_scale if i == last else 1.0)
            self.params.append(rng.standard_normal((fan_in, fan_out)) * scale)
            self.params.append(np.zeros(fan_out))

    @property
    def num_layers(self) -> int:
        return len(self.params) // 2

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
        """Outputs for a batch of inputs of shape (N, sizes[0])."""
        cache = ForwardCache(inputs=[], activations=[])
        h = np.atleast_2d(x)
        for i in range(self.num_layers):
            weight, bias = self.params[2 * i], self.params[2 * i + 1]
            cache.inputs.append(h)
            h = h @ weight + bias
            if i < self.num_layers - 1:
                h = np.tanh(h)
                cache.activations.append(h)
        return h, cache

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(self, cache: ForwardCache, grad_out: np.ndarray) -> list[np.ndarray]:
        """Gradients of every parameter given d(loss)/d(output)."""
        grads: list[np.ndarray] = [np.empty(0)] * len(self.params)
        delta = grad_out
        for i in range(self.num_layers - 1, -1, -1):
            grads[2 * i] = cache.inputs[i].T @ delta
            grads[2 * i + 1] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.params[2 * i].T) * (
                    1.0 - cache.activations[i - 1] ** 2
                )
        return grads

    def get_flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params])

    def set_flat(self, flat: np.ndarray) -> None:
        """Overwrite the parameters in place from a flat vector."""
        offset = 0
        for p in self.params:
            p[...] = np.reshape(flat[offset : offset + p.size], p.shape)
            offset += p.size

    @property
    def num_params(self) -> int:
        return sum(p.size for p in self.params)

    def copy_params(self) -> list[np.ndarray]:
        return [p.copy() for p in self.params]


class Adam:
    """Adam optimiser over a list of parameter arrays, updated in place."""

    def __init__(
        self,
        params: list[np.ndarray],
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        self.params = params
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.steps = 0

    def step(self, grads: Sequence[np.ndarray]) -> None:
        """Descend along the given gradients."""
        self.steps += 1
        correction1 = 1.0 - self.beta1**self.steps
        correction2 = 1.0 - self.beta2**self.steps
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.learning_rate * (m / correction1) / (
                np.sqrt(v / correction2) + self.eps
            )

    def state(self) -> tuple[list[np.ndarray], list[np.ndarray], int]:
        return [m.copy() for m in self.m], [v.copy() for v in self.v], self.steps

    def restore(self, state: tuple[list[np.ndarray], list[np.ndarray], int]) -> None:
        m, v, steps = state
        for dst, src in zip(self.m, m):
            dst[...] = src
        for dst, src in zip(self.v, v):
            dst[...] = src
        self.steps = steps
