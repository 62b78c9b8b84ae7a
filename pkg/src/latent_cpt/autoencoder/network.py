"""Dense layers with hand-written forward/backward passes.

Layers are stateless with respect to evaluation: forward returns the cache
that backward needs, so a network can be evaluated concurrently once trained.
Weights follow the (out, in) convention: y = x @ W.T + b for a batch x of
shape (n, in).
"""

import numpy as np

from ..errors import LengthMismatch, NonFiniteInput

ACTIVATIONS = ("relu", "identity")


class MlpLayer:
    """One dense layer: weights (n_out, n_in), biases (n_out,), and an
    activation, either "relu" or "identity"."""

    def __init__(self, weights, biases, activation: str):
        self.weights = np.array(weights, dtype=float)
        self.biases = np.array(biases, dtype=float)
        if activation not in ACTIVATIONS:
            raise LengthMismatch(f"unknown activation {activation!r}")
        self.activation = activation
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[0],):
            raise LengthMismatch(
                f"weights {self.weights.shape} and biases {self.biases.shape} inconsistent"
            )
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.biases))):
            raise NonFiniteInput("layer parameters must be finite")

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]

    @property
    def n_out(self) -> int:
        return self.weights.shape[0]

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, tuple]:
        """x (n, n_in) -> activations (n, n_out), plus the backward cache."""
        z = x @ self.weights.T + self.biases
        out = np.maximum(z, 0.0) if self.activation == "relu" else z
        return out, (x, z)

    def backward(self, cache: tuple, grad_out: np.ndarray):
        """Gradient of the scalar loss w.r.t. inputs and parameters.

        Returns (grad_x, grad_weights, grad_biases).
        """
        x, z = cache
        grad_z = grad_out * (z > 0.0) if self.activation == "relu" else grad_out
        return grad_z @ self.weights, grad_z.T @ x, grad_z.sum(axis=0)

    def copy(self) -> "MlpLayer":
        return MlpLayer(self.weights.copy(), self.biases.copy(), self.activation)


def init_layer(n_in: int, n_out: int, activation: str, rng: np.random.Generator) -> MlpLayer:
    """Uniform fan-in-scaled weights in +-1/sqrt(n_in); zero biases."""
    bound = 1.0 / np.sqrt(n_in)
    weights = rng.uniform(-bound, bound, size=(n_out, n_in))
    return MlpLayer(weights, np.zeros(n_out), activation)


def check_chain(layers: list[MlpLayer]) -> None:
    for a, b in zip(layers, layers[1:]):
        if a.n_out != b.n_in:
            raise LengthMismatch(f"layer sizes {a.n_out} -> {b.n_in} do not chain")


def network_forward(layers: list[MlpLayer], x: np.ndarray) -> tuple[np.ndarray, list]:
    caches = []
    out = x
    for layer in layers:
        out, cache = layer.forward(out)
        caches.append(cache)
    return out, caches


def network_backward(layers: list[MlpLayer], caches: list, grad_out: np.ndarray):
    """Backpropagate through the stack; returns (grad_input, per-layer
    [(grad_weights, grad_biases), ...] in layer order)."""
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(layers)  # type: ignore[list-item]
    grad = grad_out
    for k in range(len(layers) - 1, -1, -1):
        grad, grad_w, grad_b = layers[k].backward(caches[k], grad)
        grads[k] = (grad_w, grad_b)
    return grad, grads
