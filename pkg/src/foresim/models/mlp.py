"""Fully-connected network trained by backpropagation, deterministic per seed.

Up to four hidden layers with individually sized neuron counts; linear
output + squared error for regression, sigmoid output + weighted BCE for
classification. Training runs exactly the configured number of epochs (no
early stopping). The flat-parameter objective used by L-BFGS doubles as the
hook for finite-difference gradient verification.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from ..errors import DataError, NumericalError

_ADAM_BETA1 = 0.9
_ADAM_BETA2 = 0.999
_ADAM_EPS = 1e-8


def _relu(z):
    return np.maximum(z, 0.0)


def _drelu(z, a):
    return (z > 0.0).astype(float)


_ACTIVATIONS = {
    "identity": (lambda z: z, lambda z, a: np.ones_like(z)),
    "logistic": (expit, lambda z, a: a * (1.0 - a)),
    "tanh": (np.tanh, lambda z, a: 1.0 - a * a),
    "relu": (_relu, _drelu),
}


class MLP:
    """Configurable multilayer perceptron for regression or binary
    classification.

    Parameters mirror the tunable hyperparameters: hidden `layer_sizes`,
    `activation`, `optimiser` (lbfgs | sgd | adam; for lbfgs the epoch count
    is the iteration budget), `l2` weight penalty (biases unpenalised),
    `learning_rate`, `epochs`, `batch_size`, `seed`.
    """

    def __init__(self, layer_sizes, activation: str = "relu",
                 task: str = "classification", l2: float = 0.0,
                 learning_rate: float = 0.01, optimiser: str = "adam",
                 epochs: int = 100, batch_size: int = 32, seed: int = 0):
        if task not in ("regression", "classification"):
            raise DataError(f"unknown task '{task}'")
        if activation not in _ACTIVATIONS:
            raise DataError(f"unknown activation '{activation}'")
        if optimiser not in ("lbfgs", "sgd", "adam"):
            raise DataError(f"unknown optimiser '{optimiser}'")
        self.layer_sizes = tuple(int(s) for s in layer_sizes)
        if not self.layer_sizes or any(s < 1 for s in self.layer_sizes):
            raise DataError("layer_sizes must be positive integers")
        self.activation = activation
        self.task = task
        self.l2 = float(l2)
        self.learning_rate = float(learning_rate)
        self.optimiser = optimiser
        self.epochs = int(epochs)
        self.batch_size = int(batch_size)
        self.seed = int(seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        self._n_features: int | None = None

    # -- parameters ---------------------------------------------------------

    def init_parameters(self, n_features: int) -> None:
        """Seeded Glorot-uniform weights, zero biases."""
        rng = np.random.default_rng(self.seed)
        sizes = (n_features, *self.layer_sizes, 1)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))
        self._n_features = n_features

    def get_flat_params(self) -> np.ndarray:
        return np.concatenate([a.ravel() for pair in zip(self.weights, self.biases)
                               for a in pair])

    def set_flat_params(self, flat: np.ndarray) -> None:
        offset = 0
        for i, w in enumerate(self.weights):
            self.weights[i] = flat[offset:offset + w.size].reshape(w.shape).copy()
            offset += w.size
            b = self.biases[i]
            self.biases[i] = flat[offset:offset + b.size].copy()
            offset += b.size
        if offset != flat.size:
            raise DataError("flat parameter vector has the wrong length")

    # -- forward / objective -------------------------------------------------

    def _forward(self, X: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
        act, _ = _ACTIVATIONS[self.activation]
        pre, post = [], [X]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = post[-1] @ w + b
            pre.append(z)
            post.append(act(z) if i < len(self.weights) - 1 else z)
        return pre, post

    def _output(self, z: np.ndarray) -> np.ndarray:
        return expit(z) if self.task == "classification" else z

    def loss_and_grad(self, X: np.ndarray, y: np.ndarray,
                      sample_weight: np.ndarray | None = None
                      ) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
        """Mean weighted loss plus L2 penalty, with gradients per layer."""
        n = len(y)
        sw = np.ones(n) if sample_weight is None else sample_weight
        pre, post = self._forward(X)
        z_out = pre[-1][:, 0]
        if self.task == "classification":
            losses = np.logaddexp(0.0, z_out) - y * z_out
            dz = expit(z_out) - y
        else:
            losses = 0.5 * (z_out - y) ** 2
            dz = z_out - y
        loss = float(np.sum(sw * losses)) / n
        loss += 0.5 * self.l2 * sum(float(np.sum(w * w)) for w in self.weights)

        delta = (sw * dz / n)[:, None]
        grads_w: list[np.ndarray] = [None] * len(self.weights)
        grads_b: list[np.ndarray] = [None] * len(self.weights)
        _, dact = _ACTIVATIONS[self.activation]
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = post[i].T @ delta + self.l2 * self.weights[i]
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * dact(pre[i - 1], post[i])
        return loss, grads_w, grads_b

    def flat_objective(self, flat: np.ndarray, X: np.ndarray, y: np.ndarray,
                       sample_weight: np.ndarray | None = None
                       ) -> tuple[float, np.ndarray]:
        """Objective over a flat parameter vector (for L-BFGS and gradient
        checks); restores the current parameters afterwards."""
        saved = self.get_flat_params()
        try:
            self.set_flat_params(flat)
            loss, gw, gb = self.loss_and_grad(X, y, sample_weight)
        finally:
            self.set_flat_params(saved)
        grad = np.concatenate([a.ravel() for pair in zip(gw, gb) for a in pair])
        return loss, grad

    # -- training ------------------------------------------------------------

    def fit(self, X, y, sample_weight=None) -> "MLP":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise DataError(f"bad training shapes X{X.shape} y{y.shape}")
        if self.task == "classification" and not (0.0 < y.mean() < 1.0):
            raise DataError("both classes must be present")
        sw = None if sample_weight is None else np.asarray(sample_weight, float)
        self.init_parameters(X.shape[1])

        if self.optimiser == "lbfgs":
            result = minimize(self.flat_objective, self.get_flat_params(),
                              args=(X, y, sw), method="L-BFGS-B", jac=True,
                              options={"maxiter": self.epochs, "gtol": 0.0,
                                       "ftol": 0.0})
            if not np.isfinite(result.fun):
                raise NumericalError("non-finite loss in L-BFGS training")
            self.set_flat_params(result.x)
            return self

        rng = np.random.default_rng(self.seed + 1)
        adam_m = [np.zeros_like(p) for p in self.weights + self.biases]
        adam_v = [np.zeros_like(p) for p in self.weights + self.biases]
        step = 0
        for epoch in range(self.epochs):
            order = rng.permutation(len(y))
            for lo in range(0, len(y), self.batch_size):
                batch = order[lo:lo + self.batch_size]
                loss, gw, gb = self.loss_and_grad(
                    X[batch], y[batch], None if sw is None else sw[batch])
                if not np.isfinite(loss):
                    raise NumericalError(f"NaN loss at epoch {epoch}")
                grads = gw + gb
                params = self.weights + self.biases
                if self.optimiser == "sgd":
                    for p, g in zip(params, grads):
                        p -= self.learning_rate * g
                else:
                    step += 1
                    for j, (p, g) in enumerate(zip(params, grads)):
                        adam_m[j] = _ADAM_BETA1 * adam_m[j] + (1 - _ADAM_BETA1) * g
                        adam_v[j] = _ADAM_BETA2 * adam_v[j] + (1 - _ADAM_BETA2) * g * g
                        m_hat = adam_m[j] / (1 - _ADAM_BETA1 ** step)
                        v_hat = adam_v[j] / (1 - _ADAM_BETA2 ** step)
                        p -= self.learning_rate * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)
        return self

    # -- inference -----------------------------------------------------------

    def predict(self, X) -> np.ndarray:
        """Point forecasts (regression) or positive-class probabilities."""
        X = np.asarray(X, dtype=float)
        if self._n_features is None:
            raise DataError("model is not fitted")
        if X.ndim != 2 or X.shape[1] != self._n_features:
            raise DataError(f"prediction design has shape {X.shape}, "
                            f"expected (*, {self._n_features})")
        _, post = self._forward(X)
        return self._output(post[-1][:, 0])
