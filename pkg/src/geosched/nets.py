"""Dense feed-forward nets with manual backprop, in float64 numpy.

Hidden layers are rectified-linear, the output layer is identity. This is
the entire numeric substrate for actors and critics: forward, exact
reverse-mode gradients, an adaptive-moment optimizer, soft target blending,
bit-exact checkpoints, and a central finite-difference gradient verifier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class DenseNet:
    sizes: tuple
    weights: list  # per layer, shape (fan_in, fan_out)
    biases: list   # per layer, shape (fan_out,)

    @classmethod
    def zeros(cls, sizes) -> "DenseNet":
        sizes = tuple(int(s) for s in sizes)
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        weights = [np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])]
        biases = [np.zeros(b) for b in sizes[1:]]
        return cls(sizes, weights, biases)

    @classmethod
    def random(cls, sizes, rng: np.random.Generator) -> "DenseNet":
        """Uniform fan-in scaled weights, zero biases."""
        net = cls.zeros(sizes)
        for i, w in enumerate(net.weights):
            bound = 1.0 / np.sqrt(w.shape[0])
            net.weights[i] = rng.uniform(-bound, bound, size=w.shape)
        return net

    @property
    def n_params(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def copy(self) -> "DenseNet":
        return DenseNet(
            self.sizes,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
        )

    # --- forward / backward ---

    def forward(self, x: np.ndarray) -> np.ndarray:
        y, _ = self.forward_cached(x)
        return y

    def forward_cached(self, x: np.ndarray):
        """Returns (output, cache) where cache holds layer activations."""
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        if x.shape[1] != self.sizes[0]:
            raise ValueError(f"input width {x.shape[1]} != {self.sizes[0]}")
        activations = [x]
        pre = []
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            pre.append(z)
            h = z if i == last else np.maximum(z, 0.0)
            activations.append(h)
        y = h[0] if squeeze else h
        return y, (activations, pre, squeeze)

    def backward(self, cache, grad_out: np.ndarray):
        """Gradients of a scalar loss given dL/dy; returns (dW, db, dx)."""
        activations, pre, squeeze = cache
        delta = np.asarray(grad_out, dtype=np.float64)
        if squeeze:
            delta = delta[None, :]
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = activations[i].T @ delta
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (pre[i - 1] > 0.0)
        dx = delta @ self.weights[0].T
        return grads_w, grads_b, dx[0] if squeeze else dx


class Adam:
    """Adaptive-moment optimizer bound to one net's parameter shapes."""

    def __init__(self, net: DenseNet, lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m_w = [np.zeros_like(w) for w in net.weights]
        self.v_w = [np.zeros_like(w) for w in net.weights]
        self.m_b = [np.zeros_like(b) for b in net.biases]
        self.v_b = [np.zeros_like(b) for b in net.biases]

    def step(self, net: DenseNet, grads_w, grads_b) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for i in range(len(net.weights)):
            for p, g, m, v in (
                (net.weights[i], grads_w[i], self.m_w[i], self.v_w[i]),
                (net.biases[i], grads_b[i], self.m_b[i], self.v_b[i]),
            ):
                m *= self.beta1
                m += (1.0 - self.beta1) * g
                v *= self.beta2
                v += (1.0 - self.beta2) * g * g
                p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def state_dict(self) -> dict:
        return {
            "lr": self.lr, "beta1": self.beta1, "beta2": self.beta2,
            "eps": self.eps, "t": self.t,
            "m_w": [a.copy() for a in self.m_w], "v_w": [a.copy() for a in self.v_w],
            "m_b": [a.copy() for a in self.m_b], "v_b": [a.copy() for a in self.v_b],
        }

    def load_state_dict(self, state: dict) -> None:
        self.lr = state["lr"]
        self.beta1 = state["beta1"]
        self.beta2 = state["beta2"]
        self.eps = state["eps"]
        self.t = state["t"]
        self.m_w = [a.copy() for a in state["m_w"]]
        self.v_w = [a.copy() for a in state["v_w"]]
        self.m_b = [a.copy() for a in state["m_b"]]
        self.v_b = [a.copy() for a in state["v_b"]]


def polyak(target: DenseNet, online: DenseNet, tau: float) -> None:
    """target <- (1 - tau) * target + tau * online, elementwise in place."""
    for tw, ow in zip(target.weights, online.weights):
        tw *= 1.0 - tau
        tw += tau * ow
    for tb, ob in zip(target.biases, online.biases):
        tb *= 1.0 - tau
        tb += tau * ob


# --- checkpoints ---

def save_net(net: DenseNet, path) -> None:
    arrays = {"sizes": np.array(net.sizes, dtype=np.int64)}
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    np.savez(path, **arrays)


def load_net(path) -> DenseNet:
    with np.load(path) as data:
        sizes = tuple(int(s) for s in data["sizes"])
        net = DenseNet.zeros(sizes)
        for i in range(len(net.weights)):
            net.weights[i] = data[f"w{i}"].astype(np.float64)
            net.biases[i] = data[f"b{i}"].astype(np.float64)
    return net


# --- finite-difference verification ---

def finite_difference_grads(net: DenseNet, loss_fn, h: float = 1e-4):
    """Central differences of loss_fn(net) w.r.t. every parameter."""
    grads_w = [np.zeros_like(w) for w in net.weights]
    grads_b = [np.zeros_like(b) for b in net.biases]
    for store, params in ((grads_w, net.weights), (grads_b, net.biases)):
        for g, p in zip(store, params):
            flat_p = p.reshape(-1)
            flat_g = g.reshape(-1)
            for idx in range(flat_p.size):
                keep = flat_p[idx]
                flat_p[idx] = keep + h
                hi = loss_fn(net)
                flat_p[idx] = keep - h
                lo = loss_fn(net)
                flat_p[idx] = keep
                flat_g[idx] = (hi - lo) / (2.0 * h)
    return grads_w, grads_b


def max_relative_error(analytic, numeric, floor: float = 1e-3) -> float:
    """Largest |a - b| / max(|a|, |b|, floor) over matching parameter lists."""
    worst = 0.0
    for a, b in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
        err = np.max(np.abs(a - b) / denom) if a.size else 0.0
        worst = max(worst, float(err))
    return worst


def _kink_margin(net: DenseNet, x: np.ndarray) -> float:
    """Smallest |pre-activation| of any hidden unit over the batch."""
    _, (_, pre, _) = net.forward_cached(x)
    hidden = pre[:-1]
    if not hidden:
        return np.inf
    return min(float(np.min(np.abs(z))) for z in hidden)


def check_gradients(seed: int = 0, trials: int = 100,
                    tol: float = 1e-4, h: float = 1e-4) -> dict:
    """Compare backprop against central differences on random small nets.

    Draws with hidden units within 10h of a rectifier kink are redrawn so
    the symmetric difference stays on one linear piece. Mean squared error
    to random targets is the probe loss.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < trials:
        n_in = int(rng.integers(2, 7))
        n_out = int(rng.integers(1, 5))
        hidden = [int(rng.integers(3, 9)) for _ in range(int(rng.integers(1, 3)))]
        sizes = (n_in, *hidden, n_out)
        net = DenseNet.random(sizes, rng)
        batch = int(rng.integers(1, 6))
        x = rng.normal(size=(batch, n_in))
        target = rng.normal(size=(batch, n_out))
        if _kink_margin(net, x) < 10.0 * h:
            continue

        def loss_fn(candidate, x=x, target=target, batch=batch):
            y = candidate.forward(x)
            return 0.5 * float(np.sum((y - target) ** 2)) / batch

        y, cache = net.forward_cached(x)
        gw, gb, _ = net.backward(cache, (y - target) / batch)
        fw, fb = finite_difference_grads(net, loss_fn, h)
        err = max(max_relative_error(gw, fw), max_relative_error(gb, fb))
        worst = max(worst, err)
        done += 1
    return {"trials": done, "max_rel_err": worst, "tol": tol, "passed": worst <= tol}
