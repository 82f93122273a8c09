"""Classical one-hidden-layer network on grid-sampled curve values.

Inputs are the initial curve evaluated at D equally spaced points on
[0, xi_max]; output is ``v . act(W u + b)`` with no output bias, so the
parameter count is m * (D + 2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from flowhjm.basis import eval_curve
from flowhjm.rng import derive_rng

TRAINABLE = ("W", "b", "v")

ACTIVATIONS = {
    "tanh": (np.tanh, lambda a: 1.0 - np.tanh(a) ** 2),
    "relu": (lambda a: np.maximum(a, 0.0), lambda a: (a > 0).astype(float)),
    "logistic": (
        lambda a: 1.0 / (1.0 + np.exp(-a)),
        lambda a: np.exp(-a) / (1.0 + np.exp(-a)) ** 2,
    ),
}


def grid_points(D: int, xi_max: float = 1.0) -> np.ndarray:
    if D < 2:
        raise ValueError("grid size D must be at least 2")
    return np.linspace(0.0, xi_max, D)


def grid_features(x, D: int, xi_max: float = 1.0, variant: str = "orthonormal") -> np.ndarray:
    """Curve values at D equally spaced points starting at 0; batches give ``(n, D)``."""
    return eval_curve(x, grid_points(D, xi_max), variant)


@dataclass
class ClassicalNetParams:
    W: np.ndarray  # (m, D)
    b: np.ndarray  # (m,)
    v: np.ndarray  # (m,)
    activation: str = "tanh"
    xi_max: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        m, D = self.W.shape
        if self.b.shape != (m,) or self.v.shape != (m,):
            raise ValueError("inconsistent classical-net parameter shapes")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def hidden(self) -> int:
        return self.W.shape[0]

    @property
    def D(self) -> int:
        return self.W.shape[1]

    @property
    def n_params(self) -> int:
        return self.hidden * (self.D + 2)

    def trainable(self) -> dict:
        return {"W": self.W, "b": self.b, "v": self.v}


def init_params(hidden: int, D: int = 10, seed=0, activation="tanh", xi_max=1.0) -> ClassicalNetParams:
    """Uniform init on [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer."""
    rng = derive_rng(seed, "classical-init")
    s = 1.0 / math.sqrt(D)
    W = rng.uniform(-s, s, (hidden, D))
    b = rng.uniform(-s, s, hidden)
    v = rng.uniform(-1.0 / math.sqrt(hidden), 1.0 / math.sqrt(hidden), hidden)
    return ClassicalNetParams(W, b, v, activation, xi_max)


def _check(params, U):
    U = np.asarray(U, dtype=float)
    if U.shape[-1] != params.D:
        raise ValueError(f"network expects {params.D} grid values, got {U.shape[-1]}")
    return U


def classical_forward(params: ClassicalNetParams, u):
    u = _check(params, u)
    act, _ = ACTIVATIONS[params.activation]
    out = act(np.atleast_2d(u) @ params.W.T + params.b) @ params.v
    return float(out[0]) if u.ndim == 1 else out


def loss_and_grad(params: ClassicalNetParams, U, y):
    U = _check(params, U)
    y = np.asarray(y, dtype=float)
    act, dact = ACTIVATIONS[params.activation]
    a = U @ params.W.T + params.b
    h = act(a)
    resid = h @ params.v - y
    r = (2.0 / U.shape[0]) * resid
    da = (r[:, None] * dact(a)) * params.v
    grads = {"W": da.T @ U, "b": da.sum(axis=0), "v": r @ h}
    return float(np.mean(resid**2)), grads


def classical_gradient(params: ClassicalNetParams, u, target: float) -> dict:
    u = _check(params, u)
    _, grads = loss_and_grad(params, u[None, :], np.array([target], dtype=float))
    return grads


def to_dict(params: ClassicalNetParams) -> dict:
    return {
        "kind": "classical",
        "D": params.D,
        "hidden": params.hidden,
        "activation": params.activation,
        "xi_max": params.xi_max,
        "W": params.W.tolist(),
        "b": params.b.tolist(),
        "v": params.v.tolist(),
        **params.meta,
    }


def from_dict(d: dict) -> ClassicalNetParams:
    if d.get("kind") != "classical":
        raise ValueError(f"not a classical-net checkpoint: kind={d.get('kind')!r}")
    meta = {k: d[k] for k in ("train_config", "seed") if k in d}
    return ClassicalNetParams(
        np.array(d["W"], dtype=float).reshape(d["hidden"], d["D"]),
        np.array(d["b"], dtype=float),
        np.array(d["v"], dtype=float),
        d["activation"],
        float(d["xi_max"]),
        meta,
    )


def save(params: ClassicalNetParams, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_dict(params), fh)


def load(path) -> ClassicalNetParams:
    with open(path) as fh:
        return from_dict(json.load(fh))
