"""Mini-batch gradient descent shared by both network types.

Any parameter object exposing ``trainable()`` (a dict of arrays updated in
place) works together with a matching ``loss_and_grad(params, X, y)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from flowhjm.rng import derive_rng


class TrainingDiverged(FloatingPointError):
    def __init__(self, epoch: int):
        super().__init__(f"training loss became non-finite in epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 10_000
    epochs: int = 50
    learning_rate: float = 1e-3
    optimizer: str = "adam"  # or "sgd"
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    # multiplicative learning-rate factor applied after each epoch
    lr_decay: float = 1.0

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def to_dict(self) -> dict:
        return asdict(self)


class Adam:
    def __init__(self, params: dict, cfg: TrainConfig):
        self.cfg = cfg
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict, grads: dict, lr: float):
        c = self.cfg
        self.t += 1
        corr1 = 1.0 - c.beta1**self.t
        corr2 = 1.0 - c.beta2**self.t
        for k, p in params.items():
            g = grads[k]
            self.m[k] = c.beta1 * self.m[k] + (1 - c.beta1) * g
            self.v[k] = c.beta2 * self.v[k] + (1 - c.beta2) * g * g
            p -= lr * (self.m[k] / corr1) / (np.sqrt(self.v[k] / corr2) + c.eps)


class PlainSGD:
    def __init__(self, params: dict, cfg: TrainConfig):
        pass

    def step(self, params: dict, grads: dict, lr: float):
        for k, p in params.items():
            p -= lr * grads[k]


def fit(params, X, y, cfg: TrainConfig, loss_and_grad: Callable, log: Callable | None = None):
    """Train ``params`` in place; returns the loss history.

    ``history[0]`` is the full-data MSE before training and ``history[e]`` the
    full-data MSE after epoch ``e``. Shuffling uses the stream
    ``(cfg.seed, "shuffle", epoch)``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    if X.shape[0] != y.shape[0]:
        raise ValueError("inputs and targets differ in length")
    tensors = params.trainable()
    opt = (Adam if cfg.optimizer == "adam" else PlainSGD)(tensors, cfg)
    n = X.shape[0]
    history = [_full_loss(params, X, y, loss_and_grad)]
    lr = cfg.learning_rate
    for epoch in range(1, cfg.epochs + 1):
        order = derive_rng(cfg.seed, "shuffle", epoch).permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, grads = loss_and_grad(params, X[idx], y[idx])
            if not math.isfinite(loss):
                raise TrainingDiverged(epoch)
            opt.step(tensors, grads, lr)
        lr *= cfg.lr_decay
        loss = _full_loss(params, X, y, loss_and_grad)
        if not math.isfinite(loss):
            raise TrainingDiverged(epoch)
        history.append(loss)
        if log is not None:
            log(epoch, loss)
    return history


def _full_loss(params, X, y, loss_and_grad, chunk=50_000):
    total = 0.0
    for s in range(0, X.shape[0], chunk):
        loss, _ = loss_and_grad(params, X[s : s + chunk], y[s : s + chunk])
        total += loss * min(chunk, X.shape[0] - s)
    return total / X.shape[0]
