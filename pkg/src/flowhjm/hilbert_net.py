"""Projected Hilbert-space network on span{e_1, ..., e_N}.

    g(x) = sum_j < l_j, sigma(A_j x + b_j) >,    sigma(y) = beta(psi . y) z,

with beta(y) = max(0, 1 - exp(-y)). Because sigma always points along z, each
node reduces to the scalar ``beta(psi . (A_j x + b_j)) * (l_j . z)``; that
collapsed form is what ``net_forward`` computes. ``psi`` and ``z`` are fixed;
only A_j, b_j, l_j are trained.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from flowhjm.rng import derive_rng

TRAINABLE = ("A", "b", "ell")


def beta(y):
    y = np.asarray(y, dtype=float)
    return 1.0 - np.exp(-np.maximum(y, 0.0))


def beta_prime(y):
    # subgradient 0 at the kink
    y = np.asarray(y, dtype=float)
    return np.where(y > 0, np.exp(-np.maximum(y, 0.0)), 0.0)


@dataclass
class HilbertNetParams:
    A: np.ndarray  # (M, N, N)
    b: np.ndarray  # (M, N)
    ell: np.ndarray  # (M, N)
    psi: np.ndarray  # (N,)
    z: np.ndarray  # (N,)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        M, N = self.b.shape
        if self.A.shape != (M, N, N) or self.ell.shape != (M, N):
            raise ValueError("inconsistent Hilbert-net parameter shapes")
        if self.psi.shape != (N,) or self.z.shape != (N,):
            raise ValueError("psi and z must have length N")
        if not np.any(self.psi) or not np.any(self.z):
            raise ValueError("psi and z must be non-zero")

    @property
    def M(self) -> int:
        return self.b.shape[0]

    @property
    def N(self) -> int:
        return self.b.shape[1]

    @property
    def n_params(self) -> int:
        return self.M * (self.N**2 + 2 * self.N)

    def trainable(self) -> dict:
        return {"A": self.A, "b": self.b, "ell": self.ell}

    def copy(self) -> "HilbertNetParams":
        return HilbertNetParams(
            self.A.copy(), self.b.copy(), self.ell.copy(), self.psi.copy(), self.z.copy(), dict(self.meta)
        )


def default_psi(N: int) -> np.ndarray:
    return np.full(N, 1.0 / math.sqrt(N))


def default_z(N: int) -> np.ndarray:
    z = np.zeros(N)
    z[0] = 1.0
    return z


def init_params(M: int, N: int = 7, seed=0, psi=None, z=None) -> HilbertNetParams:
    """Entries of A, b, l i.i.d. uniform on [-1/sqrt(N), 1/sqrt(N)]."""
    if M < 1 or N < 1:
        raise ValueError("M and N must be positive")
    rng = derive_rng(seed, "hilbert-init")
    s = 1.0 / math.sqrt(N)
    A = rng.uniform(-s, s, (M, N, N))
    b = rng.uniform(-s, s, (M, N))
    ell = rng.uniform(-s, s, (M, N))
    psi = default_psi(N) if psi is None else np.asarray(psi, dtype=float)
    z = default_z(N) if z is None else np.asarray(z, dtype=float)
    return HilbertNetParams(A, b, ell, psi, z)


def _check_input(params, X):
    X = np.asarray(X, dtype=float)
    if X.shape[-1] != params.N:
        raise ValueError(f"network expects {params.N} coefficients, got {X.shape[-1]}")
    return X


def _preactivation(params, X):
    # psi . (A_j x + b_j) = (A_j^T psi) . x + psi . b_j
    u = np.einsum("mij,i->mj", params.A, params.psi)
    return X @ u.T + params.b @ params.psi, u


def net_forward(params: HilbertNetParams, x):
    """Network output for one coefficient vector or a batch ``(n, N)``."""
    x = _check_input(params, x)
    X = np.atleast_2d(x)
    pre, _ = _preactivation(params, X)
    out = beta(pre) @ (params.ell @ params.z)
    return float(out[0]) if x.ndim == 1 else out


def net_forward_layers(params: HilbertNetParams, x):
    """Same output computed layer by layer: affine, N-dim activation, linear form."""
    x = _check_input(params, x)
    X = np.atleast_2d(x)
    affine = np.einsum("mij,nj->nmi", params.A, X) + params.b  # (n, M, N)
    act = beta(affine @ params.psi)[..., None] * params.z  # (n, M, N)
    out = np.einsum("nmi,mi->n", act, params.ell)
    return float(out[0]) if x.ndim == 1 else out


def loss_and_grad(params: HilbertNetParams, X, y):
    """Mean squared error over the batch and its gradient for A, b, l."""
    X = _check_input(params, X)
    y = np.asarray(y, dtype=float)
    pre, _ = _preactivation(params, X)
    act = beta(pre)
    gain = params.ell @ params.z
    resid = act @ gain - y
    n = X.shape[0]
    r = (2.0 / n) * resid
    dpre = (r[:, None] * beta_prime(pre)) * gain  # (n, M)
    grads = {
        "A": params.psi[None, :, None] * (dpre.T @ X)[:, None, :],
        "b": dpre.sum(axis=0)[:, None] * params.psi,
        "ell": (r @ act)[:, None] * params.z,
    }
    return float(np.mean(resid**2)), grads


def input_gradient(params: HilbertNetParams, x) -> np.ndarray:
    """dg/dx = sum_j beta'(pre_j) (l_j . z) A_j^T psi."""
    x = _check_input(params, x)
    X = np.atleast_2d(x)
    pre, u = _preactivation(params, X)
    dx = (beta_prime(pre) * (params.ell @ params.z)) @ u
    return dx[0] if x.ndim == 1 else dx


def net_gradient(params: HilbertNetParams, x, target: float) -> dict:
    """Gradient of ``(g(x) - target)^2`` for every trainable entry, plus dg/dx under key ``"x"``."""
    x = _check_input(params, x)
    _, grads = loss_and_grad(params, x[None, :], np.array([target], dtype=float))
    grads["x"] = input_gradient(params, x)
    return grads


def level_delta(params: HilbertNetParams, x) -> float:
    """Sensitivity of the network price to the level coefficient x_1."""
    return float(input_gradient(params, np.asarray(x, dtype=float))[0])


def to_dict(params: HilbertNetParams) -> dict:
    return {
        "kind": "hilbert",
        "M": params.M,
        "N": params.N,
        "psi": params.psi.tolist(),
        "z": params.z.tolist(),
        "A": params.A.tolist(),
        "b": params.b.tolist(),
        "ell": params.ell.tolist(),
        "activation": "beta-exp",
        **params.meta,
    }


def from_dict(d: dict) -> HilbertNetParams:
    if d.get("kind", "hilbert") != "hilbert":
        raise ValueError(f"not a Hilbert-net checkpoint: kind={d.get('kind')!r}")
    if d.get("activation", "beta-exp") != "beta-exp":
        raise ValueError(f"unsupported activation {d['activation']!r}")
    meta = {k: d[k] for k in ("train_config", "seed") if k in d}
    return HilbertNetParams(
        np.array(d["A"], dtype=float).reshape(d["M"], d["N"], d["N"]),
        np.array(d["b"], dtype=float).reshape(d["M"], d["N"]),
        np.array(d["ell"], dtype=float).reshape(d["M"], d["N"]),
        np.array(d["psi"], dtype=float),
        np.array(d["z"], dtype=float),
        meta,
    )


def save(params: HilbertNetParams, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_dict(params), fh)


def load(path) -> HilbertNetParams:
    with open(path) as fh:
        return from_dict(json.load(fh))
