"""Exponential HJM model for fixed-delivery and flow forwards.

The log-forward curve in Musiela coordinates follows the mild solution

    Y(t) = S_t Y_0 + int_0^t S_{t-s} alpha ds + int_0^t S_{t-s} dW(s)

with S_t the shift semigroup and alpha the no-arbitrage drift. Two noise
models are supported: ``W = B e_1`` (one-dim), which is sampled
exactly, and ``W = sum_i B_i e_i`` (multi-dim), discretized on a uniform
time grid with ``L`` steps.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from flowhjm.basis import gauss_legendre, get_basis

ONE_DIM = "one-dim"
MULTI_DIM = "multi-dim"


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = ONE_DIM
    dim: int = 1
    time_steps: int = 100
    basis: str = "orthonormal"

    def __post_init__(self):
        if self.kind == ONE_DIM:
            if self.dim != 1:
                raise ValueError("one-dim noise has dim 1")
        elif self.kind == MULTI_DIM:
            if self.dim < 1 or self.time_steps < 1:
                raise ValueError("multi-dim noise needs dim >= 1 and time_steps >= 1")
        else:
            raise ValueError(f"unknown noise kind {self.kind!r}")

    @classmethod
    def one_dim(cls, basis: str = "orthonormal") -> "NoiseSpec":
        return cls(ONE_DIM, 1, 1, basis)

    @classmethod
    def multi_dim(cls, dim: int = 7, time_steps: int = 100, basis: str = "orthonormal") -> "NoiseSpec":
        return cls(MULTI_DIM, dim, time_steps, basis)

    @property
    def is_one_dim(self) -> bool:
        return self.kind == ONE_DIM


@dataclass(frozen=True)
class ContractSpec:
    """Call on a flow forward delivering over ``[t1, t2]``, exercised at ``tau``."""

    tau: float = 1 / 12
    t1: float = 1 / 12
    t2: float = 2 / 12
    strike: float = 1.0
    rate: float = 0.0
    quad_points: int = 64

    def __post_init__(self):
        if not 0 < self.tau <= self.t1 < self.t2:
            raise ValueError("need 0 < tau <= t1 < t2")
        if self.strike <= 0:
            raise ValueError("strike must be positive")
        if self.quad_points < 2:
            raise ValueError("quad_points must be >= 2")

    @property
    def delivery_length(self) -> float:
        return self.t2 - self.t1

    @property
    def discount(self) -> float:
        return math.exp(-self.rate * self.tau)

    def delivery_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Time-to-maturity nodes on ``[t1 - tau, t2 - tau]`` and averaging weights (sum 1)."""
        nodes, wts = gauss_legendre(self.t1 - self.tau, self.t2 - self.tau, self.quad_points)
        return nodes, wts / self.delivery_length


def drift_value(spec: NoiseSpec, xi, n_basis: int = 7):
    """No-arbitrage drift alpha(xi).

    One-dim: -1/2 everywhere. Multi-dim: -1/2 sum_{i<=d} e_i(xi)^2.
    """
    xi = np.asarray(xi, dtype=float)
    if spec.is_one_dim:
        out = np.full(xi.shape, -0.5)
    else:
        vals = get_basis(max(n_basis, spec.dim), spec.basis).values(xi)[: spec.dim]
        out = -0.5 * np.sum(vals**2, axis=0)
    return float(out) if out.ndim == 0 else out


class CurveSimulator:
    """Samples Y(tau, xi) on a fixed grid of xi values.

    The deterministic part (shifted initial curve plus drift integral) and the
    noise loadings are precomputed so that a batch of paths costs one matrix
    product. All grid points share the same Brownian increments.
    """

    def __init__(self, spec: NoiseSpec, contract: ContractSpec, grid, n_basis: int = 7):
        grid = np.asarray(grid, dtype=float).ravel()
        if grid.size == 0:
            raise ValueError("empty xi grid")
        if np.any(grid < 0):
            raise ValueError("xi grid must be non-negative")
        if not spec.is_one_dim and spec.dim != n_basis:
            raise ValueError(f"multi-dim noise of dim {spec.dim} needs a basis of size {spec.dim}")
        self.spec = spec
        self.contract = contract
        self.grid = grid
        self.n_basis = n_basis
        tau = contract.tau
        basis = get_basis(n_basis, spec.basis)
        # S_tau Y_0 evaluated pointwise
        self.shift_basis = basis.values(grid + tau)  # (N, G)
        if spec.is_one_dim:
            self.drift = np.full(grid.size, -0.5 * tau)
            self.loadings = np.full((1, grid.size), math.sqrt(tau))
        else:
            L = spec.time_steps
            ds = tau / L
            s = ds * np.arange(1, L + 1)
            lags = tau - s  # right endpoints s_j, j = 1..L
            # loads[i, j, g] = e_i(xi_g + tau - s_j)
            loads = basis.values(grid[None, :] + lags[:, None])[: spec.dim]
            self.drift = -0.5 * ds * np.sum(loads**2, axis=(0, 1))
            self.loadings = math.sqrt(ds) * loads.reshape(spec.dim * L, grid.size)

    @property
    def n_normals(self) -> int:
        """Standard normals consumed per path."""
        return self.loadings.shape[0]

    def draw_normals(self, rng: np.random.Generator, n_paths: int) -> np.ndarray:
        z = rng.standard_normal((n_paths, self.n_normals))
        if not np.all(np.isfinite(z)):
            raise FloatingPointError("non-finite normal draw")
        return z

    def deterministic(self, x) -> np.ndarray:
        """S_tau x plus the drift integral, shape ``(n, G)`` for x of shape ``(n, N)``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_basis:
            raise ValueError(f"expected {self.n_basis} coefficients, got {x.shape[1]}")
        return x @ self.shift_basis + self.drift

    def noise(self, normals) -> np.ndarray:
        """Stochastic convolution for standard normals of shape ``(n, n_normals)``."""
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        return normals @ self.loadings

    def simulate(self, x, rng=None, normals=None) -> np.ndarray:
        """One path per row of ``x``; returns ``(n, G)``."""
        base = self.deterministic(x)
        if normals is None:
            if rng is None:
                raise ValueError("need rng or explicit normals")
            normals = self.draw_normals(rng, base.shape[0])
        return base + self.noise(normals)


@functools.lru_cache(maxsize=64)
def _simulator(spec, contract, grid: tuple, n_basis):
    return CurveSimulator(spec, contract, np.array(grid), n_basis)


@functools.lru_cache(maxsize=64)
def delivery_simulator(spec: NoiseSpec, contract: ContractSpec, n_basis: int = 7) -> CurveSimulator:
    """Simulator on the delivery-window quadrature nodes."""
    nodes, _ = contract.delivery_grid()
    return CurveSimulator(spec, contract, nodes, n_basis)


def simulate_log_forward(x, spec: NoiseSpec, contract: ContractSpec, grid, rng=None, normals=None):
    """Y(tau, xi) at each grid point for one initial curve ``x``.

    ``normals`` overrides the random draw: one value for one-dim noise, or
    ``dim * time_steps`` values (row-major over basis index, then time step)
    for multi-dim noise.
    """
    x = np.asarray(x, dtype=float)
    grid = tuple(float(g) for g in np.atleast_1d(grid))
    sim = _simulator(spec, contract, grid, x.shape[-1])
    if normals is not None:
        normals = np.asarray(normals, dtype=float).reshape(1, -1)
        if normals.shape[1] != sim.n_normals:
            raise ValueError(f"expected {sim.n_normals} normals, got {normals.shape[1]}")
    return sim.simulate(x[None, :], rng=rng, normals=normals)[0]


def flow_forward_price(y_values, contract: ContractSpec):
    """(1/lambda) int exp(Y(tau, u)) du over the delivery window.

    ``y_values`` holds Y at the ``contract.delivery_grid()`` nodes along its
    last axis.
    """
    y_values = np.asarray(y_values, dtype=float)
    if y_values.shape[-1] != contract.quad_points:
        raise ValueError(
            f"got {y_values.shape[-1]} curve values for {contract.quad_points} quadrature points"
        )
    _, wts = contract.delivery_grid()
    out = np.exp(y_values) @ wts
    return float(out) if out.ndim == 0 else out


def payoff_from_curves(y_values, contract: ContractSpec):
    flow = flow_forward_price(y_values, contract)
    return contract.discount * np.maximum(flow - contract.strike, 0.0)


def sample_payoff(x, spec: NoiseSpec, contract: ContractSpec, rng=None, normals=None) -> float:
    """One draw of the discounted call payoff on the flow forward."""
    nodes, _ = contract.delivery_grid()
    y = simulate_log_forward(x, spec, contract, nodes, rng=rng, normals=normals)
    return float(payoff_from_curves(y, contract))


def sample_payoffs(x, spec: NoiseSpec, contract: ContractSpec, rng) -> np.ndarray:
    """One independent payoff draw per row of ``x`` (shape ``(n, N)``)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    sim = delivery_simulator(spec, contract, x.shape[1])
    return payoff_from_curves(sim.simulate(x, rng=rng), contract)
