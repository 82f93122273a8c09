"""Reference prices: Monte Carlo estimator and a Black-76 oracle.

Under one-dim noise the stochastic part of the log-forward curve is a pure
level shift ``B(tau) - tau/2``, so the flow forward at exercise is
``F0 * exp(B(tau) - tau/2)`` with ``F0`` deterministic. The call is then a
Black-76 call with unit volatility.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from flowhjm.forward import ContractSpec, NoiseSpec, delivery_simulator, payoff_from_curves
from flowhjm.rng import derive_rng

MC_CHUNK = 10_000


@dataclass(frozen=True)
class PriceEstimate:
    price: float
    std_error: float
    n_sims: int


def norm_cdf(x):
    """Standard normal CDF through erfc, accurate in both tails."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))
    return np.array([0.5 * math.erfc(-v / math.sqrt(2.0)) for v in np.ravel(x)]).reshape(np.shape(x))


def _chunk_payoffs(x, spec, contract, seed, chunk, n, antithetic):
    sim = delivery_simulator(spec, contract, len(x))
    rng = derive_rng(seed, chunk)
    base = sim.deterministic(x)
    if antithetic:
        half = (n + 1) // 2
        z = sim.draw_normals(rng, half)
        noise = sim.noise(z)
        up = payoff_from_curves(base + noise, contract)
        down = payoff_from_curves(base - noise, contract)
        # pair averages are the i.i.d. samples
        return 0.5 * (up + down)
    z = sim.draw_normals(rng, n)
    return payoff_from_curves(base + sim.noise(z), contract)


def _chunk_job(args):
    return _chunk_payoffs(*args)


def mc_payoffs(x, spec, contract, n_sims, seed, antithetic=False, workers=1, chunk_size=MC_CHUNK):
    """Discounted payoff samples; chunk ``c`` always uses the stream ``(seed, c)``."""
    x = np.asarray(x, dtype=float)
    sizes = [min(chunk_size, n_sims - start) for start in range(0, n_sims, chunk_size)]
    jobs = [(x, spec, contract, seed, c, n, antithetic) for c, n in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_chunk_job, jobs))
    else:
        parts = [_chunk_job(j) for j in jobs]
    return np.concatenate(parts)


def mc_price(
    x,
    spec: NoiseSpec,
    contract: ContractSpec,
    n_sims: int,
    seed,
    antithetic: bool = False,
    workers: int = 1,
) -> PriceEstimate:
    """Monte Carlo price with standard error.

    With ``antithetic=True`` each sample is the average of a path and its
    mirror, so ``n_sims`` counts pairs.
    """
    if n_sims < 2:
        raise ValueError("n_sims must be at least 2")
    pay = mc_payoffs(x, spec, contract, n_sims, seed, antithetic, workers)
    se = float(np.std(pay, ddof=1) / math.sqrt(pay.size))
    return PriceEstimate(float(np.mean(pay)), se, int(pay.size))


def initial_flow_forward(x, contract: ContractSpec, basis: str = "orthonormal") -> float:
    """Today's flow forward price F0: delivery average of exp(S_tau x)."""
    x = np.asarray(x, dtype=float)
    sim = delivery_simulator(NoiseSpec.one_dim(basis), contract, len(x))
    _, wts = contract.delivery_grid()
    return float(np.exp(x @ sim.shift_basis) @ wts)


def _d1(f0, contract):
    vol = math.sqrt(contract.tau)
    return (math.log(f0 / contract.strike) + 0.5 * contract.tau) / vol


def black76_price_one_dim(x, contract: ContractSpec, spec: NoiseSpec | None = None) -> float:
    if spec is not None and not spec.is_one_dim:
        raise ValueError("the Black-76 oracle only holds for one-dim noise")
    basis = spec.basis if spec is not None else "orthonormal"
    f0 = initial_flow_forward(x, contract, basis)
    d1 = _d1(f0, contract)
    d2 = d1 - math.sqrt(contract.tau)
    return contract.discount * (f0 * norm_cdf(d1) - contract.strike * norm_cdf(d2))


def black76_level_delta(x, contract: ContractSpec, spec: NoiseSpec | None = None) -> float:
    """d price / d x_1. F0 scales like exp(x_1), so this is disc * F0 * N(d1)."""
    if spec is not None and not spec.is_one_dim:
        raise ValueError("the Black-76 oracle only holds for one-dim noise")
    basis = spec.basis if spec is not None else "orthonormal"
    f0 = initial_flow_forward(x, contract, basis)
    return contract.discount * f0 * norm_cdf(_d1(f0, contract))
