"""Dataset generation, training, evaluation and figure-data export.

Random streams are keyed by (base_seed, tag, index), with fixed row blocks
for training data and per-row streams for test prices, so every output file
is identical whatever the worker count.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from flowhjm import baseline, hilbert_net
from flowhjm.basis import get_basis
from flowhjm.config import ExperimentConfig
from flowhjm.datasets import Dataset, read_dataset, write_dataset
from flowhjm.forward import ContractSpec, NoiseSpec, sample_payoffs
from flowhjm.pricing import black76_price_one_dim, mc_price
from flowhjm.rng import derive_rng
from flowhjm.training import TrainConfig, fit

log = logging.getLogger(__name__)

ROW_BLOCK = 4096


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(min(workers, len(jobs))) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _blocks(n):
    return [(k, min(ROW_BLOCK, n - s)) for k, s in enumerate(range(0, n, ROW_BLOCK))]


def _sample_coeffs(seed, tag, block, n, lo, hi):
    return derive_rng(seed, tag, block).uniform(lo, hi, (n, lo.size))


def _train_block(job):
    seed, block, n, lo, hi, noise, contract = job
    X = _sample_coeffs(seed, "train-coeffs", block, n, lo, hi)
    # the Wiener draws come from their own stream, independent of X
    y = sample_payoffs(X, noise, contract, derive_rng(seed, "train-wiener", block))
    return X, y


def generate_train(cfg: ExperimentConfig) -> Dataset:
    """Coefficients uniform on the box K, each labelled with one payoff draw."""
    lo, hi = cfg.basis.bounds()
    jobs = [(cfg.base_seed, k, n, lo, hi, cfg.noise, cfg.contract) for k, n in _blocks(cfg.dataset.n_train)]
    parts = _map(_train_block, jobs, cfg.workers)
    return Dataset(np.vstack([p[0] for p in parts]), np.concatenate([p[1] for p in parts]))


def _test_row(job):
    seed, row, x, noise, contract, n_sims, antithetic = job
    est = mc_price(x, noise, contract, n_sims, seed=(seed, "test-mc", row), antithetic=antithetic)
    return est.price, est.std_error


def test_coefficients(cfg: ExperimentConfig) -> np.ndarray:
    lo, hi = cfg.basis.bounds()
    parts = [_sample_coeffs(cfg.base_seed, "test-coeffs", k, n, lo, hi) for k, n in _blocks(cfg.dataset.n_test)]
    return np.vstack(parts)


def label_with_mc(cfg: ExperimentConfig, X, tag_seed=None) -> tuple[np.ndarray, np.ndarray]:
    seed = cfg.base_seed if tag_seed is None else tag_seed
    d = cfg.dataset
    jobs = [(seed, i, x, cfg.noise, cfg.contract, d.mc_sims_per_test, d.antithetic) for i, x in enumerate(X)]
    out = np.array(_map(_test_row, jobs, cfg.workers), dtype=float).reshape(-1, 2)
    return out[:, 0], out[:, 1]


def generate_test(cfg: ExperimentConfig) -> Dataset:
    """Fresh coefficients, each labelled with a Monte Carlo price and its standard error."""
    X = test_coefficients(cfg)
    price, se = label_with_mc(cfg, X)
    return Dataset(X, price, se)


def gen_train(cfg: ExperimentConfig, path) -> Dataset:
    ds = generate_train(cfg)
    write_dataset(ds, path, cfg.dataset.format)
    return ds


def gen_test(cfg: ExperimentConfig, path) -> Dataset:
    ds = generate_test(cfg)
    write_dataset(ds, path, cfg.dataset.format)
    return ds


def model_section(cfg: ExperimentConfig) -> dict:
    return {
        "contract": dataclasses.asdict(cfg.contract),
        "noise": dataclasses.asdict(cfg.noise),
        "basis": dataclasses.asdict(cfg.basis),
    }


def init_network(cfg: ExperimentConfig, seed=None):
    net = cfg.network
    seed = cfg.base_seed if seed is None else seed
    if net.kind == "hilbert":
        return hilbert_net.init_params(net.M, cfg.basis.size, seed, net.psi, net.z)
    return baseline.init_params(net.hidden, net.D, seed, net.activation, net.xi_max)


def network_inputs(params, X, variant="orthonormal"):
    if isinstance(params, baseline.ClassicalNetParams):
        return baseline.grid_features(X, params.D, params.xi_max, variant)
    return np.asarray(X, dtype=float)


def _loss_fn(params):
    if isinstance(params, baseline.ClassicalNetParams):
        return baseline.loss_and_grad
    return hilbert_net.loss_and_grad


def predict(params, X, variant="orthonormal"):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(params, baseline.ClassicalNetParams):
        return baseline.classical_forward(params, network_inputs(params, X, variant))
    if X.shape[1] != params.N:
        raise ValueError(f"checkpoint expects N={params.N} coefficients but data has {X.shape[1]}")
    return hilbert_net.net_forward(params, X)


def train_network(cfg: ExperimentConfig, ds: Dataset, params=None):
    """Fit the configured network to ``ds``; returns ``(params, history)``."""
    params = init_network(cfg) if params is None else params
    if ds.n_coeffs != cfg.basis.size:
        raise ValueError(f"dataset has {ds.n_coeffs} coefficients but the basis size is {cfg.basis.size}")
    inputs = network_inputs(params, ds.X, cfg.basis.variant)
    history = fit(
        params, inputs, ds.label, cfg.train, _loss_fn(params),
        log=lambda e, l: log.info("epoch %d: train mse %.6g", e, l),
    )
    params.meta.update({"train_config": cfg.train.to_dict(), "seed": cfg.base_seed, "model": model_section(cfg)})
    return params, history


def checkpoint_dict(params) -> dict:
    if isinstance(params, baseline.ClassicalNetParams):
        return baseline.to_dict(params)
    return hilbert_net.to_dict(params)


def params_from_dict(d: dict):
    kind = d.get("kind", "hilbert")
    params = baseline.from_dict(d) if kind == "classical" else hilbert_net.from_dict(d)
    if "model" in d:
        params.meta["model"] = d["model"]
    return params


def save_checkpoint(params, path) -> None:
    Path(path).write_text(json.dumps(checkpoint_dict(params)))


def load_checkpoint(path):
    return params_from_dict(json.loads(Path(path).read_text()))


def run_train(cfg: ExperimentConfig, dataset_path, checkpoint_path, metrics_path=None):
    ds = read_dataset(dataset_path)
    params, history = train_network(cfg, ds)
    save_checkpoint(params, checkpoint_path)
    metrics = {
        "kind": cfg.network.kind,
        "n_params": params.n_params,
        "n_train": len(ds),
        "loss_history": history,
        "final_train_mse": history[-1],
    }
    if metrics_path is not None:
        Path(metrics_path).write_text(json.dumps(metrics, indent=1))
    return params, metrics


def evaluate(params, ds: Dataset, variant="orthonormal") -> dict:
    """MSE of the network against the dataset labels."""
    expected = params.N if isinstance(params, hilbert_net.HilbertNetParams) else None
    if expected is not None and expected != ds.n_coeffs:
        raise ValueError(f"checkpoint has N={expected} but the test set has {ds.n_coeffs} coefficients")
    pred = predict(params, ds.X, variant)
    report = {"mse": float(np.mean((pred - ds.label) ** 2)), "n": len(ds)}
    if ds.stderr is not None:
        # expected contribution of the Monte Carlo label noise to the MSE
        report["mean_label_variance"] = float(np.mean(ds.stderr**2))
    return report


def run_eval(checkpoint_path, test_path) -> dict:
    params = load_checkpoint(checkpoint_path)
    ds = read_dataset(test_path)
    variant = params.meta.get("model", {}).get("basis", {}).get("variant", "orthonormal")
    return evaluate(params, ds, variant)


def level_delta(params, x, variant="orthonormal") -> float:
    """Derivative of the network price in the level coefficient x_1."""
    x = np.asarray(x, dtype=float)
    if isinstance(params, hilbert_net.HilbertNetParams):
        return hilbert_net.level_delta(params, x)
    # grid values depend on x_1 through e_1 = 1 at every grid point
    u = network_inputs(params, x[None, :], variant)
    _, dact = baseline.ACTIVATIONS[params.activation]
    a = u @ params.W.T + params.b
    du = (dact(a) * params.v) @ params.W
    e1 = get_basis(x.size, variant).values(baseline.grid_points(params.D, params.xi_max))[0]
    return float(du[0] @ e1)


def model_from_checkpoint(params, cfg: ExperimentConfig | None = None):
    """Noise and contract for a checkpoint: stored model section, else ``cfg``."""
    model = params.meta.get("model")
    if model is None:
        if cfg is None:
            raise ValueError("checkpoint carries no model section and no config was given")
        return cfg.noise, cfg.contract
    noise = NoiseSpec(**model["noise"])
    contract = ContractSpec(**model["contract"])
    return noise, contract


def sweep(params, index: int, lo: float, hi: float, steps: int, noise: NoiseSpec, contract: ContractSpec,
          n_coeffs: int = 7, mc_sims: int = 100_000, seed=0, base=None):
    """Vary coefficient ``index`` (1-based) with the others fixed (default 0).

    Returns rows ``(value, net_price, mc_price, mc_stderr, black76)``; the last
    column is NaN unless the noise is one-dim.
    """
    if not 1 <= index <= n_coeffs:
        raise ValueError(f"coefficient index {index} outside 1..{n_coeffs}")
    if steps < 2:
        raise ValueError("sweep needs at least 2 steps")
    values = np.linspace(lo, hi, steps)
    X = np.tile(np.zeros(n_coeffs) if base is None else np.asarray(base, dtype=float), (steps, 1))
    X[:, index - 1] = values
    net = np.atleast_1d(predict(params, X, noise.basis))
    rows = []
    for k, x in enumerate(X):
        est = mc_price(x, noise, contract, mc_sims, seed=(seed, "sweep", k))
        bs = black76_price_one_dim(x, contract, noise) if noise.is_one_dim else float("nan")
        rows.append((float(values[k]), float(net[k]), est.price, est.std_error, bs))
    return rows


def write_sweep(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["value", "net_price", "mc_price", "mc_stderr", "black76"])
        for r in rows:
            w.writerow([repr(v) for v in r])
