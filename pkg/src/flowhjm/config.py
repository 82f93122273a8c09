"""Experiment configuration read from a sectioned TOML file.

Sections: [contract], [noise], [basis], [dataset], [network], [train], [run].
Numeric entries may be written as fractions in strings, e.g. ``tau = "1/12"``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import tomli

from flowhjm.forward import ContractSpec, NoiseSpec
from flowhjm.training import TrainConfig


@dataclass(frozen=True)
class BasisConfig:
    size: int = 7
    variant: str = "orthonormal"
    # coefficient box K: scalars or per-coefficient lists
    lower: float | tuple = -0.5
    upper: float | tuple = 0.5

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.size,)).copy()
        hi = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.size,)).copy()
        if np.any(lo >= hi):
            raise ValueError("coefficient bounds need lower < upper for every coefficient")
        return lo, hi


@dataclass(frozen=True)
class DatasetConfig:
    n_train: int = 200_000
    n_test: int = 500
    mc_sims_per_test: int = 50_000
    antithetic: bool = False
    format: str = "csv"  # or "binary"


@dataclass(frozen=True)
class NetworkConfig:
    kind: str = "hilbert"  # or "classical"
    M: int = 15
    D: int = 10
    hidden: int = 80
    activation: str = "tanh"
    xi_max: float = 1.0
    psi: tuple | None = None
    z: tuple | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    contract: ContractSpec = field(default_factory=ContractSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec.one_dim)
    basis: BasisConfig = field(default_factory=BasisConfig)
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    network: NetworkConfig = field(default_factory=NetworkConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    base_seed: int = 0
    workers: int = 1
    out: str = "."

    def __post_init__(self):
        for name in ("n_train", "n_test", "mc_sims_per_test"):
            if getattr(self.dataset, name) < 1:
                raise ValueError(f"dataset.{name} must be positive")
        if self.dataset.mc_sims_per_test < 2:
            raise ValueError("dataset.mc_sims_per_test must be at least 2")
        if self.dataset.format not in ("csv", "binary"):
            raise ValueError(f"unknown dataset format {self.dataset.format!r}")
        if self.network.kind not in ("hilbert", "classical"):
            raise ValueError(f"unknown network kind {self.network.kind!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not self.noise.is_one_dim and self.noise.dim != self.basis.size:
            raise ValueError("multi-dim noise dimension must equal the basis size")
        self.basis.bounds()

    def to_dict(self) -> dict:
        return {
            "contract": dataclasses.asdict(self.contract),
            "noise": dataclasses.asdict(self.noise),
            "basis": dataclasses.asdict(self.basis),
            "dataset": dataclasses.asdict(self.dataset),
            "network": dataclasses.asdict(self.network),
            "train": self.train.to_dict(),
            "run": {"base_seed": self.base_seed, "workers": self.workers, "out": self.out},
        }


def _num(v):
    if isinstance(v, str):
        try:
            return float(Fraction(v))
        except ValueError:
            return v
    if isinstance(v, list):
        return tuple(_num(e) for e in v)
    return v


def _build(cls, section: dict, name: str):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(section) - known
    if unknown:
        raise ValueError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")
    return cls(**{k: _num(v) for k, v in section.items()})


def _coerce_types(cls, section: dict) -> dict:
    out = {}
    types = {f.name: f.default for f in dataclasses.fields(cls)}
    for k, v in section.items():
        d = types.get(k)
        if isinstance(d, bool):
            out[k] = v if isinstance(v, bool) else str(v).lower() in ("1", "true", "yes")
        elif isinstance(d, int) and not isinstance(v, bool):
            out[k] = int(v)
        elif isinstance(d, float):
            out[k] = float(_num(v)) if isinstance(v, (str, int, float)) else v
        else:
            out[k] = v
    return out


def from_dict(raw: dict) -> ExperimentConfig:
    raw = {k: dict(v) for k, v in raw.items()}
    noise_raw = raw.get("noise", {})
    basis_raw = raw.get("basis", {})
    kind = noise_raw.get("kind", "one-dim")
    size = int(basis_raw.get("size", 7))
    variant = basis_raw.get("variant", "orthonormal")
    if kind == "one-dim":
        noise = NoiseSpec.one_dim(variant)
    else:
        noise = NoiseSpec.multi_dim(int(noise_raw.get("dim", size)), int(noise_raw.get("time_steps", 100)), variant)
    run = raw.get("run", {})
    return ExperimentConfig(
        contract=_build(ContractSpec, _coerce_types(ContractSpec, raw.get("contract", {})), "contract"),
        noise=noise,
        basis=_build(BasisConfig, _coerce_types(BasisConfig, basis_raw), "basis"),
        dataset=_build(DatasetConfig, _coerce_types(DatasetConfig, raw.get("dataset", {})), "dataset"),
        network=_build(NetworkConfig, _coerce_types(NetworkConfig, raw.get("network", {})), "network"),
        train=_build(TrainConfig, _coerce_types(TrainConfig, raw.get("train", {})), "train"),
        base_seed=int(run.get("base_seed", 0)),
        workers=int(run.get("workers", 1)),
        out=str(run.get("out", ".")),
    )


def _parse_scalar(text: str):
    try:
        return tomli.loads(f"v = {text}")["v"]
    except tomli.TOMLDecodeError:
        return text


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply ``section.key=value`` overrides to a raw config mapping."""
    raw = {k: dict(v) for k, v in raw.items()}
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot:
            raise ValueError(f"override {item!r} is not of the form section.key=value")
        raw.setdefault(section, {})[name] = _parse_scalar(value.strip())
    return raw


def load_raw(path) -> dict:
    if path is None:
        return {}
    with open(Path(path), "rb") as fh:
        return tomli.load(fh)


def load_config(path=None, overrides: list[str] = ()) -> ExperimentConfig:
    return from_dict(apply_overrides(load_raw(path), list(overrides)))
