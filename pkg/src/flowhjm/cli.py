"""Command line entry point: ``flowhjm <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from flowhjm import experiments as ex
from flowhjm.config import apply_overrides, from_dict, load_raw
from flowhjm.pricing import mc_price


def _coeffs(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.replace(" ", "").split(",") if v], dtype=float)


def _config(args):
    raw = load_raw(args.config)
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"run.base_seed={args.seed}")
    workers = args.workers or os.environ.get("FLOWHJM_WORKERS")
    if workers:
        overrides.append(f"run.workers={int(workers)}")
    if args.out is not None:
        overrides.append(f"run.out={json.dumps(args.out)}")
    return from_dict(apply_overrides(raw, overrides))


def _out(cfg, name):
    path = Path(cfg.out) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _ext(cfg):
    return "bin" if cfg.dataset.format == "binary" else "csv"


def cmd_gen_train(args, cfg):
    path = args.path or _out(cfg, f"train.{_ext(cfg)}")
    ds = ex.gen_train(cfg, path)
    print(f"wrote {len(ds)} training rows to {path}")


def cmd_gen_test(args, cfg):
    path = args.path or _out(cfg, f"test.{_ext(cfg)}")
    ds = ex.gen_test(cfg, path)
    print(f"wrote {len(ds)} test rows to {path}")


def cmd_train(args, cfg):
    ckpt = args.checkpoint or _out(cfg, f"{cfg.network.kind}.json")
    metrics = args.metrics or _out(cfg, f"{cfg.network.kind}.metrics.json")
    _, m = ex.run_train(cfg, args.dataset, ckpt, metrics)
    print(f"trained {m['kind']} net ({m['n_params']} parameters), final train mse {m['final_train_mse']:.6g}")


def cmd_eval(args, cfg):
    print(json.dumps(ex.run_eval(args.checkpoint, args.dataset)))


def cmd_price(args, cfg):
    x = _coeffs(args.coeffs)
    if args.checkpoint:
        params = ex.load_checkpoint(args.checkpoint)
        noise, _ = ex.model_from_checkpoint(params, cfg)
        print(repr(float(np.atleast_1d(ex.predict(params, x, noise.basis))[0])))
    else:
        est = mc_price(x, cfg.noise, cfg.contract, args.sims, seed=(cfg.base_seed, "price"),
                       antithetic=cfg.dataset.antithetic, workers=cfg.workers)
        print(json.dumps({"price": est.price, "std_error": est.std_error, "n_sims": est.n_sims}))


def cmd_delta(args, cfg):
    params = ex.load_checkpoint(args.checkpoint)
    noise, _ = ex.model_from_checkpoint(params, cfg)
    print(repr(ex.level_delta(params, _coeffs(args.coeffs), noise.basis)))


def cmd_sweep(args, cfg):
    params = ex.load_checkpoint(args.checkpoint)
    noise, contract = ex.model_from_checkpoint(params, cfg)
    n = params.N if hasattr(params, "N") else cfg.basis.size
    rows = ex.sweep(params, args.index, args.lo, args.hi, args.steps, noise, contract, n, args.sims, cfg.base_seed)
    path = args.path or _out(cfg, f"sweep_x{args.index}.csv")
    ex.write_sweep(rows, path)
    print(f"wrote {len(rows)} sweep rows to {path}")


def cmd_verify_basis(args, cfg):
    from flowhjm.verify import verify_basis

    ok = True
    for name, passed, detail in verify_basis(cfg.basis.size, args.variant or cfg.basis.variant):
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    if not ok:
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML experiment config")
    common.add_argument("--seed", type=int, help="base seed (run.base_seed)")
    common.add_argument("--workers", type=int, help="worker processes (or FLOWHJM_WORKERS)")
    common.add_argument("--out", help="output directory (run.out)")
    common.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override a config key")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="flowhjm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen-train", parents=[common], help="generate a training set")
    s.add_argument("--path")
    s.set_defaults(func=cmd_gen_train)

    s = sub.add_parser("gen-test", parents=[common], help="generate a Monte Carlo labelled test set")
    s.add_argument("--path")
    s.set_defaults(func=cmd_gen_test)

    s = sub.add_parser("train", parents=[common], help="train the configured network")
    s.add_argument("dataset")
    s.add_argument("--checkpoint")
    s.add_argument("--metrics")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("eval", parents=[common], help="test-set MSE of a checkpoint")
    s.add_argument("checkpoint")
    s.add_argument("dataset")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("price", parents=[common], help="price one curve with a network or Monte Carlo")
    s.add_argument("coeffs", help="comma separated basis coefficients")
    s.add_argument("--checkpoint")
    s.add_argument("--sims", type=int, default=100_000)
    s.set_defaults(func=cmd_price)

    s = sub.add_parser("delta", parents=[common], help="level-Delta of a trained network")
    s.add_argument("checkpoint")
    s.add_argument("coeffs")
    s.set_defaults(func=cmd_delta)

    s = sub.add_parser("sweep", parents=[common], help="vary one coefficient, export net and MC prices")
    s.add_argument("checkpoint")
    s.add_argument("--index", type=int, default=1)
    s.add_argument("--lo", type=float, default=-0.5)
    s.add_argument("--hi", type=float, default=0.5)
    s.add_argument("--steps", type=int, default=21)
    s.add_argument("--sims", type=int, default=100_000)
    s.add_argument("--path")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("verify-basis", parents=[common], help="check the basis against its oracles")
    s.add_argument("--variant", choices=["orthonormal", "printed"])
    s.set_defaults(func=cmd_verify_basis)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = _config(args)
        args.func(args, cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
