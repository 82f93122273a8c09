import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parent.parent
ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def record():
    """Log one acceptance line; the summary hook prints them all at the end."""

    def _record(criterion: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE.append((criterion, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}")
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(ACCEPTANCE, key=lambda r: (int("".join(c for c in r[0] if c.isdigit())), r[0])):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {detail}")


def _case_study(name, tmp):
    from flowhjm import experiments as ex
    from flowhjm.config import load_config
    from flowhjm.datasets import read_dataset

    workers = str(os.cpu_count() or 1)
    base = load_config(ROOT / f"configs/case_study_{name}.toml", [f"run.workers={workers}"])
    train, test = tmp / "train.csv", tmp / "test.csv"
    ex.gen_train(base, train)
    ex.gen_test(base, test)
    test_ds = read_dataset(test)
    out = {"cfg": base, "test": test_ds}
    for kind in ("hilbert", "classical"):
        cfg = load_config(ROOT / f"configs/case_study_{name}.toml", [f'network.kind="{kind}"', f"run.workers={workers}"])
        params, metrics = ex.run_train(cfg, train, tmp / f"{kind}.json", tmp / f"{kind}.metrics.json")
        out[kind] = {"params": params, "metrics": metrics, "eval": ex.run_eval(tmp / f"{kind}.json", test)}
    return out


@pytest.fixture(scope="session")
def one_dim_study(tmp_path_factory):
    return _case_study("one_dim", tmp_path_factory.mktemp("one_dim"))


@pytest.fixture(scope="session")
def multi_dim_study(tmp_path_factory):
    return _case_study("multi_dim", tmp_path_factory.mktemp("multi_dim"))
