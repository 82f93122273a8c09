"""Dataset files: CSV with a header row, or a packed little-endian binary.

CSV header is ``x1,...,xN,label`` with an extra ``stderr`` column for test
sets; values are written with 17 significant digits so they re-read exactly.

Binary layout: magic ``b"FHJM"``, then uint32 version, n_rows, n_coeffs,
has_stderr, followed by float64 rows ``x1..xN, label[, stderr]``.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"FHJM"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")


@dataclass
class Dataset:
    X: np.ndarray
    label: np.ndarray
    stderr: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.label = np.asarray(self.label, dtype=float).ravel()
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float).ravel()
        if self.label.shape[0] != self.X.shape[0]:
            raise ValueError("coefficients and labels differ in length")
        if self.stderr is not None and self.stderr.shape[0] != self.X.shape[0]:
            raise ValueError("stderr column has the wrong length")

    @property
    def n_coeffs(self) -> int:
        return self.X.shape[1]

    def __len__(self):
        return self.X.shape[0]


def _table(ds: Dataset) -> np.ndarray:
    cols = [ds.X, ds.label[:, None]]
    if ds.stderr is not None:
        cols.append(ds.stderr[:, None])
    return np.hstack(cols)


def write_csv(ds: Dataset, path) -> None:
    header = [f"x{i}" for i in range(1, ds.n_coeffs + 1)] + ["label"]
    if ds.stderr is not None:
        header.append("stderr")
    buf = io.StringIO()
    np.savetxt(buf, _table(ds), fmt="%.17g", delimiter=",", header=",".join(header), comments="")
    Path(path).write_text(buf.getvalue())


def read_csv(path) -> Dataset:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if not header or header[0] != "x1" or "label" not in header:
        raise ValueError(f"{path}: not a dataset CSV (header {header[:3]}...)")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    n = header.index("label")
    stderr = data[:, n + 1] if "stderr" in header else None
    return Dataset(data[:, :n], data[:, n], stderr)


def write_binary(ds: Dataset, path) -> None:
    table = np.ascontiguousarray(_table(ds), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, len(ds), ds.n_coeffs, int(ds.stderr is not None)))
        fh.write(table.tobytes())


def read_binary(path) -> Dataset:
    with open(path, "rb") as fh:
        magic, version, n, N, has_se = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != MAGIC or version != VERSION:
            raise ValueError(f"{path}: not a binary dataset")
        width = N + 1 + has_se
        table = np.frombuffer(fh.read(), dtype="<f8").reshape(n, width)
    return Dataset(table[:, :N].copy(), table[:, N].copy(), table[:, N + 1].copy() if has_se else None)


def write_dataset(ds: Dataset, path, fmt: str | None = None) -> None:
    fmt = fmt or ("binary" if str(path).endswith(".bin") else "csv")
    (write_binary if fmt == "binary" else write_csv)(ds, path)


def read_dataset(path) -> Dataset:
    with open(path, "rb") as fh:
        head = fh.read(4)
    return read_binary(path) if head == MAGIC else read_csv(path)
