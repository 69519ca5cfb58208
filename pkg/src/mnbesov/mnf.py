"""MNF1 field files.

Layout: ASCII header lines ``mnf1``, ``d=<int>``, ``n=<ints>``, ``L=<floats>``,
``c=<int>``, each newline-terminated, then the samples as little-endian
float64, component-major and row-major within a component.  Periods are
written with ``repr`` so a write/read cycle is bit-exact.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigError
from .grid import Grid, RealField

MAGIC = "mnf1"


def write_mnf(path: str | os.PathLike, f: RealField) -> None:
    g = f.grid
    header = [
        MAGIC,
        f"d={g.d}",
        "n=" + ",".join(str(v) for v in g.n),
        "L=" + ",".join(repr(float(v)) for v in g.L),
        f"c={f.components}",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(f.data, dtype="<f8").tobytes())


def read_mnf(path: str | os.PathLike) -> RealField:
    with open(path, "rb") as fh:
        meta = {}
        first = fh.readline().decode("ascii").strip()
        if first != MAGIC:
            raise ConfigError(f"{path}: not an MNF1 file")
        for key in ("d", "n", "L", "c"):
            line = fh.readline().decode("ascii").strip()
            k, _, v = line.partition("=")
            if k != key:
                raise ConfigError(f"{path}: expected header key {key!r}, got {line!r}")
            meta[k] = v
        payload = fh.read()
    d = int(meta["d"])
    n = tuple(int(v) for v in meta["n"].split(","))
    L = tuple(float(v) for v in meta["L"].split(","))
    c = int(meta["c"])
    if len(n) != d or len(L) != d:
        raise ConfigError(f"{path}: header dimension mismatch")
    data = np.frombuffer(payload, dtype="<f8")
    expected = c * int(np.prod(n))
    if data.size != expected:
        raise ConfigError(f"{path}: expected {expected} samples, found {data.size}")
    return RealField(Grid(n, L), data.astype(float).reshape((c,) + n))
