import math

import numpy as np
import pytest

from mnbesov.errors import ConfigError
from mnbesov.grid import Grid, RealField
from mnbesov.mnf import read_mnf, write_mnf


@pytest.mark.parametrize("n,L,c", [((16, 8), (1.0, 2 * math.pi), 1),
                                    ((8, 8, 16), (0.1, 1 / 3, 7.0), 3)])
def test_round_trip_is_bit_exact(tmp_path, n, L, c):
    g = Grid(n, L)
    f = RealField(g, np.random.default_rng(0).standard_normal((c,) + n))
    path = tmp_path / "f.mnf"
    write_mnf(path, f)
    back = read_mnf(path)
    assert back.grid == g
    assert back.data.tobytes() == f.data.tobytes()


def test_header_layout(tmp_path):
    g = Grid.cube(2, 8)
    path = tmp_path / "f.mnf"
    write_mnf(path, RealField.zeros(g, 2))
    raw = path.read_bytes()
    lines = raw.split(b"\n", 5)
    assert lines[0] == b"mnf1"
    assert lines[1] == b"d=2"
    assert lines[2] == b"n=8,8"
    assert lines[3].startswith(b"L=6.28318")
    assert lines[4] == b"c=2"
    assert len(lines[5]) == 2 * 64 * 8


def test_rejects_foreign_or_truncated_files(tmp_path):
    bad = tmp_path / "bad.mnf"
    bad.write_bytes(b"nope\n")
    with pytest.raises(ConfigError):
        read_mnf(bad)
    g = Grid.cube(2, 8)
    good = tmp_path / "good.mnf"
    write_mnf(good, RealField.zeros(g))
    bad.write_bytes(good.read_bytes()[:-8])
    with pytest.raises(ConfigError):
        read_mnf(bad)
