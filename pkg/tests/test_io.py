import struct

import numpy as np
import pytest

from aliaskit.io import (
    TABLE_MAGIC,
    WEIGHTS_MAGIC,
    FormatError,
    load_table,
    load_weights,
    save_table,
    save_weights,
)
from aliaskit.model import InvalidWeight, make_weight_set
from aliaskit.seqbuild import vose_construct
from tests_util import random_weights_cases


def test_table_round_trip_bit_exact(tmp_path, rng):
    for i, w in enumerate(random_weights_cases(rng, trials=8, max_n=3000, min_n=1)):
        t = vose_construct(make_weight_set(w))
        path = tmp_path / f"t{i}.alt"
        save_table(t, path)
        back = load_table(path)
        assert back.n == t.n
        assert back.total == t.total  # bit-exact, not approx
        assert np.array_equal(
            back.tw.view(np.uint64), t.tw.view(np.uint64)
        )
        assert np.array_equal(back.alias, t.alias)


def test_table_file_layout(tmp_path):
    t = vose_construct(make_weight_set([3.0, 1.0, 2.0, 2.0]))
    path = tmp_path / "t.alt"
    save_table(t, path)
    data = path.read_bytes()
    assert data[:4] == TABLE_MAGIC
    assert len(data) == 4 + 8 + 8 + 4 * 16
    n, total = struct.unpack_from("<Qd", data, 4)
    assert n == 4 and total == 8.0
    tw0, alias0 = struct.unpack_from("<dQ", data, 20)
    assert tw0 == t.tw[0] and alias0 == t.alias[0]


def test_table_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.alt"
    bad.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(FormatError):
        load_table(bad)
    bad.write_bytes(b"AL")
    with pytest.raises(FormatError):
        load_table(bad)


def test_table_rejects_truncation_and_padding(tmp_path):
    t = vose_construct(make_weight_set([1.0, 2.0, 3.0]))
    path = tmp_path / "t.alt"
    save_table(t, path)
    data = path.read_bytes()
    (tmp_path / "short.alt").write_bytes(data[:-1])
    with pytest.raises(FormatError):
        load_table(tmp_path / "short.alt")
    (tmp_path / "long.alt").write_bytes(data + b"\x00")
    with pytest.raises(FormatError):
        load_table(tmp_path / "long.alt")


def test_table_rejects_alias_out_of_range(tmp_path):
    t = vose_construct(make_weight_set([1.0, 2.0, 3.0]))
    path = tmp_path / "t.alt"
    save_table(t, path)
    data = bytearray(path.read_bytes())
    struct.pack_into("<Q", data, 20 + 8, 0)  # alias 0: below 1-based range
    path.write_bytes(bytes(data))
    with pytest.raises(FormatError):
        load_table(path)
    struct.pack_into("<Q", data, 20 + 8, 4)  # alias 4 > n = 3
    path.write_bytes(bytes(data))
    with pytest.raises(FormatError):
        load_table(path)


def test_loaded_arrays_are_fresh_copies(tmp_path):
    t = vose_construct(make_weight_set([1.0, 2.0]))
    path = tmp_path / "t.alt"
    save_table(t, path)
    a = load_table(path)
    b = load_table(path)
    a.tw[0] = 99.0
    assert b.tw[0] != 99.0


def test_weights_round_trip(tmp_path, rng):
    w = rng.random(257) + 1e-6
    path = tmp_path / "w.wts"
    save_weights(w, path)
    back = load_weights(path)
    assert np.array_equal(back.weights.view(np.uint64), w.view(np.uint64))
    data = path.read_bytes()
    assert data[:4] == WEIGHTS_MAGIC
    assert len(data) == 12 + 257 * 8


def test_weights_accepts_weight_set(tmp_path):
    ws = make_weight_set([0.5, 1.5])
    path = tmp_path / "w.wts"
    save_weights(ws, path)
    assert load_weights(path).total == ws.total


def test_weights_load_revalidates(tmp_path):
    path = tmp_path / "w.wts"
    save_weights([1.0, 2.0], path)
    data = bytearray(path.read_bytes())
    struct.pack_into("<d", data, 12, -1.0)
    path.write_bytes(bytes(data))
    with pytest.raises(InvalidWeight):
        load_weights(path)


def test_weights_rejects_bad_header(tmp_path):
    path = tmp_path / "w.wts"
    path.write_bytes(b"ALT1" + b"\x00" * 16)  # wrong kind of file
    with pytest.raises(FormatError):
        load_weights(path)
    save_weights([1.0], path)
    (tmp_path / "trunc.wts").write_bytes(path.read_bytes()[:-3])
    with pytest.raises(FormatError):
        load_weights(tmp_path / "trunc.wts")
