import numpy as np
import pytest

from aliaskit.backend import HAVE_NUMBA
from aliaskit.rng import (
    MASK64,
    RngStream,
    derive_stream,
    philox_block_np,
    uniform_block,
    uniform_block_np,
    uniform_py,
    _philox_py,
)
from aliaskit.stats import chi_square_test, frequency_counts


def test_same_inputs_same_output():
    assert _philox_py(1, 2, 3) == _philox_py(1, 2, 3)
    assert uniform_py(10, 20, 30) == uniform_py(10, 20, 30)


def test_counter_stream_seed_all_matter():
    base = _philox_py(5, 6, 7)
    assert _philox_py(6, 6, 7) != base
    assert _philox_py(5, 7, 7) != base
    assert _philox_py(5, 6, 8) != base


def test_uniform_range():
    us = [uniform_py(i, 0, 42) for i in range(2000)]
    assert all(0.0 <= u < 1.0 for u in us)
    # 53-bit mantissa draws should essentially never collide
    assert len(set(us)) > 1990


def test_block_matches_scalar():
    block = philox_block_np(100, 64, 9, 1234)
    for i in range(64):
        assert int(block[i]) == _philox_py(100 + i, 9, 1234)
    ub = uniform_block_np(100, 64, 9, 1234)
    for i in range(64):
        assert float(ub[i]) == uniform_py(100 + i, 9, 1234)


def test_counter_wraps_at_64_bits():
    assert _philox_py((2**64 + 5) & MASK64, 0, 1) == _philox_py(5, 0, 1)
    block = philox_block_np(MASK64, 3, 0, 1)
    assert int(block[1]) == _philox_py(0, 0, 1)
    assert int(block[2]) == _philox_py(1, 0, 1)


def test_uniform_block_advances_counter(any_backend):
    r = RngStream(seed=7, stream=3, counter=50)
    a = uniform_block(r, 10)
    assert r.counter == 60
    b = uniform_block(r, 10)
    assert r.counter == 70
    # restore state and resume: identical continuation
    r2 = RngStream(seed=7, stream=3, counter=50)
    both = uniform_block(r2, 20)
    assert np.array_equal(np.concatenate([a, b]), both)


def test_clone_is_independent():
    r = RngStream(seed=1, stream=2, counter=3)
    c = r.clone()
    uniform_block(r, 5)
    assert c.counter == 3 and r.counter == 8


def test_serialize_restore_resumes():
    r = RngStream(seed=11, stream=22, counter=33)
    state = (r.seed, r.stream, r.counter)
    first = uniform_block(r, 100)
    restored = RngStream(*state)
    assert np.array_equal(uniform_block(restored, 100), first)


def test_derive_stream_separates():
    seen = {derive_stream(1, 0, tag, 0) for tag in range(1000)}
    assert len(seen) == 1000
    assert derive_stream(1, 0, 5, 6) != derive_stream(2, 0, 5, 6)
    assert derive_stream(1, 1, 5, 6) != derive_stream(1, 0, 5, 6)


def test_uniformity_chi_square(any_backend):
    r = RngStream(seed=20260815)
    u = uniform_block(r, 10**6)
    bins = np.minimum((u * 100).astype(np.int64), 99) + 1
    stat, df, ok = chi_square_test(
        frequency_counts(bins, 100), np.full(100, 0.01), 0.001
    )
    assert df == 99
    assert ok, f"chi-square stat {stat}"


@pytest.mark.skipif(not HAVE_NUMBA, reason="needs numba")
def test_numba_scalar_matches_python():
    from aliaskit.rng import philox_nb, uniform_nb

    for ctr, strm, key in [(0, 0, 0), (1, 2, 3), (MASK64, MASK64, MASK64), (2**63, 17, 5)]:
        assert int(philox_nb(np.uint64(ctr), np.uint64(strm), np.uint64(key))) == _philox_py(ctr, strm, key)
        assert float(uniform_nb(np.uint64(ctr), np.uint64(strm), np.uint64(key))) == uniform_py(ctr, strm, key)
