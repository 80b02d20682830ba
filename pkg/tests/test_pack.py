import numpy as np
import pytest

from aliaskit.model import AliasTable, make_weight_set, validate_table
from aliaskit.pack import (
    PlanInconsistent,
    chunked_pack_section,
    pack_section,
    psa_construct,
    psa_plus_construct,
)
from aliaskit.partition import partition_items
from aliaskit.seqbuild import vose_construct
from aliaskit.split import SplitPlan, compute_split_plan
from tests_util import random_weights_cases


def blank(ws):
    return AliasTable(
        tw=np.full(ws.n, -1.0),
        alias=np.zeros(ws.n, dtype=np.uint64),
        n=ws.n,
        total=ws.total,
    )


def tw_close(a, b, total, n):
    return np.max(np.abs(a - b)) <= 1e-9 * total / n


def test_sections_cover_disjoint_budgets(rng):
    for w in random_weights_cases(rng, trials=12, max_n=800, min_n=4):
        ws = make_weight_set(w)
        p = partition_items(ws)
        s = min(5, ws.n)
        plan = compute_split_plan(p, s)
        out = blank(ws)
        for i in range(1, s + 1):
            before = out.tw.copy()
            pack_section(p, plan, i, out)
            la, lb = plan.lcounts[i - 1], plan.lcounts[i]
            ha, hb = plan.hcounts[i - 1], plan.hcounts[i]
            owned = np.concatenate(
                [p.l_index[la:lb], p.h_index[ha:hb]]
            ).astype(np.int64) - 1
            touched = np.nonzero(out.tw != before)[0]
            assert np.array_equal(np.sort(owned), touched)
            assert touched.size == (i * ws.n) // s - ((i - 1) * ws.n) // s
        assert np.all(out.tw >= 0.0)  # every bucket written exactly once
        assert validate_table(out, ws).ok


def test_single_section_matches_sequential(rng):
    for w in random_weights_cases(rng, trials=10, max_n=600, min_n=1):
        ws = make_weight_set(w)
        ref = vose_construct(ws)
        got = psa_construct(ws, s=1)
        assert np.array_equal(got.alias, ref.alias)
        assert tw_close(got.tw, ref.tw, ws.total, ws.n)


def test_chunked_matches_plain_bitwise(any_backend, rng):
    for w in random_weights_cases(rng, trials=15, max_n=900, min_n=2):
        ws = make_weight_set(w)
        p = partition_items(ws)
        s = min(4, ws.n)
        plan = compute_split_plan(p, s)
        plain = blank(ws)
        for i in range(1, s + 1):
            pack_section(p, plan, i, plain)
        for cap in (2, 3, 64, 10**6):  # last one exceeds any section budget
            staged = blank(ws)
            spills = [
                chunked_pack_section(p, plan, i, cap, staged)
                for i in range(1, s + 1)
            ]
            assert np.array_equal(staged.tw, plain.tw)
            assert np.array_equal(staged.alias, plain.alias)
            assert all(np.isfinite(spills))


def test_returned_spill_matches_plan(rng):
    # continuous weights: the residual handed over at the budget boundary is
    # the same mass the plan recorded as spilling into the next section
    for w in random_weights_cases(rng, trials=25, max_n=700, min_n=2):
        ws = make_weight_set(w)
        p = partition_items(ws)
        s = min(6, ws.n)
        plan = compute_split_plan(p, s)
        out = blank(ws)
        for i in range(1, s):
            got = pack_section(p, plan, i, out)
            want = plan.spills[i]
            if plan.hcounts[i] == p.h_index.size:
                assert got == 0.0
            else:
                assert got == pytest.approx(want, abs=1e-9 * p.avg)


def test_plan_validation_rejects_tampering(part_fixture=None):
    ws = make_weight_set([3.0, 1.0, 2.0, 2.0, 5.0, 1.0])
    p = partition_items(ws)
    plan = compute_split_plan(p, 2)
    out = blank(ws)

    bad = SplitPlan(
        s=2,
        lcounts=plan.lcounts.copy(),
        hcounts=plan.hcounts.copy(),
        spills=plan.spills.copy(),
    )
    bad.lcounts[-1] += 1  # endpoint no longer matches the partition
    with pytest.raises(PlanInconsistent):
        pack_section(p, bad, 1, out)

    bad2 = SplitPlan(
        s=2,
        lcounts=plan.lcounts.copy(),
        hcounts=plan.hcounts.copy(),
        spills=plan.spills.copy(),
    )
    if bad2.lcounts[1] > 0 and bad2.hcounts[1] < p.h_index.size:
        bad2.lcounts[1] -= 1
        bad2.hcounts[1] += 1
        bad2.hcounts[1], bad2.hcounts[0] = bad2.hcounts[0], bad2.hcounts[1]
    bad2.lcounts[1] = bad2.lcounts[2] + 1  # non-monotone interior
    with pytest.raises(PlanInconsistent):
        pack_section(p, bad2, 1, out)

    with pytest.raises(PlanInconsistent):
        pack_section(p, plan, 0, out)
    with pytest.raises(PlanInconsistent):
        pack_section(p, plan, 3, out)
    with pytest.raises(ValueError):
        chunked_pack_section(p, plan, 1, 1, out)


def test_split_equals_sequential(any_backend, rng):
    for w in random_weights_cases(rng, trials=25, max_n=2000, min_n=1):
        ws = make_weight_set(w)
        ref = vose_construct(ws)
        for s in (2, 7, 64):
            for workers in (1, 3):
                got = psa_construct(ws, s=s, workers=workers)
                assert np.array_equal(got.alias, ref.alias)
                assert tw_close(got.tw, ref.tw, ws.total, ws.n)
                ch = psa_construct(
                    ws, s=s, workers=workers, chunked=True, chunk_capacity=2
                )
                assert np.array_equal(ch.alias, got.alias)
                assert np.array_equal(ch.tw, got.tw)


def test_workers_do_not_change_output(rng):
    w = rng.random(3000) + 0.01
    ws = make_weight_set(w)
    base = psa_construct(ws, s=16, workers=1)
    for workers in (2, 4, 16):
        t = psa_construct(ws, s=16, workers=workers)
        assert np.array_equal(t.tw, base.tw)
        assert np.array_equal(t.alias, base.alias)


def test_sections_clamped_to_n():
    ws = make_weight_set([1.0, 5.0])
    t = psa_construct(ws, s=64)
    assert validate_table(t, ws).ok
    ref = vose_construct(ws)
    assert np.array_equal(t.alias, ref.alias)


def test_param_validation():
    ws = make_weight_set([1.0, 2.0])
    with pytest.raises(ValueError):
        psa_construct(ws, s=0)
    with pytest.raises(ValueError):
        psa_construct(ws, s=2, workers=0)
    with pytest.raises(ValueError):
        psa_construct(ws, s=2, chunked=True, chunk_capacity=1)


def test_prepass_construct_valid(any_backend, rng):
    for w in random_weights_cases(rng, trials=20, max_n=3000, min_n=1):
        ws = make_weight_set(w)
        t = psa_plus_construct(ws, s=4, block_size=64, threshold=8)
        assert validate_table(t, ws).ok


def test_prepass_all_equal_fully_handled():
    ws = make_weight_set([1.0, 1.0, 1.0, 1.0])
    t = psa_plus_construct(ws, s=2, block_size=2, threshold=2)
    assert np.allclose(t.tw, 1.0)
    assert np.array_equal(t.alias, np.arange(1, 5, dtype=np.uint64))


def test_prepass_workers_invariance(rng):
    w = rng.random(5000) ** 4 + 1e-9
    ws = make_weight_set(w)
    a = psa_plus_construct(ws, s=8, workers=1)
    b = psa_plus_construct(ws, s=8, workers=4)
    assert np.array_equal(a.tw, b.tw)
    assert np.array_equal(a.alias, b.alias)
