"""Core finite-set layer: labels, maps, partitions, the refinement order."""

import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from opecalc.finsets import (
    FinSet, Partition, SetMap, SizeLimitError, all_injections, all_maps,
    all_surjections, enumerate_partitions, finer_geq, finer_gt,
    induced_on_quotient, kernel_partition, max_set_size, passes_through,
    push_to_quotient, quotient_map,
)

BELL = {1: 1, 2: 2, 3: 5, 4: 15, 5: 52}


def nset(n, prefix="x"):
    return FinSet(tuple(f"{prefix}{k}" for k in range(n)))


def test_finset_basics():
    s = FinSet(("a", "b", "c"))
    assert s.size == 3 and len(s) == 3
    assert s.index("b") == 1
    with pytest.raises(ValueError):
        FinSet(("a", "a"))


def test_setmap_kinds():
    s, t = nset(3), nset(2, "t")
    p = SetMap(s, t, (0, 0, 1))
    assert p.is_surjective and not p.is_injective
    assert p.is_proper_surjection
    assert p.kind == "proper-surjection"
    i = SetMap(nset(2), s, (0, 2))
    assert i.is_injective and not i.is_surjective
    assert SetMap.identity(s).is_bijective


def test_compose_and_fibers():
    s, t, u = nset(4), nset(2, "t"), nset(1, "u")
    p = SetMap(s, t, (0, 0, 1, 1))
    q = SetMap(t, u, (0, 0))
    qp = q.compose(p)
    assert qp.images == (0, 0, 0, 0)
    assert p.fibers() == {0: (0, 1), 1: (2, 3)}


def test_partition_refinement_order():
    # finer = greater: the discrete partition is the top element
    s = nset(3)
    omega = Partition.discrete(s)
    alpha = Partition.indiscrete(s)
    mid = Partition.from_blocks(s, [(0, 1), (2,)])
    assert finer_geq(omega, mid) and finer_geq(mid, alpha)
    assert finer_gt(omega, alpha)
    assert not finer_geq(alpha, mid)
    for e in enumerate_partitions(s):
        assert finer_geq(omega, e) and finer_geq(e, alpha)


@pytest.mark.parametrize("n", sorted(BELL))
def test_partition_counts(n):
    assert len(enumerate_partitions(nset(n))) == BELL[n]


def test_quotient_kernel_roundtrip():
    s = nset(4)
    for e in enumerate_partitions(s):
        pi = quotient_map(s, e)
        assert pi.is_surjective
        assert kernel_partition(pi) == e


def test_passes_through_and_induced():
    s, t = nset(3), nset(2, "t")
    p = SetMap(s, t, (0, 0, 1))
    e = Partition.from_blocks(s, [(0, 1), (2,)])
    assert passes_through(p, e)
    bar = induced_on_quotient(p, e)
    assert bar.is_bijective
    bad = Partition.from_blocks(s, [(0, 2), (1,)])
    assert not passes_through(p, bad)


def test_push_to_quotient():
    s = nset(4)
    coarse = Partition.from_blocks(s, [(0, 1), (2, 3)])
    fine = Partition.from_blocks(s, [(0,), (1,), (2, 3)])
    pushed = push_to_quotient(coarse, fine)
    assert pushed.carrier.size == 3  # carrier is the quotient by the finer one
    assert pushed.block_count == 2  # blocks of coarse stay together


def test_enumeration_helpers():
    a, b = nset(2), nset(2, "t")
    assert len(list(all_maps(a, b))) == 4
    assert len(list(all_injections(a, b))) == 2
    assert len(list(all_surjections(nset(3), b))) == 6


def test_size_limit_env(tmp_path):
    code = (
        "from opecalc.finsets import FinSet, SizeLimitError, enumerate_partitions\n"
        "s = FinSet(tuple(str(k) for k in range(5)))\n"
        "try:\n"
        "    enumerate_partitions(s)\n"
        "    print('no-limit')\n"
        "except SizeLimitError:\n"
        "    print('limited')\n"
    )
    env = dict(os.environ, OPECALC_MAX_SET_SIZE="3")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True)
    assert out.stdout.strip() == "limited"
    assert max_set_size() >= 8


@given(st.integers(2, 5), st.data())
@settings(max_examples=40, deadline=None)
def test_finer_is_partial_order(n, data):
    s = nset(n)
    parts = enumerate_partitions(s)
    e1 = data.draw(st.sampled_from(parts))
    e2 = data.draw(st.sampled_from(parts))
    e3 = data.draw(st.sampled_from(parts))
    assert finer_geq(e1, e1)
    if finer_geq(e1, e2) and finer_geq(e2, e1):
        assert e1 == e2
    if finer_geq(e1, e2) and finer_geq(e2, e3):
        assert finer_geq(e1, e3)


@given(st.integers(2, 5), st.data())
@settings(max_examples=40, deadline=None)
def test_quotient_blocks_match(n, data):
    s = nset(n)
    e = data.draw(st.sampled_from(enumerate_partitions(s)))
    pi = quotient_map(s, e)
    for i in range(n):
        for j in range(n):
            assert (pi.images[i] == pi.images[j]) == e.same_block(i, j)
