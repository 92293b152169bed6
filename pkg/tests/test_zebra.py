"""Colored flag posets: order axioms, nu, fibers, least elements."""

import itertools

import pytest

from opecalc.finsets import FinSet, Partition, enumerate_partitions, finer_geq
from opecalc import zebra as zb


def nset(n):
    return FinSet(tuple(f"x{k}" for k in range(n)))


def pairs_up_to(n):
    s = nset(n)
    parts = enumerate_partitions(s)
    for f in parts:
        for e in parts:
            if finer_geq(f, e):
                yield f, e


def test_enumerate_nonempty():
    s = nset(3)
    f = Partition.discrete(s)
    e = Partition.indiscrete(s)
    elems = zb.enumerate_zebra(f, e)
    assert elems
    segs = zb.enumerate_segments(f, e)
    assert segs
    for x in elems:
        assert zb.nu(x) in segs


@pytest.mark.parametrize("n", [2, 3])
def test_poset_axioms(n):
    for f, e in pairs_up_to(n):
        elems = zb.enumerate_zebra(f, e)
        for a in elems:
            assert zb.zebra_leq(a, a)
        for a, b in itertools.permutations(elems, 2):
            if zb.zebra_leq(a, b):
                assert not zb.zebra_leq(b, a)
        for a, b, c in itertools.product(elems, repeat=3):
            if zb.zebra_leq(a, b) and zb.zebra_leq(b, c):
                assert zb.zebra_leq(a, c)


@pytest.mark.parametrize("n", [2, 3])
def test_nu_monotone(n):
    for f, e in pairs_up_to(n):
        elems = zb.enumerate_zebra(f, e)
        for a, b in itertools.product(elems, repeat=2):
            if zb.zebra_leq(a, b):
                assert zb.segments_leq(zb.nu(a), zb.nu(b))


@pytest.mark.parametrize("n", [2, 3])
def test_fibers_and_initial_objects(n):
    for f, e in pairs_up_to(n):
        elems = zb.enumerate_zebra(f, e)
        for t in zb.enumerate_segments(f, e):
            fib = zb.fiber(f, e, t)
            assert all(zb.nu(x) == t for x in fib)
            if fib:
                init = zb.initial_object(f, e, t)
                assert init in fib
                assert all(zb.zebra_leq(init, x) for x in fib)


@pytest.mark.parametrize("n", [2, 3])
def test_least_above(n):
    for f, e in pairs_up_to(n):
        elems = zb.enumerate_zebra(f, e)
        segs = zb.enumerate_segments(f, e)
        for a in elems:
            for t in segs:
                above = [x for x in zb.fiber(f, e, t) if zb.zebra_leq(a, x)]
                least = zb.least_above(a, t)
                if least is None:
                    assert not above
                else:
                    assert least in above
                    assert all(zb.zebra_leq(least, x) for x in above)
