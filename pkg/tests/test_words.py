"""Decorated word complexes: d^2, acyclicity, filtration layers."""

import pytest

from opecalc.finsets import FinSet, Partition, SetMap, kernel_partition
from opecalc.words import (
    all_layer_values, build_R_complex, enumerate_words, word_degree,
)


def nset(n):
    return FinSet(tuple(f"x{k}" for k in range(n)))


def pair(fibers):
    """(f, e): f discrete on n points, e the kernel of the fibered collapse."""
    n = sum(fibers)
    s = nset(n)
    images = []
    for t, m in enumerate(fibers):
        images += [t] * m
    p = SetMap(s, FinSet(tuple(f"t{k}" for k in range(len(fibers)))),
               tuple(images))
    return Partition.discrete(s), kernel_partition(p)


@pytest.mark.parametrize("fibers", [(2,), (3,), (2, 2), (2, 1), (3, 2)])
def test_d_squared(fibers):
    f, e = pair(fibers)
    cx = build_R_complex(f, e)
    ok, witness = cx.check_d_squared()
    assert ok, witness


@pytest.mark.parametrize("fibers", [(2,), (3,), (2, 2), (2, 1), (3, 1, 1)])
def test_strict_pairs_acyclic(fibers):
    f, e = pair(fibers)
    cx = build_R_complex(f, e)
    strict = any(m > 1 for m in fibers)
    assert cx.betti_nonzero() == ({} if strict else {0: 1})


def test_diagonal_h0():
    s = nset(3)
    f = Partition.discrete(s)
    cx = build_R_complex(f, f)
    assert cx.betti_nonzero() == {0: 1}


def test_word_degrees_match_complex():
    f, e = pair((3,))
    cx = build_R_complex(f, e)
    degrees = {}
    for flag, symbols in enumerate_words(f, e):
        d = word_degree(symbols)
        degrees[d] = degrees.get(d, 0) + 1
    assert degrees == cx.dims()


def test_layer_values_cover_words():
    f, e = pair((2, 2))
    layers = all_layer_values(f, e)
    assert layers
    # each layer value is a segments element with ordered (top, bottom) pairs
    for t in layers:
        for a, b in t.segments:
            assert a.carrier == b.carrier
