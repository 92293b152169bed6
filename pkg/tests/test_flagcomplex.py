"""Flag complexes of surjections and the signed shuffle factorization."""

import math

import pytest

from opecalc.finsets import FinSet, SetMap
from opecalc.flagcomplex import (
    build_m_complex, disjoint_union_family, is_chain_map,
    lowest_cohomology_rank, shuffle_factorization,
)


def collapse(n, prefix="x"):
    src = FinSet(tuple(f"{prefix}{k}" for k in range(n)))
    return SetMap(src, FinSet((f"{prefix}t",)), (0,) * n)


def fibered(fibers, prefix="x"):
    n = sum(fibers)
    src = FinSet(tuple(f"{prefix}{k}" for k in range(n)))
    tgt = FinSet(tuple(f"{prefix}t{k}" for k in range(len(fibers))))
    images = []
    for t, m in enumerate(fibers):
        images += [t] * m
    return SetMap(src, tgt, tuple(images))


@pytest.mark.parametrize("n,rank", [(2, 1), (3, 2), (4, 6), (5, 24)])
def test_collapse_betti(n, rank):
    cx = build_m_complex(collapse(n))
    ok, _ = cx.check_d_squared()
    assert ok
    assert cx.betti_nonzero() == {-(n - 1): rank}
    assert lowest_cohomology_rank(collapse(n)) == rank


def test_bijection_degree_convention():
    # a bijective p contributes a single class in degree -1
    p = SetMap(FinSet(("a", "b")), FinSet(("s", "t")), (0, 1))
    cx = build_m_complex(p)
    assert cx.dims() == {-1: 1}
    assert cx.betti_nonzero() == {-1: 1}


@pytest.mark.parametrize("fibers", [(2, 2), (3, 2), (2, 1), (3, 1, 1)])
def test_multiplicative_bottom_rank(fibers):
    cx = build_m_complex(fibered(fibers))
    want = math.prod(math.factorial(m - 1) for m in fibers)
    n, t = sum(fibers), len(fibers)
    low = -(n - t) if n > t else -1
    assert cx.betti_nonzero() == {low: want}


def test_disjoint_union_family():
    p = disjoint_union_family([collapse(2, "a"), collapse(3, "b")])
    assert p.source.size == 5 and p.target.size == 2
    assert p.is_surjective


@pytest.mark.parametrize("sizes", [(2, 2), (2, 3), (1, 2), (2, 2, 1)])
def test_shuffle_factorization_is_chain_map(sizes):
    factors = [collapse(n, f"f{a}_") for a, n in enumerate(sizes)]
    tensor, target, mapping = shuffle_factorization(factors)
    ok, _ = tensor.check_d_squared()
    assert ok
    ok, _ = target.check_d_squared()
    assert ok
    assert is_chain_map(tensor, target, mapping)


def test_shuffle_dims_consistent():
    factors = [collapse(2, "a"), collapse(2, "b")]
    tensor, target, mapping = shuffle_factorization(factors)
    # every tensor generator maps somewhere, and images live in the target
    for (dk, key), terms in mapping.items():
        assert terms
