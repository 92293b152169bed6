"""Formal complexes over exact rationals: build, d^2, Betti, tensor."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from opecalc.chains import FormalComplex, tensor_complex, _sparse_rank


def interval_complex():
    # 0 -> Q -> Q -> 0 with d = identity: acyclic
    return FormalComplex.build(
        1, {0: ["a"], 1: ["b"]}, lambda d, k: [("b", 1)] if k == "a" else [])


def circle_complex():
    # two points, two edges glued into a circle (cohomological indexing)
    def d(deg, k):
        if deg == 0:
            # vertex k hits both edges with opposite orientations
            sign = 1 if k == "v0" else -1
            return [("e0", sign), ("e1", -sign)]
        return []
    return FormalComplex.build(1, {0: ["v0", "v1"], 1: ["e0", "e1"]}, d)


def test_build_and_dims():
    cx = interval_complex()
    assert cx.dims() == {0: 1, 1: 1}
    assert cx.total_dim() == 2
    assert cx.euler_characteristic() == 0


def test_betti_interval():
    cx = interval_complex()
    ok, witness = cx.check_d_squared()
    assert ok and witness is None
    assert cx.betti_nonzero() == {}


def test_betti_circle():
    cx = circle_complex()
    assert cx.betti_nonzero() == {0: 1, 1: 1}
    assert cx.euler_characteristic() == 0


def test_d_squared_failure_raises():
    # d(a) = b, d(b) = c: d^2 != 0
    def d(deg, k):
        if k == "a":
            return [("b", 1)]
        if k == "b":
            return [("c", 1)]
        return []
    cx = FormalComplex.build(1, {0: ["a"], 1: ["b"], 2: ["c"]}, d)
    ok, witness = cx.check_d_squared()
    assert not ok and witness["generator"] == "a"
    with pytest.raises(ValueError):
        cx.betti()


def test_differential_leaving_basis_rejected():
    with pytest.raises(ValueError):
        FormalComplex.build(1, {0: ["a"]}, lambda d, k: [("ghost", 1)])


def test_step_validation():
    with pytest.raises(ValueError):
        FormalComplex(step=2, basis={0: ("a",)})


def test_sparse_rank_exact():
    entries = {(0, 0): Fraction(2), (0, 1): Fraction(4),
               (1, 0): Fraction(1), (1, 1): Fraction(2)}
    assert _sparse_rank(entries, 2, 2) == 1
    assert _sparse_rank({}, 3, 3) == 0


def test_tensor_kunneth_circle_circle():
    t2 = tensor_complex([circle_complex(), circle_complex()])
    ok, _ = t2.check_d_squared()
    assert ok
    # torus: 1, 2, 1
    assert t2.betti_nonzero() == {0: 1, 1: 2, 2: 1}


def test_tensor_with_acyclic_factor():
    t = tensor_complex([circle_complex(), interval_complex()])
    assert t.betti_nonzero() == {}


@given(st.integers(1, 4), st.integers(1, 4))
@settings(max_examples=20, deadline=None)
def test_tensor_dims_multiply(a, b):
    ca = FormalComplex.build(1, {0: list(range(a))}, lambda d, k: [])
    cb = FormalComplex.build(1, {1: list(range(b))}, lambda d, k: [])
    t = tensor_complex([ca, cb])
    assert t.dims() == {1: a * b}
