"""The symmetrized system: objects, operators, Maurer-Cartan, splitting."""

import pytest

from opecalc.finsets import FinSet, SetMap
from opecalc import symmetrize as sym


def surj(ns, nt, images, sl="s", tl="t"):
    return SetMap(FinSet(tuple(f"{sl}{k}" for k in range(ns))),
                  FinSet(tuple(f"{tl}{k}" for k in range(nt))), images)


F2 = surj(2, 1, (0, 0))
F3 = surj(3, 1, (0, 0, 0))
F32 = surj(3, 2, (0, 0, 1))


def test_enumerate_cf_counts():
    # one iso class per extra-point count on the unique eligible target
    assert len(sym.enumerate_Cf(F2, 2)) == 1
    assert len(sym.enumerate_Cf(F2, 4)) == 3
    # no eligible targets when every fiber is a singleton
    ident = surj(2, 2, (0, 1))
    assert len(sym.enumerate_Cf(ident, 4)) == 1


def test_cf_object_validation():
    s, u, t = F2.source, FinSet(("s0", "s1", "w")), F2.target
    i = SetMap(s, u, (0, 1))
    p = SetMap(u, t, (0, 0, 0))
    obj = sym.CfObject(i, p)
    assert obj.f.images == F2.images
    assert obj.extras() == [2]
    with pytest.raises(ValueError):
        sym.CfObject(p, p)  # not an injection


def test_canonicalize_idempotent():
    for obj in sym.enumerate_Cf(F3, 5):
        rep, iso = sym.canonicalize_cf(obj.i, obj.p)
        assert rep == obj  # enumerate_Cf already yields canonical objects
        rep2, _ = sym.canonicalize_cf(rep.i, rep.p)
        assert rep2 == rep


def test_operators_raise_degree_by_one():
    for obj in sym.enumerate_Cf(F2, 4):
        for rep, m in sym.L_operator(obj) + sym.R_operator(obj):
            for lad in m.terms:
                assert lad.degree == 1


def test_maurer_cartan_small():
    for f, max_u in ((F2, 4), (F32, 5)):
        rep = sym.verify_total_differential(f, max_u)
        assert rep["ok"], rep["residues"]


def test_coassociativity_chain():
    s4 = FinSet(("a", "b", "c", "d"))
    r3 = FinSet(("r0", "r1", "r2"))
    r2 = FinSet(("q0", "q1"))
    pt = FinSet(("t",))
    f1 = SetMap(s4, r3, (0, 0, 1, 2))
    f2 = SetMap(r3, r2, (0, 1, 1))
    f3 = SetMap(r2, pt, (0, 0))
    rep = sym.verify_as_coassociativity(f1, f2, f3, 5)
    assert rep["ok"], rep["mismatches"]


def test_pad_towers_composes_ambients():
    obj1 = sym.enumerate_Cf(F32, 4)[1]  # one extra point over the fat fiber
    f2b = surj(2, 1, (0, 0), sl="t", tl="z")
    obj2 = sym.enumerate_Cf(f2b, 3)[1]
    pad = sym.pad_towers(obj1.tower, obj2.tower)
    assert pad.source == obj1.tower.source
    assert pad.top == obj2.tower.top
    assert len(pad.surjs) == len(obj1.tower.surjs) + len(obj2.tower.surjs)
