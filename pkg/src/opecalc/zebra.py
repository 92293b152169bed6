"""Colored partition flags, segment flags, and their filtration order.

A zebra element over an interval f >= e is a strict flag
f = e_1 > e_2 > ... > e_n = e with each step colored "i" or "I".
A segments element is a flag of strict segments [a_k, b_k] with
b_k >= a_{k+1}; nu sends a zebra element to its I-colored steps.

Order conventions (pinned by the exhaustive poset/monotonicity checks):

* zebra: x <= y iff y's flag refines x's and every step of x colored "i"
  subdivides into all-"i" micro steps, while a step colored "I" allows the
  micro step at its finer end to carry either color (all others "i");
* segments: u <= v iff every segment [a', b'] of v has a segment [a, b]
  of u with a = a' and b' >= b; the empty flag is the unique maximum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .finsets import Partition, finer_geq, finer_gt


@dataclass(frozen=True, order=True)
class ZebraElement:
    flag: tuple[Partition, ...]
    colors: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.colors) != len(self.flag) - 1:
            raise ValueError("color count must be flag length - 1")
        for c in self.colors:
            if c not in ("i", "I"):
                raise ValueError("colors must be 'i' or 'I'")
        for a, b in zip(self.flag, self.flag[1:]):
            if not finer_gt(a, b):
                raise ValueError("flag must be strictly decreasing")

    @property
    def top(self) -> Partition:
        return self.flag[0]

    @property
    def bottom(self) -> Partition:
        return self.flag[-1]


@dataclass(frozen=True, order=True)
class SegmentsElement:
    segments: tuple[tuple[Partition, Partition], ...]

    def __post_init__(self) -> None:
        for a, b in self.segments:
            if not finer_gt(a, b):
                raise ValueError("segments must be strict")
        for (_, b), (a2, _) in zip(self.segments, self.segments[1:]):
            if not finer_geq(b, a2):
                raise ValueError("consecutive segments must satisfy b_k >= a_{k+1}")


def _interval(f: Partition, e: Partition) -> list[Partition]:
    from .finsets import enumerate_partitions
    return [x for x in enumerate_partitions(f.carrier)
            if finer_geq(f, x) and finer_geq(x, e)]


def enumerate_flags(f: Partition, e: Partition) -> list[tuple[Partition, ...]]:
    """All strict flags f = e_1 > ... > e_n = e (n >= 1)."""
    if not finer_geq(f, e):
        raise ValueError("need f >= e")
    if f == e:
        return [(f,)]
    mid = [x for x in _interval(f, e) if x not in (f, e)]
    out = []
    frontier = [(f,)]
    while frontier:
        nxt = []
        for c in frontier:
            out.append(c + (e,))
            for x in mid:
                if finer_gt(c[-1], x):
                    nxt.append(c + (x,))
        frontier = nxt
    out.sort(key=lambda fl: (len(fl), tuple(x.blocks for x in fl)))
    return out


def enumerate_zebra(f: Partition, e: Partition) -> list[ZebraElement]:
    out = []
    for flag in enumerate_flags(f, e):
        for colors in itertools.product("iI", repeat=len(flag) - 1):
            out.append(ZebraElement(flag, colors))
    return out


def zebra_leq(x: ZebraElement, y: ZebraElement) -> bool:
    if x.top != y.top or x.bottom != y.bottom:
        raise ValueError("elements over different intervals")
    yset = {p: k for k, p in enumerate(y.flag)}
    if any(p not in yset for p in x.flag):
        return False
    for step in range(len(x.flag) - 1):
        lo = yset[x.flag[step]]
        hi = yset[x.flag[step + 1]]
        micro = y.colors[lo:hi]
        if x.colors[step] == "i":
            if any(c == "I" for c in micro):
                return False
        else:
            # the micro step at the finer end (position lo) is unconstrained
            if any(c == "I" for c in micro[1:]):
                return False
    return True


def nu(s: ZebraElement) -> SegmentsElement:
    segs = tuple((s.flag[k], s.flag[k + 1])
                 for k, c in enumerate(s.colors) if c == "I")
    return SegmentsElement(segs)


def segments_leq(u: SegmentsElement, v: SegmentsElement) -> bool:
    for (a2, b2) in v.segments:
        if not any(a == a2 and finer_geq(b2, b) for (a, b) in u.segments):
            return False
    return True


def enumerate_segments(f: Partition, e: Partition) -> list[SegmentsElement]:
    """All segments elements with endpoints inside [e, f]."""
    interval = _interval(f, e)
    strict_pairs = [(a, b) for a in interval for b in interval if finer_gt(a, b)]
    out = [SegmentsElement(())]
    frontier = [()]
    while frontier:
        nxt = []
        for segs in frontier:
            for (a, b) in strict_pairs:
                if segs and not finer_geq(segs[-1][1], a):
                    continue
                nxt.append(segs + ((a, b),))
        out.extend(SegmentsElement(s) for s in nxt)
        frontier = nxt
    out.sort(key=lambda t: (len(t.segments),
                            tuple((a.blocks, b.blocks) for a, b in t.segments)))
    return out


def fiber(f: Partition, e: Partition, t: SegmentsElement) -> list[ZebraElement]:
    return [s for s in enumerate_zebra(f, e) if nu(s) == t]


def least_above(s: ZebraElement, t: SegmentsElement):
    """The least element of {x : nu(x) = t, x >= s}, or None.

    Returns None when nu(s) <= t fails (then the set above is empty).
    The construction merges s's flag with t's segment endpoints; minimality
    is certified by brute force in the test-suite at acceptance sizes.
    """
    if not segments_leq(nu(s), t):
        return None
    pool = set(s.flag)
    for a, b in t.segments:
        pool.add(a)
        pool.add(b)
    chain = sorted(pool, key=lambda p: -p.block_count)
    # partitions of equal block count in a chain must coincide; verify order
    for p1, p2 in zip(chain, chain[1:]):
        if not finer_gt(p1, p2):
            raise ValueError("merged endpoints do not form a chain")
    seg_pairs = set(t.segments)
    colors = tuple("I" if (chain[k], chain[k + 1]) in seg_pairs else "i"
                   for k in range(len(chain) - 1))
    out = ZebraElement(tuple(chain), colors)
    if nu(out) != t or not zebra_leq(s, out):
        raise ValueError("construction failed its defining conditions")
    return out


def initial_object(f: Partition, e: Partition, t: SegmentsElement) -> ZebraElement:
    """The least element of the fiber of t: (f i a_1 I b_1 i a_2 ... I b_m i e)
    with degenerate i-steps collapsed."""
    seq: list[Partition] = [f]
    colors: list[str] = []
    for (a, b) in t.segments:
        if a != seq[-1]:
            seq.append(a)
            colors.append("i")
        seq.append(b)
        colors.append("I")
    if seq[-1] != e:
        seq.append(e)
        colors.append("i")
    out = ZebraElement(tuple(seq), tuple(colors))
    if nu(out) != t:
        raise ValueError("fiber is empty or construction failed")
    return out
