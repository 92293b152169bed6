"""The p/delta-word complex on partition flags and its filtrations.

Basis words are strict flags f = e_1 > ... > e_N = e with a symbol in
{"p", "d"} on every step ("d" stands for the degree-one symbol).  The
differential is homological (lowers the d-count by one):

* A_k flips a "d" at position k to "p";
* B_k applies when positions k, k+1 are both "d": delete e_{k+1}, keep "d";
* C_k applies when position k is "d" and k+1 is "p": delete e_{k+1}, keep "p";

each summand weighted (-1)^{d_k} with d_k the number of "d" symbols before
position k.
"""

from __future__ import annotations

from fractions import Fraction

from .chains import FormalComplex, tensor_complex
from .finsets import Partition, finer_geq
from .zebra import SegmentsElement, enumerate_flags, segments_leq


def _word_key(flag: tuple[Partition, ...], symbols: tuple[str, ...]) -> tuple:
    return (tuple(p.blocks for p in flag), symbols)


def enumerate_words(f: Partition, e: Partition):
    """All (flag, symbols) words over the interval."""
    import itertools
    out = []
    for flag in enumerate_flags(f, e):
        for symbols in itertools.product("pd", repeat=len(flag) - 1):
            out.append((flag, symbols))
    return out


def word_degree(symbols: tuple[str, ...]) -> int:
    return sum(1 for s in symbols if s == "d")


def _d_terms(flag: tuple[Partition, ...], symbols: tuple[str, ...]):
    """The signed differential terms of a word."""
    out = []
    for k, sym in enumerate(symbols):
        if sym != "d":
            continue
        sign = (-1) ** sum(1 for s in symbols[:k] if s == "d")
        # A_k: flip in place
        out.append(((flag, symbols[:k] + ("p",) + symbols[k + 1:]), sign))
        if k + 1 < len(symbols):
            # delete e_{k+2 in 1-based flag terms} = flag[k+1]
            nf = flag[:k + 1] + flag[k + 2:]
            if symbols[k + 1] == "d":
                ns = symbols[:k] + ("d",) + symbols[k + 2:]
            else:
                ns = symbols[:k] + ("p",) + symbols[k + 2:]
            out.append(((nf, ns), sign))
    return out


def build_R_complex(f: Partition, e: Partition) -> FormalComplex:
    if not finer_geq(f, e):
        raise ValueError("need f >= e")
    words = enumerate_words(f, e)
    keyed = {_word_key(fl, sy): (fl, sy) for fl, sy in words}
    basis: dict[int, list] = {}
    for fl, sy in words:
        basis.setdefault(word_degree(sy), []).append(_word_key(fl, sy))

    def d_action(deg, key):
        fl, sy = keyed[key]
        return [(_word_key(nf, ns), Fraction(sign))
                for (nf, ns), sign in _d_terms(fl, sy)]

    return FormalComplex.build(-1, basis, d_action)


def word_filtration(f: Partition, e: Partition, n: int) -> FormalComplex:
    """The subcomplex spanned by words with |H| (flag length) <= n."""
    words = [(fl, sy) for fl, sy in enumerate_words(f, e) if len(fl) <= n]
    keyed = {_word_key(fl, sy): (fl, sy) for fl, sy in words}
    basis: dict[int, list] = {}
    for fl, sy in words:
        basis.setdefault(word_degree(sy), []).append(_word_key(fl, sy))

    def d_action(deg, key):
        fl, sy = keyed[key]
        terms = [(_word_key(nf, ns), Fraction(sign))
                 for (nf, ns), sign in _d_terms(fl, sy)]
        for (k2, _) in terms:
            if k2 not in keyed:
                raise ValueError("filtration not closed under d")
        return terms

    return FormalComplex.build(-1, basis, d_action)


def two_term_V() -> FormalComplex:
    """The two-term complex with generators p (degree 0), d (degree 1), dd = p."""
    return FormalComplex.build(
        -1, {0: ["p"], 1: ["d"]},
        lambda deg, k: [("p", Fraction(1))] if k == "d" else [])


def graded_piece_vs_TV(f: Partition, e: Partition, flag: tuple[Partition, ...]):
    """Compare the associated-graded summand on a fixed flag with T^{N-1}V.

    The graded differential keeps only the in-place flips (the flag-length
    preserving part).  Returns a report dict.
    """
    for a, b in zip(flag, flag[1:]):
        if not finer_geq(a, b) or a == b:
            raise ValueError("flag must be strict")
    if flag[0] != f or flag[-1] != e:
        raise ValueError("flag endpoints must be f, e")
    import itertools
    n = len(flag) - 1
    basis: dict[int, list] = {}
    for symbols in itertools.product("pd", repeat=n):
        basis.setdefault(word_degree(symbols), []).append(symbols)

    def d_action(deg, symbols):
        out = []
        for k, sym in enumerate(symbols):
            if sym != "d":
                continue
            sign = (-1) ** sum(1 for s in symbols[:k] if s == "d")
            out.append((symbols[:k] + ("p",) + symbols[k + 1:], Fraction(sign)))
        return out

    gr = FormalComplex.build(-1, basis, d_action)
    if n == 0:
        tv = FormalComplex.build(-1, {0: [()]}, lambda d, k: [])
    else:
        tv = tensor_complex([two_term_V()] * n)
    report = {
        "flag_length": len(flag),
        "gr_dims": gr.dims(),
        "tv_dims": tv.dims(),
        "dims_match": gr.dims() == tv.dims(),
        "gr_betti": gr.betti_nonzero(),
        "tv_betti": tv.betti_nonzero(),
        "betti_match": gr.betti_nonzero() == tv.betti_nonzero(),
    }
    # basis bijection commuting with differentials: symbols <-> tensor keys
    if n > 0:
        to_tensor = {sy: tuple((1, "d") if s == "d" else (0, "p") for s in sy)
                     for d in gr.degrees() for sy in gr.basis[d]}
        match = True
        for d in gr.degrees():
            for c, sy in enumerate(gr.basis[d]):
                img_gr = {}
                for (r, cc), v in gr.matrix(d).items():
                    if cc == c:
                        img_gr[to_tensor[gr.basis[d - 1][r]]] = v
                tc = tv.basis[d].index(to_tensor[sy])
                img_tv = {}
                for (r, cc), v in tv.matrix(d).items():
                    if cc == tc:
                        img_tv[tv.basis[d - 1][r]] = v
                if img_gr != img_tv:
                    match = False
        report["differential_match"] = match
    else:
        report["differential_match"] = True
    report["isomorphic"] = (report["dims_match"] and report["betti_match"]
                            and report["differential_match"])
    return report


# ---------------------------------------------------------------------------
# Segments filtration
# ---------------------------------------------------------------------------

def word_segments(flag: tuple[Partition, ...], symbols: tuple[str, ...]) -> SegmentsElement:
    """t(H): one segment per d-position."""
    segs = tuple((flag[k], flag[k + 1]) for k, s in enumerate(symbols) if s == "d")
    return SegmentsElement(segs)


def merge_touching(t: SegmentsElement) -> SegmentsElement:
    """nu: merge touching segments [a,b][b,c] -> [a,c] until none remain."""
    segs = list(t.segments)
    out: list[tuple[Partition, Partition]] = []
    for seg in segs:
        if out and out[-1][1] == seg[0]:
            out[-1] = (out[-1][0], seg[1])
        else:
            out.append(seg)
    return SegmentsElement(tuple(out))


def is_segments_zero(t: SegmentsElement) -> bool:
    """Strict interleaving: a_1 > b_1 > a_2 > ... (no touching segments)."""
    from .finsets import finer_gt
    return all(finer_gt(b, a2)
               for (_, b), (a2, _) in zip(t.segments, t.segments[1:]))


def segments_filtration_R(f: Partition, e: Partition, s: SegmentsElement):
    """Dimensions of the layer of s: graded (nu(t(H)) = s) and filtration
    (nu(t(H)) >= s) per degree."""
    graded: dict[int, int] = {}
    filt: dict[int, int] = {}
    for fl, sy in enumerate_words(f, e):
        val = merge_touching(word_segments(fl, sy))
        d = word_degree(sy)
        if val == s:
            graded[d] = graded.get(d, 0) + 1
        if segments_leq(s, val):
            filt[d] = filt.get(d, 0) + 1
    return {"graded": graded, "filtration": filt}


def all_layer_values(f: Partition, e: Partition):
    """The distinct values nu(t(H)) over all words."""
    vals = []
    for fl, sy in enumerate_words(f, e):
        v = merge_touching(word_segments(fl, sy))
        if v not in vals:
            vals.append(v)
    return vals
