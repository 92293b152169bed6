"""The flag complex m_p of a surjection and its shuffle factorization maps.

For a surjection p: S ->> T, the degree -n part of m_p is spanned by strict
partition chains omega > e_1 > ... > e_{n-1} > ker(p); the differential
deletes internal partitions with alternating signs and raises degree by one.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .chains import FormalComplex, tensor_complex
from .finsets import (
    FinSet, Partition, SetMap, enumerate_partitions, finer_gt,
    kernel_partition, disjoint_union_partitions,
)


def _flag_key(chain: tuple[Partition, ...]) -> tuple:
    return tuple(e.blocks for e in chain)


def internal_chains(s: FinSet, bottom: Partition):
    """All strict chains omega > e_1 > ... > e_{n-1} > bottom (n >= 1).

    The chain of internal partitions is returned (possibly empty); the
    endpoints omega and bottom are implicit.
    """
    omega = Partition.discrete(s)
    mid = [e for e in enumerate_partitions(s)
           if finer_gt(omega, e) and finer_gt(e, bottom)]
    chains: list[tuple[Partition, ...]] = [()]
    frontier: list[tuple[Partition, ...]] = [()]
    while frontier:
        new = []
        for c in frontier:
            top = c[-1] if c else omega
            for e in mid:
                if finer_gt(top, e):
                    new.append(c + (e,))
        chains.extend(new)
        frontier = new
    return chains


def build_m_complex(p: SetMap) -> FormalComplex:
    if not p.is_surjective:
        raise ValueError("m-complex needs a surjection")
    bottom = kernel_partition(p)
    basis: dict[int, list] = {}
    keyed: dict[tuple, tuple[Partition, ...]] = {}
    for c in internal_chains(p.source, bottom):
        k = _flag_key(c)
        keyed[k] = c
        basis.setdefault(-(len(c) + 1), []).append(k)

    def d_action(deg, key):
        chain = keyed[key]
        out = []
        for i in range(1, len(chain) + 1):
            # delete internal partition e_i (1-based), sign (-1)^{i+1}
            nk = _flag_key(chain[:i - 1] + chain[i:])
            out.append((nk, Fraction((-1) ** (i + 1))))
        return out

    return FormalComplex.build(+1, basis, d_action)


def lowest_cohomology_rank(p: SetMap) -> int:
    cx = build_m_complex(p)
    low = -(p.source.size - p.target.size) if p.source.size > p.target.size else -1
    b = cx.betti()
    for d, v in b.items():
        if d != low and v != 0:
            raise ValueError(f"unexpected cohomology in degree {d}")
    return b.get(low, 0)


def l_projection(p: SetMap):
    """Projection onto the unique degree -1 generator (the empty chain)."""
    cx = build_m_complex(p)
    key = _flag_key(())
    idx = cx.basis[-1].index(key)

    def project(degree: int, vector: dict[int, Fraction]) -> Fraction:
        if degree != -1:
            return Fraction(0)
        return vector.get(idx, Fraction(0))

    return {"degree": -1, "index": idx, "key": key, "apply": project}


# ---------------------------------------------------------------------------
# Shuffle factorization
# ---------------------------------------------------------------------------

def _disjoint_union_surjection(ps: list[SetMap]) -> SetMap:
    src = ps[0].source
    tgt = ps[0].target
    m = ps[0]
    for k, q in enumerate(ps[1:], start=1):
        tags = ("", f"{k}:") if k == 1 else ("", f"{k}:")
        new_src = src.disjoint_union(q.source, ("", f"{k}:"))
        new_tgt = tgt.disjoint_union(q.target, ("", f"{k}:"))
        images = tuple(m.images) + tuple(t + tgt.size for t in q.images)
        src, tgt, m = new_src, new_tgt, SetMap(new_src, new_tgt, images)
    return m


def disjoint_union_family(ps: list[SetMap]) -> SetMap:
    """The disjoint union p = ⊔ p_a with deterministic tagged labels."""
    if not ps:
        raise ValueError("empty family")
    return _disjoint_union_surjection(ps)


def _full_chain(p: SetMap, internal: tuple[Partition, ...]) -> tuple[Partition, ...]:
    ker = kernel_partition(p)
    top = Partition.discrete(p.source)
    if ker == top:
        # bijective factor: the only flag is the empty one, with no steps
        assert not internal
        return (top,)
    return (top,) + internal + (ker,)


def _embed_partition(e: Partition, factors: list[SetMap], which: int,
                     union_src: FinSet) -> list[tuple[int, ...]]:
    """Blocks of e, reindexed into the disjoint-union carrier."""
    offset = sum(f.source.size for f in factors[:which])
    return [tuple(i + offset for i in b) for b in e.blocks]


def shuffle_signs(mults: tuple[int, ...]):
    """All interleavings of blocks of sizes mults, with permutation parity.

    A shuffle is a word over factor indices with prescribed multiplicities;
    its sign is the parity of the number of cross-factor inversions relative
    to the sorted word.
    """
    n = sum(mults)
    letters = [a for a, m in enumerate(mults) for _ in range(m)]
    seen = set()
    for perm in itertools.permutations(range(n)):
        word = tuple(letters[i] for i in perm)
        if word in seen:
            continue
        seen.add(word)
        inv = sum(1 for i in range(n) for j in range(i + 1, n)
                  if word[i] > word[j])
        yield word, (-1) ** inv


def shuffle_image(factors: list[SetMap],
                  chains: tuple[tuple[Partition, ...], ...]):
    """The signed sum of merged flags for a tuple of per-factor flags.

    ``chains`` holds the internal chain of each factor term.  Returns a list
    of (internal chain on the union carrier, sign).
    """
    p = disjoint_union_family(factors)
    union_src = p.source
    fulls = [_full_chain(q, c) for q, c in zip(factors, chains)]
    steps = tuple(len(f) - 1 for f in fulls)
    out = []
    for word, sign in shuffle_signs(steps):
        pos = [0] * len(factors)
        merged = []
        for letter in word:
            pos[letter] += 1
            blocks = []
            for a in range(len(factors)):
                blocks.extend(_embed_partition(fulls[a][pos[a]], factors, a, union_src))
            merged.append(Partition.from_blocks(union_src, blocks))
        # drop the final (= ker p) partition; the first len(word)-1 entries
        # are the internal chain of the merged flag
        internal = tuple(merged[:-1])
        full = _full_chain(p, internal)
        for i in range(len(full) - 1):
            assert finer_gt(full[i], full[i + 1])
        out.append((internal, sign))
    return out


def shuffle_factorization(factors: list[SetMap]):
    """The chain map tensor(m_{p_a}) -> m_{⊔p_a}.

    Returns (tensor complex, target complex, mapping) where mapping sends
    each tensor basis key to a list of (target key, coefficient).
    """
    cxs = [build_m_complex(q) for q in factors]
    tensor = tensor_complex(cxs)
    p = disjoint_union_family(factors)
    target = build_m_complex(p)

    chain_lookup = []
    for q in factors:
        bottom = kernel_partition(q)
        lut = {_flag_key(c): c for c in internal_chains(q.source, bottom)}
        chain_lookup.append(lut)

    mapping: dict[tuple, list[tuple[tuple, Fraction]]] = {}
    for deg in tensor.degrees():
        for key in tensor.basis[deg]:
            chains = tuple(chain_lookup[a][k] for a, (_, k) in enumerate(key))
            acc: dict[tuple, Fraction] = {}
            for internal, sign in shuffle_image(factors, chains):
                tk = _flag_key(internal)
                acc[tk] = acc.get(tk, Fraction(0)) + sign
            mapping[key] = [(tk, v) for tk, v in acc.items() if v != 0]
    return tensor, target, mapping


def is_chain_map(tensor: FormalComplex, target: FormalComplex, mapping) -> bool:
    """Exact check of d_target ∘ fact = fact ∘ d_tensor.

    The map may carry a uniform degree shift (each bijective factor
    contributes a one-dimensional tensor factor in degree -1 that maps onto
    flags of unshifted degree); the shift is inferred from the mapping and
    required to be constant.  A shift by s compares against the s-fold
    suspension of the target, whose differential picks up (-1)^s.
    """
    tgt_degree = {k: d for d in target.degrees() for k in target.basis[d]}
    shifts = set()
    for deg in tensor.degrees():
        for key in tensor.basis[deg]:
            for tk, _ in mapping.get(key, ()):
                shifts.add(tgt_degree[tk] - deg)
    if len(shifts) > 1:
        return False
    shift = shifts.pop() if shifts else 0
    for deg in tensor.degrees():
        src_basis = tensor.basis[deg]
        tgt_deg = deg + tensor.step
        for c, key in enumerate(src_basis):
            # fact ∘ d
            lhs: dict[tuple, Fraction] = {}
            for (r, cc), v in tensor.matrix(deg).items():
                if cc != c:
                    continue
                mid_key = tensor.basis[tgt_deg][r]
                for tk, w in mapping.get(mid_key, ()):
                    lhs[tk] = lhs.get(tk, Fraction(0)) + v * w
            # d ∘ fact
            rhs: dict[tuple, Fraction] = {}
            for tk, w in mapping.get(key, ()):
                ti = target.basis[deg + shift].index(tk)
                for (r, cc), v in target.matrix(deg + shift).items():
                    if cc != ti:
                        continue
                    rhs_key = target.basis[tgt_deg + shift][r]
                    rhs[rhs_key] = (rhs.get(rhs_key, Fraction(0))
                                    + v * w * (-1) ** shift)
            lhs = {k: v for k, v in lhs.items() if v != 0}
            rhs = {k: v for k, v in rhs.items() if v != 0}
            if lhs != rhs:
                return False
    return True
