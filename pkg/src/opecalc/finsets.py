"""Finite sets, maps, partitions and canonical iso-class keys.

Conventions used throughout the package:

* partitions are compared by refinement with finer = GREATER, so the
  discrete partition ``omega`` is the unique maximum and the indiscrete
  partition ``alpha`` the unique minimum;
* every enumeration is deterministic: partitions are ordered by
  (block count, canonical block list), maps by their image tuples.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import lru_cache


DEFAULT_MAX_SET_SIZE = 8


class SizeLimitError(ValueError):
    """Raised when an enumeration would exceed the configured bound."""


def max_set_size() -> int:
    value = os.environ.get("OPECALC_MAX_SET_SIZE")
    if value is None:
        return DEFAULT_MAX_SET_SIZE
    return int(value)


def _check_size(n: int) -> None:
    bound = max_set_size()
    if n > bound:
        raise SizeLimitError(f"set of size {n} exceeds bound {bound}")


@dataclass(frozen=True, order=True)
class FinSet:
    """A finite set with ordered, distinct string labels."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels: {self.labels}")

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @staticmethod
    def of_size(n: int, prefix: str = "") -> "FinSet":
        return FinSet(tuple(f"{prefix}{i}" for i in range(n)))

    def disjoint_union(self, other: "FinSet", tags: tuple[str, str] = ("a:", "b:")) -> "FinSet":
        return FinSet(
            tuple(tags[0] + l for l in self.labels)
            + tuple(tags[1] + l for l in other.labels)
        )

    def subset(self, indices: tuple[int, ...]) -> "FinSet":
        return FinSet(tuple(self.labels[i] for i in sorted(indices)))


@dataclass(frozen=True, order=True)
class SetMap:
    """A map of finite sets, stored as per-source-element target indices."""

    source: FinSet
    target: FinSet
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.source.size:
            raise ValueError("image list length mismatch")
        for i in self.images:
            if not 0 <= i < self.target.size:
                raise ValueError("image index out of range")

    def __call__(self, i: int) -> int:
        return self.images[i]

    def apply_label(self, label: str) -> str:
        return self.target.labels[self.images[self.source.index(label)]]

    @property
    def is_injective(self) -> bool:
        return len(set(self.images)) == len(self.images)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.images)) == self.target.size

    @property
    def is_bijective(self) -> bool:
        return self.is_injective and self.is_surjective

    @property
    def is_proper_surjection(self) -> bool:
        return self.is_surjective and self.source.size > self.target.size

    @property
    def kind(self) -> str:
        if self.is_bijective:
            return "bijection"
        if self.is_proper_surjection:
            return "proper-surjection"
        if self.is_injective:
            return "injection"
        if self.is_surjective:
            return "surjection"
        return "general"

    @staticmethod
    def identity(s: FinSet) -> "SetMap":
        return SetMap(s, s, tuple(range(s.size)))

    def compose(self, first: "SetMap") -> "SetMap":
        """self after first (self ∘ first)."""
        if first.target != self.source:
            raise ValueError("maps not composable")
        return SetMap(first.source, self.target, tuple(self.images[i] for i in first.images))

    def fibers(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {t: [] for t in range(self.target.size)}
        for i, t in enumerate(self.images):
            out[t].append(i)
        return {t: tuple(v) for t, v in out.items()}

    def image_indices(self) -> frozenset[int]:
        return frozenset(self.images)

    def inverse(self) -> "SetMap":
        if not self.is_bijective:
            raise ValueError("only bijections invert")
        inv = [0] * self.source.size
        for i, t in enumerate(self.images):
            inv[t] = i
        return SetMap(self.target, self.source, tuple(inv))

    def restrict(self, indices: tuple[int, ...]) -> "SetMap":
        """Restriction to a subset of the source (subset keeps its labels)."""
        sub = self.source.subset(indices)
        return SetMap(
            sub, self.target,
            tuple(self.images[self.source.index(l)] for l in sub.labels),
        )


@dataclass(frozen=True, order=True)
class Partition:
    """An equivalence relation in canonical block form.

    Blocks are tuples of source indices, each sorted, the list sorted by
    least element.
    """

    carrier: FinSet
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for b in self.blocks:
            if not b or tuple(sorted(b)) != b:
                raise ValueError("blocks must be sorted and nonempty")
            if seen & set(b):
                raise ValueError("blocks overlap")
            seen |= set(b)
        if seen != set(range(self.carrier.size)):
            raise ValueError("blocks must cover the carrier")
        if list(self.blocks) != sorted(self.blocks, key=lambda b: b[0]):
            raise ValueError("blocks must be sorted by least element")

    @staticmethod
    def from_blocks(carrier: FinSet, blocks) -> "Partition":
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        return Partition(carrier, canon)

    @staticmethod
    def discrete(carrier: FinSet) -> "Partition":
        return Partition(carrier, tuple((i,) for i in range(carrier.size)))

    @staticmethod
    def indiscrete(carrier: FinSet) -> "Partition":
        if carrier.size == 0:
            return Partition(carrier, ())
        return Partition(carrier, (tuple(range(carrier.size)),))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int) -> int:
        for k, b in enumerate(self.blocks):
            if i in b:
                return k
        raise ValueError("index not in carrier")

    def same_block(self, i: int, j: int) -> bool:
        return self.block_of(i) == self.block_of(j)

    def block_labels(self) -> tuple[tuple[str, ...], ...]:
        return tuple(tuple(self.carrier.labels[i] for i in b) for b in self.blocks)

    def restrict(self, indices: tuple[int, ...]) -> "Partition":
        """Induced partition on a subset (subset keeps its labels)."""
        sub = self.carrier.subset(indices)
        reindex = {self.carrier.index(l): k for k, l in enumerate(sub.labels)}
        blocks = []
        for b in self.blocks:
            nb = tuple(sorted(reindex[i] for i in b if i in reindex))
            if nb:
                blocks.append(nb)
        return Partition.from_blocks(sub, blocks)


def finer_geq(e1: Partition, e2: Partition) -> bool:
    """True iff e1 is finer than (or equal to) e2: e1 >= e2."""
    if e1.carrier != e2.carrier:
        raise ValueError("partitions on different carriers")
    for b in e1.blocks:
        k = e2.block_of(b[0])
        if any(i not in e2.blocks[k] for i in b):
            return False
    return True


def finer_gt(e1: Partition, e2: Partition) -> bool:
    return e1 != e2 and finer_geq(e1, e2)


@lru_cache(maxsize=None)
def enumerate_partitions(s: FinSet) -> tuple[Partition, ...]:
    """All partitions of s, ordered by (block count, canonical blocks)."""
    _check_size(s.size)
    if s.size == 0:
        return (Partition(s, ()),)
    out: list[list[list[int]]] = [[[0]]]
    for i in range(1, s.size):
        nxt = []
        for p in out:
            for k in range(len(p)):
                nxt.append([b + [i] if j == k else list(b) for j, b in enumerate(p)])
            nxt.append([list(b) for b in p] + [[i]])
        out = nxt
    parts = [Partition.from_blocks(s, p) for p in out]
    parts.sort(key=lambda e: (e.block_count, e.blocks))
    return tuple(parts)


def quotient_map(s: FinSet, e: Partition) -> SetMap:
    """The projection s -> s/e; s/e is labeled by least block elements."""
    if e.carrier != s:
        raise ValueError("partition not on the given set")
    q_labels = tuple(s.labels[b[0]] for b in e.blocks)
    target = FinSet(q_labels)
    images = [0] * s.size
    for k, b in enumerate(e.blocks):
        for i in b:
            images[i] = k
    return SetMap(s, target, tuple(images))


def kernel_partition(p: SetMap) -> Partition:
    """The fiber relation of a map."""
    blocks = [b for b in p.fibers().values() if b]
    return Partition.from_blocks(p.source, blocks)


def passes_through(p: SetMap, e: Partition) -> bool:
    """True iff p factors through the quotient by e (e >= ker p)."""
    return finer_geq(e, kernel_partition(p))


def induced_on_quotient(p: SetMap, e: Partition) -> SetMap:
    """The factorization s/e -> target of p, when p passes through e."""
    if not passes_through(p, e):
        raise ValueError("map does not pass through the quotient")
    pi = quotient_map(p.source, e)
    images = tuple(p.images[b[0]] for b in e.blocks)
    return SetMap(pi.target, p.target, images)


def push_to_quotient(e: Partition, finer: Partition) -> Partition:
    """The partition induced by e on the quotient carrier/finer (finer >= e)."""
    if not finer_geq(finer, e):
        raise ValueError("second argument must be finer")
    pi = quotient_map(e.carrier, finer)
    blocks: dict[int, set[int]] = {}
    for k, b in enumerate(finer.blocks):
        blocks.setdefault(e.block_of(b[0]), set()).add(k)
    return Partition.from_blocks(pi.target, [tuple(sorted(v)) for v in blocks.values()])


def disjoint_union_partitions(e1: Partition, e2: Partition,
                              tags: tuple[str, str] = ("a:", "b:")) -> Partition:
    carrier = e1.carrier.disjoint_union(e2.carrier, tags)
    n1 = e1.carrier.size
    blocks = [b for b in e1.blocks]
    blocks += [tuple(i + n1 for i in b) for b in e2.blocks]
    return Partition.from_blocks(carrier, blocks)


def all_maps(source: FinSet, target: FinSet):
    for images in itertools.product(range(target.size), repeat=source.size):
        yield SetMap(source, target, images)


def all_injections(source: FinSet, target: FinSet):
    for images in itertools.permutations(range(target.size), source.size):
        yield SetMap(source, target, images)


def all_surjections(source: FinSet, target: FinSet):
    for m in all_maps(source, target):
        if m.is_surjective:
            yield m


# ---------------------------------------------------------------------------
# Canonical iso-class keys
# ---------------------------------------------------------------------------

def canonical_key(levels: tuple[FinSet, ...],
                  maps: tuple[tuple[int, int, SetMap], ...],
                  boundary: frozenset[int]) -> tuple:
    """Canonical key of a diagram of finite sets under interior relabeling.

    ``levels`` lists the sets, ``maps`` entries are (source level index,
    target level index, map), ``boundary`` gives the level indices whose
    labels are fixed.  Interior levels are relabeled exhaustively and the
    lexicographically least encoding is returned.  Two diagrams get equal
    keys iff they are related by interior bijections commuting with all maps
    and fixing the boundary pointwise.
    """
    interior = [k for k in range(len(levels)) if k not in boundary]
    for k in interior:
        if levels[k].size > max_set_size():
            raise SizeLimitError("interior level too large for canonicalization")

    shape = tuple(levels[k].size for k in range(len(levels)))
    bound_labels = tuple(levels[k].labels if k in boundary else None
                         for k in range(len(levels)))

    def encode(perms: dict[int, tuple[int, ...]]) -> tuple:
        # perms[k][old index] = new index for interior levels
        enc = []
        for (a, b, m) in maps:
            pa = perms.get(a)
            pb = perms.get(b)
            images = [0] * m.source.size
            for i, t in enumerate(m.images):
                ni = pa[i] if pa is not None else i
                nt = pb[t] if pb is not None else t
                images[ni] = nt
            enc.append(tuple(images))
        return tuple(enc)

    best = None
    spaces = [list(itertools.permutations(range(levels[k].size))) for k in interior]
    for combo in itertools.product(*spaces):
        perms = dict(zip(interior, combo))
        e = encode(perms)
        if best is None or e < best:
            best = e
    return (shape, bound_labels, tuple((a, b) for (a, b, _) in maps), best)
