"""Formal chain complexes over exact rationals.

A :class:`FormalComplex` stores, per degree, an ordered basis of hashable
keys and a sparse differential with :class:`fractions.Fraction` entries.
The differential direction is recorded explicitly: ``step = +1`` for
cohomological complexes, ``step = -1`` for homological ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


def sort_key(k):
    """Total order on heterogeneous nested tuple/str/int keys."""
    if isinstance(k, tuple):
        return (2, tuple(sort_key(x) for x in k))
    if isinstance(k, str):
        return (1, k)
    if isinstance(k, (int, Fraction)):
        return (0, k)
    return (3, repr(k))


@dataclass
class FormalComplex:
    step: int
    basis: dict[int, tuple]
    # diff[d] maps (row index in degree d+step, col index in degree d) -> value
    diff: dict[int, dict[tuple[int, int], Fraction]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.step not in (1, -1):
            raise ValueError("step must be +1 or -1")
        for d, entries in self.diff.items():
            rows = len(self.basis.get(d + self.step, ()))
            cols = len(self.basis.get(d, ()))
            for (r, c) in entries:
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ValueError(f"differential entry out of range in degree {d}")

    @staticmethod
    def build(step: int, basis_by_degree: dict[int, list], d_action) -> "FormalComplex":
        """Assemble from a key-level differential.

        ``d_action(degree, key)`` returns a list of (target key, coefficient).
        """
        basis = {d: tuple(sorted(ks, key=sort_key)) for d, ks in basis_by_degree.items()
                 if len(ks) > 0}
        index = {d: {k: i for i, k in enumerate(ks)} for d, ks in basis.items()}
        diff: dict[int, dict[tuple[int, int], Fraction]] = {}
        for d, ks in basis.items():
            entries: dict[tuple[int, int], Fraction] = {}
            tgt = index.get(d + step, {})
            for c, k in enumerate(ks):
                for (k2, coeff) in d_action(d, k):
                    coeff = Fraction(coeff)
                    if coeff == 0:
                        continue
                    if k2 not in tgt:
                        raise ValueError(f"differential leaves the basis: {k!r} -> {k2!r}")
                    pos = (tgt[k2], c)
                    entries[pos] = entries.get(pos, Fraction(0)) + coeff
            diff[d] = {p: v for p, v in entries.items() if v != 0}
        return FormalComplex(step, basis, diff)

    # -- bookkeeping --------------------------------------------------------

    def degrees(self) -> list[int]:
        return sorted(self.basis)

    def dim(self, d: int) -> int:
        return len(self.basis.get(d, ()))

    def dims(self) -> dict[int, int]:
        return {d: self.dim(d) for d in self.degrees()}

    def total_dim(self) -> int:
        return sum(self.dims().values())

    def matrix(self, d: int) -> dict[tuple[int, int], Fraction]:
        return self.diff.get(d, {})

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in self.dims().items())

    # -- verification -------------------------------------------------------

    def check_d_squared(self):
        """Return (ok, witness); witness names the first failing generator."""
        for d in self.degrees():
            m1 = self.matrix(d)
            m2 = self.matrix(d + self.step)
            if not m1 or not m2:
                continue
            by_col: dict[int, list[tuple[int, Fraction]]] = {}
            for (r, c), v in m1.items():
                by_col.setdefault(c, []).append((r, v))
            by_mid: dict[int, list[tuple[int, Fraction]]] = {}
            for (r, c), v in m2.items():
                by_mid.setdefault(c, []).append((r, v))
            for c, col in by_col.items():
                acc: dict[int, Fraction] = {}
                for mid, v1 in col:
                    for r, v2 in by_mid.get(mid, ()):
                        acc[r] = acc.get(r, Fraction(0)) + v2 * v1
                bad = [r for r, v in acc.items() if v != 0]
                if bad:
                    return False, {
                        "degree": d,
                        "generator": self.basis[d][c],
                        "image_rows": sorted(bad),
                    }
        return True, None

    def betti(self) -> dict[int, int]:
        ok, witness = self.check_d_squared()
        if not ok:
            raise ValueError(f"d^2 != 0: {witness}")
        ranks = {d: _sparse_rank(self.matrix(d), self.dim(d + self.step), self.dim(d))
                 for d in self.degrees()}
        out = {}
        for d in self.degrees():
            r_out = ranks.get(d, 0)
            r_in = ranks.get(d - self.step, 0)
            out[d] = self.dim(d) - r_out - r_in
        return {d: v for d, v in out.items()}

    def betti_nonzero(self) -> dict[int, int]:
        return {d: v for d, v in self.betti().items() if v != 0}


def _sparse_rank(entries: dict[tuple[int, int], Fraction], nrows: int, ncols: int) -> int:
    """Exact rank of a sparse rational matrix by elimination.

    Pivots are chosen Markowitz-style (least fill first, preferring ±1
    entries) which keeps the elimination sparse for incidence-like matrices.
    """
    if not entries:
        return 0
    rows: dict[int, dict[int, Fraction]] = {}
    cols: dict[int, set[int]] = {}
    for (r, c), v in entries.items():
        if v != 0:
            rows.setdefault(r, {})[c] = v
            cols.setdefault(c, set()).add(r)
    rank = 0
    while rows:
        best = None
        for r, row in rows.items():
            rl = len(row)
            for c, v in row.items():
                cost = (rl - 1) * (len(cols[c]) - 1)
                unit = 0 if abs(v) == 1 else 1
                cand = (unit, cost, r, c)
                if best is None or cand < best:
                    best = cand
        _, _, pr, pc = best
        pivot_row = rows.pop(pr)
        pv = pivot_row[pc]
        for c in pivot_row:
            cols[c].discard(pr)
        rank += 1
        for r in list(cols.get(pc, ())):
            row = rows.get(r)
            if row is None or pc not in row:
                cols[pc].discard(r)
                continue
            factor = row[pc] / pv
            for c, v in pivot_row.items():
                nv = row.get(c, Fraction(0)) - factor * v
                if nv == 0:
                    if c in row:
                        del row[c]
                        cols[c].discard(r)
                else:
                    if c not in row:
                        cols[c].add(r)
                    row[c] = nv
            if not row:
                del rows[r]
        cols.pop(pc, None)
    return rank


def tensor_complex(cxs: list[FormalComplex]) -> FormalComplex:
    """Tensor product with Koszul signs; all factors must share ``step``."""
    if not cxs:
        raise ValueError("need at least one factor")
    step = cxs[0].step
    for cx in cxs:
        if cx.step != step:
            raise ValueError("mixed differential directions")
        ok, w = cx.check_d_squared()
        if not ok:
            raise ValueError(f"factor fails d^2=0: {w}")

    import itertools

    basis_by_degree: dict[int, list] = {}
    for combo in itertools.product(*[
        [(d, k) for d in cx.degrees() for k in cx.basis[d]] for cx in cxs
    ]):
        deg = sum(d for d, _ in combo)
        key = tuple((d, k) for d, k in combo)
        basis_by_degree.setdefault(deg, []).append(key)

    index = [{(d, k): None for d in cx.degrees() for k in cx.basis[d]} for cx in cxs]
    actions = []
    for cx in cxs:
        act: dict[tuple[int, object], list] = {}
        inv = {d: cx.basis[d] for d in cx.degrees()}
        for d in cx.degrees():
            for (r, c), v in cx.matrix(d).items():
                act.setdefault((d, inv[d][c]), []).append(
                    ((d + step, cx.basis[d + step][r]), v))
        actions.append(act)

    def d_action(deg, key):
        out = []
        sign = 1
        for i, (di, ki) in enumerate(key):
            for (tk, v) in actions[i].get((di, ki), ()):
                nk = key[:i] + (tk,) + key[i + 1:]
                out.append((nk, sign * v))
            sign *= (-1) ** di
        return out

    del index
    return FormalComplex.build(step, basis_by_degree, d_action)
