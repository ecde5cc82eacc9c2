"""Censoring add-half mixture model over a growing alphabet.

``CountTable`` holds per-symbol occurrence counts over the full prefix
(censored occurrences included; the escape symbol 0 is never counted).  A
weight view over the alphabet {0..top} assigns integer weight 2*n_j + 1 to
each symbol j, so weight(0) = 1 and total = (top + 1) + 2 * C(top) where
C(k) is the count of observed symbols with value <= k.  The view is a
proper distribution: its denominator counts only in-alphabet occurrences,
so every symbol probability dominates the sub-normalized add-half ratio
with denominator i + (top + 1)/2, and codelengths can only shrink.

Prefix counts are served by a dense Fenwick tree over small values plus a
sorted overflow list for rare huge values, which keeps both encode lookups
and decode searches logarithmic without bounding the symbol range.
"""

from __future__ import annotations

from bisect import bisect_right, insort

__all__ = ["CountTable", "KTWeights", "predictive_weights", "record"]

_DENSE_LIMIT = 1 << 20


class CountTable:
    """Occurrence counts with fast prefix sums; one instance per stream."""

    __slots__ = ("_count", "_tree", "_cap", "_over_vals", "_over_counts", "n_recorded", "distinct")

    def __init__(self, initial_capacity: int = 1024):
        self._cap = initial_capacity
        self._count = [0] * (self._cap + 1)
        self._tree = [0] * (self._cap + 1)
        self._over_vals: list[int] = []  # sorted values > _cap
        self._over_counts: dict[int, int] = {}
        self.n_recorded = 0
        self.distinct = 0

    def count(self, j: int) -> int:
        if j <= self._cap:
            return self._count[j]
        return self._over_counts.get(j, 0)

    def _tree_add(self, idx: int) -> None:
        while idx <= self._cap:
            self._tree[idx] += 1
            idx += idx & -idx

    def _tree_prefix(self, idx: int) -> int:
        s = 0
        while idx > 0:
            s += self._tree[idx]
            idx -= idx & -idx
        return s

    def _grow(self, needed: int) -> None:
        cap = self._cap
        while cap < needed:
            cap *= 2
        self._cap = cap
        self._count.extend([0] * (cap + 1 - len(self._count)))
        tree = [0] * (cap + 1)
        self._tree = tree
        for v in range(1, cap + 1):
            c = self._count[v]
            if c:
                idx = v
                while idx <= cap:
                    tree[idx] += c
                    idx += idx & -idx
        migrated = []
        for v in self._over_vals:
            if v <= cap:
                c = self._over_counts.pop(v)
                self._count[v] = c
                idx = v
                while idx <= cap:
                    tree[idx] += c
                    idx += idx & -idx
                migrated.append(v)
        if migrated:
            self._over_vals = [v for v in self._over_vals if v > cap]

    def record(self, j: int) -> None:
        if j < 1:
            raise ValueError(f"cannot record symbol {j}; escape 0 is never counted")
        self.n_recorded += 1
        if j > self._cap and j <= _DENSE_LIMIT:
            self._grow(j)
        if j <= self._cap:
            if self._count[j] == 0:
                self.distinct += 1
            self._count[j] += 1
            self._tree_add(j)
        else:
            c = self._over_counts.get(j, 0)
            if c == 0:
                self.distinct += 1
                insort(self._over_vals, j)
            self._over_counts[j] = c + 1

    def prefix_count(self, k: int) -> int:
        """Number of recorded occurrences with value <= k."""
        if k <= 0:
            return 0
        s = self._tree_prefix(min(k, self._cap))
        if k > self._cap and self._over_vals:
            for v in self._over_vals[: bisect_right(self._over_vals, k)]:
                s += self._over_counts[v]
        return s

    def ensure_capacity(self, top: int) -> None:
        if top > self._cap:
            self._grow(top)

    def weights_view(self, top: int) -> "KTWeights":
        return KTWeights(self, top)


class KTWeights:
    """Snapshot-free weight model over alphabet {0..top} backed by a table.

    Implements the protocol the arithmetic coder consumes.  Valid only until
    the next ``record`` on the underlying table.
    """

    __slots__ = ("_table", "top", "total")

    def __init__(self, table: CountTable, top: int):
        if top < 0:
            raise ValueError("alphabet top must be >= 0")
        self._table = table
        self.top = top
        self.total = (top + 1) + 2 * table.prefix_count(top)

    @property
    def alphabet_size(self) -> int:
        return self.top + 1

    def weight(self, j: int) -> int:
        if not 0 <= j <= self.top:
            raise ValueError(f"symbol {j} outside alphabet 0..{self.top}")
        if j == 0:
            return 1
        return 2 * self._table.count(j) + 1

    def _cumlo(self, j: int) -> int:
        # sum of weights of symbols 0..j-1
        if j == 0:
            return 0
        return j + 2 * self._table.prefix_count(j - 1)

    def sym_range(self, j: int) -> tuple[int, int]:
        lo = self._cumlo(j)
        return lo, lo + self.weight(j)

    def find(self, target: int) -> int:
        if not 0 <= target < self.total:
            raise ValueError("target outside [0, total)")
        lo, hi = 0, self.top
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if self._cumlo(mid) <= target:
                lo = mid
            else:
                hi = mid - 1
        return lo


def predictive_weights(counts: CountTable, m: int) -> KTWeights:
    return counts.weights_view(m)


def record(counts: CountTable, j: int) -> CountTable:
    counts.record(j)
    return counts
