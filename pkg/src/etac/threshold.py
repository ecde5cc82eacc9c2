"""Expanding empirical threshold via a min-heap.

After observing x_{1:i}, ``m`` is the smallest k (capped at i) such that the
k-th largest symbol so far is <= k, and ``tau`` is that order statistic.
Every observed symbol is inserted; then, while the queue holds at least two
elements and its second-smallest one is strictly smaller than the queue
size, the minimum is popped.  This keeps the queue equal to the ``m``
largest symbols scanned so far, so (m, tau) match the order-statistic
definition at every prefix (``brute_force_m`` is the oracle for that).
"""

from __future__ import annotations

import heapq

__all__ = ["ThresholdState", "brute_force_m"]


class ThresholdState:
    """Incremental (m, tau) tracker; one instance per stream."""

    __slots__ = ("_heap", "n_seen")

    def __init__(self):
        self._heap = []
        self.n_seen = 0

    @property
    def m(self) -> int:
        return len(self._heap)

    @property
    def tau(self) -> int:
        return self._heap[0] if self._heap else 0

    def observe(self, x: int) -> "ThresholdState":
        if x < 1:
            raise ValueError(f"symbols must be positive integers, got {x}")
        self.n_seen += 1
        heap = self._heap
        heapq.heappush(heap, x)
        while len(heap) >= 2:
            second = heap[1] if len(heap) == 2 else min(heap[1], heap[2])
            if second < len(heap):
                heapq.heappop(heap)
            else:
                break
        return self


def brute_force_m(prefix) -> tuple[int, int]:
    """Order-statistic oracle: returns (m, tau) for a nonempty prefix."""
    if len(prefix) == 0:
        raise ValueError("prefix must be nonempty")
    desc = sorted(prefix, reverse=True)
    i = len(desc)
    m = i
    for k in range(1, i + 1):
        if desc[k - 1] <= k:
            m = k
            break
    return m, desc[m - 1]
