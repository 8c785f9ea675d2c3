"""Adaptive-window change detector over a stream of bounded reals.

The window is kept as exponentially compressed buckets (O(log n) memory).
Every update inserts the value and scans all bucket boundaries; when the
two sub-windows around some boundary have means further apart than the
confidence radius at ``delta``, the older sub-window is dropped and the
update reports a change.
"""

from __future__ import annotations

from streamguard import kernels


class Adwin:
    def __init__(self, delta: float = 0.002, check_every: int = 1):
        if not 0.0 < delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        self.delta = delta
        self.check_every = max(1, int(check_every))
        self._since_check = 0
        self._bsum, self._bvar, self._rowcnt, self._agg = kernels.new_adwin_arrays()

    @property
    def width(self) -> float:
        """Number of values currently inside the window."""
        return float(self._agg[0])

    @property
    def mean(self) -> float:
        return float(self._agg[1]) if self._agg[0] > 0 else 0.0

    @property
    def variance(self) -> float:
        n = self._agg[0]
        return float(self._agg[2] / n) if n > 0 else 0.0

    def update(self, value: float) -> bool:
        """Insert one value; True when a distribution change was detected."""
        self._since_check += 1
        do_scan = 1 if self._since_check >= self.check_every else 0
        if do_scan:
            self._since_check = 0
        hit = kernels.adwin_step(
            self._bsum, self._bvar, self._rowcnt, self._agg,
            float(value), self.delta, do_scan,
        )
        return bool(hit)
