"""Cached cumulative-probability tables, one per (scenario, time) slice."""

import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from src.wavefunctions import Scenario

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 4096


@dataclass(frozen=True)
class CPFTable:
    """Trapezoid CPF of rho(., t), renormalised so that it reaches exactly 1 at x_hi.

    Between grid nodes rho is taken as the linear interpolant, so the CPF is the exact
    integral of a piecewise-linear density and stays nondecreasing in x.
    """

    t: float
    xs: np.ndarray
    rho: np.ndarray
    cumulative: np.ndarray
    total: float

    @classmethod
    def build(cls, scenario: Scenario, t: float, points: int = DEFAULT_POINTS) -> "CPFTable":
        xs = np.linspace(scenario.domain[0], scenario.domain[1], points)
        rho = np.asarray(scenario.rho(xs, t), dtype=float)
        cumulative = cumulative_trapezoid(rho, xs, initial=0.0)
        total = float(cumulative[-1])
        if not total > 0:
            raise ValueError(f"{scenario.name}: density integrates to {total} at t={t}")
        return cls(t=t, xs=xs, rho=rho, cumulative=cumulative, total=total)

    def _partial(self, x: np.ndarray, cell: np.ndarray) -> np.ndarray:
        left = self.xs[cell]
        step = self.xs[cell + 1] - left
        s = x - left
        slope = (self.rho[cell + 1] - self.rho[cell]) / step
        return self.cumulative[cell] + self.rho[cell] * s + 0.5 * slope * s * s

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), self.xs[0], self.xs[-1])
        cell = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, self.xs.size - 2)
        value = np.minimum(self._partial(x, cell) / self.total, 1.0)
        return np.where(x >= self.xs[-1], 1.0, value)[()]

    def invert(self, p: float, tolerance: float) -> float:
        """Leftmost x with CPF(x) >= p, by bisection inside the bracketing grid cell."""
        target = p * self.total
        cell = int(np.searchsorted(self.cumulative, target, side="left")) - 1
        cell = min(max(cell, 0), self.xs.size - 2)
        lo, hi = float(self.xs[cell]), float(self.xs[cell + 1])
        index = np.array(cell)
        while hi - lo > tolerance:
            mid = 0.5 * (lo + hi)
            if self._partial(np.array(mid), index) >= target:
                hi = mid
            else:
                lo = mid
        return hi


class CPFStore:
    """Thread-safe LRU store of CPF tables keyed by (scenario, t, points)."""

    def __init__(self, max_tables: int = 4096):
        self._lock = threading.RLock()
        self._tables: OrderedDict[tuple[Scenario, float, int], CPFTable] = OrderedDict()
        self._max_tables = max_tables
        self._hits = 0
        self._misses = 0

    def table(self, scenario: Scenario, t: float, points: int = DEFAULT_POINTS) -> CPFTable:
        key = (scenario, float(t), points)
        with self._lock:
            cached = self._tables.get(key)
            if cached is not None:
                self._hits += 1
                self._tables.move_to_end(key)
                return cached
            self._misses += 1

        built = CPFTable.build(scenario, float(t), points)
        logger.debug("built CPF table for %s at t=%s", scenario.name, t)
        with self._lock:
            existing = self._tables.setdefault(key, built)
            while len(self._tables) > self._max_tables:
                self._tables.popitem(last=False)
            return existing

    def prewarm(self, scenario: Scenario, times: Iterable[float], points: int = DEFAULT_POINTS) -> None:
        for t in times:
            self.table(scenario, float(t), points)

    def clear(self) -> None:
        with self._lock:
            self._tables.clear()
            self._hits = 0
            self._misses = 0

    def get_stats(self) -> dict:
        with self._lock:
            return {
                "tables": len(self._tables),
                "hits": self._hits,
                "misses": self._misses,
                "max_tables": self._max_tables,
            }


_global_store: Optional[CPFStore] = None
_store_lock = threading.Lock()


def get_store() -> CPFStore:
    global _global_store
    if _global_store is None:
        with _store_lock:
            if _global_store is None:
                _global_store = CPFStore()
    return _global_store
