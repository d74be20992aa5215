"""Minimum-cost assignment with deterministic lexicographic tie-breaking."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..errors import EmptyMatrix

#: Totals within this tolerance of the optimum count as ties.
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class Assignment:
    """min(n, m) matched (row, col) pairs and their total cost."""

    pairs: tuple
    total: float

    def __init__(self, pairs, total):
        object.__setattr__(self, "pairs", tuple((int(i), int(j))
                                                for i, j in pairs))
        object.__setattr__(self, "total", float(total))

    def as_dict(self) -> dict:
        return dict(self.pairs)


def _optimal_total(cost: np.ndarray, rows, cols) -> float:
    if not len(rows) or not len(cols):
        return 0.0
    sub = cost[np.ix_(rows, cols)]
    r, c = linear_sum_assignment(sub)
    return float(sub[r, c].sum())


def hungarian(cost) -> Assignment:
    """Optimal injective assignment of min(n, m) pairs.

    Among equally cheap assignments, returns the one whose sorted pair list
    is lexicographically smallest, so results are reproducible across
    platforms and solver versions.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.size == 0:
        raise EmptyMatrix(f"cost matrix must be 2-D and nonempty, got shape "
                          f"{cost.shape}")
    if not np.isfinite(cost).all() or (cost < 0).any():
        raise ValueError("costs must be finite and nonnegative")
    n, m = cost.shape
    best = _optimal_total(cost, range(n), range(m))
    tol = _TIE_TOL * max(1.0, abs(best))

    pairs = []
    avail = list(range(m))
    fixed = 0.0
    remaining = min(n, m)
    for i in range(n):
        if remaining == 0:
            break
        rest_rows = list(range(i + 1, n))
        chosen = None
        for j in avail:
            rest_cols = [c for c in avail if c != j]
            if min(len(rest_rows), len(rest_cols)) < remaining - 1:
                continue
            total = fixed + cost[i, j] + _optimal_total(cost, rest_rows,
                                                        rest_cols)
            if total <= best + tol:
                chosen = j
                break
        if chosen is None:
            continue  # every optimal assignment skips this row
        pairs.append((i, chosen))
        avail.remove(chosen)
        fixed += cost[i, chosen]
        remaining -= 1
    return Assignment(pairs, best)
