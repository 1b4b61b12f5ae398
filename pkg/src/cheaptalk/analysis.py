"""Post-processing of time series and lattice snapshots."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .strategy import ACC, ACD, NDC, NDD


@dataclass(frozen=True)
class BoomPeaks:
    t_decline: int
    t_end: int
    t_acd: int
    t_acc: int
    t_ndc: int

    @property
    def ordered(self) -> bool:
        """True for the succession NDD decline -> ACD peak -> ACC peak -> NDC peak."""
        return self.t_decline <= self.t_acd < self.t_acc < self.t_ndc


def first_boom(t, freq, decline: float = 0.9, low: float = 0.5,
               recover: float = 0.8) -> Optional[BoomPeaks]:
    """Peak times of ACD, ACC and NDC during the first cooperation boom.

    The boom starts at the first record where the NDD frequency falls below
    ``decline``, must reach NDD below ``low``, and ends at the first later
    record where NDD is back at ``recover`` or above (or at the end of the
    series).  Returns None if NDD never falls below ``low``.
    """
    t = np.asarray(t)
    ndd = np.asarray(freq)[:, NDD]
    below = np.flatnonzero(ndd < decline)
    if below.size == 0:
        return None
    start = below[0]
    deep = np.flatnonzero(ndd[start:] < low)
    if deep.size == 0:
        return None
    k_low = start + deep[0]
    back = np.flatnonzero(ndd[k_low:] >= recover)
    end = k_low + back[0] if back.size else len(t) - 1
    window = np.asarray(freq)[start:end + 1]
    peak = lambda s: int(t[start + int(np.argmax(window[:, s]))])  # noqa: E731
    return BoomPeaks(int(t[start]), int(t[end]), peak(ACD), peak(ACC), peak(NDC))


def _von_neumann(grid: np.ndarray, value: int) -> np.ndarray:
    """Cells with at least one periodic 4-neighbour equal to ``value``."""
    hit = grid == value
    return (np.roll(hit, 1, 0) | np.roll(hit, -1, 0) | np.roll(hit, 1, 1) | np.roll(hit, -1, 1))


def boundary_enrichment(grid, strategy: int = ACD, against: int = NDD) -> float:
    """Over-representation of ``strategy`` on the border facing ``against``.

    Among cells that are not ``against``, compares the share of ``strategy``
    in cells touching an ``against`` cell with its share overall.  Values
    above 1 mean the strategy sits preferentially on that border; NaN when
    either set is empty.
    """
    grid = np.asarray(grid)
    others = grid != against
    border = others & _von_neumann(grid, against)
    n_border, n_others = border.sum(), others.sum()
    if n_border == 0 or n_others == 0:
        return float("nan")
    overall = (grid[others] == strategy).mean()
    if overall == 0:
        return float("nan")
    return float((grid[border] == strategy).mean() / overall)
