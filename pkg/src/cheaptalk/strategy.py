"""The eight signal/response strategies.

A strategy is the bit triplet ``(u, p, q)``: ``u`` is whether the player sends
the cooperative signal (A) or stays silent (N), ``p`` is the action taken when
the co-player signals and ``q`` the action taken when the co-player is silent
(1 = C, 0 = D).  Strategies are stored as the integer ``4u + 2p + q`` so that
population states are plain ``int8`` arrays.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

N_STRATEGIES = 8


class Strategy(NamedTuple):
    u: int
    p: int
    q: int

    @property
    def index(self) -> int:
        return 4 * self.u + 2 * self.p + self.q

    @property
    def name(self) -> str:
        return strategy_name(self)


def strategy_from_index(idx: int) -> Strategy:
    """Decode an index in ``0..7`` into its ``(u, p, q)`` triplet."""
    if isinstance(idx, bool) or not isinstance(idx, (int, np.integer)):
        raise TypeError(f"strategy index must be an integer, got {idx!r}")
    if not 0 <= idx < N_STRATEGIES:
        raise ValueError(f"strategy index must be in 0..7, got {idx}")
    idx = int(idx)
    return Strategy((idx >> 2) & 1, (idx >> 1) & 1, idx & 1)


def strategy_index(s: Strategy) -> int:
    return 4 * s.u + 2 * s.p + s.q


def strategy_name(s: Strategy) -> str:
    return ("A" if s.u else "N") + ("C" if s.p else "D") + ("C" if s.q else "D")


def reasoning_cost_indicator(s: Strategy) -> int:
    """0 for the intuitive strategies (u == p == q), 1 for every other one."""
    return 0 if s.u == s.p == s.q else 1


#: labels ordered by index, NDD first
STRATEGY_NAMES: tuple[str, ...] = tuple(
    strategy_name(strategy_from_index(i)) for i in range(N_STRATEGIES)
)
#: labels in the conventional table order (ACC, ACD, ..., NDD), used for CSV columns
DISPLAY_ORDER: tuple[str, ...] = tuple(reversed(STRATEGY_NAMES))

_BY_NAME = {name: i for i, name in enumerate(STRATEGY_NAMES)}

ACC = _BY_NAME["ACC"]
ACD = _BY_NAME["ACD"]
ADC = _BY_NAME["ADC"]
ADD = _BY_NAME["ADD"]
NCC = _BY_NAME["NCC"]
NCD = _BY_NAME["NCD"]
NDC = _BY_NAME["NDC"]
NDD = _BY_NAME["NDD"]


def index_of(name: str) -> int:
    try:
        return _BY_NAME[name.upper()]
    except KeyError:
        raise ValueError(f"unknown strategy label {name!r}") from None


def cost_vector() -> np.ndarray:
    """Reasoning-cost indicator for every index, as an int8 array of length 8."""
    return np.array(
        [reasoning_cost_indicator(strategy_from_index(i)) for i in range(N_STRATEGIES)],
        dtype=np.int8,
    )
