"""Payoffs of the two-stage cheap-talk donation game.

Payoffs use the normalisation ``b - c = 1``, so the donation-game matrix is
``R = 1, T = 1 + r, S = -r, P = 0`` for dilemma strength ``r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .strategy import N_STRATEGIES, Strategy, reasoning_cost_indicator, strategy_from_index


@dataclass(frozen=True)
class GameParams:
    r: float = 0.02
    gamma: float = 0.1
    beta: float = 10.0
    mu: float = 1e-3

    def __post_init__(self):
        for name in ("r", "gamma", "beta", "mu"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) or math.isnan(value):
                raise ValueError(f"{name} must be a real number, got {value!r}")
        if self.r < 0:
            raise ValueError(f"r must be >= 0, got {self.r}")
        if not 0 <= self.gamma <= 1:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not 0 <= self.mu <= 1:
            raise ValueError(f"mu must be in [0, 1], got {self.mu}")


@dataclass(frozen=True)
class PayoffMatrix:
    R: float
    S_pay: float
    T: float
    P: float

    def as_array(self) -> np.ndarray:
        """2x2 matrix, rows = focal action (C, D), columns = opponent action (C, D)."""
        return np.array([[self.R, self.S_pay], [self.T, self.P]], dtype=float)


def donation_matrix(r: float) -> PayoffMatrix:
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    return PayoffMatrix(R=1.0, S_pay=-r, T=1.0 + r, P=0.0)


def action_of(focal: Strategy, opponent: Strategy) -> int:
    """Action (1 = cooperate) the focal player takes given the opponent's signal."""
    return opponent.u * focal.p + (1 - opponent.u) * focal.q


def pair_payoff(si: Strategy, sj: Strategy, params: GameParams) -> float:
    """Payoff of ``si`` from one game against ``sj``, net of the reasoning cost."""
    x = action_of(si, sj)
    y = action_of(sj, si)
    g = donation_matrix(params.r).as_array()
    gross = np.array([x, 1 - x]) @ g @ np.array([y, 1 - y])
    return float(gross) - params.gamma * reasoning_cost_indicator(si)


def action_table() -> np.ndarray:
    """``table[i, j]`` is the action of strategy ``i`` facing strategy ``j``."""
    out = np.empty((N_STRATEGIES, N_STRATEGIES), dtype=np.int8)
    for i in range(N_STRATEGIES):
        for j in range(N_STRATEGIES):
            out[i, j] = action_of(strategy_from_index(i), strategy_from_index(j))
    return out


def payoff_table(params: GameParams) -> np.ndarray:
    """All 64 ordered pair payoffs, indexed by strategy index."""
    table = np.empty((N_STRATEGIES, N_STRATEGIES), dtype=np.float64)
    for i in range(N_STRATEGIES):
        si = strategy_from_index(i)
        for j in range(N_STRATEGIES):
            table[i, j] = pair_payoff(si, strategy_from_index(j), params)
    table.flags.writeable = False
    return table
