"""Agent-based simulation of the cheap-talk donation game with strategy exploration."""
__version__ = "0.1.0"

from .strategy import (  # noqa: E402
    STRATEGY_NAMES, Strategy, reasoning_cost_indicator, strategy_from_index, strategy_name,
)
from .game import GameParams, action_of, donation_matrix, pair_payoff, payoff_table  # noqa: E402
from .network import Network  # noqa: E402
from .engine import RunConfig, TopologySpec, run  # noqa: E402

__all__ = [
    "STRATEGY_NAMES", "Strategy", "reasoning_cost_indicator", "strategy_from_index",
    "strategy_name", "GameParams", "action_of", "donation_matrix", "pair_payoff",
    "payoff_table", "Network", "RunConfig", "TopologySpec", "run",
]
