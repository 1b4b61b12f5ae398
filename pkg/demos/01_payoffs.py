"""Strategies and the two-stage payoff table.

Each agent carries three bits: the signal it sends (u, 1 = "I will cooperate"),
and what it does when the partner signals cooperation (p) or defection (q).
Run with ``python3 demos/01_payoffs.py``.
"""
# %% The eight strategies
import numpy as np

from cheaptalk import GameParams, payoff_table, strategy_from_index
from cheaptalk.game import action_table, donation_matrix
from cheaptalk.strategy import DISPLAY_ORDER, STRATEGY_NAMES, index_of

for name in DISPLAY_ORDER:
    idx = index_of(name)
    s = strategy_from_index(idx)
    print(f"{s.name}: u={s.u} p={s.p} q={s.q}  index={idx}")

# %% Donation game normalised so that b - c = 1
print(donation_matrix(0.02).as_array())

# %% Who cooperates with whom: row acts against column
acts = action_table()
print("      " + " ".join(STRATEGY_NAMES))
for i, name in enumerate(STRATEGY_NAMES):
    print(name, "  ", "   ".join(str(a) for a in acts[i]))

# %% Pair payoffs: everyone but the intuitive ACC and NDD pays gamma per game
params = GameParams(r=0.02, gamma=0.1)
table = payoff_table(params)
np.set_printoptions(precision=2, suppress=True)
print(table)

# Among cooperators the deliberating NCC does as well as ACC, minus gamma.
print("ACC vs ACC:", table[7, 7], " NCC vs ACC:", table[3, 7])
# Against a defector, ACD pays gamma but is not exploited; ACC is exploited for r.
print("ACD vs NDD:", table[6, 0], " ACC vs NDD:", table[7, 0])
