"""Compiled inner loops.

Both update kernels consume random numbers in the same order, so a complete
graph gives the same trajectory through either path (up to float summation
order in the payoffs):

    focal ~ U{0..n-1}; r1 ~ U[0,1)
    r1 < mu  -> new strategy ~ U{0..7}
    else     -> slot ~ U{0..deg-1}; if strategies differ: r2 ~ U[0,1)
"""
import numpy as np
from numba import njit

FERMI_CLAMP = 500.0


@njit(cache=True)
def fermi(phi_i, phi_j, beta):
    x = beta * (phi_i - phi_j)
    if x > FERMI_CLAMP:
        x = FERMI_CLAMP
    elif x < -FERMI_CLAMP:
        x = -FERMI_CLAMP
    return 1.0 / (1.0 + np.exp(x))


@njit(cache=True)
def node_payoff(i, s, indptr, indices, table):
    si = s[i]
    total = 0.0
    for e in range(indptr[i], indptr[i + 1]):
        total += table[si, s[indices[e]]]
    return total


@njit(cache=True)
def advance(s, indptr, indices, table, mu, beta, n_updates, gen):
    n = s.shape[0]
    for _ in range(n_updates):
        i = gen.integers(0, n)
        if gen.random() < mu:
            s[i] = gen.integers(0, 8)
            continue
        start = indptr[i]
        deg = indptr[i + 1] - start
        if deg == 0:
            continue
        j = indices[start + gen.integers(0, deg)]
        if s[j] == s[i]:
            continue
        phi_i = node_payoff(i, s, indptr, indices, table)
        phi_j = node_payoff(j, s, indptr, indices, table)
        if gen.random() < fermi(phi_i, phi_j, beta):
            s[i] = s[j]


@njit(cache=True)
def complete_payoff(si, counts, table):
    total = 0.0
    for b in range(8):
        total += counts[b] * table[si, b]
    return total - table[si, si]


@njit(cache=True)
def advance_complete(s, counts, table, mu, beta, n_updates, gen):
    """``advance`` specialised to the complete graph, with payoffs from strategy counts."""
    n = s.shape[0]
    for _ in range(n_updates):
        i = gen.integers(0, n)
        if gen.random() < mu:
            new = gen.integers(0, 8)
            counts[s[i]] -= 1
            counts[new] += 1
            s[i] = new
            continue
        j = gen.integers(0, n - 1)
        if j >= i:
            j += 1
        if s[j] == s[i]:
            continue
        phi_i = complete_payoff(s[i], counts, table)
        phi_j = complete_payoff(s[j], counts, table)
        if gen.random() < fermi(phi_i, phi_j, beta):
            counts[s[i]] -= 1
            counts[s[j]] += 1
            s[i] = s[j]


@njit(cache=True)
def count_strategies(s):
    counts = np.zeros(8, dtype=np.int64)
    for i in range(s.shape[0]):
        counts[s[i]] += 1
    return counts


@njit(cache=True)
def cooperative_acts(s, indptr, indices, action):
    """Number of cooperative acts over all ordered adjacent pairs."""
    total = 0
    for i in range(s.shape[0]):
        si = s[i]
        for e in range(indptr[i], indptr[i + 1]):
            total += action[si, s[indices[e]]]
    return total


@njit(cache=True)
def cooperative_acts_complete(counts, action):
    total = 0
    for a in range(8):
        for b in range(8):
            pairs = counts[a] * (counts[b] - (1 if a == b else 0))
            total += pairs * action[a, b]
    return total
