"""Static, undirected population structures.

Every generator returns a :class:`Network` whose adjacency is stored in CSR
form (``indptr``/``indices``) with each node's neighbours sorted.  Generators
that need randomness take a ``numpy.random.Generator``; the same generator
state always yields the same edge list.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

log = logging.getLogger(__name__)

TOPOLOGIES = ("lattice", "small_world", "random_regular", "well_mixed", "scale_free")


@dataclass(frozen=True, eq=False)
class Network:
    n: int
    indptr: np.ndarray
    indices: np.ndarray
    topology: str
    side: Optional[int] = None
    info: dict = field(default_factory=dict)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def n_edges(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edges(self) -> np.ndarray:
        """Undirected edges as an ``(E, 2)`` array with ``u < v``, lexicographically sorted."""
        src = np.repeat(np.arange(self.n), self.degrees)
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def write_edgelist(self, path) -> None:
        """Write one ``u v`` pair per line (0-based ids, ``u < v``)."""
        np.savetxt(path, self.edges(), fmt="%d")


def from_edges(n: int, edges: Iterable, topology: str, side: Optional[int] = None,
               info: Optional[dict] = None) -> Network:
    """Build a validated CSR network from an undirected edge collection.

    Raises ``ValueError`` on self-loops, duplicate edges or out-of-range ids.
    """
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    e = e.reshape(-1, 2)
    if e.size and (e.min() < 0 or e.max() >= n):
        raise ValueError("edge endpoint out of range")
    if np.any(e[:, 0] == e[:, 1]):
        raise ValueError("self-loop in edge list")
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    if np.unique(lo * n + hi).size != len(e):
        raise ValueError("duplicate edge in edge list")
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    indices = dst.astype(np.int32)
    indptr.flags.writeable = False
    indices.flags.writeable = False
    return Network(n=n, indptr=indptr, indices=indices, topology=topology, side=side,
                   info=dict(info or {}))


def build_lattice(L: int) -> Network:
    """L x L torus with von Neumann (4-neighbour) neighbourhoods."""
    if L < 3:
        raise ValueError(f"lattice side must be >= 3, got {L}")
    idx = np.arange(L * L).reshape(L, L)
    right = np.column_stack([idx.ravel(), np.roll(idx, -1, axis=1).ravel()])
    down = np.column_stack([idx.ravel(), np.roll(idx, -1, axis=0).ravel()])
    return from_edges(L * L, np.vstack([right, down]), "lattice", side=L)


def _ring_edges(n: int, k: int) -> list[tuple[int, int]]:
    return [(u, (u + j) % n) for j in range(1, k // 2 + 1) for u in range(n)]


def build_small_world(n: int, k: int = 4, p_rewire: float = 0.1,
                      rng: Optional[np.random.Generator] = None) -> Network:
    """Watts-Strogatz network with a fixed edge count.

    Each ring edge ``(u, v)`` is rewired with probability ``p_rewire`` to
    ``(u, w)`` where ``w`` is drawn uniformly from nodes that are neither ``u``
    nor already adjacent to ``u``.  If no such node exists the edge is kept
    and ``info["rewire_failures"]`` is incremented.
    """
    if k < 2 or k % 2:
        raise ValueError(f"k must be an even integer >= 2, got {k}")
    if n <= k:
        raise ValueError(f"need n > k, got n={n}, k={k}")
    if not 0 <= p_rewire <= 1:
        raise ValueError(f"p_rewire must be in [0, 1], got {p_rewire}")
    rng = np.random.default_rng() if rng is None else rng
    adj = [set() for _ in range(n)]
    ring = _ring_edges(n, k)
    for u, v in ring:
        adj[u].add(v)
        adj[v].add(u)
    failures = 0
    for u, v in ring:
        if rng.random() >= p_rewire:
            continue
        if len(adj[u]) >= n - 1:
            failures += 1
            continue
        # candidates exclude u and its current neighbours (v included)
        while True:
            w = int(rng.integers(n))
            if w != u and w not in adj[u]:
                break
        adj[u].discard(v)
        adj[v].discard(u)
        adj[u].add(w)
        adj[w].add(u)
    if failures:
        log.warning("small_world: %d rewiring attempts had no valid target", failures)
    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    return from_edges(n, edges, "small_world",
                      info={"k": k, "p_rewire": p_rewire, "rewire_failures": failures})


def build_random_regular(n: int, k: int = 4, rng: Optional[np.random.Generator] = None,
                         max_tries: int = 10_000) -> Network:
    """Random k-regular graph from the pairing (configuration) model.

    Stubs are shuffled and paired; any attempt producing a self-loop or a
    multi-edge is discarded as a whole, so accepted graphs are uniform over
    simple k-regular graphs.
    """
    if (n * k) % 2:
        raise ValueError("n * k must be even")
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < n, got n={n}, k={k}")
    rng = np.random.default_rng() if rng is None else rng
    stubs = np.repeat(np.arange(n, dtype=np.int64), k)
    for attempt in range(1, max_tries + 1):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        lo = pairs.min(axis=1)
        hi = pairs.max(axis=1)
        if np.unique(lo * n + hi).size != len(pairs):
            continue
        return from_edges(n, np.column_stack([lo, hi]), "random_regular",
                          info={"k": k, "attempts": attempt})
    raise RuntimeError(f"random_regular: no simple graph after {max_tries} attempts (n={n}, k={k})")


def build_well_mixed(n: int) -> Network:
    """Complete graph on ``n`` nodes."""
    if n < 2:
        raise ValueError(f"well-mixed population needs n >= 2, got {n}")
    u, v = np.triu_indices(n, k=1)
    return from_edges(n, np.column_stack([u, v]), "well_mixed")


def build_scale_free(n: int, m: int = 2, rng: Optional[np.random.Generator] = None) -> Network:
    """Barabasi-Albert preferential attachment grown from a complete graph on m+1 nodes."""
    if not n > m >= 1:
        raise ValueError(f"need n > m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng() if rng is None else rng
    edges = [(u, v) for u in range(m + 1) for v in range(u + 1, m + 1)]
    # every edge endpoint once: uniform draws from this list are degree-proportional
    ends = [x for e in edges for x in e]
    for new in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(ends[int(rng.integers(len(ends)))])
        for t in sorted(targets):
            edges.append((t, new))
            ends.extend((t, new))
    return from_edges(n, edges, "scale_free", info={"m": m})


def build(topology: str, *, n: Optional[int] = None, L: Optional[int] = None, k: int = 4,
          p_rewire: float = 0.1, m: int = 2,
          rng: Optional[np.random.Generator] = None) -> Network:
    """Dispatch on the topology tag; ``L`` is used by the lattice, ``n`` by the rest."""
    if topology == "lattice":
        if L is None:
            if n is None:
                raise ValueError("lattice needs a side length L")
            L = int(round(n ** 0.5))
            if L * L != n:
                raise ValueError(f"lattice needs a square node count, got n={n}")
        return build_lattice(L)
    if n is None:
        if L is None:
            raise ValueError(f"{topology} needs a node count n")
        n = L * L
    if topology == "small_world":
        return build_small_world(n, k, p_rewire, rng)
    if topology == "random_regular":
        return build_random_regular(n, k, rng)
    if topology == "well_mixed":
        return build_well_mixed(n)
    if topology == "scale_free":
        return build_scale_free(n, m, rng)
    raise ValueError(f"unknown topology {topology!r}; expected one of {TOPOLOGIES}")


def load_edgelist(path, n: Optional[int] = None, topology: str = "custom") -> Network:
    e = np.loadtxt(Path(path), dtype=np.int64, ndmin=2)
    if n is None:
        n = int(e.max()) + 1 if e.size else 0
    return from_edges(n, e, topology)
