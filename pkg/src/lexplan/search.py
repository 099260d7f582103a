"""Lexicographic single-source shortest paths.

Two interchangeable searches share one contract:

* :func:`lex_search_naive` keeps a flat queue of unsettled nodes and narrows
  it level by level to find the next node, O(K|V|^2).
* :func:`lex_search_heap` keeps a binary heap ordered lexicographically with
  lazy deletion, O(K|V|log|V| + K|E|).

:func:`brute_force_lex` enumerates simple paths and exists to check both.

Any object exposing ``adjacency`` (a list, per node, of ``(target, cost)``
pairs where every cost is a K-tuple) can be searched.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .costs import CostVector, add_costs, lex_less, tied
from .errors import OracleGuardError

DEFAULT_TIE_EPSILON = 1e-9

Adjacency = list[list[tuple[int, CostVector]]]


@dataclass
class LexGraph:
    """Bare directed graph with vector-valued edge costs."""

    adjacency: Adjacency
    k: int

    @classmethod
    def from_edges(cls, n_nodes: int, edges: Sequence[tuple[int, int, Sequence[float]]]) -> "LexGraph":
        adj: Adjacency = [[] for _ in range(n_nodes)]
        k = None
        for u, v, c in edges:
            c = tuple(float(x) for x in c)
            if k is None:
                k = len(c)
            elif len(c) != k:
                raise ValueError("edges carry cost vectors of different length")
            adj[u].append((v, c))
        return cls(adj, k if k is not None else 1)

    @property
    def n_nodes(self) -> int:
        return len(self.adjacency)

    def edge_cost(self, u: int, v: int) -> CostVector:
        for w, c in self.adjacency[u]:
            if w == v:
                return c
        raise KeyError((u, v))


@dataclass
class SearchResult:
    cost: list[CostVector]
    parent: list[Optional[int]]
    settled: list[int] = field(default_factory=list)
    init: int = 0

    def reachable(self, node: int) -> bool:
        return not math.isinf(self.cost[node][0])


def _graph_k(g) -> int:
    k = getattr(g, "k", None)
    if k is not None:
        return k
    for row in g.adjacency:
        if row:
            return len(row[0][1])
    return 1


def _check_init(g, init: int) -> int:
    n = len(g.adjacency)
    if not (0 <= init < n):
        raise ValueError(f"init node {init} not in graph with {n} nodes")
    return n


def lex_search_naive(g, init: int, tie_epsilon: float = DEFAULT_TIE_EPSILON,
                     goal: Optional[int] = None) -> SearchResult:
    """Flat-queue lexicographic Dijkstra.

    Each iteration narrows the unsettled set to the nodes tied at the minimum
    of level 0, then of level 1 among those, and so on until one node is left
    (lowest node id if every level ties). Passing ``goal`` stops the search as
    soon as that node settles.
    """
    n = _check_init(g, init)
    k = _graph_k(g)
    adj = g.adjacency
    inf = math.inf
    table = np.full((n, k), inf)
    table[init] = 0.0
    cost: list[CostVector] = [(inf,) * k] * n
    cost[init] = (0.0,) * k
    parent: list[Optional[int]] = [None] * n
    unsettled = np.ones(n, dtype=bool)
    settled: list[int] = []
    eps = tie_epsilon

    while True:
        cand = np.flatnonzero(unsettled)
        if cand.size == 0:
            break
        for level in range(k):
            col = table[cand, level]
            m = col.min()
            if m == inf:
                # only unreachable nodes remain
                cand = None
                break
            if eps > 0.0:
                diff = np.abs(col - m)
                # an unreached (inf) entry is never tied with a finite minimum
                keep = np.isfinite(col) & ((diff <= eps) | (diff <= eps * np.maximum(np.abs(col), abs(m))))
            else:
                keep = col == m
            cand = cand[keep]
            if cand.size == 1:
                break
        if cand is None:
            break
        i = int(cand[0])
        unsettled[i] = False
        settled.append(i)
        if i == goal:
            break
        ci = cost[i]
        for j, w in adj[i]:
            if not unsettled[j]:
                continue
            via = tuple(a + b for a, b in zip(ci, w))
            if lex_less(via, cost[j], eps):
                cost[j] = via
                table[j] = via
                parent[j] = i
    return SearchResult(cost, parent, settled, init)


class _HeapKey:
    __slots__ = ("cost", "node", "eps")

    def __init__(self, cost: CostVector, node: int, eps: float):
        self.cost = cost
        self.node = node
        self.eps = eps

    def __lt__(self, other: "_HeapKey") -> bool:
        eps = self.eps
        for x, y in zip(self.cost, other.cost):
            if x == y:
                continue
            diff = abs(x - y)
            if diff != math.inf and (diff <= eps or diff <= eps * max(abs(x), abs(y))):
                continue
            return x < y
        return self.node < other.node


def lex_search_heap(g, init: int, tie_epsilon: float = DEFAULT_TIE_EPSILON,
                    goal: Optional[int] = None) -> SearchResult:
    """Binary-heap lexicographic Dijkstra with lazy deletion of stale entries."""
    n = _check_init(g, init)
    k = _graph_k(g)
    adj = g.adjacency
    inf = math.inf
    cost: list[CostVector] = [(inf,) * k] * n
    cost[init] = (0.0,) * k
    parent: list[Optional[int]] = [None] * n
    done = [False] * n
    settled: list[int] = []
    eps = tie_epsilon
    push, pop = heapq.heappush, heapq.heappop

    if eps == 0.0:
        # native tuple order coincides with exact lexicographic order
        heap: list = [(cost[init], init)]
        while heap:
            ci, i = pop(heap)
            if done[i] or ci is not cost[i]:
                continue
            done[i] = True
            settled.append(i)
            if i == goal:
                break
            for j, w in adj[i]:
                if done[j]:
                    continue
                via = tuple(a + b for a, b in zip(ci, w))
                if via < cost[j]:
                    cost[j] = via
                    parent[j] = i
                    push(heap, (via, j))
    else:
        heap = [_HeapKey(cost[init], init, eps)]
        while heap:
            entry = pop(heap)
            i, ci = entry.node, entry.cost
            if done[i] or ci is not cost[i]:
                continue
            done[i] = True
            settled.append(i)
            if i == goal:
                break
            for j, w in adj[i]:
                if done[j]:
                    continue
                via = tuple(a + b for a, b in zip(ci, w))
                if lex_less(via, cost[j], eps):
                    cost[j] = via
                    parent[j] = i
                    push(heap, _HeapKey(via, j, eps))
    return SearchResult(cost, parent, settled, init)


def extract_path(r: SearchResult, goal: int) -> Optional[list[int]]:
    """Follow parent pointers from ``goal`` back to the search origin."""
    if not r.reachable(goal):
        return None
    path = [goal]
    seen = {goal}
    node = goal
    while node != r.init:
        node = r.parent[node]
        if node is None or node in seen:
            raise RuntimeError("corrupt parent tree")
        seen.add(node)
        path.append(node)
    path.reverse()
    return path


def path_cost(g, path: Sequence[int]) -> CostVector:
    """Sum edge costs along ``path`` in travel order."""
    k = _graph_k(g)
    total: CostVector = (0.0,) * k
    for u, v in zip(path, path[1:]):
        for w, c in g.adjacency[u]:
            if w == v:
                total = add_costs(total, c)
                break
        else:
            raise KeyError(f"no edge {u}->{v}")
    return total


BRUTE_FORCE_MAX_NODES = 15
BRUTE_FORCE_MAX_PATHS = 10**6


def brute_force_lex(g, init: int, goal: int) -> Optional[tuple[CostVector, list[int]]]:
    """Exhaustive lexicographic minimum over all simple init->goal paths.

    Graphs above 15 nodes are accepted only while the enumeration stays under
    one million paths.
    """
    n = _check_init(g, init)
    k = _graph_k(g)
    adj = g.adjacency
    guarded = n > BRUTE_FORCE_MAX_NODES
    best: Optional[CostVector] = None
    best_path: Optional[list[int]] = None
    visited = [False] * n
    stack_path = [init]
    count = 0

    def dfs(u: int, acc: CostVector) -> None:
        nonlocal best, best_path, count
        if u == goal:
            count += 1
            if guarded and count > BRUTE_FORCE_MAX_PATHS:
                raise OracleGuardError("more than 1e6 simple paths; refusing to enumerate")
            if best is None or acc < best:
                best, best_path = acc, list(stack_path)
            return
        visited[u] = True
        for v, w in adj[u]:
            if visited[v]:
                continue
            stack_path.append(v)
            dfs(v, add_costs(acc, w))
            stack_path.pop()
        visited[u] = False

    dfs(init, (0.0,) * k)
    if best is None:
        return None
    return best, best_path


def costs_equal(a: Sequence[float], b: Sequence[float], eps: float = 0.0) -> bool:
    return len(a) == len(b) and all(tied(x, y, eps) for x, y in zip(a, b))
