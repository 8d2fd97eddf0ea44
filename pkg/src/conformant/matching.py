"""Matching machinery: maximum-weight matching, b-matching on multigraphs and
exact perfect bipartite matching (perfect matchings with exactly k red edges).
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import networkx as nx

Edge = tuple[int, int, int, bool]


@dataclass(frozen=True)
class WeightedMultigraph:
    """Undirected multigraph on vertices ``0..n-1``.

    ``edges`` holds ``(u, v, weight, red)`` tuples; parallel edges are allowed,
    self-loops are not.  ``b`` maps vertices to capacities; when it is given,
    vertices missing from it have capacity 0.
    """

    n: int
    edges: tuple[Edge, ...] = ()
    b: Mapping[int, int] | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        edges = tuple((int(u), int(v), int(w), bool(r)) for u, v, w, r in self.edges)
        for u, v, _, _ in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint out of range")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
        object.__setattr__(self, "edges", edges)
        if self.b is not None:
            caps = {}
            for v, cap in self.b.items():
                if not 0 <= v < self.n:
                    raise ValueError(f"capacity given for unknown vertex {v}")
                if cap < 0:
                    raise ValueError(f"negative capacity b({v}) = {cap}")
                caps[int(v)] = int(cap)
            object.__setattr__(self, "b", caps)

    def capacity(self, v: int) -> int:
        if self.b is None:
            raise ValueError("graph has no capacity function")
        # capacities beyond the edge count never bind
        return min(self.b.get(v, 0), len(self.edges))

    def weight(self, selected) -> int:
        return sum(self.edges[i][2] for i in selected)


def is_matching(g: WeightedMultigraph, selected) -> bool:
    seen = set()
    for i in selected:
        u, v, _, _ = g.edges[i]
        if u in seen or v in seen:
            return False
        seen.update((u, v))
    return True


def is_b_matching(g: WeightedMultigraph, selected) -> bool:
    load = [0] * g.n
    for i in selected:
        u, v, _, _ = g.edges[i]
        load[u] += 1
        load[v] += 1
    return all(load[v] <= g.capacity(v) for v in range(g.n))


def max_weight_matching(g: WeightedMultigraph) -> frozenset[int]:
    """Maximum-weight matching, returned as a set of edge indices.

    Parallel edges are collapsed onto the heaviest one before running the
    blossom algorithm.  Edges of nonpositive weight are never selected.
    """
    if g.b is not None:
        raise ValueError("max_weight_matching takes a graph without capacities")
    best: dict[tuple[int, int], int] = {}
    for i, (u, v, w, _) in enumerate(g.edges):
        if w <= 0:
            continue
        key = (min(u, v), max(u, v))
        if key not in best or w > g.edges[best[key]][2]:
            best[key] = i
    graph = nx.Graph()
    for (u, v), i in best.items():
        graph.add_edge(u, v, weight=g.edges[i][2])
    pairs = nx.max_weight_matching(graph, maxcardinality=False)
    return frozenset(best[(min(u, v), max(u, v))] for u, v in pairs)


def max_weight_b_matching(g: WeightedMultigraph, k: int) -> tuple[bool, frozenset[int]]:
    """Decide whether some capacity-respecting edge set has weight >= ``k``.

    Each vertex ``v`` is split into ``b(v)`` copies and each edge ``uv`` of
    weight ``w`` into a path ``copy(u) - e_u - e_v - copy(v)`` whose three
    edges all weigh ``w``.  A gadget contributes ``2w`` when both ends leave
    it (edge selected) and at most ``w`` otherwise, so an optimum matching of
    the split graph has weight ``sum(w) + OPT`` and its fully used gadgets form
    an optimal b-matching.  Returns the decision and that optimal edge set.
    """
    if g.b is None:
        raise ValueError("max_weight_b_matching needs a capacity function")
    useful = [i for i, e in enumerate(g.edges) if e[2] > 0]
    if not useful:
        return k <= 0, frozenset()

    degree = [0] * g.n
    for i in useful:
        u, v, _, _ = g.edges[i]
        degree[u] += 1
        degree[v] += 1
    copies: list[list[int]] = []
    next_id = 0
    for v in range(g.n):
        cnt = min(g.capacity(v), degree[v])
        copies.append(list(range(next_id, next_id + cnt)))
        next_id += cnt

    split = []
    ends = {}
    for i in useful:
        u, v, w, _ = g.edges[i]
        eu, ev = next_id, next_id + 1
        next_id += 2
        ends[i] = (eu, ev)
        split.append((eu, ev, w, False))
        split.extend((c, eu, w, False) for c in copies[u])
        split.extend((ev, c, w, False) for c in copies[v])

    chosen = max_weight_matching(WeightedMultigraph(next_id, tuple(split)))
    mate = {}
    for j in chosen:
        a, c, _, _ = split[j]
        mate[a] = c
        mate[c] = a
    selected = []
    for i, (eu, ev) in ends.items():
        if mate.get(eu, ev) != ev and eu in mate and ev in mate:
            selected.append(i)
    selected = frozenset(selected)
    return g.weight(selected) >= k, selected


def bipartition(g: WeightedMultigraph) -> list[int]:
    """2-colouring of ``g`` (0/1 per vertex); raises if ``g`` is not bipartite."""
    colour = [-1] * g.n
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for u, v, _, _ in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    for s in range(g.n):
        if colour[s] != -1:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if colour[v] == -1:
                    colour[v] = 1 - colour[u]
                    queue.append(v)
                elif colour[v] == colour[u]:
                    raise ValueError("graph is not bipartite")
    return colour


def exact_perfect_bipartite_matching(g: WeightedMultigraph, k: int) -> bool:
    """Does ``g`` have a perfect matching with exactly ``k`` red edges?"""
    colour = bipartition(g)
    if k < 0:
        return False
    left = [v for v in range(g.n) if colour[v] == 0]
    right = [v for v in range(g.n) if colour[v] == 1]
    if len(left) != len(right):
        return False
    if not left:
        return k == 0

    nbrs: dict[int, set] = {v: set() for v in range(g.n)}
    for u, v, _, red in g.edges:
        nbrs[u].add((v, red))
        nbrs[v].add((u, red))

    def twin_groups(side):
        groups: dict[frozenset, list[int]] = {}
        for v in side:
            groups.setdefault(frozenset(nbrs[v]), []).append(v)
        return list(groups.values())

    lgroups = twin_groups(left)
    rgroups = twin_groups(right)
    rindex = {v: j for j, grp in enumerate(rgroups) for v in grp}
    options = []
    for grp in lgroups:
        opts = {(rindex[v], int(red)) for v, red in nbrs[grp[0]]}
        options.append(sorted(opts))
    return exact_weight_assignment(
        [len(grp) for grp in lgroups], [len(grp) for grp in rgroups], options, k)


def exact_weight_assignment(left_sizes: Sequence[int], right_sizes: Sequence[int],
                            options: Sequence[Sequence[tuple[int, int]]],
                            target: int) -> bool:
    """Perfect matching with prescribed total weight on a twin-compressed
    bipartite graph.

    Left group ``i`` holds ``left_sizes[i]`` interchangeable vertices, each of
    which may be matched into right group ``r`` at weight ``w`` for every
    ``(r, w)`` in ``options[i]``; right group ``r`` holds ``right_sizes[r]``
    interchangeable vertices.  Weights must be nonnegative.  With 0/1 weights
    this is exact perfect bipartite matching; a weight ``w`` edge stands for a
    subdivided path carrying ``w`` red edges.

    Depth-first search over the left vertices with memoized failure states
    ``(position, remaining right counts, remaining weight)``; interchangeable
    left vertices pick options in nondecreasing order.
    """
    if sum(left_sizes) != sum(right_sizes) or target < 0:
        return False
    for opts in options:
        if any(w < 0 for _, w in opts):
            raise ValueError("weights must be nonnegative")
    order = sorted((i for i in range(len(left_sizes)) if left_sizes[i] > 0),
                   key=lambda i: (len(options[i]), i))
    seq = [i for i in order for _ in range(left_sizes[i])]
    total = len(seq)
    if total == 0:
        return target == 0
    nright = len(right_sizes)

    # suffix bounds on achievable weight and on how many later vertices reach each group
    max_suffix = [0] * (total + 1)
    min_suffix = [0] * (total + 1)
    reach = [[0] * nright for _ in range(total + 1)]
    for pos in range(total - 1, -1, -1):
        opts = options[seq[pos]]
        if not opts:
            return False
        max_suffix[pos] = max_suffix[pos + 1] + max(w for _, w in opts)
        min_suffix[pos] = min_suffix[pos + 1] + min(w for _, w in opts)
        row = reach[pos + 1][:]
        for r in {r for r, _ in opts}:
            row[r] += 1
        reach[pos] = row

    failed: set = set()
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * total + 1000))

    def dfs(pos, start, rem, need):
        if pos == total:
            return need == 0
        if not min_suffix[pos] <= need <= max_suffix[pos]:
            return False
        counts = reach[pos]
        for r in range(nright):
            if rem[r] > counts[r]:
                return False
        key = (pos, start, rem, need)
        if key in failed:
            return False
        group = seq[pos]
        same_next = pos + 1 < total and seq[pos + 1] == group
        opts = options[group]
        for j in range(start, len(opts)):
            r, w = opts[j]
            if rem[r] == 0 or w > need:
                continue
            nxt = rem[:r] + (rem[r] - 1,) + rem[r + 1:]
            if dfs(pos + 1, j if same_next else 0, nxt, need - w):
                return True
        failed.add(key)
        return False

    try:
        return dfs(0, 0, tuple(right_sizes), target)
    finally:
        sys.setrecursionlimit(limit)
