"""First-last manipulation and bribery as exact perfect matching queries.

Under first-last a vote only matters through its (first, last) pair: it gives
``+1`` to the first candidate and ``-1`` to the last, so a vote is an arc
``first -> last`` and a candidate's score change is its out-degree minus its
in-degree among the cast arcs.  For a fixed final score ``T`` of ``p`` the
question becomes a degree-constrained arc selection, encoded as a bipartite
graph:

* every candidate ``c`` gets equally many out-slots (left) and in-slots
  (right), enough for every arc it can be an endpoint of;
* an added arc ``f -> l`` is a red edge from an out-slot of ``f`` to an
  in-slot of ``l``; unused slots of one candidate pair up with each other;
* absorber vertices fix the net change of ``p`` to ``T - score(p)`` and cap
  every other net change at ``T - score(c)``; a shared pool of slack
  vertices takes up whatever the other candidates leave below their caps.

Removing a vote ``f -> l`` (bribery) is the reversed arc; each removable voter
is a pair of vertices joined by a "kept" edge of weight ``B`` that otherwise
reaches an in-slot of ``f`` and an out-slot of ``l``.  Asking for total red
weight ``K + B (n - K)`` with ``B`` larger than any possible number of added
arcs forces exactly ``K`` additions and ``K`` removals.  A weight-``B`` edge is
the usual shorthand for a subdivided path carrying ``B`` red edges.

The overall answer is the disjunction of the queries over all ``T``.
"""

from __future__ import annotations

from collections import Counter
from typing import Sequence

from .matching import exact_weight_assignment

Arc = tuple[int, int]


class _Builder:
    def __init__(self):
        self.left: list[int] = []
        self.right: list[int] = []
        self.options: list[list[tuple[int, int]]] = []

    def add_left(self, size):
        self.left.append(size)
        self.options.append([])
        return len(self.left) - 1

    def add_right(self, size):
        self.right.append(size)
        return len(self.right) - 1

    def link(self, lg, rg, weight=0):
        self.options[lg].append((rg, weight))


def _query(m: int, p: int, score: Sequence[int], pool: Sequence[Arc], slots: int,
           target_p: int, removable: Counter, additions: int) -> bool:
    need = {}
    for c in range(m):
        if c == p:
            need[c] = target_p - score[p]
        else:
            need[c] = min(target_p - score[c], slots)
        if need[c] < -slots or (c == p and need[c] > slots):
            return False
    slack = sum(need.values())
    if slack < 0:
        return False

    # absorbers share a candidate's in-slots with incoming arcs, so positive
    # allowances get extra slots on both sides
    size = [slots + max(need[c], 0) for c in range(m)]
    g = _Builder()
    outs = [g.add_left(size[c]) for c in range(m)]
    ins = [g.add_right(size[c]) for c in range(m)]
    pool_slack = g.add_right(slack)
    for c in range(m):
        g.link(outs[c], ins[c])
        if need[c] > 0:
            g.link(g.add_left(need[c]), ins[c])
        elif need[c] < 0:
            g.link(outs[c], g.add_right(-need[c]))
        if c != p:
            g.link(outs[c], pool_slack)
    for f, l in pool:
        g.link(outs[f], ins[l], 1)

    target = additions
    if removable:
        n = sum(removable.values())
        heavy = sum(size) + 1
        for (f, l), cnt in sorted(removable.items()):
            x = g.add_left(cnt)
            y = g.add_right(cnt)
            g.link(x, y, heavy)
            g.link(x, ins[f])
            g.link(outs[l], y)
        target = additions + heavy * (n - additions)
    for opts in g.options:
        opts.sort()
    return exact_weight_assignment(g.left, g.right, g.options, target)


def firstlast_feasible(m: int, p: int, base: Sequence[Arc], pool: Sequence[Arc],
                       additions: int, swap: bool = False) -> bool:
    """Can ``p`` win after adding exactly ``additions`` arcs from ``pool`` to
    the ``base`` profile (and, with ``swap``, removing exactly as many arcs of
    ``base``)?  Requires ``m >= 2`` and arcs with distinct endpoints."""
    score = [0] * m
    for f, l in base:
        score[f] += 1
        score[l] -= 1
    removable = Counter(base) if swap else Counter()
    slots = 2 * additions if swap else additions
    pool = sorted(set(pool))
    for t in range(score[p] - slots, score[p] + slots + 1):
        if _query(m, p, score, pool, slots, t, removable, additions):
            return True
    return False
