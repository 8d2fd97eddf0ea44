"""Exhaustive search over vote-class counts.

Every exact solver in the package phrases its question the same way: starting
from a base profile, add some votes from an add pool and remove some from a
delete pool (each class capped), subject to count constraints, so that ``p``
wins.  Voters with identical rankings are interchangeable, so the search runs
over per-class multiplicities, never over voter subsets.

For scoring rules the question is linear in the per-class counts: with
``r(c) = score(c) - score(p)``, every class shifts ``r`` by a fixed vector, and
``p`` wins iff all final ``r(c) <= 0``.  Three methods are available:

* ``milp`` (default): a feasibility integer program solved by HiGHS; yes
  answers are re-checked exactly;
* ``bnb``: a branch and bound over class counts that merges classes with
  identical effect, memoizes failed states and prunes with sound bounds;
* ``enumerate``: every leaf, evaluated with the voting rule itself.

The hybrid rule always uses ``enumerate``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .core import HybridRule, Vote, VotingRule, _winners_from_counts, scoring_vector


@dataclass(frozen=True)
class Counts:
    """Constraints on the number of added (``a``) and deleted (``d``) votes."""

    a_lo: int = 0
    a_hi: int = 0
    d_lo: int = 0
    d_hi: int = 0
    equal: bool = False

    def ok(self, a: int, d: int) -> bool:
        return (self.a_lo <= a <= self.a_hi and self.d_lo <= d <= self.d_hi
                and (not self.equal or a == d))


def exact(n: int) -> Counts:
    return Counts(a_lo=n, a_hi=n)


def at_most_adds(n: int) -> Counts:
    return Counts(a_hi=n)


def at_most_deletes(n: int) -> Counts:
    return Counts(d_hi=n)


def swaps(n: int) -> Counts:
    return Counts(a_hi=n, d_hi=n, equal=True)


def find_modification(m: int, rule: VotingRule, p: int, base: Mapping[Vote, int],
                      add_pool: Mapping[Vote, int], del_pool: Mapping[Vote, int],
                      counts: Counts, method: str = "auto") -> tuple[Counter, Counter] | None:
    """Return ``(added, deleted)`` vote counters making ``p`` a winner, or None.

    ``method="enumerate"`` disables merging, memoization and pruning and simply
    evaluates the rule on every leaf; it is the slow reference.
    """
    add_pool = {v: min(c, counts.a_hi) for v, c in add_pool.items() if c > 0 and counts.a_hi > 0}
    del_pool = {v: min(c, base.get(v, 0), counts.d_hi) for v, c in del_pool.items()}
    del_pool = {v: c for v, c in del_pool.items() if c > 0}
    if method == "enumerate" or isinstance(rule, HybridRule):
        return _enumerate(m, rule, p, base, add_pool, del_pool, counts)
    if method == "bnb":
        return _branch_and_bound(m, rule, p, base, add_pool, del_pool, counts)
    if method not in ("auto", "milp"):
        raise ValueError(f"unknown search method {method!r}")
    found = _integer_program(m, rule, p, base, add_pool, del_pool, counts)
    if found is False:
        # solver trouble or a witness that fails exact re-evaluation
        return _branch_and_bound(m, rule, p, base, add_pool, del_pool, counts)
    return found


def _integer_program(m, rule, p, base, add_pool, del_pool, counts):
    """Feasibility integer program over class counts, solved by HiGHS.

    Returns the witness, None when the program is infeasible, or False when
    the solver fails or its answer does not survive exact checking.
    """
    alpha = scoring_vector(rule, m)
    adds, dels = sorted(add_pool), sorted(del_pool)
    na, nd = len(adds), len(dels)
    residual = sum((mult * _effect(v, alpha, p, m) for v, mult in base.items() if mult),
                   np.zeros(m, dtype=np.int64))
    eff = np.array([_effect(v, alpha, p, m) for v in adds]
                   + [-_effect(v, alpha, p, m) for v in dels], dtype=float).reshape(na + nd, m)
    rows = [c for c in range(m) if c != p]
    cons = []
    if rows and na + nd:
        cons.append(LinearConstraint(eff[:, rows].T, -np.inf, -residual[rows]))
    elif (residual > 0).any():
        return None
    a_row = np.r_[np.ones(na), np.zeros(nd)]
    d_row = np.r_[np.zeros(na), np.ones(nd)]
    cons.append(LinearConstraint(np.vstack([a_row, d_row]), [counts.a_lo, counts.d_lo],
                                 [counts.a_hi, counts.d_hi]))
    if counts.equal:
        cons.append(LinearConstraint((a_row - d_row)[None, :], 0, 0))
    upper = np.array([add_pool[v] for v in adds] + [del_pool[v] for v in dels], dtype=float)
    if na + nd == 0:
        ok = counts.ok(0, 0) and not (residual > 0).any()
        return (Counter(), Counter()) if ok else None
    result = milp(np.zeros(na + nd), constraints=cons, integrality=np.ones(na + nd),
                  bounds=Bounds(np.zeros(na + nd), upper))
    if result.status == 2:
        return None
    if result.status != 0:
        return False
    x = np.rint(result.x).astype(int)
    added = Counter({v: int(k) for v, k in zip(adds, x[:na]) if k})
    deleted = Counter({v: int(k) for v, k in zip(dels, x[na:]) if k})
    profile = Counter(base)
    profile.subtract(deleted)
    profile.update(added)
    if (counts.ok(sum(added.values()), sum(deleted.values()))
            and p in _winners_from_counts(m, +profile, rule)):
        return added, deleted
    return False


def _multisets(pool: Mapping[Vote, int], size: int):
    classes = sorted(pool)
    for combo in itertools.combinations_with_replacement(classes, size):
        c = Counter(combo)
        if all(c[v] <= pool[v] for v in c):
            yield c


def _enumerate(m, rule, p, base, add_pool, del_pool, counts):
    a_cap = min(counts.a_hi, sum(add_pool.values()))
    d_cap = min(counts.d_hi, sum(del_pool.values()))
    for d in range(counts.d_lo, d_cap + 1):
        for deleted in _multisets(del_pool, d):
            reduced = Counter(base)
            reduced.subtract(deleted)
            for a in range(counts.a_lo, a_cap + 1):
                if not counts.ok(a, d):
                    continue
                for added in _multisets(add_pool, a):
                    if p in _winners_from_counts(m, reduced + added, rule):
                        return added, deleted
    return None


def _effect(vote: Vote, alpha, p: int, m: int) -> np.ndarray:
    pos = [0] * m
    for i, c in enumerate(vote):
        pos[c] = i
    own = alpha[pos[p]]
    return np.array([alpha[pos[c]] - own for c in range(m)], dtype=np.int64)


def _merge(pool, alpha, p, m, sign, limit):
    groups: dict[bytes, list] = {}
    for vote in sorted(pool):
        eff = sign * _effect(vote, alpha, p, m)
        key = eff.tobytes()
        if key not in groups:
            groups[key] = [eff, []]
        groups[key][1].append((vote, pool[vote]))
    out = []
    for eff, members in groups.values():
        cap = min(sum(c for _, c in members), limit)
        out.append((eff, cap, members, sign))
    return out


def _drop_table(moves, budget: int, m: int) -> np.ndarray:
    """Row ``b``: per coordinate, the largest decrease ``b`` votes from
    ``moves`` can achieve, each class used at most its cap times."""
    units = [np.maximum(-eff, 0) for eff, c, _, _ in moves for _ in range(min(c, budget))]
    table = np.zeros((budget + 1, m), dtype=np.int64)
    if units:
        best = -np.sort(-np.array(units), axis=0)[:budget]
        table[1:len(best) + 1] = np.cumsum(best, axis=0)
        table[len(best) + 1:] = table[len(best)]
    return table


def _branch_and_bound(m, rule, p, base, add_pool, del_pool, counts):
    alpha = scoring_vector(rule, m)
    residual = np.zeros(m, dtype=np.int64)
    for vote, mult in base.items():
        if mult:
            residual += mult * _effect(vote, alpha, p, m)

    # deletions first: they are few, and fixing them early tightens the bounds
    moves = _merge(del_pool, alpha, p, m, -1, counts.d_hi)
    moves += _merge(add_pool, alpha, p, m, +1, counts.a_hi)
    nmoves = len(moves)

    # per suffix and direction: the most each coordinate can drop using at
    # most b more votes (best classes first, within their caps), and the most
    # a single vote can cut from the positive residuals
    budget = {+1: counts.a_hi, -1: counts.d_hi}
    cap = {+1: [0] * (nmoves + 1), -1: [0] * (nmoves + 1)}
    cut = {+1: [0] * (nmoves + 1), -1: [0] * (nmoves + 1)}
    drop = {sgn: [np.zeros((budget[sgn] + 1, m), dtype=np.int64)] * (nmoves + 1) for sgn in (+1, -1)}
    for i in range(nmoves - 1, -1, -1):
        eff, c, _, sign = moves[i]
        for sgn in (+1, -1):
            cap[sgn][i] = cap[sgn][i + 1]
            cut[sgn][i] = cut[sgn][i + 1]
            drop[sgn][i] = drop[sgn][i + 1]
        cap[sign][i] += c
        cut[sign][i] = max(cut[sign][i], int(-eff[eff < 0].sum()))
        drop[sign][i] = _drop_table([mv for mv in moves[i:] if mv[3] == sign], budget[sign], m)

    failed: set = set()
    chosen = [0] * nmoves

    def hopeless(i, a, d, res):
        more_a = min(counts.a_hi - a, cap[+1][i])
        more_d = min(counts.d_hi - d, cap[-1][i])
        if a + more_a < counts.a_lo or d + more_d < counts.d_lo:
            return True
        if counts.equal and (a + more_a < d or d + more_d < a):
            return True
        bound = res - drop[+1][i][more_a] - drop[-1][i][more_d]
        if (bound > 0).any():
            return True
        return int(res[res > 0].sum()) > more_a * cut[+1][i] + more_d * cut[-1][i]

    def rec(i, a, d, res):
        if i == nmoves:
            return counts.ok(a, d) and not (res > 0).any()
        if hopeless(i, a, d, res):
            return False
        key = (i, a, d, res.tobytes())
        if key in failed:
            return False
        eff, limit, _, sign = moves[i]
        room = counts.a_hi - a if sign > 0 else counts.d_hi - d
        for x in range(min(limit, room) + 1):
            na, nd = (a + x, d) if sign > 0 else (a, d + x)
            chosen[i] = x
            if rec(i + 1, na, nd, res + x * eff):
                return True
        chosen[i] = 0
        failed.add(key)
        return False

    if not rec(0, 0, 0, residual):
        return None
    added, deleted = Counter(), Counter()
    for (_, _, members, sign), x in zip(moves, chosen):
        target = added if sign > 0 else deleted
        for vote, c in members:
            if x <= 0:
                break
            take = min(c, x)
            target[vote] += take
            x -= take
    return added, deleted
