"""Conformant and standard bribery solvers."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import search
from .core import Election, ScoringRule, Vote, VotingRule, _winners_from_counts, is_winner, scoring_vector
from .firstlast import firstlast_feasible
from .manipulation import _standard_pool


@dataclass(frozen=True)
class BriberyInstance:
    election: Election
    limit: int
    preferred: int
    rule: VotingRule
    conformant: bool = True

    def __post_init__(self):
        if not 0 <= self.preferred < self.election.m:
            raise ValueError("preferred candidate out of range")
        if self.limit < 0:
            raise ValueError("bribe limit must be nonnegative")

    @property
    def effective_limit(self) -> int:
        return min(self.limit, self.election.n)


@dataclass(frozen=True)
class BriberyWitness:
    changes: tuple[tuple[int, Vote], ...]

    def apply(self, election: Election) -> Election:
        votes = list(election.votes)
        for i, vote in self.changes:
            votes[i] = vote
        return election.with_votes(votes)


def certifies(inst: BriberyInstance, witness: BriberyWitness) -> bool:
    idx = [i for i, _ in witness.changes]
    if len(set(idx)) != len(idx) or len(idx) > inst.limit:
        return False
    if any(not 0 <= i < inst.election.n for i in idx):
        return False
    original = set(inst.election.votes)
    if inst.conformant and any(v not in original for _, v in witness.changes):
        return False
    return is_winner(witness.apply(inst.election), inst.rule, inst.preferred)


def _witness(election: Election, added: Counter, deleted: Counter) -> BriberyWitness:
    """Pair the lowest-index voters of each deleted class with the new votes."""
    sources = []
    for vote in sorted(deleted):
        holders = [i for i, v in enumerate(election.votes) if v == vote]
        sources.extend(holders[:deleted[vote]])
    targets = [v for v in sorted(added) for _ in range(added[v])]
    return BriberyWitness(tuple(sorted(zip(sources, targets))))


def _current(inst) -> tuple[bool, BriberyWitness | None]:
    ok = is_winner(inst.election, inst.rule, inst.preferred)
    return ok, (BriberyWitness(()) if ok else None)


def _require_conformant(inst):
    if not inst.conformant:
        raise ValueError("instance is not conformant")


def solve_cb_exact(inst: BriberyInstance, method: str = "auto") -> tuple[bool, BriberyWitness | None]:
    """Search over transfers between distinct-vote classes of total mass at
    most the bribe limit."""
    _require_conformant(inst)
    e = inst.election
    k = inst.effective_limit
    if k == 0:
        return _current(inst)
    counts = e.vote_counts()
    found = search.find_modification(e.m, inst.rule, inst.preferred, counts,
                                     {v: k for v in counts}, counts, search.swaps(k), method)
    if found is None:
        return False, None
    return True, _witness(e, *found)


def _bounded_multisets(classes, caps, size):
    for combo in itertools.combinations_with_replacement(range(len(classes)), size):
        c = Counter(combo)
        if all(c[i] <= caps[i] for i in c):
            yield combo


def _index_array(rows, width):
    return np.array(rows, dtype=np.intp).reshape(len(rows), width)


def solve_cb_fixed_k(inst: BriberyInstance) -> tuple[bool, BriberyWitness | None]:
    """Enumerate (removed multiset, added multiset) pairs of each size up to the
    limit: ``O(d^(2k))`` winner evaluations for ``d`` distinct votes."""
    _require_conformant(inst)
    e = inst.election
    k = inst.effective_limit
    if k == 0:
        return _current(inst)
    counts = e.vote_counts()
    classes = sorted(counts)
    caps = [counts[v] for v in classes]
    p = inst.preferred

    if isinstance(inst.rule, ScoringRule):
        alpha = scoring_vector(inst.rule, e.m)
        eff = np.zeros((len(classes), e.m), dtype=np.int64)
        for i, vote in enumerate(classes):
            eff[i, list(vote)] = alpha
        base = eff.T @ np.array(caps, dtype=np.int64)
        for j in range(k + 1):
            outs = _index_array(list(_bounded_multisets(classes, caps, j)), j)
            ins = _index_array(list(itertools.combinations_with_replacement(range(len(classes)), j)), j)
            totals = base - eff[outs].sum(axis=1)[:, None, :] + eff[ins].sum(axis=1)[None, :, :]
            good = np.argwhere(totals[:, :, p] >= totals.max(axis=2))
            if len(good):
                o, i = good[0]
                return True, _witness(e, Counter(classes[x] for x in ins[i]),
                                      Counter(classes[x] for x in outs[o]))
        return False, None

    for j in range(k + 1):
        for out in _bounded_multisets(classes, caps, j):
            removed = Counter(classes[x] for x in out)
            for into in itertools.combinations_with_replacement(classes, j):
                profile = counts - removed + Counter(into)
                if p in _winners_from_counts(e.m, profile, inst.rule):
                    return True, _witness(e, Counter(into), removed)
    return False, None


def solve_cb_firstlast(inst: BriberyInstance) -> bool:
    """First-last conformant bribery through exact perfect bipartite matching
    queries over the (first, last) arcs of the votes."""
    _require_conformant(inst)
    rule = inst.rule
    if not (isinstance(rule, ScoringRule) and rule.family == "first-last"):
        raise ValueError("solve_cb_firstlast needs first-last")
    e = inst.election
    k = inst.effective_limit
    if k == 0 or e.m == 1:
        return _current(inst)[0]
    arcs = [(v[0], v[-1]) for v in e.votes]
    # bribing a voter to its own ranking is allowed, so exactly k swaps
    # cover every smaller number as well
    return firstlast_feasible(e.m, inst.preferred, arcs, sorted(set(arcs)), k, swap=True)


def solve_bribery_standard(inst: BriberyInstance) -> tuple[bool, BriberyWitness | None]:
    """Exact standard bribery: any ranking may be installed."""
    if inst.conformant:
        raise ValueError("instance is conformant; use a conformant solver")
    e = inst.election
    k = inst.effective_limit
    if k == 0:
        return _current(inst)
    counts = e.vote_counts()
    pool = {v: k for v in _standard_pool(e.m, inst.rule, inst.preferred)}
    found = search.find_modification(e.m, inst.rule, inst.preferred, counts,
                                     pool, counts, search.swaps(k))
    if found is None:
        return False, None
    return True, _witness(e, *found)
