"""Conformant and standard manipulation solvers."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import search
from .core import Election, HybridRule, ScoringRule, Vote, VotingRule, _winners_from_counts, is_winner, scoring_vector
from .firstlast import firstlast_feasible
from .matching import WeightedMultigraph, max_weight_b_matching


@dataclass(frozen=True)
class ManipulationInstance:
    election: Election
    num_manipulators: int
    preferred: int
    rule: VotingRule
    conformant: bool = True

    def __post_init__(self):
        if not 0 <= self.preferred < self.election.m:
            raise ValueError("preferred candidate out of range")
        if self.num_manipulators < 0:
            raise ValueError("number of manipulators must be nonnegative")


Witness = tuple[Vote, ...]


def certifies(inst: ManipulationInstance, votes_cast) -> bool:
    """Check a manipulation witness against the instance's own rules."""
    votes_cast = tuple(votes_cast)
    if len(votes_cast) != inst.num_manipulators:
        return False
    if inst.conformant and not set(votes_cast) <= set(inst.election.votes):
        return False
    full = inst.election.with_votes(inst.election.votes + votes_cast)
    return is_winner(full, inst.rule, inst.preferred)


def _require_conformant(inst):
    if not inst.conformant:
        raise ValueError("instance is not conformant")


def _trivial(inst) -> tuple[bool, Witness | None] | None:
    if inst.num_manipulators == 0:
        ok = is_winner(inst.election, inst.rule, inst.preferred)
        return ok, (() if ok else None)
    if inst.election.n == 0:
        return False, None
    return None


def _expand(counter: Counter, order) -> Witness:
    return tuple(v for v in order for _ in range(counter.get(v, 0)))


def solve_cm_exact(inst: ManipulationInstance, method: str = "auto") -> tuple[bool, Witness | None]:
    """Exhaustive search over multisets of the nonmanipulators' distinct votes."""
    _require_conformant(inst)
    early = _trivial(inst)
    if early is not None:
        return early
    e = inst.election
    w = inst.num_manipulators
    pool = {v: w for v in e.distinct_votes()}
    found = search.find_modification(e.m, inst.rule, inst.preferred, e.vote_counts(),
                                     pool, {}, search.exact(w), method)
    if found is None:
        return False, None
    return True, _expand(found[0], sorted(pool))


def solve_cm_fixed_k(inst: ManipulationInstance) -> tuple[bool, Witness | None]:
    """Try every multiset of ``|W|`` votes drawn from the distinct nonmanipulator
    votes; ``O(d^|W|)`` winner evaluations, polynomial for constant ``|W|``."""
    _require_conformant(inst)
    early = _trivial(inst)
    if early is not None:
        return early
    e = inst.election
    w = inst.num_manipulators
    distinct = sorted(e.distinct_votes())
    if isinstance(inst.rule, ScoringRule):
        alpha = scoring_vector(inst.rule, e.m)
        eff = np.zeros((len(distinct), e.m), dtype=np.int64)
        for i, vote in enumerate(distinct):
            for pos, c in enumerate(vote):
                eff[i, c] = alpha[pos]
        base = eff.T @ np.array([e.vote_counts()[v] for v in distinct], dtype=np.int64)
        combos = np.array(list(itertools.combinations_with_replacement(range(len(distinct)), w)),
                          dtype=np.intp)
        totals = base + eff[combos].sum(axis=1)
        good = np.nonzero(totals[:, inst.preferred] >= totals.max(axis=1))[0]
        if len(good) == 0:
            return False, None
        return True, tuple(distinct[i] for i in combos[good[0]])
    counts = e.vote_counts()
    for combo in itertools.combinations_with_replacement(distinct, w):
        profile = counts + Counter(combo)
        if inst.preferred in _winners_from_counts(e.m, profile, inst.rule):
            return True, combo
    return False, None


def solve_cm_3approval(inst: ManipulationInstance) -> tuple[bool, Witness | None]:
    """Polynomial-time 3-approval conformant manipulation via b-matching."""
    _require_conformant(inst)
    rule = inst.rule
    if not (isinstance(rule, ScoringRule) and rule.family == "approval" and rule.k == 3):
        raise ValueError("solve_cm_3approval needs 3-approval")
    e = inst.election
    p = inst.preferred
    w = inst.num_manipulators
    approving = [v for v in e.distinct_votes() if p in v[:3]]
    if not approving:
        ok = e.n == 0 and w == 0
        return ok, (() if ok else None)

    alpha = scoring_vector(rule, e.m)
    score = [0] * e.m
    for vote in e.votes:
        for pos, c in enumerate(vote):
            score[c] += alpha[pos]
    final_p = score[p] + w
    others = [c for c in range(e.m) if c != p]
    cap = {c: final_p - score[c] for c in others}
    if any(b < 0 for b in cap.values()):
        return False, None

    if e.m <= 3:
        # every vote approves everyone, so all scores stay tied
        return True, (approving[0],) * w

    # one edge per manipulator that could copy a vote approving {p, a, b}
    edges = []
    edge_votes = []
    for vote in sorted(approving):
        a, b = (c for c in vote[:3] if c != p)
        for _ in range(w):
            edges.append((a, b, 1, False))
            edge_votes.append(vote)
    ok, chosen = max_weight_b_matching(WeightedMultigraph(e.m, tuple(edges), cap), w)
    if not ok:
        return False, None
    picked = sorted(chosen)[:w]
    return True, tuple(edge_votes[i] for i in picked)


def solve_cm_firstlast(inst: ManipulationInstance) -> bool:
    """First-last conformant manipulation answered by exact perfect bipartite
    matching queries, one per candidate final score of ``p``."""
    _require_conformant(inst)
    rule = inst.rule
    if not (isinstance(rule, ScoringRule) and rule.family == "first-last"):
        raise ValueError("solve_cm_firstlast needs first-last")
    early = _trivial(inst)
    if early is not None:
        return early[0]
    e = inst.election
    if e.m == 1:
        return True
    arcs = {(v[0], v[-1]) for v in e.votes}
    return firstlast_feasible(e.m, inst.preferred, [(v[0], v[-1]) for v in e.votes],
                              sorted(arcs), inst.num_manipulators)


def _nonincreasing(alpha) -> bool:
    return all(a >= b for a, b in zip(alpha, alpha[1:]))


def _standard_pool(m: int, rule: VotingRule, p: int) -> list[Vote]:
    others = [c for c in range(m) if c != p]
    if isinstance(rule, ScoringRule) and _nonincreasing(scoring_vector(rule, m)):
        return [(p,) + rest for rest in itertools.permutations(others)]
    if isinstance(rule, HybridRule):
        # only the top candidate and the set of the bottom three matter
        pool = []
        for top in range(m):
            rest = [c for c in range(m) if c != top]
            for bottom in itertools.combinations(rest, 3):
                middle = [c for c in rest if c not in bottom]
                pool.append((top, *middle, *bottom))
        return pool
    return list(itertools.permutations(range(m)))


def solve_manipulation_standard(inst: ManipulationInstance) -> tuple[bool, Witness | None]:
    """Exact standard (non-conformant) manipulation over all rankings.

    Under a weakly decreasing scoring vector manipulators may as well rank
    ``p`` first, since moving ``p`` up never helps anyone else.
    """
    if inst.conformant:
        raise ValueError("instance is conformant; use a conformant solver")
    e = inst.election
    w = inst.num_manipulators
    if w == 0:
        ok = is_winner(e, inst.rule, inst.preferred)
        return ok, (() if ok else None)
    pool = {v: w for v in _standard_pool(e.m, inst.rule, inst.preferred)}
    found = search.find_modification(e.m, inst.rule, inst.preferred, e.vote_counts(),
                                     pool, {}, search.exact(w))
    if found is None:
        return False, None
    return True, _expand(found[0], sorted(pool))
