"""Voter control: adding (CAV), exactly adding (XCAV), deleting (CDV) and
replacing (CRV) voters."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Callable

from . import search
from .bribery import BriberyInstance
from .core import Election, ScoringRule, Vote, VotingRule, is_winner
from .manipulation import ManipulationInstance

MODES = ("cav", "xcav", "cdv", "crv")


@dataclass(frozen=True)
class ControlInstance:
    registered: Election
    unregistered: tuple[Vote, ...]
    limit: int
    mode: str
    preferred: int
    rule: VotingRule

    def __post_init__(self):
        object.__setattr__(self, "unregistered", tuple(tuple(v) for v in self.unregistered))
        if self.mode not in MODES:
            raise ValueError(f"unknown control mode {self.mode!r}")
        if self.limit < 0:
            raise ValueError("limit must be nonnegative")
        if not 0 <= self.preferred < self.registered.m:
            raise ValueError("preferred candidate out of range")
        Election(self.registered.names, self.unregistered)  # validates rankings


@dataclass(frozen=True)
class ControlWitness:
    added: tuple[int, ...] = ()
    deleted: tuple[int, ...] = ()

    def apply(self, inst: ControlInstance) -> Election:
        gone = set(self.deleted)
        kept = [v for i, v in enumerate(inst.registered.votes) if i not in gone]
        return inst.registered.with_votes(kept + [inst.unregistered[i] for i in self.added])


def certifies(inst: ControlInstance, witness: ControlWitness) -> bool:
    a, d = witness.added, witness.deleted
    if len(set(a)) != len(a) or len(set(d)) != len(d):
        return False
    if any(not 0 <= i < len(inst.unregistered) for i in a):
        return False
    if any(not 0 <= i < inst.registered.n for i in d):
        return False
    sizes_ok = {
        "xcav": len(a) == inst.limit and not d,
        "cav": len(a) <= inst.limit and not d,
        "cdv": len(d) <= inst.limit and not a,
        "crv": len(a) == len(d) <= inst.limit,
    }[inst.mode]
    return sizes_ok and is_winner(witness.apply(inst), inst.rule, inst.preferred)


def _pick(votes, wanted: Counter) -> tuple[int, ...]:
    """Lowest indices realizing the per-ranking counts in ``wanted``."""
    left = Counter(wanted)
    out = []
    for i, v in enumerate(votes):
        if left[v] > 0:
            out.append(i)
            left[v] -= 1
    return tuple(out)


def solve_control_exactsearch(inst: ControlInstance, method: str = "auto") -> tuple[bool, ControlWitness | None]:
    """Exact decision by search over per-ranking counts of added and deleted voters."""
    e = inst.registered
    pool = Counter(inst.unregistered)
    base = e.vote_counts()
    k = inst.limit
    if inst.mode == "xcav":
        if k > len(inst.unregistered):
            return False, None
        add, dele, counts = pool, {}, search.exact(k)
    elif inst.mode == "cav":
        add, dele, counts = pool, {}, search.at_most_adds(k)
    elif inst.mode == "cdv":
        add, dele, counts = {}, base, search.at_most_deletes(k)
    else:
        add, dele, counts = pool, base, search.swaps(k)
    found = search.find_modification(e.m, inst.rule, inst.preferred, base, add, dele, counts, method)
    if found is None:
        return False, None
    added, deleted = found
    return True, ControlWitness(_pick(inst.unregistered, added), _pick(e.votes, deleted))


def _require(inst: ControlInstance, family: str, k: int):
    rule = inst.rule
    if inst.mode != "xcav":
        raise ValueError("greedy solvers handle exact control by adding voters only")
    if not (isinstance(rule, ScoringRule) and rule.family == family and rule.k == k):
        raise ValueError(f"this solver needs {k}-{family}")


def solve_xcav_0approval(inst: ControlInstance) -> bool:
    """Everyone always ties, so only the pool size matters."""
    _require(inst, "approval", 0)
    return inst.limit <= len(inst.unregistered)


def solve_xcav_1approval(inst: ControlInstance) -> bool:
    """Add every available ``p``-vote, then spread the remaining additions over
    the other candidates without pushing any above ``p``."""
    _require(inst, "approval", 1)
    e, p, j = inst.registered, inst.preferred, inst.limit
    if j > len(inst.unregistered):
        return False
    if e.m == 1:
        return True
    score = Counter(v[0] for v in e.votes)
    avail = Counter(v[0] for v in inst.unregistered)
    take = min(avail[p], j)
    top = score[p] + take
    room = 0
    for c in range(e.m):
        if c == p:
            continue
        if score[c] > top:
            return False
        room += min(avail[c], top - score[c])
    return room >= j - take


def solve_xcav_1veto(inst: ControlInstance) -> bool:
    """Add as many votes vetoing someone other than ``p`` as possible, aimed at
    the candidates that are ahead of ``p``."""
    _require(inst, "veto", 1)
    e, p, j = inst.registered, inst.preferred, inst.limit
    if j > len(inst.unregistered):
        return False
    if e.m == 1:
        return True
    vetoes = Counter(v[-1] for v in e.votes)
    avail = Counter(v[-1] for v in inst.unregistered)
    others = sum(avail[c] for c in range(e.m) if c != p)
    take = min(j, others)
    forced = j - take
    final_p = -(vetoes[p] + forced)
    needed = 0
    for c in range(e.m):
        if c == p:
            continue
        gap = -vetoes[c] - final_p
        if gap > avail[c]:
            return False
        needed += max(gap, 0)
    return needed <= take


XcavSolver = Callable[[ControlInstance], object]


def _decision(result) -> bool:
    return bool(result[0] if isinstance(result, tuple) else result)


def dtt_cav_via_xcav(inst: ControlInstance, xcav_solver: XcavSolver) -> bool:
    """CAV as the disjunction of exact-budget queries ``j = 0..limit``."""
    if inst.mode != "cav":
        raise ValueError("expected a cav instance")
    return any(_decision(xcav_solver(replace(inst, mode="xcav", limit=j)))
               for j in range(inst.limit + 1))


def dtt_cdv_via_xcav(inst: ControlInstance, xcav_solver: XcavSolver) -> bool:
    """CDV as the disjunction over how many voters survive: rebuild the kept
    voters by exactly adding them to an empty election."""
    if inst.mode != "cdv":
        raise ValueError("expected a cdv instance")
    e = inst.registered
    empty = e.with_votes(())
    return any(_decision(xcav_solver(ControlInstance(empty, e.votes, j, "xcav", inst.preferred, inst.rule)))
               for j in range(max(e.n - inst.limit, 0), e.n + 1))


def reduce_cm_to_xcav(inst: ManipulationInstance) -> ControlInstance:
    """Each manipulator becomes a choice among ``|W|`` copies of every distinct vote."""
    e, w = inst.election, inst.num_manipulators
    pool = tuple(v for v in e.distinct_votes() for _ in range(w))
    return ControlInstance(e, pool, w, "xcav", inst.preferred, inst.rule)


def reduce_cb_to_crv(inst: BriberyInstance) -> ControlInstance:
    """Every original voter contributes ``k`` unregistered copies of its ranking."""
    e, k = inst.election, inst.limit
    pool = tuple(v for v in e.votes for _ in range(k))
    return ControlInstance(e, pool, k, "crv", inst.preferred, inst.rule)
