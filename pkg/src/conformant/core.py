"""Elections, scoring-rule families and winner determination.

Candidates are dense integer ids ``0..m-1``; a vote is a tuple of ids,
most-preferred first.  Every winner computation uses the co-winner model:
``p`` wins when it belongs to the (possibly tied) winner set.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

Vote = tuple[int, ...]

__all__ = [
    "Vote",
    "Election",
    "ScoringRule",
    "HybridRule",
    "VotingRule",
    "approval",
    "veto",
    "BORDA",
    "FIRST_LAST",
    "HYBRID",
    "explicit",
    "parse_rule",
    "extends_by_one",
    "is_pure",
    "scoring_vector",
    "hybrid_vector",
    "scores",
    "winners",
    "is_winner",
]


@dataclass(frozen=True)
class Election:
    """A candidate list plus an ordered multiset of strict rankings."""

    names: tuple[str, ...]
    votes: tuple[Vote, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "votes", tuple(tuple(v) for v in self.votes))
        m = len(self.names)
        if m < 1:
            raise ValueError("an election needs at least one candidate")
        if len(set(self.names)) != m:
            raise ValueError("candidate names must be unique")
        full = set(range(m))
        for i, vote in enumerate(self.votes):
            if len(vote) != m or set(vote) != full:
                raise ValueError(f"vote {i} is not a ranking of all {m} candidates")

    @property
    def m(self) -> int:
        return len(self.names)

    @property
    def n(self) -> int:
        return len(self.votes)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown candidate {name!r}") from None

    def with_votes(self, votes: Iterable[Vote]) -> "Election":
        return Election(self.names, tuple(votes))

    def distinct_votes(self) -> list[Vote]:
        """Distinct rankings in order of first occurrence."""
        return list(dict.fromkeys(self.votes))

    def vote_counts(self) -> Counter:
        return Counter(self.votes)

    def format_vote(self, vote: Vote) -> str:
        return ">".join(self.names[c] for c in vote)


@dataclass(frozen=True)
class ScoringRule:
    """A pure scoring-rule family.

    ``family`` is one of ``approval``, ``veto``, ``borda``, ``first-last`` or
    ``explicit``.  ``k`` parametrizes approval/veto; ``vectors`` holds the
    per-``m`` vectors of an explicit family (index ``m - 1``).
    """

    family: str
    k: int = 0
    vectors: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        if self.family not in ("approval", "veto", "borda", "first-last", "explicit"):
            raise ValueError(f"unknown scoring family {self.family!r}")
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.family == "explicit":
            vecs = tuple(tuple(int(a) for a in v) for v in self.vectors)
            for i, v in enumerate(vecs):
                if len(v) != i + 1:
                    raise ValueError(f"explicit vector {i} must have length {i + 1}")
                if any(v[j] < v[j + 1] for j in range(len(v) - 1)):
                    raise ValueError(f"explicit vector {v} is not weakly decreasing")
            object.__setattr__(self, "vectors", vecs)

    def __str__(self) -> str:
        if self.family in ("approval", "veto"):
            return f"{self.k}-{self.family}"
        if self.family == "explicit":
            return "explicit:" + ";".join(",".join(map(str, v)) for v in self.vectors)
        return self.family


@dataclass(frozen=True)
class HybridRule:
    """Plurality when someone is ranked first at least twice, otherwise the
    scoring vector ``<m+3, 0, ..., 0, -1, -1, -1>``."""

    def __str__(self) -> str:
        return "hybrid"


VotingRule = Union[ScoringRule, HybridRule]

BORDA = ScoringRule("borda")
FIRST_LAST = ScoringRule("first-last")
HYBRID = HybridRule()


def approval(k: int) -> ScoringRule:
    return ScoringRule("approval", k)


def veto(k: int) -> ScoringRule:
    return ScoringRule("veto", k)


def explicit(vectors: Sequence[Sequence[int]]) -> ScoringRule:
    return ScoringRule("explicit", vectors=tuple(tuple(v) for v in vectors))


_KRULE = re.compile(r"^(\d+)-(approval|veto)$")


def parse_rule(text: str) -> VotingRule:
    """Parse ``3-approval``, ``2-veto``, ``borda``, ``first-last``,
    ``hybrid`` or ``explicit:1;1,0;1,0,0``."""
    t = text.strip().lower()
    match = _KRULE.match(t)
    if match:
        return ScoringRule(match.group(2), int(match.group(1)))
    if t == "borda":
        return BORDA
    if t in ("first-last", "firstlast"):
        return FIRST_LAST
    if t == "hybrid":
        return HYBRID
    if t.startswith("explicit:"):
        body = t[len("explicit:"):]
        try:
            vecs = [tuple(int(a) for a in part.split(",")) for part in body.split(";")]
        except ValueError:
            raise ValueError(f"malformed explicit rule {text!r}") from None
        return explicit(vecs)
    raise ValueError(f"unknown voting rule {text!r}")


def scoring_vector(rule: ScoringRule, m: int) -> tuple[int, ...]:
    if not isinstance(rule, ScoringRule):
        raise TypeError("scoring_vector needs a pure scoring rule")
    if m < 1:
        raise ValueError("m must be at least 1")
    fam = rule.family
    if fam == "approval":
        k = min(rule.k, m)
        return (1,) * k + (0,) * (m - k)
    if fam == "veto":
        k = min(rule.k, m)
        return (0,) * (m - k) + (-1,) * k
    if fam == "borda":
        return tuple(range(m - 1, -1, -1))
    if fam == "first-last":
        # the +1 and -1 collapse when there is a single position
        if m == 1:
            return (0,)
        return (1,) + (0,) * (m - 2) + (-1,)
    if m > len(rule.vectors):
        raise ValueError(f"explicit rule has no vector for m={m}")
    return rule.vectors[m - 1]


def extends_by_one(shorter: Sequence[int], longer: Sequence[int]) -> bool:
    """True when deleting one coefficient of ``longer`` gives ``shorter``."""
    if len(longer) != len(shorter) + 1:
        return False
    return any(tuple(longer[:i]) + tuple(longer[i + 1:]) == tuple(shorter) for i in range(len(longer)))


def is_pure(rule: ScoringRule, max_m: int, start: int = 1) -> bool:
    """Check the one-coefficient extension property for ``start <= m < max_m``."""
    return all(extends_by_one(scoring_vector(rule, m), scoring_vector(rule, m + 1))
               for m in range(start, max_m))


def hybrid_vector(m: int) -> tuple[int, ...]:
    if m < 4:
        raise ValueError("the hybrid rule needs at least 4 candidates")
    return (m + 3,) + (0,) * (m - 4) + (-1, -1, -1)


def _vector(rule: VotingRule, m: int) -> tuple[int, ...]:
    if isinstance(rule, HybridRule):
        return hybrid_vector(m)
    return scoring_vector(rule, m)


def tally(m: int, votes: Iterable[Vote], vector: Sequence[int],
          counts: Mapping[Vote, int] | None = None) -> list[int]:
    """Positional totals; ``counts`` (ranking -> multiplicity) replaces ``votes``."""
    total = [0] * m
    items = counts.items() if counts is not None else ((v, 1) for v in votes)
    for vote, mult in items:
        if mult:
            for pos, c in enumerate(vote):
                total[c] += mult * vector[pos]
    return total


def scores(election: Election, rule: ScoringRule) -> dict[int, int]:
    vec = scoring_vector(rule, election.m)
    return dict(enumerate(tally(election.m, election.votes, vec)))


def _winners_from_counts(m: int, counts: Mapping[Vote, int], rule: VotingRule) -> frozenset[int]:
    if isinstance(rule, HybridRule):
        vec = hybrid_vector(m)
        firsts = [0] * m
        for vote, mult in counts.items():
            firsts[vote[0]] += mult
        top = max(firsts)
        if top >= 2:
            return frozenset(c for c in range(m) if firsts[c] == top)
    else:
        vec = scoring_vector(rule, m)
    total = tally(m, (), vec, counts)
    best = max(total)
    return frozenset(c for c in range(m) if total[c] == best)


def winners(election: Election, rule: VotingRule) -> frozenset[int]:
    return _winners_from_counts(election.m, election.vote_counts(), rule)


def is_winner(election: Election, rule: VotingRule, p: int) -> bool:
    return p in winners(election, rule)
