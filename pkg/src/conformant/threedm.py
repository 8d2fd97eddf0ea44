"""3-Dimensional Matching: instances, an exact backtracking solver and a
generator for the variant where every element lies in exactly three triples."""

from __future__ import annotations

import random
from dataclasses import dataclass

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class ThreeDMInstance:
    """Ground sets X, Y, Z are ``range(k)`` each; triples address them by index."""

    k: int
    triples: tuple[Triple, ...]

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        triples = tuple(tuple(int(a) for a in t) for t in self.triples)
        for t in triples:
            if len(t) != 3 or not all(0 <= a < self.k for a in t):
                raise ValueError(f"triple {t} out of range for k={self.k}")
        if len(set(triples)) != len(triples):
            raise ValueError("triples must be distinct")
        object.__setattr__(self, "triples", triples)

    def is_restricted(self) -> bool:
        """True when each element of X, Y and Z occurs in exactly three triples."""
        for axis in range(3):
            counts = [0] * self.k
            for t in self.triples:
                counts[t[axis]] += 1
            if any(c != 3 for c in counts):
                return False
        return True

    def is_matching(self, chosen) -> bool:
        chosen = list(chosen)
        if len(chosen) != self.k or not set(chosen) <= set(self.triples):
            return False
        return all(len({t[axis] for t in chosen}) == self.k for axis in range(3))


class RestrictedThreeDMInstance(ThreeDMInstance):
    def __post_init__(self):
        super().__post_init__()
        if not self.is_restricted():
            raise ValueError("every element must occur in exactly three triples")


def solve_3dm(inst: ThreeDMInstance) -> tuple[bool, tuple[Triple, ...] | None]:
    """Exact search; branches on the uncovered element with fewest usable triples."""
    k = inst.k
    by_elem = {(axis, a): [] for axis in range(3) for a in range(k)}
    for t in inst.triples:
        for axis in range(3):
            by_elem[(axis, t[axis])].append(t)
    used = [set(), set(), set()]
    chosen: list[Triple] = []

    def usable(t):
        return all(t[axis] not in used[axis] for axis in range(3))

    def search():
        if len(chosen) == k:
            return True
        best = None
        for axis in range(3):
            for a in range(k):
                if a in used[axis]:
                    continue
                cands = [t for t in by_elem[(axis, a)] if usable(t)]
                if not cands:
                    return False
                if best is None or len(cands) < len(best):
                    best = cands
        for t in best:
            chosen.append(t)
            for axis in range(3):
                used[axis].add(t[axis])
            if search():
                return True
            chosen.pop()
            for axis in range(3):
                used[axis].discard(t[axis])
        return False

    if search():
        return True, tuple(sorted(chosen))
    return False, None


def _configuration_triples(k: int, degree: int, rng: random.Random) -> list[Triple]:
    xs = [a for a in range(k) for _ in range(degree)]
    ys = xs[:]
    zs = xs[:]
    rng.shuffle(ys)
    rng.shuffle(zs)
    return list(zip(xs, ys, zs))


def gen_restricted(k: int, seed: int, planted: bool = False) -> RestrictedThreeDMInstance:
    """Random instance in which every element occurs in exactly three triples.

    Triples come from a configuration model (three stubs per element, stubs
    paired at random), resampled until all triples are distinct.  With
    ``planted`` one of the three stubs per element is spent on a random
    perfect matching, so the answer is yes by construction.
    """
    if k < 2:
        raise ValueError("no restricted instance with distinct triples exists for k < 2")
    rng = random.Random(seed)
    while True:
        if planted:
            perm_y = list(range(k))
            perm_z = list(range(k))
            rng.shuffle(perm_y)
            rng.shuffle(perm_z)
            triples = [(x, perm_y[x], perm_z[x]) for x in range(k)]
            triples += _configuration_triples(k, 2, rng)
        else:
            triples = _configuration_triples(k, 3, rng)
        if len(set(triples)) == len(triples):
            return RestrictedThreeDMInstance(k, tuple(sorted(triples)))


def gen_restricted_no(k: int, seed: int, tries: int = 100_000) -> RestrictedThreeDMInstance:
    """Unplanted restricted instance without a perfect matching, found by
    rejection sampling (such instances are rare for small ``k``; none exist
    for ``k = 2``)."""
    if k < 3:
        raise ValueError("every restricted instance with k = 2 has a perfect matching")
    rng = random.Random(seed)
    for _ in range(tries):
        inst = gen_restricted(k, rng.randrange(2**32))
        if not solve_3dm(inst)[0]:
            return inst
    raise RuntimeError(f"no negative instance found in {tries} samples")
