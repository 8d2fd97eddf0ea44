"""Gadget constructions turning 3DM and exact-perfect-matching instances into
manipulation, bribery and control instances, plus a harness that checks each
gadget against ground-truth oracles."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

from .bribery import BriberyInstance, solve_cb_exact
from .control import ControlInstance, solve_control_exactsearch
from .core import FIRST_LAST, HYBRID, Election, approval, hybrid_vector, scores, tally, veto
from .manipulation import ManipulationInstance, solve_cm_exact
from .matching import WeightedMultigraph
from .threedm import ThreeDMInstance, gen_restricted, gen_restricted_no, solve_3dm

ProblemInstance = Union[ManipulationInstance, BriberyInstance, ControlInstance]
Provenance = dict[str, tuple[int, ...]]


@dataclass(frozen=True)
class GadgetOutput:
    """A constructed instance and the role of every candidate and voter.

    Provenance keys are ``candidates.<role>``, ``voters.<role>`` and
    ``unregistered.<role>``; within each prefix the id tuples partition the
    corresponding id range.
    """

    instance: ProblemInstance
    provenance: Provenance


def election_of(inst: ProblemInstance) -> Election:
    return inst.registered if isinstance(inst, ControlInstance) else inst.election


def check_provenance(out: GadgetOutput) -> bool:
    e = election_of(out.instance)
    sizes = {"candidates": e.m, "voters": e.n}
    if isinstance(out.instance, ControlInstance):
        sizes["unregistered"] = len(out.instance.unregistered)
    for prefix, size in sizes.items():
        ids = [i for key, grp in out.provenance.items() if key.split(".")[0] == prefix for i in grp]
        if sorted(ids) != list(range(size)):
            return False
    return all(key.split(".")[0] in sizes for key in out.provenance)


class _Layout:
    """Hands out candidate ids and names, and builds rankings whose free
    middle segment follows id order."""

    def __init__(self):
        self.names: list[str] = []
        self.roles: dict[str, list[int]] = {}

    def add(self, name: str, role: str) -> int:
        self.names.append(name)
        self.roles.setdefault(role, []).append(len(self.names) - 1)
        return len(self.names) - 1

    def ranking(self, top: Sequence[int] = (), bottom: Sequence[int] = ()) -> tuple[int, ...]:
        fixed = set(top) | set(bottom)
        middle = [c for c in range(len(self.names)) if c not in fixed]
        return (*top, *middle, *bottom)

    def provenance(self) -> Provenance:
        return {f"candidates.{r}": tuple(ids) for r, ids in self.roles.items()}


def _elements(lay: _Layout, k: int) -> list[list[int]]:
    """Element candidates in X-block, Y-block, Z-block order."""
    return [[lay.add(f"{axis}{i + 1}", "element") for i in range(k)] for axis in "xyz"]


def _triple(elems, t) -> tuple[int, int, int]:
    return elems[0][t[0]], elems[1][t[1]], elems[2][t[2]]


class _Voters:
    def __init__(self):
        self.votes: list[tuple[int, ...]] = []
        self.roles: dict[str, list[int]] = {}

    def add(self, vote, role: str, copies: int = 1):
        for _ in range(copies):
            self.roles.setdefault(role, []).append(len(self.votes))
            self.votes.append(vote)

    def provenance(self, prefix: str) -> Provenance:
        return {f"{prefix}.{r}": tuple(ids) for r, ids in self.roles.items()}


def _require_restricted(src: ThreeDMInstance):
    if not src.is_restricted():
        raise ValueError("gadget needs every element in exactly three triples")


def gadget_4approval_cm(src: ThreeDMInstance) -> GadgetOutput:
    _require_restricted(src)
    k = src.k
    lay = _Layout()
    p = lay.add("p", "preferred")
    elems = _elements(lay, k)
    pads = {a: [lay.add(f"{lay.names[a]}_{j}", "padding") for j in (1, 2, 3)]
            for block in elems for a in block}
    voters = _Voters()
    for t in src.triples:
        voters.add(lay.ranking((p, *_triple(elems, t))), "triple")
    for a, (a1, a2, a3) in pads.items():
        voters.add(lay.ranking((a, a1, a2, a3)), "padding", 4 * k - 4)
    e = Election(lay.names, voters.votes)
    inst = ManipulationInstance(e, k, p, approval(4))
    return GadgetOutput(inst, {**lay.provenance(), **voters.provenance("voters")})


def gadget_3approval_xcav(src: ThreeDMInstance) -> GadgetOutput:
    k = src.k
    lay = _Layout()
    p = lay.add("p", "preferred")
    d1, d2 = lay.add("d1", "dummy"), lay.add("d2", "dummy")
    elems = _elements(lay, k)
    reg, unreg = _Voters(), _Voters()
    reg.add(lay.ranking((p, d1, d2)), "preferred")
    for t in src.triples:
        unreg.add(lay.ranking(_triple(elems, t)), "triple")
    inst = ControlInstance(Election(lay.names, reg.votes), tuple(unreg.votes), k, "xcav", p, approval(3))
    return GadgetOutput(inst, {**lay.provenance(), **reg.provenance("voters"),
                               **unreg.provenance("unregistered")})


def gadget_3veto_cb(src: ThreeDMInstance) -> GadgetOutput:
    _require_restricted(src)
    k = src.k
    lay = _Layout()
    p = lay.add("p", "preferred")
    p1, p2 = lay.add("p1", "partner"), lay.add("p2", "partner")
    elems = _elements(lay, k)
    voters = _Voters()
    for t in src.triples:
        voters.add(lay.ranking(bottom=_triple(elems, t)), "triple")
    voters.add(lay.ranking(bottom=(p, p1, p2)), "preferred", k + 4)
    inst = BriberyInstance(Election(lay.names, voters.votes), k, p, veto(3))
    return GadgetOutput(inst, {**lay.provenance(), **voters.provenance("voters")})


def gadget_3approval_cb(src: ThreeDMInstance) -> GadgetOutput:
    _require_restricted(src)
    k = src.k
    if k < 2:
        raise ValueError("padding needs k >= 2")
    lay = _Layout()
    p = lay.add("p", "preferred")
    p1, p2 = lay.add("p1", "partner"), lay.add("p2", "partner")
    elems = _elements(lay, k)
    dummies = [lay.add(f"d{i + 1}", "dummy") for i in range(6 * k * (k - 1))]
    voters = _Voters()
    for t in src.triples:
        voters.add(lay.ranking(_triple(elems, t)), "triple")
    voters.add(lay.ranking((p, p1, p2)), "preferred")
    fresh = iter(dummies)
    for block in elems:
        for a in block:
            for _ in range(k - 1):
                voters.add(lay.ranking((a, next(fresh), next(fresh))), "padding")
    inst = BriberyInstance(Election(lay.names, voters.votes), k, p, approval(3))
    return GadgetOutput(inst, {**lay.provenance(), **voters.provenance("voters")})


def _hybrid_registered(src: ThreeDMInstance, x_copies: int):
    k = src.k
    if len(src.triples) > 3 * k:
        raise ValueError("gadget has one dummy per triple and needs at most 3k triples")
    lay = _Layout()
    p = lay.add("p", "preferred")
    elems = _elements(lay, k)
    d = [lay.add(f"d{i + 1}", "dummy") for i in range(3 * k)]
    reg = _Voters()
    reg.add(lay.ranking((p,), d[0:3]), "preferred")
    for i in range(k):
        block = d[3 * i:3 * i + 3]
        reg.add(lay.ranking((elems[0][i],), block), "x", x_copies)
        reg.add(lay.ranking((elems[1][i],), block), "y")
        if i < k - 1:
            reg.add(lay.ranking((elems[2][i],), block), "z")
    reg.add(lay.ranking((elems[2][k - 1],), (d[0], d[1], p)), "z")
    unreg = _Voters()
    for i, t in enumerate(src.triples):
        unreg.add(lay.ranking((d[i],), _triple(elems, t)), "triple")
    return lay, reg, unreg, p


def gadget_hybrid_cav(src: ThreeDMInstance) -> GadgetOutput:
    lay, reg, unreg, p = _hybrid_registered(src, 1)
    inst = ControlInstance(Election(lay.names, reg.votes), tuple(unreg.votes), src.k, "cav", p, HYBRID)
    return GadgetOutput(inst, {**lay.provenance(), **reg.provenance("voters"),
                               **unreg.provenance("unregistered")})


def gadget_hybrid_crv(src: ThreeDMInstance) -> GadgetOutput:
    lay, reg, unreg, p = _hybrid_registered(src, 2)
    inst = ControlInstance(Election(lay.names, reg.votes), tuple(unreg.votes), src.k, "crv", p, HYBRID)
    return GadgetOutput(inst, {**lay.provenance(), **reg.provenance("voters"),
                               **unreg.provenance("unregistered")})


def _epbm_sides(g: WeightedMultigraph) -> int:
    if g.n % 2:
        raise ValueError("graph needs equal sides: vertices 0..n-1 and n..2n-1")
    n = g.n // 2
    for u, v, _, _ in g.edges:
        if (u < n) == (v < n):
            raise ValueError(f"edge ({u}, {v}) does not join the two sides")
    return n


def _firstlast_core(g: WeightedMultigraph, k: int):
    n = _epbm_sides(g)
    if not 0 <= k < n + 2:
        raise ValueError("need 0 <= k < n + 2")
    lay = _Layout()
    p = lay.add("p", "preferred")
    a = [lay.add(f"a{i + 1}", "left") for i in range(n)]
    b = [lay.add(f"b{i + 1}", "right") for i in range(n)]
    edges = []
    for u, v, _, red in g.edges:
        i, j = (u, v - n) if u < n else (v, u - n)
        dummies = [lay.add(f"d{t + 1}_{len(edges) + 1}", "dummy") for t in range(n + 1)]
        edges.append((i, j, red, dummies))
    voters = _Voters()
    for i in range(n):
        voters.add(lay.ranking((a[i],), (b[i],)), "vertex")
    for e_idx, (i, j, red, dummies) in enumerate(edges):
        chain = [b[j], *(dummies if red else dummies[:n]), a[i], b[j]]
        for first, last in zip(chain, chain[1:]):
            voters.add(lay.ranking((first,), (last,)), f"edge{e_idx + 1}")
    return lay, voters, p, n


def gadget_firstlast_cm_from_epbm(g: WeightedMultigraph, k: int) -> GadgetOutput:
    lay, voters, p, n = _firstlast_core(g, k)
    inst = ManipulationInstance(Election(lay.names, voters.votes), n * (n + 1) + k, p, FIRST_LAST)
    return GadgetOutput(inst, {**lay.provenance(), **voters.provenance("voters")})


def gadget_firstlast_cb_from_epbm(g: WeightedMultigraph, k: int) -> GadgetOutput:
    lay, voters, p, n = _firstlast_core(g, k)
    r, r_hat = lay.add("r", "reserve"), lay.add("r_hat", "reserve")
    budget = n * (n + 1) + k
    # earlier votes gain r and r_hat in their free middle segment
    voters.votes = [(v[0], *v[1:-1], r, r_hat, v[-1]) for v in voters.votes]
    voters.add(lay.ranking((r,), (r_hat,)), "reserve", budget)
    inst = BriberyInstance(Election(lay.names, voters.votes), budget, p, FIRST_LAST)
    return GadgetOutput(inst, {**lay.provenance(), **voters.provenance("voters")})


# --- score identities --------------------------------------------------------

def _role(out: GadgetOutput, key: str) -> tuple[int, ...]:
    return out.provenance.get(key, ())


def _scores_of(e: Election, rule, votes=None) -> list[int]:
    if votes is None:
        votes = e.votes
    if rule is HYBRID:
        return list(tally(e.m, votes, hybrid_vector(e.m)))
    return [scores(e.with_votes(votes), rule)[c] for c in range(e.m)]


def _all_equal(values, target) -> bool:
    return all(v == target for v in values)


def score_identities(gadget_id: str, out: GadgetOutput, k: int) -> dict[str, bool]:
    """Exact score identities that each construction is designed to satisfy.
    ``k`` is the 3DM size; the first-last checks ignore it."""
    inst = out.instance
    e = election_of(inst)
    rule = inst.rule
    el = _role(out, "candidates.element")
    checks: dict[str, bool] = {}
    if gadget_id == "4approval_cm":
        s = _scores_of(e, rule)
        checks["p = 3k"] = s[inst.preferred] == 3 * k
        checks["element = 4k-1"] = _all_equal((s[c] for c in el), 4 * k - 1)
        checks["padding = 4k-4"] = _all_equal((s[c] for c in _role(out, "candidates.padding")), 4 * k - 4)
    elif gadget_id == "3approval_xcav":
        s = _scores_of(e, rule)
        checks["p = 1"] = s[inst.preferred] == 1
        checks["element = 0"] = _all_equal((s[c] for c in el), 0)
    elif gadget_id == "3veto_cb":
        s = _scores_of(e, rule)
        block = (inst.preferred, *_role(out, "candidates.partner"))
        checks["p block = -k-4"] = _all_equal((s[c] for c in block), -k - 4)
        checks["element = -3"] = _all_equal((s[c] for c in el), -3)
    elif gadget_id == "3approval_cb":
        s = _scores_of(e, rule)
        checks["element = k+2"] = _all_equal((s[c] for c in el), k + 2)
        checks["p = 1"] = s[inst.preferred] == 1
    elif gadget_id in ("hybrid_cav", "hybrid_crv"):
        votes = list(e.votes)
        if gadget_id == "hybrid_crv":
            # one copy of each duplicated vote has to be replaced
            for i in _role(out, "voters.x")[1::2]:
                votes[i] = None
            votes = [v for v in votes if v is not None]
        s = _scores_of(e, rule, votes)
        checks["p = m+2"] = s[inst.preferred] == e.m + 2
        checks["element = m+3"] = _all_equal((s[c] for c in el), e.m + 3)
        checks["dummy < -1"] = all(s[c] < -1 for c in _role(out, "candidates.dummy"))
    elif gadget_id in ("firstlast_cm", "firstlast_cb"):
        vertex = [e.votes[i] for i in _role(out, "voters.vertex")]
        s = _scores_of(e, rule, vertex)
        left, right = set(_role(out, "candidates.left")), set(_role(out, "candidates.right"))
        checks["vertex voters +1/-1/0"] = all(
            s[c] == (1 if c in left else -1 if c in right else 0) for c in range(e.m))
        blocks = [key for key in out.provenance if key.startswith("voters.edge")]
        checks["edge blocks zero-sum"] = all(
            not any(_scores_of(e, rule, [e.votes[i] for i in out.provenance[key]])) for key in blocks)
        if gadget_id == "firstlast_cb":
            r, r_hat = _role(out, "candidates.reserve")
            reserve = _scores_of(e, rule, [e.votes[i] for i in _role(out, "voters.reserve")])
            checks["reserve block"] = (reserve[r] == inst.limit and reserve[r_hat] == -inst.limit)
    else:
        raise KeyError(gadget_id)
    return checks


# --- sources and oracles -----------------------------------------------------

def epbm_by_enumeration(g: WeightedMultigraph, k: int) -> bool:
    """Enumerate bijections between the two sides of the layout used by the
    first-last gadgets and count red edges."""
    n = _epbm_sides(g)
    edge_kinds: dict[tuple[int, int], set] = {}
    for u, v, _, red in g.edges:
        i, j = (u, v - n) if u < n else (v, u - n)
        edge_kinds.setdefault((i, j), set()).add(bool(red))
    for perm in itertools.permutations(range(n)):
        options = [edge_kinds.get((i, perm[i])) for i in range(n)]
        if any(o is None for o in options):
            continue
        lo = sum(1 for o in options if o == {True})
        hi = sum(1 for o in options if True in o)
        if lo <= k <= hi:
            return True
    return False


def random_epbm(n: int, seed: int, planted: bool) -> tuple[WeightedMultigraph, int]:
    """Random bipartite graph on sides ``0..n-1`` and ``n..2n-1`` with random
    red marks.  ``planted`` inserts a perfect matching and sets ``k`` to its
    red count, so the answer is yes."""
    rng = random.Random(seed)
    pairs = set()
    for i in range(n):
        for j in range(n):
            if rng.random() < 0.5:
                pairs.add((i, j))
    k = rng.randint(0, n)
    if planted:
        perm = list(range(n))
        rng.shuffle(perm)
        pairs |= {(i, perm[i]) for i in range(n)}
    edges = [(i, n + j, 1, rng.random() < 0.5) for i, j in sorted(pairs)]
    if planted:
        k = sum(1 for i, j, _, red in edges if j - n == perm[i] and red)
    return WeightedMultigraph(2 * n, tuple(edges)), k


@dataclass(frozen=True)
class GadgetSpec:
    source: str  # "3dm" or "epbm"
    build: Callable
    solve: Callable[[ProblemInstance], bool]


def _cm(inst):
    return solve_cm_exact(inst)[0]


def _cb(inst):
    return solve_cb_exact(inst)[0]


def _ctl(inst):
    return solve_control_exactsearch(inst)[0]


GADGETS: dict[str, GadgetSpec] = {
    "4approval_cm": GadgetSpec("3dm", gadget_4approval_cm, _cm),
    "3approval_xcav": GadgetSpec("3dm", gadget_3approval_xcav, _ctl),
    "3veto_cb": GadgetSpec("3dm", gadget_3veto_cb, _cb),
    "3approval_cb": GadgetSpec("3dm", gadget_3approval_cb, _cb),
    "hybrid_cav": GadgetSpec("3dm", gadget_hybrid_cav, _ctl),
    "hybrid_crv": GadgetSpec("3dm", gadget_hybrid_crv, _ctl),
    "firstlast_cm": GadgetSpec("epbm", gadget_firstlast_cm_from_epbm, _cm),
    "firstlast_cb": GadgetSpec("epbm", gadget_firstlast_cb_from_epbm, _cb),
}


@dataclass
class VerifyReport:
    gadget: str
    trials: int = 0
    passed: int = 0
    yes: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.trials

    def summary(self) -> str:
        line = f"{self.gadget}: {self.passed}/{self.trials} pass ({self.yes} yes-instances)"
        if self.failures:
            line += "\n" + self.failures[0]
        return line


def trial_source(gadget_id: str, seed: int, trial: int, planted: bool | None = None):
    """Deterministic source instance for one verification trial.

    Trials alternate between sizes 2 and 3 and, unless ``planted`` is given,
    between planted and unplanted sources.  Unplanted 3DM sources of size 3
    are drawn among no-instances, since random restricted instances that
    small almost always have a perfect matching.
    """
    entry = GADGETS[gadget_id]
    size = 2 + trial % 2
    if planted is None:
        planted = (trial // 2) % 2 == 0
    sub = random.Random(f"{seed}:{gadget_id}:{trial}").randrange(2**32)
    if entry.source == "3dm":
        if not planted and size == 3:
            return gen_restricted_no(size, sub), planted
        return gen_restricted(size, sub, planted=planted), planted
    return random_epbm(size, sub, planted), planted


def verify_one(gadget_id: str, source) -> tuple[bool, str]:
    """Build, solve both sides and check identities; returns (ok, detail)."""
    entry = GADGETS[gadget_id]
    if entry.source == "3dm":
        expected = solve_3dm(source)[0]
        out = entry.build(source)
        k = source.k
    else:
        g, k = source
        expected = epbm_by_enumeration(g, k)
        out = entry.build(g, k)
    got = entry.solve(out.instance)
    problems = []
    if got != expected:
        problems.append(f"decision mismatch: source {expected}, gadget {got}")
    if not check_provenance(out):
        problems.append("provenance does not partition candidates and voters")
    for name, ok in score_identities(gadget_id, out, k).items():
        if not ok:
            problems.append(f"score identity failed: {name}")
    return not problems, "; ".join(problems) if problems else ("yes" if got else "no")


def verify_gadget(gadget_id: str, trials: int, seed: int, planted: bool | None = None) -> VerifyReport:
    if gadget_id not in GADGETS:
        raise KeyError(f"unknown gadget {gadget_id!r}")
    report = VerifyReport(gadget_id)
    for t in range(trials):
        source, _ = trial_source(gadget_id, seed, t, planted)
        ok, detail = verify_one(gadget_id, source)
        report.trials += 1
        if ok:
            report.passed += 1
            report.yes += detail == "yes"
        elif not report.failures:
            report.failures.append(f"trial {t}: {detail}\nsource: {source!r}")
    return report
