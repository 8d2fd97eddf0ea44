import itertools

import pytest

from conformant.bribery import certifies as bribery_certifies
from conformant.bribery import solve_cb_exact
from conformant.core import scores
from conformant.matching import WeightedMultigraph, exact_perfect_bipartite_matching
from conformant.reductions import (GADGETS, check_provenance, election_of, epbm_by_enumeration,
                                   gadget_3approval_cb, gadget_3approval_xcav, gadget_3veto_cb,
                                   gadget_4approval_cm, gadget_firstlast_cb_from_epbm,
                                   gadget_firstlast_cm_from_epbm, gadget_hybrid_crv,
                                   gadget_hybrid_cav, random_epbm, score_identities, trial_source,
                                   verify_gadget, verify_one)
from conformant.threedm import RestrictedThreeDMInstance, ThreeDMInstance, gen_restricted
from oracles import naive_scores

K2 = RestrictedThreeDMInstance(2, tuple(t for t in itertools.product(range(2), repeat=3)
                                        if t not in ((0, 0, 0), (1, 1, 1))))
GRAPH = WeightedMultigraph(4, ((0, 2, 1, True), (1, 3, 1, False)))


def sizes(out):
    inst = out.instance
    e = election_of(inst)
    extra = len(inst.unregistered) if hasattr(inst, "unregistered") else None
    return e.m, e.n, extra


def test_4approval_cm_counts():
    out = gadget_4approval_cm(K2)
    assert sizes(out)[:2] == (25, 30)
    assert out.instance.num_manipulators == 2


def test_3approval_xcav_counts():
    out = gadget_3approval_xcav(K2)
    assert sizes(out) == (9, 1, 6)
    assert out.instance.mode == "xcav" and out.instance.limit == 2


def test_3approval_xcav_single_triple():
    out = gadget_3approval_xcav(ThreeDMInstance(1, ((0, 0, 0),)))
    assert GADGETS["3approval_xcav"].solve(out.instance)


def test_3veto_cb_counts():
    out = gadget_3veto_cb(K2)
    assert sizes(out)[:2] == (9, 12)
    assert out.instance.limit == 2


def test_3approval_cb_counts():
    assert sizes(gadget_3approval_cb(K2))[:2] == (21, 13)


def test_hybrid_counts():
    assert sizes(gadget_hybrid_cav(K2)) == (13, 7, 6)
    out = gadget_hybrid_crv(K2)
    assert sizes(out) == (13, 9, 6) and out.instance.limit == 2


def test_firstlast_counts():
    cm = gadget_firstlast_cm_from_epbm(GRAPH, 1)
    assert sizes(cm)[:2] == (11, 11) and cm.instance.num_manipulators == 7
    cb = gadget_firstlast_cb_from_epbm(GRAPH, 1)
    assert sizes(cb)[:2] == (13, 18) and cb.instance.limit == 7


@pytest.mark.parametrize("build", [gadget_4approval_cm, gadget_3veto_cb, gadget_3approval_cb])
def test_restricted_gadgets_reject_unrestricted_sources(build):
    with pytest.raises(ValueError):
        build(ThreeDMInstance(2, ((0, 0, 0), (1, 1, 1))))


def test_firstlast_gadgets_reject_bad_inputs():
    for build in (gadget_firstlast_cm_from_epbm, gadget_firstlast_cb_from_epbm):
        with pytest.raises(ValueError):
            build(GRAPH, 4)
        with pytest.raises(ValueError):
            build(WeightedMultigraph(4, ((0, 1, 1, False),)), 0)
        with pytest.raises(ValueError):
            build(WeightedMultigraph(3), 0)


def test_score_identities_at_k2():
    out = gadget_4approval_cm(K2)
    s = scores(election_of(out.instance), out.instance.rule)
    prov = out.provenance
    assert s[out.instance.preferred] == 6
    assert {s[c] for c in prov["candidates.element"]} == {7}
    assert {s[c] for c in prov["candidates.padding"]} == {4}

    out = gadget_3veto_cb(K2)
    e = election_of(out.instance)
    s = naive_scores(e.m, e.votes, out.instance.rule)
    assert {s[c] for c in (out.instance.preferred, *out.provenance["candidates.partner"])} == {-6}
    assert {s[c] for c in out.provenance["candidates.element"]} == {-3}

    out = gadget_3approval_cb(K2)
    e = election_of(out.instance)
    s = naive_scores(e.m, e.votes, out.instance.rule)
    assert {s[c] for c in out.provenance["candidates.element"]} == {4}

    out = gadget_hybrid_cav(K2)
    e = election_of(out.instance)
    s = naive_scores(e.m, e.votes, out.instance.rule)
    assert s[out.instance.preferred] == 15
    assert {s[c] for c in out.provenance["candidates.element"]} == {16}


def test_hybrid_crv_scores_after_dropping_duplicates():
    out = gadget_hybrid_crv(K2)
    e = election_of(out.instance)
    drop = set(out.provenance["voters.x"][1::2])
    kept = [v for i, v in enumerate(e.votes) if i not in drop]
    s = naive_scores(e.m, kept, out.instance.rule)
    assert s[out.instance.preferred] == e.m + 2
    assert {s[c] for c in out.provenance["candidates.element"]} == {e.m + 3}


def test_firstlast_vertex_and_edge_blocks():
    out = gadget_firstlast_cm_from_epbm(GRAPH, 1)
    e = election_of(out.instance)
    prov = out.provenance
    s = naive_scores(e.m, [e.votes[i] for i in prov["voters.vertex"]], out.instance.rule)
    for c in range(e.m):
        want = 1 if c in prov["candidates.left"] else -1 if c in prov["candidates.right"] else 0
        assert s[c] == want
    for key in (k for k in prov if k.startswith("voters.edge")):
        assert not any(naive_scores(e.m, [e.votes[i] for i in prov[key]], out.instance.rule))


@pytest.mark.parametrize("gid", list(GADGETS))
def test_identities_and_provenance_on_trial_sources(gid):
    for t in range(8):
        source, _ = trial_source(gid, 3, t)
        if GADGETS[gid].source == "3dm":
            out, k = GADGETS[gid].build(source), source.k
        else:
            out, k = GADGETS[gid].build(*source), source[1]
        assert check_provenance(out)
        assert all(score_identities(gid, out, k).values())


def test_provenance_detects_gaps():
    out = gadget_3veto_cb(K2)
    broken = dict(out.provenance)
    broken["voters.triple"] = broken["voters.triple"][1:]
    assert not check_provenance(type(out)(out.instance, broken))


def test_firstlast_bribes_only_touch_reserve_voters():
    for seed in range(12):
        g, k = random_epbm(2, seed, planted=True)
        out = gadget_firstlast_cb_from_epbm(g, k)
        ok, wit = solve_cb_exact(out.instance)
        assert ok
        assert bribery_certifies(out.instance, wit)
        reserve = set(out.provenance["voters.reserve"])
        assert {i for i, _ in wit.changes} <= reserve


def test_epbm_enumeration_agrees_with_solver():
    for seed in range(60):
        for n in (1, 2, 3):
            g, k = random_epbm(n, seed, seed % 2 == 0)
            assert epbm_by_enumeration(g, k) == exact_perfect_bipartite_matching(g, k)


def test_planted_epbm_is_yes():
    for seed in range(30):
        assert epbm_by_enumeration(*random_epbm(3, seed, True))


def test_verify_zero_trials():
    report = verify_gadget("3veto_cb", 0, 1)
    assert report.ok and report.trials == 0 and report.summary().startswith("3veto_cb: 0/0")


def test_verify_4approval_seed7():
    report = verify_gadget("4approval_cm", 20, 7)
    assert report.passed == 20 and 0 < report.yes < 20


def test_verify_planted_3veto_all_yes():
    report = verify_gadget("3veto_cb", 10, 2, planted=True)
    assert report.passed == report.yes == 10


def test_verify_unknown_gadget():
    with pytest.raises(KeyError):
        verify_gadget("nope", 1, 0)


def test_verify_one_reports_mismatch(monkeypatch):
    entry = GADGETS["3veto_cb"]
    monkeypatch.setitem(GADGETS, "3veto_cb", type(entry)(entry.source, entry.build, lambda inst: False))
    ok, detail = verify_one("3veto_cb", gen_restricted(2, 0, planted=True))
    assert not ok and "decision mismatch" in detail
