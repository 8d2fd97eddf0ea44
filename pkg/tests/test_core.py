import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conformant.core import (BORDA, FIRST_LAST, HYBRID, Election, ScoringRule, approval, explicit,
                             extends_by_one, hybrid_vector, is_pure, is_winner, parse_rule, scores,
                             scoring_vector, veto, winners)
from oracles import RULES, naive_scores, naive_vector, random_election

BUILTIN = [approval(k) for k in range(5)] + [veto(k) for k in range(5)] + [BORDA, FIRST_LAST]


@pytest.mark.parametrize("rule,m,expected", [
    (BORDA, 3, (2, 1, 0)),
    (FIRST_LAST, 4, (1, 0, 0, -1)),
    (veto(3), 5, (0, 0, -1, -1, -1)),
    (approval(2), 2, (1, 1)),
    (FIRST_LAST, 1, (0,)),
    (veto(4), 2, (-1, -1)),
])
def test_vector_examples(rule, m, expected):
    assert scoring_vector(rule, m) == expected


def test_parse_rule_names():
    assert parse_rule("borda") == BORDA
    assert parse_rule("3-veto") == veto(3)
    assert parse_rule("2-approval") == approval(2)
    assert parse_rule("first-last") == FIRST_LAST
    assert parse_rule("hybrid") == HYBRID
    with pytest.raises(ValueError):
        parse_rule("condorcet")


def test_vectors_match_definitions():
    for rule in BUILTIN:
        for m in range(1, 21):
            assert list(scoring_vector(rule, m)) == naive_vector(rule, m)


@pytest.mark.parametrize("rule", BUILTIN, ids=str)
def test_builtin_families_are_pure(rule):
    start = 2 if rule == FIRST_LAST else 1
    assert is_pure(rule, 20, start=start)
    for m in range(start, 20):
        assert extends_by_one(scoring_vector(rule, m), scoring_vector(rule, m + 1))


def test_first_last_breaks_purity_only_between_one_and_two():
    assert not extends_by_one(scoring_vector(FIRST_LAST, 1), scoring_vector(FIRST_LAST, 2))
    assert not is_pure(FIRST_LAST, 5)


def test_extends_by_one():
    assert extends_by_one((2, 0), (2, 1, 0))
    assert extends_by_one((1,), (1, 1))
    assert not extends_by_one((2, 0), (3, 1, 0))
    assert not extends_by_one((1, 0), (1, 0))


def test_explicit_family_purity():
    good = explicit([(0,), (1, 0), (2, 1, 0)])
    bad = explicit([(0,), (1, 0), (3, 2, 0)])
    assert is_pure(good, 3)
    assert not is_pure(bad, 3)


def test_hybrid_vector():
    assert hybrid_vector(4) == (7, -1, -1, -1)
    assert hybrid_vector(6) == (9, 0, 0, -1, -1, -1)
    with pytest.raises(ValueError):
        hybrid_vector(3)


def test_single_candidate_scores():
    e = Election(("a",), ((0,),) * 3)
    assert scores(e, approval(1)) == {0: 3}


def test_borda_symmetric_profile():
    e = Election(("a", "b", "c"), ((0, 1, 2), (2, 1, 0)))
    assert scores(e, BORDA) == {0: 2, 1: 2, 2: 2}


def test_no_votes_everyone_wins():
    e = Election(("a", "b", "c"), ())
    assert winners(e, BORDA) == {0, 1, 2}


def test_hybrid_plurality_branch():
    e = Election(tuple("abcd"), ((0, 1, 2, 3), (0, 1, 2, 3), (1, 0, 2, 3)))
    assert winners(e, HYBRID) == {0}


def test_hybrid_scoring_branch():
    e = Election(tuple("abcd"), ((0, 1, 2, 3), (1, 2, 3, 0)))
    assert naive_scores(4, e.votes, HYBRID) == [6, 6, -2, -2]
    assert winners(e, HYBRID) == {0, 1}


def test_election_validation():
    with pytest.raises(ValueError):
        Election(("a", "a"))
    with pytest.raises(ValueError):
        Election(("a", "b"), ((0, 0),))
    with pytest.raises(ValueError):
        Election(("a", "b"), ((0,),))
    with pytest.raises(ValueError):
        Election(())


@pytest.mark.parametrize("rule", BUILTIN, ids=str)
def test_score_conservation(rule):
    rng = random.Random(11)
    for m in range(1, 21):
        e = Election(tuple(f"c{i}" for i in range(m)),
                     tuple(tuple(rng.sample(range(m), m)) for _ in range(rng.randint(0, 9))))
        assert sum(scores(e, rule).values()) == e.n * sum(scoring_vector(rule, m))


def test_winners_match_naive_scoring():
    rng = random.Random(5)
    for trial in range(400):
        rule = RULES[trial % len(RULES)]
        e = random_election(rng, rule)
        s = naive_scores(e.m, e.votes, rule)
        assert winners(e, rule) == {c for c in range(e.m) if s[c] == max(s)}


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 6), st.randoms(use_true_random=False))
def test_winners_nonempty_and_equivariant(m, n, rnd):
    votes = tuple(tuple(rnd.sample(range(m), m)) for _ in range(n))
    e = Election(tuple(f"c{i}" for i in range(m)), votes)
    perm = list(range(m))
    rnd.shuffle(perm)
    renamed = Election(e.names, tuple(tuple(perm[c] for c in v) for v in votes))
    rules = [BORDA, FIRST_LAST, approval(2), veto(1)] + ([HYBRID] if m >= 4 else [])
    for rule in rules:
        w = winners(e, rule)
        assert w
        assert winners(renamed, rule) == {perm[c] for c in w}
        assert all(is_winner(e, rule, c) == (c in w) for c in range(m))


def test_scoring_rule_rejects_bad_family():
    with pytest.raises(ValueError):
        ScoringRule("plurality-ish")
