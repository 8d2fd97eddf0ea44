import random
from dataclasses import replace

import pytest

from conformant.bribery import (BriberyInstance, BriberyWitness, certifies, solve_bribery_standard,
                                solve_cb_exact, solve_cb_firstlast, solve_cb_fixed_k)
from conformant.core import BORDA, FIRST_LAST, HYBRID, Election, approval, veto
from oracles import RULES, brute_cb, brute_standard_cb, random_election

PA = ("p", "a")


def test_zero_limit_current_winner():
    e = Election(PA, ((1, 0),))
    for solver in (solve_cb_exact, solve_cb_fixed_k):
        assert solver(BriberyInstance(e, 0, 0, BORDA)) == (False, None)
        assert solver(BriberyInstance(e, 0, 1, BORDA)) == (True, BriberyWitness(()))
    assert not solve_cb_firstlast(BriberyInstance(e, 0, 0, FIRST_LAST))


def test_single_bribe_plurality():
    e = Election(PA, ((1, 0), (1, 0), (0, 1)))
    inst = BriberyInstance(e, 1, 0, approval(1))
    ok, wit = solve_cb_fixed_k(inst)
    assert ok and certifies(inst, wit)
    assert wit.apply(e).votes.count((0, 1)) == 2
    assert solve_cb_exact(inst)[0]


def test_limit_above_voter_count_is_capped():
    e = Election(PA, ((1, 0), (0, 1)))
    inst = BriberyInstance(e, 10, 0, approval(1))
    assert inst.effective_limit == 2
    assert solve_cb_exact(inst)[0]


def test_bribe_everyone_to_the_p_first_vote():
    names = tuple("pabc")
    e = Election(names, ((1, 0, 2, 3), (2, 1, 0, 3), (0, 1, 2, 3)))
    for rule in (HYBRID, approval(1)):
        ok, wit = solve_cb_exact(BriberyInstance(e, 3, 0, rule))
        assert ok


def test_everyone_ranks_p_first():
    e = Election(PA, ((0, 1),) * 3)
    assert solve_cb_firstlast(BriberyInstance(e, 2, 0, FIRST_LAST))


def test_certifies_checks_original_multiset():
    e = Election(PA, ((1, 0), (1, 0)))
    inst = BriberyInstance(e, 2, 0, approval(1))
    swap = BriberyWitness(((0, (0, 1)),))
    assert not certifies(inst, swap)
    assert certifies(replace(inst, conformant=False), swap)
    assert not certifies(inst, BriberyWitness(((0, (1, 0)), (0, (1, 0)))))


def test_instance_validation():
    e = Election(PA, ())
    with pytest.raises(ValueError):
        BriberyInstance(e, -1, 0, BORDA)
    with pytest.raises(ValueError):
        BriberyInstance(e, 1, 5, BORDA)


@pytest.mark.parametrize("method", ["auto", "bnb", "enumerate"])
def test_exact_matches_brute_force(method):
    rng = random.Random(51)
    for trial in range(150):
        rule = RULES[trial % len(RULES)]
        e = random_election(rng, rule, max_m=6, max_n=7)
        inst = BriberyInstance(e, rng.randint(0, 3), rng.randrange(e.m), rule)
        ok, wit = solve_cb_exact(inst, method)
        assert ok == brute_cb(inst), inst
        if ok:
            assert certifies(inst, wit)


def test_fixed_k_matches_brute_force():
    rng = random.Random(53)
    for trial in range(200):
        rule = RULES[trial % len(RULES)]
        e = random_election(rng, rule)
        inst = BriberyInstance(e, rng.randint(0, 2), rng.randrange(e.m), rule)
        ok, wit = solve_cb_fixed_k(inst)
        assert ok == brute_cb(inst), inst
        if ok:
            assert certifies(inst, wit)


def test_firstlast_matches_brute_force():
    rng = random.Random(57)
    for _ in range(300):
        e = random_election(rng, FIRST_LAST)
        inst = BriberyInstance(e, rng.randint(0, 3), rng.randrange(e.m), FIRST_LAST)
        assert solve_cb_firstlast(inst) == brute_cb(inst), inst


def test_firstlast_requires_rule():
    with pytest.raises(ValueError):
        solve_cb_firstlast(BriberyInstance(Election(PA, ()), 1, 0, BORDA))


def test_standard_matches_brute_force_and_dominates_conformant():
    rng = random.Random(59)
    rules = [BORDA, FIRST_LAST, approval(2), veto(1), HYBRID]
    for trial in range(100):
        rule = rules[trial % len(rules)]
        e = random_election(rng, rule, max_m=4, max_n=5)
        conf = BriberyInstance(e, rng.randint(0, 2), rng.randrange(e.m), rule)
        std = replace(conf, conformant=False)
        ok, wit = solve_bribery_standard(std)
        assert ok == brute_standard_cb(std), std
        if ok:
            assert certifies(std, wit)
        if solve_cb_exact(conf)[0]:
            assert ok
    with pytest.raises(ValueError):
        solve_bribery_standard(conf)
