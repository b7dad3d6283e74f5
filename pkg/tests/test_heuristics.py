import random

import pytest

from conftest import plural
from odvote import dominance as dom
from odvote import heuristics as H
from odvote.election import Bias, Preference, VotingRule, allowed_ballots
from odvote.epistemic import PivotGraph, VoterContext, is_cliqued
from odvote.errors import ConfigError
from odvote.metrics import Metric, Radius

W, B, C, D, E = range(5)
POLL = (29, 26, 22, 17, 6)


def ctx(state, current, order, rule=None, bias=Bias.NONE):
    rule = rule or VotingRule.plurality(len(state))
    return VoterContext(state, current, Preference.from_order(order, bias), rule)


def test_t_pragmatist_example():
    c = ctx(POLL, plural(5, E), [E, C, B, W, D])
    assert H.evaluate_heuristic(H.TPragmatist(2), c) == (plural(5, B),)
    assert H.evaluate_heuristic(H.TPragmatist(3), c) == (plural(5, C),)
    assert H.evaluate_heuristic(H.TPragmatist(4), c) == (plural(5, C),)


def test_leader_rule_example():
    rule = VotingRule.approval(5)
    c = ctx(POLL, (0, 0, 0, 0, 0), [E, D, C, B, W], rule)
    assert H.evaluate_heuristic(H.LeaderRule(), c) == ((0, 1, 1, 1, 1),)


def test_leader_rule_model():
    rule = VotingRule.approval(5)
    g1, g2 = H.build_model(H.LeaderRule(), ctx(POLL, (0,) * 5, [E, D, C, B, W], rule))
    assert g1.edges == {(W, B)}
    assert g2.edges == {(W, x) for x in (B, C, D, E)}


def test_t_star_model():
    struct = H.build_model(H.TStar(3), ctx(POLL, plural(5, E), [E, C, B, W, D]))
    assert struct.k == 1
    assert struct[0] == PivotGraph.star(5, C, [W, B])


def test_t_star_with_one_leader_is_edgeless():
    c = ctx(POLL, plural(5, E), [E, C, B, W, D])
    assert H.build_model(H.TStar(1), c)[0].edges == frozenset()
    # the heuristic still moves to the only leader while nothing is undominated
    assert H.evaluate_heuristic(H.TStar(1), c) == (plural(5, W),)
    assert dom.uod_set(c, H.model_for(H.TStar(1))) == ()


def test_t_star_moves_other_leaders_down_borda():
    rule = VotingRule.borda(4)
    c = ctx((10, 9, 8, 0), (3, 2, 1, 0), [2, 3, 1, 0], rule)
    # leaders {0,1,2}; favourite 2 goes to the top, 0 and 1 to the bottom in their old order
    assert H.evaluate_heuristic(H.TStar(3), c) == ((1, 0, 3, 2),)


def test_not_last():
    struct = H.build_model(H.NotLast(), ctx(POLL, plural(5, E), [E, D, C, B, W]))
    assert struct.k == 1 and len(struct[0].edges) == 10 and is_cliqued(struct)
    assert H.evaluate_heuristic(H.NotLast(), ctx(POLL, plural(5, E), [E, D, C, B, W])) == ()
    out = H.evaluate_heuristic(H.NotLast(), ctx(POLL, plural(5, W), [E, D, C, B, W]))
    assert set(out) == {plural(5, x) for x in (B, C, D, E)}


def test_local_dominance_example(five_cand):
    state, _, prefs, rule = five_cand
    c = VoterContext(state, plural(5, E), prefs, rule)
    h = H.LocalDominance(Metric.emd(), Radius.percent(3))
    # only w and b can win inside 3%; voting b beats voting e there
    assert H.evaluate_heuristic(h, c) == (plural(5, B),)
    assert H.build_model(h, c)[0].edges == {(W, B)}


def test_truth_bias_moves_to_truthful_when_nothing_at_stake():
    rule = VotingRule.plurality(3)
    h = H.TruthBiasLD(Metric.emd(), Radius.votes(0, 12), Radius.votes(1, 12))
    c = ctx((10, 1, 1), (0, 1, 0), [2, 1, 0], rule, Bias.TRUTH)
    assert H.evaluate_heuristic(h, c) == ((0, 0, 1),)
    lazy = H.LazyBiasLD(Metric.emd(), Radius.votes(0, 12), Radius.votes(1, 12))
    c = ctx((10, 1, 1), (0, 1, 0), [2, 1, 0], rule, Bias.LAZY)
    assert H.evaluate_heuristic(lazy, c) == ((0, 0, 0),)


def test_truth_bias_keeps_vote_when_it_matters():
    rule = VotingRule.plurality(3)
    h = H.TruthBiasLD(Metric.emd(), Radius.votes(0, 12), Radius.votes(2, 12))
    # voting 1 can stop 0 within two relocated votes; the favourite 2 cannot win
    c = ctx((6, 5, 1), (0, 1, 0), [2, 1, 0], rule, Bias.TRUTH)
    assert H.evaluate_heuristic(h, c) == ()


def test_radius_order_enforced():
    with pytest.raises(ConfigError):
        H.TruthBiasLD(Metric.emd(), Radius.percent(3), Radius.percent(3))


def test_rule_mismatch():
    with pytest.raises(ConfigError):
        H.validate(H.LeaderRule(), VotingRule.plurality(3))
    with pytest.raises(ConfigError):
        H.validate(H.NotLast(), VotingRule.veto(3))
    H.validate(H.TStar(2), VotingRule.borda(4))


def test_point_heuristics():
    rng = random.Random(3)
    kinds = [H.TPragmatist(2), H.TStar(3), H.LocalDominance(Metric.emd(), Radius.percent(20))]
    rule = VotingRule.plurality(4)
    for _ in range(200):
        s = tuple(rng.randint(0, 8) for _ in range(4))
        c = VoterContext(s, rng.choice(allowed_ballots(rule)), Preference.from_order(rng.sample(range(4), 4)), rule)
        for k in kinds:
            assert len(H.evaluate_heuristic(k, c)) <= 1


def test_t_pragmatist_can_be_dominated():
    from odvote.suites import t_pragmatist_witness

    res = t_pragmatist_witness(contexts=500)
    assert res.passed
    w = res.counterexamples[0]
    rule = VotingRule.borda(4)
    c = VoterContext(w["state"], w["current"], Preference.from_order(w["prefs"]), rule)
    struct = H.build_model(H.TPragmatist(w["T"]), c)
    assert dom.od_check(w["dominated_by"], w["pragmatist"], c.prefs, struct).dominates


def test_t_star_justified_on_plurality_and_approval():
    from odvote.suites import justify_t_star

    res = justify_t_star(per_rule=200, rules=(("plurality", 4), ("approval", 4)))
    assert res.passed


def test_justification_report_records_counterexample():
    rule = VotingRule.plurality(3)
    c = ctx((0, 0, 0), (0, 0, 1), [0, 1, 2], rule)
    rep = H.check_justification(H.NotLast(), [c])
    assert rep.condition_I and not rep.condition_II
    state, current, h, uod, failed = rep.counterexamples[0]
    assert uod == ((1, 0, 0),) and "II" in failed
