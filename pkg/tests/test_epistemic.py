import itertools
from fractions import Fraction

import pytest

from conftest import NAMES
from odvote.election import Preference, VotingRule, score_order, winner
from odvote.epistemic import (
    CliqueClosure,
    DistanceBased,
    FixedGraphs,
    FullInformation,
    InformationStructure,
    PivotGraph,
    PivotGraphStructure,
    VoterContext,
    derive_structure,
    is_cliqued,
    is_upward_closed,
    pivot_graph,
    spp_check,
    spp_scan,
    spp_witness,
    structure_graphs,
)
from odvote.errors import StructuralError
from odvote.metrics import Metric, Radius


def edges(struct):
    return [{NAMES[u] + NAMES[v] for u, v in g.edges} for g in struct]


def brute_pivot(states, rule):
    """Pairs of candidates both reachable as winners from one state."""
    out = set()
    for s in states:
        ws = {winner(tuple(x + y for x, y in zip(s, a))) for a in rule.ballots()}
        out |= {(min(c, d), max(c, d)) for c in ws for d in ws if c != d}
    return out


def test_singleton_pivot_graph():
    rule = VotingRule.plurality(3)
    info = InformationStructure.explicit({(5, 5, 0)})
    assert structure_graphs(info, rule)[0].edges == {(0, 1)}
    assert brute_pivot([(5, 5, 0)], rule) == {(0, 1)}


def test_example_state_has_empty_graph():
    info = InformationStructure.explicit({(29, 25, 22, 17, 6)})
    assert structure_graphs(info, VotingRule.plurality(5))[0].edges == frozenset()


def test_pivot_graph_witnesses():
    rule = VotingRule.plurality(3)
    info = InformationStructure.explicit({(5, 5, 0), (2, 0, 2)})
    g, wit = pivot_graph(info.levels[0], rule, witnesses=True)
    assert g.edges == {(0, 1), (0, 2)}
    for (c, d), (s, ac, ad) in wit.items():
        assert winner(tuple(x + y for x, y in zip(s, ac))) == c
        assert winner(tuple(x + y for x, y in zip(s, ad))) == d


def test_five_candidate_levels(five_cand):
    _, info, _, rule = five_cand
    got = edges(structure_graphs(info, rule))
    assert got == [
        set(),
        {"wb"},
        {"wb", "wc", "bc"},
        {"wb", "wc", "wd", "we", "bc", "bd", "be", "cd", "ce"},
    ]


def test_five_candidate_levels_against_enumeration(five_cand):
    _, info, _, rule = five_cand
    mat = info.materialize()
    for j, g in enumerate(structure_graphs(info, rule)):
        states = [tuple(s) for s in mat.states[mat.level <= j].tolist()]
        assert set(g.edges) == brute_pivot(states, rule)


def test_five_candidate_topology(five_cand):
    state, info, _, rule = five_cand
    graphs = structure_graphs(info, rule)
    assert is_cliqued(PivotGraphStructure(tuple(graphs)[:3]))
    assert not is_cliqued(graphs)
    assert is_upward_closed(graphs, order=score_order(state)).holds


def test_nesting_is_enforced():
    g1 = PivotGraph(3, frozenset({(0, 1)}))
    g2 = PivotGraph(3, frozenset({(1, 2)}))
    with pytest.raises(StructuralError):
        PivotGraphStructure((g1, g2))


def test_derive_structure_models(five_cand):
    state, _, prefs, rule = five_cand
    ctx = VoterContext(state, (0, 0, 0, 0, 1), prefs, rule)
    model = DistanceBased(Metric.emd(), [Radius.percent(p) for p in (1, 3, 7, 17)])
    assert edges(derive_structure(model, ctx))[1] == {"wb"}
    full = derive_structure(FullInformation(), ctx)
    assert full.k == 1 and full[0].edges == frozenset()
    closed = derive_structure(CliqueClosure(model), ctx)
    assert is_cliqued(closed)
    assert len(closed[3].edges) == 10
    fixed = FixedGraphs(PivotGraphStructure((PivotGraph.complete(5),)))
    assert derive_structure(fixed, ctx)[0] == PivotGraph.complete(5)


def test_context_from_poll_subtracts_own_ballot():
    prefs = Preference.from_order(range(5))
    ctx = VoterContext.from_poll((29, 26, 22, 17, 6), (0, 0, 0, 0, 1), prefs, VotingRule.plurality(5))
    assert ctx.state == (29, 26, 22, 17, 5)
    assert ctx.poll == (29, 26, 22, 17, 6)


def test_spp_singleton_violation():
    rule = VotingRule.plurality(3)
    info = InformationStructure.explicit({(5, 5, 0)})
    rep = spp_check(info, rule)
    assert not rep.holds
    assert all(v.edge in ((0, 1), (1, 0)) for v in rep.violations)
    v = rep.violations[0]
    assert spp_witness(info, rule, v.level, v.edge, v.pair) is None


def all_states(m, total):
    return {s for s in itertools.product(range(total + 1), repeat=m) if sum(s) == total}


@pytest.mark.parametrize("m, total", [(3, 6), (3, 9), (4, 4), (4, 6)])
def test_spp_on_all_states_holds(m, total):
    assert spp_check(InformationStructure.explicit(all_states(m, total)), VotingRule.plurality(m)).holds


@pytest.mark.parametrize("m, total, count", [(3, 3, 6), (3, 5, 2), (4, 3, 12)])
def test_spp_on_all_states_small_totals(m, total, count):
    # too few votes for a state with two tied leaders and a trailing third
    rep = spp_check(InformationStructure.explicit(all_states(m, total)), VotingRule.plurality(m))
    assert rep.count == count
    info = InformationStructure.explicit(all_states(m, total))
    for v in rep.violations:
        assert spp_witness(info, VotingRule.plurality(m), v.level, v.edge, v.pair) is None


def test_spp_scan_uniform():
    (entry,) = spp_scan([Fraction(1, 3)] * 3, [30], Metric.emd(), [Radius.percent(10)], VotingRule.plurality(3))
    assert entry.state == (10, 10, 10)
    assert entry.holds


def test_spp_gap_at_radius_boundary():
    # s(w) - s(b) = 2 = 2 * (1 vote): one relocated vote reaches a tie only with help from the ballot
    rule = VotingRule.plurality(3)
    info = InformationStructure.concentric(Metric.emd(), (12, 10, 7), [Radius.votes(1, 29)])
    assert structure_graphs(info, rule)[0].edges == {(0, 1)}
    rep = spp_check(info, rule)
    assert not rep.holds
    for v in rep.violations:
        assert spp_witness(info, rule, v.level, v.edge, v.pair) is None


def test_upward_closed_example():
    g = PivotGraphStructure((PivotGraph(3, frozenset({(1, 2)})),))
    assert not is_upward_closed(g, order=(0, 1, 2)).holds
    # some order works: put 1 and 2 first
    rep = is_upward_closed(g)
    assert rep.holds and set(rep.witness_order[:2]) == {1, 2}


def test_cliqued_implies_upward_closed():
    for m in (3, 4):
        for vs in itertools.chain.from_iterable(itertools.combinations(range(m), k) for k in range(m + 1)):
            s = PivotGraphStructure((PivotGraph.complete(m, vs),))
            assert is_cliqued(s)
            assert is_upward_closed(s).holds


def test_veto_linf_not_cliqued():
    rule = VotingRule.veto(3)
    s = (0, 2, 0)
    info = InformationStructure.concentric(Metric.linf(), s, [Radius.votes(0, 2), Radius.votes(1, 2)])
    graphs = structure_graphs(info, rule)
    assert graphs[1].edges == {(0, 1), (1, 2)}
    assert not is_cliqued(graphs)
    model = CliqueClosure(DistanceBased(Metric.linf(), [Radius.votes(0, 2), Radius.votes(1, 2)]))
    ctx = VoterContext(s, (1, 1, 0), Preference.from_order(range(3)), rule)
    assert is_cliqued(derive_structure(model, ctx))
