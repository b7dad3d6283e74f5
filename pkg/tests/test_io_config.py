import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from odvote.config import build_config, load_config
from odvote.election import Bias, Preference
from odvote.epistemic import PivotGraph, PivotGraphStructure
from odvote.errors import ConfigError, ParseError
from odvote.io import (
    Election,
    Voter,
    parse_election,
    parse_structure_records,
    structure_records,
    to_dot,
    write_election,
)

HEADER = "candidates: w b c d e\n---\n"


def test_strict_line():
    el = parse_election(HEADER + "e>d>c>b>w\n")
    assert el.voters[0].prefs == Preference.from_order([4, 3, 2, 1, 0])
    assert el.voters[0].ballot is None


def test_weak_line_and_ballots():
    el = parse_election("candidates: a b c\npoll: 3 2 1\n---\na=b>c ; c\nc>b>a ; 0 1 0\n")
    assert el.voters[0].prefs.classes() == [(0, 1), (2,)]
    assert el.voters[0].ballot == (0, 0, 1)
    assert el.voters[1].ballot == (0, 1, 0)
    assert el.poll == (3, 2, 1)


@pytest.mark.parametrize(
    "text, needle, line",
    [
        (HEADER + "e>d>c>b\n", "w", 3),
        (HEADER + "e>d>c>b>w>x\n", "'x'", 3),
        (HEADER + "e>d>c>b>e\n", "twice", 3),
        ("candidates: a a b\n---\n", "duplicate", 1),
        ("candidates: a b\n---\na>b ; 1 2 3\n", "2 non-negative", 3),
        ("colour: red\n", "unknown header", 1),
        ("", "empty", 1),
    ],
)
def test_parse_errors(text, needle, line):
    with pytest.raises(ParseError) as exc:
        parse_election(text)
    assert needle in str(exc.value)
    assert exc.value.line == line


def test_parse_error_column():
    with pytest.raises(ParseError) as exc:
        parse_election(HEADER + "e>d>q>b>w\n")
    assert exc.value.column == 5


names = ["a", "b", "c", "d"]


@st.composite
def elections(draw):
    voters = []
    for _ in range(draw(st.integers(0, 5))):
        order = draw(st.permutations(range(4)))
        cuts = draw(st.lists(st.booleans(), min_size=3, max_size=3))
        classes, cur = [], [order[0]]
        for c, cut in zip(order[1:], cuts):
            if cut:
                classes.append(cur)
                cur = []
            cur.append(c)
        classes.append(cur)
        ballot = draw(st.one_of(st.none(), st.tuples(*[st.integers(0, 3)] * 4)))
        voters.append(Voter(Preference.from_classes(classes), ballot))
    poll = draw(st.one_of(st.none(), st.tuples(*[st.integers(0, 50)] * 4)))
    return Election(tuple(names), voters, poll)


def _canon(el):
    return (el.candidates, el.poll, [(v.prefs.classes(), v.ballot) for v in el.voters])


@given(elections())
def test_round_trip(el):
    text = write_election(el)
    again = parse_election(text)
    assert _canon(again) == _canon(el)
    assert write_election(again) == text


def test_dot_and_records():
    g1 = PivotGraph(3, frozenset({(0, 1)}))
    g2 = PivotGraph(3, frozenset({(0, 1), (1, 2)}))
    struct = PivotGraphStructure((g1, g2))
    dot = to_dot(struct, ["x", "y", "z"])
    assert dot.startswith('graph "pivot" {') and dot.rstrip().endswith("}")
    assert dot.count("subgraph") == 2
    assert '"L2_1" -- "L2_2";' in dot
    assert '[label="z"]' in dot
    recs = structure_records(struct, ["x", "y", "z"])
    assert json.loads(recs[1]) == {"kind": "level", "level": 2, "edges": [["x", "y"], ["y", "z"]]}
    assert parse_structure_records(recs, ["x", "y", "z"]) == struct


BASE = {
    "candidates": ["a", "b", "c"],
    "rule": "plurality",
    "metric": "emd",
    "radii": ["10%", "20%"],
    "poll": [4, 3, 2],
    "voter": {"prefs": "c>b>a", "bias": "truth", "ballot": "c"},
}


def test_build_config():
    cfg = build_config(dict(BASE), seed=5)
    assert cfg.seed == 5 and cfg.m == 3
    assert cfg.ballot("b") == (0, 1, 0)
    assert cfg.ballot("1,0,0") == (1, 0, 0)
    p = cfg.preference()
    assert p.order() == (2, 1, 0) and p.bias is Bias.TRUTH
    assert cfg.epistemic_model().radii[1].value * 100 == 20


def test_veto_names_mean_vetoed_candidate():
    cfg = build_config(dict(BASE, rule="veto"))
    assert cfg.ballot("a") == (0, 1, 1)


@pytest.mark.parametrize(
    "patch",
    [
        {"colour": 1},
        {"rule": "condorcet"},
        {"heuristic": "leader-rule"},
        {"heuristic": {"name": "truth-bias", "r1": "5%", "r2": "5%"}},
        {"heuristic": {"name": "t-star"}},
        {"poll": [1, 2]},
        {"scheduler": "psychic"},
        {"radii": []},
        {"candidates": ["a", "a", "b"]},
    ],
)
def test_config_errors(patch):
    with pytest.raises(ConfigError):
        cfg = build_config({**BASE, **patch})
        cfg.epistemic_model()


def test_load_yaml_and_json(tmp_path):
    y = tmp_path / "c.yaml"
    y.write_text("candidates: [a, b]\nrule: veto\n")
    assert load_config(y).rule.name == "veto"
    j = tmp_path / "c.json"
    j.write_text(json.dumps({"m": 3, "rule": {"name": "k-approval", "k": 2}}))
    cfg = load_config(j)
    assert cfg.candidates == ("c0", "c1", "c2") and cfg.rule.name == "2-approval"
    bad = tmp_path / "bad.yaml"
    bad.write_text("candidates: [a, b\n")
    with pytest.raises(ParseError):
        load_config(bad)
