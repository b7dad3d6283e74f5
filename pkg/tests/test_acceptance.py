"""Exit criteria, one test each; a summary line per criterion is printed at the end."""

import itertools
import statistics
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, NAMES, plural
from odvote import dominance as dom
from odvote import suites
from odvote.cli import main
from odvote.election import Preference, VotingRule, allowed_ballots, outcome, score_order
from odvote.epistemic import (
    DistanceBased,
    InformationStructure,
    PivotGraph,
    PivotGraphStructure,
    VoterContext,
    is_upward_closed,
    structure_graphs,
)
from odvote.metrics import Metric, Radius

pytestmark = pytest.mark.acceptance


class Criterion:
    def __init__(self, n, title, limit):
        self.n, self.title, self.limit = n, title, limit
        self.notes = []

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        ok = exc_type is None and dt < self.limit
        why = "" if exc_type is None else f" ({exc_type.__name__}: {str(exc).splitlines()[0][:160] if str(exc) else ''})"
        extra = "; ".join(self.notes)
        ACCEPTANCE[self.n] = f"[{'PASS' if ok else 'FAIL'}] {self.n:2d}. {self.title} ({dt:.1f}s){why}" + (f" :: {extra}" if extra else "")
        print(ACCEPTANCE[self.n])
        if exc_type is None and dt >= self.limit:
            raise AssertionError(f"took {dt:.1f}s, limit {self.limit}s")
        return False

    def note(self, text):
        self.notes.append(text)


def edge_names(g):
    return {NAMES[u] + NAMES[v] for u, v in g.edges}


def test_01_example_regression():
    with Criterion(1, "example state: every ballot elects w, empty pivot graph", 1):
        s = (29, 25, 22, 17, 6)
        rule = VotingRule.plurality(5)
        assert {outcome(s, a, rule) for a in allowed_ballots(rule)} == {0}
        g = structure_graphs(InformationStructure.explicit({s}), rule)[0]
        assert g.edges == frozenset()


def test_02_level_structure(five_cand):
    with Criterion(2, "four-level EMD structure edge sets", 30):
        state, info, _, rule = five_cand
        graphs = structure_graphs(info, rule)
        levels = [edge_names(g) for g in graphs]
        for lo, hi in zip(levels, levels[1:]):
            assert lo < hi or lo == hi == set()
        first = next(lv for lv in levels if lv)
        assert first == {"wb"}
        assert levels[2] == {"wb", "wc", "bc"}
        assert "bd" in levels[3] and "de" not in levels[3]
        assert levels[3] == {"wb", "wc", "wd", "we", "bc", "bd", "be", "cd", "ce"}
        assert is_upward_closed(graphs, order=score_order(state)).holds


def test_03_dominance_facts(five_cand):
    with Criterion(3, "c over e at level 3, b over all at level 2, UOD = {b}", 1):
        state, info, prefs, rule = five_cand
        graphs = structure_graphs(info, rule)
        v = dom.od_check(plural(5, 2), plural(5, 4), prefs, graphs)
        assert v.dominates and v.level == 3
        for x in (0, 2, 3, 4):
            v = dom.od_check(plural(5, 1), plural(5, x), prefs, graphs)
            assert v.dominates and v.level == 2
        model = DistanceBased(Metric.emd(), [Radius.percent(p) for p in (1, 3, 7, 17)])
        ctx = VoterContext(state, plural(5, 4), prefs, rule)
        assert dom.uod_set(ctx, model) == (plural(5, 1),)


def test_04_partial_order():
    with Criterion(4, "partial order over 10^4 random instances", 300) as c:
        r = suites.lemma_partial_order(trials=10_000, seed=0)
        c.note(f"violations={r.failures}")
        assert r.passed, r.counterexamples[:3]


def test_05_oracle_equivalence():
    with Criterion(5, "graph check equals set oracle on SPP structures (m=3, n<=6)", 600) as c:
        r = suites.oracle_equivalence(m=3, max_n=6, radii_votes=(0, 1, 2))
        c.note(f"comparisons={r.trials} structures={r.details['structures']} disagreements={r.failures}")
        assert r.passed, r.counterexamples[:3]


def test_06_full_information():
    with Criterion(6, "full information equals better/best response and Nash", 120) as c:
        r = suites.obs_nash(max_m=3, max_n=5)
        c.note(f"checks={r.trials} mismatches={r.failures}")
        assert r.passed, r.counterexamples[:3]


def test_07_justification():
    with Criterion(7, "heuristic justification suites (a)-(e)", 900) as c:
        parts = {
            "a": suites.justify_not_last(max_m=4),
            "b": suites.justify_local_dominance(m_values=(3, 4), max_n=8, radii=(1, 2)),
            "c-truth": suites.justify_bias(False, m_values=(3, 4), max_n=8),
            "c-lazy": suites.justify_bias(True, m_values=(3, 4), max_n=8),
            "d": suites.justify_t_star(per_rule=1000),
            "e": suites.t_pragmatist_witness(contexts=2000),
        }
        for key, r in parts.items():
            c.note(f"{key}:{'ok' if r.passed else 'FAIL'}({r.failures}/{r.trials})")
        failed = {k: r.counterexamples[:1] for k, r in parts.items() if not r.passed}
        assert not failed, failed


def test_08_leader_rule():
    with Criterion(8, "leader-rule ballot dominates all 31 others (120 orders x 100 states)", 300) as c:
        r = suites.leader_rule_totality(m=5, states=100)
        c.note(f"checks={r.trials} failures={r.failures}")
        assert r.passed and r.trials == 120 * 100


def test_09_topology():
    with Criterion(9, "l-inf/candidate-wise cliqued, EMD/l1 upward closed (n<=30, m<=4, r<=4)", 600) as c:
        r = suites.metric_topology(m_values=(2, 3, 4), max_n=30, max_radius=4)
        c.note(f"structures={r.trials} failures={r.failures}")
        assert r.passed, r.counterexamples[:3]


def test_10_convergence():
    with Criterion(10, "convergence suites (a)-(d)", 1800) as c:
        parts = {
            "a": suites.thm_converge("plurality", trials=1000),
            "b": suites.thm_converge("veto", trials=1000),
            "c-plurality": suites.adversarial("plurality"),
            "c-veto": suites.adversarial("veto"),
            "d": suites.negative_control(),
        }
        for key, r in parts.items():
            c.note(f"{key}:{'ok' if r.passed else 'FAIL'}({r.failures}/{r.trials})")
        for key in ("a", "b"):
            per = parts[key].details["per_policy"]
            c.note(f"{key} cycles per policy: " + ",".join(f"{p}={v['cycles']}" for p, v in per.items()))
        failed = {k: r.counterexamples[:1] for k, r in parts.items() if not r.passed}
        assert not failed, failed


def test_11_spp_scan():
    with Criterion(11, "SPP holds in >= 99% of 100 samples per m at n=500", 1200) as c:
        r = suites.thm_spp(samples=100, m_values=(3, 4, 5), n=500)
        c.note(f"rates={r.details['hold_rate']} unconfirmed={r.details['unconfirmed_or_capped']}")
        assert r.passed, r.counterexamples[:3]


def complete_structure(m, k):
    g = PivotGraph.complete(m)
    return PivotGraphStructure((g,) * k)


def test_12_performance():
    with Criterion(12, "od_check time linear in m^2 k within 2x", 300) as c:
        rng = np.random.default_rng(0)
        times = {}
        for m in (5, 10, 20, 40):
            prefs = Preference.from_order(rng.permutation(m).tolist())
            for k in (1, 2, 4, 8):
                struct = complete_structure(m, k)
                struct.edge_arrays()
                a_new = tuple(int(x) for x in rng.permutation(m))
                a_cur = tuple(int(x) for x in rng.permutation(m))
                reps = []
                for _ in range(7):
                    t = time.perf_counter()
                    for _ in range(200):
                        dom.od_check(a_new, a_cur, prefs, struct)
                    reps.append((time.perf_counter() - t) / 200)
                times[m * m * k] = statistics.median(reps)
        xs = sorted(times)
        worst = max(
            (times[x2] / times[x1]) / (x2 / x1) for x1, x2 in itertools.combinations(xs, 2)
        )
        c.note(f"worst growth / linear growth = {worst:.3f}; t(25)={times[25]*1e6:.1f}us t(12800)={times[12800]*1e6:.1f}us")
        assert worst <= 2.0


def test_13_determinism(tmp_path):
    from pathlib import Path
    import shutil

    with Criterion(13, "repeated commands give byte-identical files", 120):
        src = Path(__file__).resolve().parent.parent / "configs"
        for f in src.iterdir():
            shutil.copy(f, tmp_path / f.name)
        cmds = [
            ["derive", "--config", str(tmp_path / "five-candidates.yaml")],
            ["run", "--config", str(tmp_path / "small-run.yaml")],
            ["run", "--config", str(tmp_path / "batch-plurality.yaml"), "--seed", "3"],
            ["verify", "lemma-partial-order", "--seed", "1", "--trials", "300"],
        ]
        for i, cmd in enumerate(cmds):
            outs = []
            for rep in range(2):
                d = tmp_path / f"out{i}-{rep}"
                assert main(cmd + ["--out", str(d)]) == 0
                outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
            assert outs[0] == outs[1] and outs[0]
