"""Randomised and exhaustive verification suites behind ``odvote verify``."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import dominance as dom
from . import dynamics as dyn
from . import heuristics as H
from .election import Bias, Preference, VotingRule, allowed_ballots, score_order
from .epistemic import (
    FullInformation,
    InformationStructure,
    PivotGraph,
    PivotGraphStructure,
    VoterContext,
    is_cliqued,
    is_upward_closed,
    spp_check,
    spp_scan,
    spp_witness,
    structure_graphs,
)
from .errors import ConfigError
from .io import record
from .metrics import Metric, Radius


@dataclass
class SuiteResult:
    target: str
    passed: bool
    trials: int
    failures: int = 0
    details: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def vacuous(self):
        return self.trials == 0

    def summary(self):
        verdict = "PASS" if self.passed else "FAIL"
        if self.vacuous:
            verdict += " (vacuous: no trials)"
        return f"{self.target}: {verdict} trials={self.trials} failures={self.failures}"

    def records(self):
        out = [
            record(
                "suite",
                target=self.target,
                passed=self.passed,
                vacuous=self.vacuous,
                trials=self.trials,
                failures=self.failures,
                details=self.details,
            )
        ]
        out += [record("counterexample", target=self.target, data=c) for c in self.counterexamples]
        return out


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def strict_orders(m):
    return [Preference.from_order(p) for p in itertools.permutations(range(m))]


def states_with_total(m, total):
    """All non-negative integer m-vectors summing to ``total`` (lexicographic)."""
    if m == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in states_with_total(m - 1, total - first):
            yield (first,) + rest


def random_structure(rng, m, k):
    pairs = list(itertools.combinations(range(m), 2))
    cur = set()
    graphs = []
    for _ in range(k):
        p = rng.choice((0.1, 0.3, 0.6))
        cur |= {e for e in pairs if rng.random() < p}
        graphs.append(PivotGraph(m, frozenset(cur)))
    return PivotGraphStructure(tuple(graphs))


# -- dominance ------------------------------------------------------------------


@_timed
def lemma_partial_order(trials=10_000, seed=0, max_records=10, cross_check_every=10):
    """Transitivity and antisymmetry of the graph dominance relation."""
    rng = random.Random(seed)
    fails = 0
    mismatches = 0
    cex = []
    for t in range(trials):
        kind = rng.choice(("plurality", "veto", "borda"))
        m = rng.randint(2, 4 if kind == "borda" else 5)
        rule = getattr(VotingRule, kind)(m)
        prefs = Preference.from_order(rng.sample(range(m), m), rng.choice(list(Bias)))
        struct = random_structure(rng, m, rng.randint(1, 4))
        ballots = allowed_ballots(rule, prefs.bias is Bias.LAZY)
        D = dom.graph_dominance_matrix(ballots, prefs, struct, rule)
        if t % cross_check_every == 0:
            for i, a in enumerate(ballots):
                for k, b in enumerate(ballots):
                    if i != k and dom.od_check(a, b, prefs, struct, rule).dominates != D[i, k]:
                        mismatches += 1
        Di = D.astype(int)
        intransitive = bool(((Di @ Di > 0) & ~D).any())
        asymmetric_fail = bool((D & D.T).any())
        if intransitive or asymmetric_fail:
            fails += 1
            if len(cex) < max_records:
                cex.append(
                    {
                        "rule": rule.name,
                        "prefs": prefs.order(),
                        "bias": prefs.bias.value,
                        "levels": [g.sorted_edges() for g in struct],
                        "transitivity": not intransitive,
                        "antisymmetry": not asymmetric_fail,
                    }
                )
    return SuiteResult(
        "lemma-partial-order",
        fails == 0 and mismatches == 0,
        trials,
        fails + mismatches,
        {"matrix_vs_check_mismatches": mismatches},
        cex,
    )


@_timed
def oracle_equivalence(m=3, max_n=6, radii_votes=(0, 1, 2), max_records=10):
    """Graph check against the set oracle on every SPP-holding small instance."""
    rule = VotingRule.plurality(m)
    ballots = allowed_ballots(rule)
    orders = strict_orders(m)
    radius_vectors = [
        c for k in range(1, len(radii_votes) + 1) for c in itertools.combinations(radii_votes, k)
    ]
    structures = skipped = comparisons = disagreements = 0
    cex = []
    for n in range(1, max_n + 1):
        metric = Metric.emd(n)
        for s in states_with_total(m, n - 1):
            for rv in radius_vectors:
                if max(rv) >= n:
                    continue
                info = InformationStructure.concentric(metric, s, [Radius.votes(v, n) for v in rv])
                if not spp_check(info, rule).holds:
                    skipped += 1
                    continue
                structures += 1
                graphs = structure_graphs(info, rule)
                for p in orders:
                    for a in ballots:
                        for b in ballots:
                            comparisons += 1
                            g = dom.od_check(a, b, p, graphs).dominates
                            o = dom.od_oracle(a, b, p, info, rule)
                            if g != o:
                                disagreements += 1
                                if len(cex) < max_records:
                                    cex.append({"state": s, "radii": rv, "prefs": p.order(), "a": a, "b": b, "graph": g, "oracle": o})
    return SuiteResult(
        "oracle-equivalence",
        disagreements == 0 and structures > 0,
        comparisons,
        disagreements,
        {"structures": structures, "skipped_non_spp": skipped},
        cex,
    )


@_timed
def obs_nash(max_m=3, max_n=5, seed=0, pref_samples=20, max_records=10):
    """Full information: OD/UOD/equilibrium equal better/best response/Nash."""
    rng = random.Random(seed)
    model = FullInformation()
    trials = fails = 0
    cex = []

    def note(kind, **data):
        nonlocal fails
        fails += 1
        if len(cex) < max_records:
            cex.append({"check": kind, **data})

    for m in range(2, max_m + 1):
        rule = VotingRule.plurality(m)
        for total in range(0, max_n):
            for s in states_with_total(m, total):
                for bias in Bias:
                    for p in strict_orders(m):
                        p = p.with_bias(bias)
                        for a in allowed_ballots(rule, bias is Bias.LAZY):
                            ctx = VoterContext(s, a, p, rule)
                            trials += 1
                            od = set(dom.od_set(ctx, model))
                            br = set(dom.better_responses(ctx))
                            if od != br:
                                note("od-vs-better", state=s, current=a, prefs=p.order(), bias=bias.value, od=sorted(od), better=sorted(br))
                            uod = set(dom.uod_set(ctx, model))
                            best = set(dom.best_responses(ctx))
                            if uod != best:
                                note("uod-vs-best", state=s, current=a, prefs=p.order(), bias=bias.value, uod=sorted(uod), best=sorted(best))
        for n in range(1, max_n + 1):
            ballots = allowed_ballots(rule)
            orders = strict_orders(m)
            all_prefs = len(orders) ** n <= 256
            pref_profiles = (
                list(itertools.product(orders, repeat=n))
                if all_prefs
                else [tuple(rng.choice(orders) for _ in range(n)) for _ in range(pref_samples)]
            )
            for prefs in pref_profiles:
                for profile in itertools.product(ballots, repeat=n):
                    trials += 1
                    eq = dom.is_od_equilibrium(list(profile), prefs, model, rule).is_equilibrium
                    if eq != dom.is_nash(list(profile), prefs, rule):
                        note("equilibrium-vs-nash", profile=profile, prefs=[p.order() for p in prefs])
    return SuiteResult("obs-nash", fails == 0, trials, fails, {}, cex)


# -- heuristics -----------------------------------------------------------------


def _justification_result(target, report, want_strong, extra=None):
    ok = report.condition_I and report.condition_II and (report.strong or not want_strong)
    details = {
        "condition_I": report.condition_I,
        "condition_II": report.condition_II,
        "strong": report.strong,
        "strong_literal": report.strong_literal,
    }
    details.update(extra or {})
    cex = [
        {"state": s, "current": a, "h": h, "uod": u, "failed": list(f)}
        for s, a, h, u, f in report.counterexamples
    ]
    return SuiteResult(target, ok, report.contexts, report.failures, details, cex)


class _Merged(H.JustificationReport):
    def add(self, rep, limit=20):
        self.condition_I &= rep.condition_I
        self.condition_II &= rep.condition_II
        self.strong &= rep.strong
        self.strong_literal &= rep.strong_literal
        self.contexts += rep.contexts
        self.failures += rep.failures
        self.counterexamples.extend(rep.counterexamples[: max(0, limit - len(self.counterexamples))])


@_timed
def justify_not_last(max_m=4):
    rep = _Merged()
    for m in range(2, max_m + 1):
        rule = VotingRule.plurality(m)
        ctxs = [
            VoterContext(s, a, p, rule)
            for p in strict_orders(m)
            for a in allowed_ballots(rule)
            for s in ((0,) * m, (3,) * m, tuple(range(m)))
        ]
        rep.add(H.check_justification(H.NotLast(), ctxs))
    return _justification_result("prop-justify-not-last", rep, want_strong=True)


def _ld_instances(kind_factory, m_values, max_n, radius_sets, metrics_):
    """(kind, context, spp_holds) over exhaustive small Plurality instances."""
    for m in m_values:
        rule = VotingRule.plurality(m)
        for metric_name in metrics_:
            for n in range(2, max_n + 1):
                metric = Metric.emd(n) if metric_name == "emd" else Metric.linf(n)
                for radii in radius_sets:
                    if max(radii) >= n:
                        continue
                    rs = [Radius.votes(v, n) for v in radii]
                    kind = kind_factory(metric, rs)
                    for s in states_with_total(m, n - 1):
                        info = InformationStructure.concentric(metric, s, rs)
                        holds = spp_check(info, rule).holds
                        yield kind, rule, s, holds


@_timed
def justify_local_dominance(m_values=(3, 4), max_n=8, radii=(1, 2), metrics_=("emd", "linf")):
    rep = _Merged()
    non_spp = 0
    for kind, rule, s, holds in _ld_instances(
        lambda metric, rs: H.LocalDominance(metric, rs[0]), m_values, max_n, [(r,) for r in radii], metrics_
    ):
        ctxs = [VoterContext(s, a, p, rule) for p in strict_orders(rule.m) for a in allowed_ballots(rule)]
        if not holds:
            non_spp += len(ctxs)
            continue
        rep.add(H.check_justification(kind, ctxs))
    return _justification_result("prop-justify-local-dominance", rep, False, {"skipped_non_spp": non_spp})


@_timed
def justify_bias(lazy=False, m_values=(3, 4), max_n=8, radius_pairs=((0, 1), (0, 2), (1, 2)), metrics_=("emd", "linf")):
    K = H.LazyBiasLD if lazy else H.TruthBiasLD
    bias = Bias.LAZY if lazy else Bias.TRUTH
    rep = _Merged()
    non_spp = 0
    for kind, rule, s, holds in _ld_instances(
        lambda metric, rs: K(metric, rs[0], rs[1]), m_values, max_n, radius_pairs, metrics_
    ):
        ctxs = [
            VoterContext(s, a, p.with_bias(bias), rule)
            for p in strict_orders(rule.m)
            for a in allowed_ballots(rule, lazy)
        ]
        if not holds:
            non_spp += len(ctxs)
            continue
        rep.add(H.check_justification(kind, ctxs))
    name = "prop-justify-lazy-bias" if lazy else "prop-justify-truth-bias"
    return _justification_result(name, rep, False, {"skipped_non_spp": non_spp})


T_RULES = (("plurality", 4), ("veto", 4), ("borda", 4), ("approval", 4))


def sample_t_contexts(rng, rule, count, max_score=12):
    m = rule.m
    out = []
    for _ in range(count):
        s = tuple(rng.randint(0, max_score) for _ in range(m))
        p = Preference.from_order(rng.sample(range(m), m))
        a = rng.choice(allowed_ballots(rule))
        out.append((rng.randint(2, m), VoterContext(s, a, p, rule)))
    return out


@_timed
def justify_t_star(per_rule=1000, seed=0, rules=T_RULES):
    """T* against the T-star model; T is drawn from 2..m (T=1 gives an edgeless star)."""
    rng = random.Random(seed)
    per = {}
    total = _Merged()
    for name, max_m in rules:
        rep = _Merged()
        for _ in range(per_rule):
            m = rng.randint(2, max_m)
            rule = getattr(VotingRule, name)(m)
            (T, ctx), = sample_t_contexts(rng, rule, 1)
            rep.add(H.check_justification(H.TStar(T), [ctx]), limit=5)
        per[name] = {
            "contexts": rep.contexts,
            "condition_I": rep.condition_I,
            "condition_II": rep.condition_II,
            "strong": rep.strong,
            "strong_literal": rep.strong_literal,
        }
        total.add(rep)
    return _justification_result("prop-justify-t-star", total, True, {"per_rule": per})


@_timed
def t_pragmatist_witness(contexts=2000, seed=0, m=4):
    """Finds Borda contexts where the T-pragmatist ballot is itself dominated."""
    rng = random.Random(seed)
    rule = VotingRule.borda(m)
    witnesses = []
    for T, ctx in sample_t_contexts(rng, rule, contexts):
        h = H.evaluate_heuristic(H.TPragmatist(T), ctx)
        if not h:
            continue
        model = H.model_for(H.TPragmatist(T))
        struct = H.build_model(H.TPragmatist(T), ctx)
        for b in allowed_ballots(rule):
            if dom.od_check(b, h[0], ctx.prefs, struct).dominates:
                witnesses.append({"T": T, "state": ctx.state, "current": ctx.current, "prefs": ctx.prefs.order(), "pragmatist": h[0], "dominated_by": b})
                break
        if len(witnesses) >= 5:
            break
    return SuiteResult("prop-justify-t-pragmatist", bool(witnesses), contexts, 0, {"witnesses_found": len(witnesses)}, witnesses)


@_timed
def leader_rule_totality(m=5, states=100, seed=0, max_score=30):
    rng = random.Random(seed)
    rule = VotingRule.approval(m)
    kind = H.LeaderRule()
    trials = fails = 0
    cex = []
    sampled = [tuple(rng.randint(0, max_score) for _ in range(m)) for _ in range(states)]
    for p in strict_orders(m):
        for s in sampled:
            ctx = VoterContext(s, (0,) * m, p, rule)
            lr = H.evaluate_heuristic(kind, ctx) or ((0,) * m,)
            struct = H.build_model(kind, ctx)
            D = dom.graph_dominance_matrix(allowed_ballots(rule), p, struct)
            i = allowed_ballots(rule).index(lr[0])
            trials += 1
            others = [k for k in range(len(D)) if k != i]
            if not D[i, others].all():
                fails += 1
                if len(cex) < 10:
                    cex.append({"state": s, "prefs": p.order(), "leader_ballot": lr[0]})
    return SuiteResult("prop-justify-leader-rule", fails == 0, trials, fails, {"other_ballots": 2**m - 1}, cex)


# -- topology and SPP -----------------------------------------------------------------


@_timed
def metric_topology(m_values=(2, 3, 4), max_n=30, max_radius=4, rule_name="plurality", n_step=None):
    """Cliqued structures for l-inf/candidate-wise balls, upward-closed for EMD/l1."""
    trials = fails = 0
    cex = []
    for m in m_values:
        rule = getattr(VotingRule, rule_name)(m)
        for total in range(1, max_n + 1, n_step or 1):
            for s in states_with_total(m, total):
                for name in ("linf", "candidate-wise", "emd", "l1"):
                    metric = {
                        "linf": Metric.linf(),
                        "candidate-wise": Metric.candidate_wise((1,) * m),
                        "emd": Metric.emd(),
                        "l1": Metric.l1(),
                    }[name]
                    radii = [Radius.votes(v, total) for v in range(max_radius + 1) if v < total]
                    graphs = structure_graphs(InformationStructure.concentric(metric, s, radii), rule)
                    if name in ("linf", "candidate-wise"):
                        ok = is_cliqued(graphs)
                    else:
                        ok = is_upward_closed(graphs, order=score_order(s)).holds
                    trials += 1
                    if not ok:
                        fails += 1
                        if len(cex) < 10:
                            cex.append({"metric": name, "state": s, "levels": [g.sorted_edges() for g in graphs]})
    return SuiteResult("prop-metric-topology", fails == 0, trials, fails, {"rule": rule_name}, cex)


def dirichlet(rng, m, denominator=10**6):
    x = [rng.expovariate(1.0) for _ in range(m)]
    total = sum(x)
    p = [Fraction(v / total).limit_denominator(denominator) for v in x]
    p[-1] = 1 - sum(p[:-1])
    if p[-1] < 0:
        return dirichlet(rng, m, denominator)
    return p


SPP_RADII = ("1%", "2%")


@_timed
def thm_spp(samples=100, m_values=(3, 4, 5), n=500, radii=SPP_RADII, seed=0, threshold=Fraction(99, 100)):
    """Empirical SPP rate; every failure is re-confirmed by plain enumeration."""
    rng = random.Random(seed)
    rs = [Radius.parse(r) for r in radii]
    per = {}
    unconfirmed = 0
    cex = []
    trials = holds_total = 0
    for m in m_values:
        rule = VotingRule.plurality(m)
        holds = 0
        for _ in range(samples):
            p = dirichlet(rng, m)
            entry = spp_scan(p, [n], Metric.emd(), rs, rule)[0]
            trials += 1
            if entry.holds:
                holds += 1
                continue
            if entry.holds is None:
                unconfirmed += 1
                cex.append({"m": m, "state": entry.state, "error": entry.error})
                continue
            v = entry.report.violations[0]
            info = InformationStructure.concentric(Metric.emd(), entry.state, rs)
            confirmed = spp_witness(info, rule, v.level, v.edge, v.pair) is None
            unconfirmed += not confirmed
            if len(cex) < 10:
                cex.append({"m": m, "state": entry.state, "level": v.level, "edge": v.edge, "pair": v.pair, "confirmed": confirmed})
        per[m] = holds / samples
        holds_total += holds
    ok = all(Fraction(r).limit_denominator(samples) >= threshold for r in per.values()) and unconfirmed == 0
    return SuiteResult("thm-spp", ok, trials, trials - holds_total, {"hold_rate": per, "unconfirmed_or_capped": unconfirmed, "radii": list(radii), "n": n}, cex)


# -- convergence ------------------------------------------------------------------------


CONVERGENCE = {
    "plurality": dict(rule="plurality", model="linf"),
    "veto": dict(rule="veto", model="clique-linf"),
}


@_timed
def thm_converge(rule="plurality", trials=1000, seed=0, max_m=5, max_n=15, policies=("best-uod", "any-od"), radii_votes=(1, 3)):
    base = CONVERGENCE[rule]
    per = {}
    cex = []
    total = bad = 0
    for pol in policies:
        cfg = dyn.BatchConfig(
            rule=base["rule"], m=max_m, m_min=2, n=max_n, n_min=2, model=base["model"],
            radii_votes=radii_votes, scheduler="mixed", policy=pol, trials=trials, seed=seed,
        )
        rep = dyn.batch_verify(cfg)
        good = sum(1 for r in rep.results if r.status == "converged" and r.verified)
        per[pol] = {
            "trials": rep.trials,
            "converged": rep.converged,
            "verified": rep.verified,
            "cycles": rep.cycles,
            "truncated": rep.truncated,
            "errors": rep.errors,
            "max_steps": max(rep.steps, default=0),
        }
        total += rep.trials
        bad += rep.trials - good
        for idx, pname, traj in rep.cycle_witnesses[:3]:
            cex.append({"policy": pname, "trial": idx, "status": str(traj.status), "moves": [(mv.voter, mv.old, mv.new) for mv in traj.moves]})
    return SuiteResult(f"thm-converge-{rule}", bad == 0, total, bad, {"per_policy": per}, cex)


@_timed
def adversarial(rule="plurality", instances=200, seed=0, max_m=3, max_n=6, policies=("best-uod", "any-od"), radii_votes=(1, 3)):
    """All activation orders from random starts; any reachable cycle fails."""
    base = CONVERGENCE[rule]
    rng = random.Random(seed)
    trials = cycles = 0
    cex = []
    per = {}
    for pol in policies:
        policy = dyn.make_policy(pol)
        found = 0
        for _ in range(instances):
            m = rng.randint(2, max_m)
            n = rng.randint(2, max_n)
            r = dyn.make_rule(base["rule"], m)
            prefs = [Preference.from_order(rng.sample(range(m), m)) for _ in range(n)]
            models = [dyn.make_model(base["model"], n, m, rng, radii_votes) for _ in range(n)]
            profile = [rng.choice(allowed_ballots(r)) for _ in range(n)]
            ex = dyn.explore(profile, prefs, models, r, policy)
            trials += 1
            if ex.cycle is not None:
                found += 1
                if len(cex) < 5:
                    cex.append({"policy": pol, "moves": [(mv.voter, mv.old, mv.new) for mv in ex.cycle]})
        per[pol] = found
        cycles += found
    return SuiteResult(f"adversarial-{rule}", cycles == 0, trials, cycles, {"cycles_per_policy": per}, cex)


@_timed
def negative_control(max_seeds=500, seed=0):
    """Borda with full information may cycle; the engine must report it."""
    for i in range(max_seeds):
        cfg = dyn.BatchConfig(rule="borda", m=3, n=4, n_min=2, model="full-information", scheduler="round-robin", trials=1, seed=seed + i)
        rep = dyn.batch_verify(cfg)
        if rep.cycles:
            _, _, traj = rep.cycle_witnesses[0]
            return SuiteResult(
                "negative-control", True, i + 1, 0,
                {"seed": seed + i, "status": str(traj.status)},
                [{"moves": [(mv.voter, mv.old, mv.new) for mv in traj.moves]}],
            )
    return SuiteResult("negative-control", False, max_seeds, 1, {"note": "no cycle found"})


# -- registry ---------------------------------------------------------------------------------


TARGETS = {
    "lemma-partial-order": lambda o: lemma_partial_order(trials=o.get("trials", 10_000), seed=o.get("seed", 0)),
    "obs-nash": lambda o: obs_nash(max_m=o.get("max_m", 3), max_n=o.get("max_n", 5), seed=o.get("seed", 0)),
    "oracle-equivalence": lambda o: oracle_equivalence(max_n=o.get("max_n", 6)),
    "prop-justify-not-last": lambda o: justify_not_last(max_m=o.get("max_m", 4)),
    "prop-justify-local-dominance": lambda o: justify_local_dominance(max_n=o.get("max_n", 8)),
    "prop-justify-truth-bias": lambda o: justify_bias(False, max_n=o.get("max_n", 8)),
    "prop-justify-lazy-bias": lambda o: justify_bias(True, max_n=o.get("max_n", 8)),
    "prop-justify-t-star": lambda o: justify_t_star(per_rule=o.get("trials", 1000), seed=o.get("seed", 0)),
    "prop-justify-t-pragmatist": lambda o: t_pragmatist_witness(contexts=o.get("trials", 2000), seed=o.get("seed", 0)),
    "prop-justify-leader-rule": lambda o: leader_rule_totality(states=o.get("trials", 100), seed=o.get("seed", 0)),
    "prop-metric-topology": lambda o: metric_topology(max_n=o.get("max_n", 30)),
    "thm-spp": lambda o: thm_spp(samples=o.get("trials", 100), seed=o.get("seed", 0)),
    "thm-converge-plurality": lambda o: thm_converge("plurality", trials=o.get("trials", 1000), seed=o.get("seed", 0)),
    "thm-converge-veto": lambda o: thm_converge("veto", trials=o.get("trials", 1000), seed=o.get("seed", 0)),
}


def run_target(target, options=None):
    if target not in TARGETS:
        raise ConfigError(f"unknown verify target {target!r}; known: {', '.join(TARGETS)}")
    options = dict(options or {})
    if options.get("trials") == 0:
        return SuiteResult(target, True, 0, 0, {"note": "no trials requested"})
    return TARGETS[target](options)
