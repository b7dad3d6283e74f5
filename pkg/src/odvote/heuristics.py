"""Voting heuristics, the pivot-graph models that justify them, and a checker
for the justification conditions.

Justification of a heuristic ``h`` by a model, over a sample of contexts:

* condition I: ``h`` is empty exactly when the UOD set is empty;
* condition II: ``h`` is contained in the UOD set;
* strong: ``h`` equals the UOD set, up to ballots the model cannot tell apart
  (same score gap on every edge of the outermost graph); ``strong_literal``
  demands plain set equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import metrics
from .dominance import sdom_oracle, uod_set, Relation
from .election import (
    Bias,
    RuleKind,
    add,
    allowed_ballots,
    score_order,
    winner,
)
from .epistemic import (
    BallSet,
    EpistemicModel,
    PivotGraph,
    PivotGraphStructure,
    pivot_graph,
)
from .errors import ConfigError


# -- kinds --------------------------------------------------------------------


@dataclass(frozen=True)
class NotLast:
    name = "not-last"


@dataclass(frozen=True)
class LocalDominance:
    metric: metrics.Metric
    r: metrics.Radius
    name = "local-dominance"


@dataclass(frozen=True)
class TruthBiasLD:
    metric: metrics.Metric
    r1: metrics.Radius
    r2: metrics.Radius
    name = "truth-bias"

    def __post_init__(self):
        if not self.r1.value < self.r2.value:
            raise ConfigError(f"{self.name} needs r1 < r2")


@dataclass(frozen=True)
class LazyBiasLD(TruthBiasLD):
    name = "lazy-bias"


@dataclass(frozen=True)
class TPragmatist:
    T: int
    name = "t-pragmatist"


@dataclass(frozen=True)
class TStar:
    T: int
    name = "t-star"


@dataclass(frozen=True)
class LeaderRule:
    name = "leader-rule"


HEURISTIC_NAMES = ("not-last", "local-dominance", "truth-bias", "lazy-bias", "t-pragmatist", "t-star", "leader-rule")


def validate(kind, rule):
    plurality_only = (NotLast, LocalDominance, TruthBiasLD)
    if isinstance(kind, plurality_only) and rule.kind is not RuleKind.PLURALITY:
        raise ConfigError(f"{kind.name} is defined for plurality only")
    if isinstance(kind, LeaderRule) and rule.kind is not RuleKind.APPROVAL:
        raise ConfigError("leader rule needs approval voting")
    if isinstance(kind, (TPragmatist, TStar)) and not 1 <= kind.T <= rule.m:
        raise ConfigError(f"T={kind.T} outside 1..{rule.m}")


def required_bias(kind):
    if isinstance(kind, LazyBiasLD):
        return Bias.LAZY
    if isinstance(kind, TruthBiasLD):
        return Bias.TRUTH
    return Bias.NONE


# -- helpers ------------------------------------------------------------------


def leaders(state, T):
    return score_order(state)[:T]


def _plurality(m, c):
    return tuple(int(i == c) for i in range(m))


def _voted_candidate(a):
    """Candidate of a plurality ballot, None for abstention."""
    return a.index(1) if 1 in a else None


def ballot_ranking(a, prefs):
    """Read a permutation-rule ballot as a best-first ranking.

    Equal scores are ordered by preference, then by index.
    """
    return tuple(sorted(range(len(a)), key=lambda c: (-a[c], prefs.ranks[c], c)))


def _as_move(ctx, b):
    b = tuple(b)
    return () if b == tuple(ctx.current) else (b,)


def _ld_dominators(ctx, metric, r):
    """Candidates whose plurality ballot set-dominates the current ballot."""
    ball = BallSet(metric, ctx.state, r)
    m = ctx.rule.m
    return [
        c
        for c in range(m)
        if sdom_oracle(_plurality(m, c), ctx.current, ctx.prefs, ball, ctx.rule)
        is Relation.DOMINATES
    ]


# -- heuristics -----------------------------------------------------------------


def evaluate_heuristic(kind, ctx):
    """The heuristic's proposed moves (the current ballot is never included)."""
    validate(kind, ctx.rule)
    m = ctx.rule.m
    prefs = ctx.prefs
    cur = tuple(ctx.current)

    if isinstance(kind, NotLast):
        last = _plurality(m, prefs.bottom())
        if cur != last:
            return ()
        return tuple(b for b in allowed_ballots(ctx.rule) if b != last)

    if isinstance(kind, LocalDominance):
        D = _ld_dominators(ctx, kind.metric, kind.r)
        if not D:
            return ()
        return _as_move(ctx, _plurality(m, prefs.favourite_among(D)))

    if isinstance(kind, TruthBiasLD):
        D = _ld_dominators(ctx, kind.metric, kind.r1)
        if D:
            return _as_move(ctx, _plurality(m, prefs.favourite_among(D)))
        fav = (0,) * m if isinstance(kind, LazyBiasLD) else _plurality(m, prefs.top())
        outer = BallSet(kind.metric, ctx.state, kind.r2).array()
        for s in outer.tolist():
            if prefs.prefers(winner(add(s, cur)), winner(add(s, fav))):
                return ()
        return _as_move(ctx, fav)

    if isinstance(kind, (TPragmatist, TStar)):
        T = leaders(ctx.state, kind.T)
        best = prefs.favourite_among(T)
        rest = [c for c in T if c != best]
        if ctx.rule.kind is RuleKind.APPROVAL:
            b = list(cur)
            b[best] = 1
            if isinstance(kind, TStar):
                for c in rest:
                    b[c] = 0
            return _as_move(ctx, b)
        ranking = [c for c in ballot_ranking(cur, prefs) if c != best]
        if isinstance(kind, TStar):
            ranking = [c for c in ranking if c not in rest] + [c for c in ranking if c in rest]
        return _as_move(ctx, ctx.rule.from_ranking([best] + ranking))

    if isinstance(kind, LeaderRule):
        c1, c2 = leaders(ctx.state, 2)
        b = [int(prefs.prefers(c, c1)) for c in range(m)]
        b[c1] = int(prefs.prefers(c1, c2))
        return _as_move(ctx, b)

    raise ConfigError(f"unknown heuristic {kind!r}")


# -- models -------------------------------------------------------------------


def build_model(kind, ctx):
    """Closed-form pivot-graph structure paired with a heuristic."""
    m = ctx.rule.m
    if isinstance(kind, NotLast):
        return PivotGraphStructure((PivotGraph.complete(m),))
    if isinstance(kind, LocalDominance):
        return PivotGraphStructure((pivot_graph(BallSet(kind.metric, ctx.state, kind.r), ctx.rule),))
    if isinstance(kind, TruthBiasLD):
        h1 = pivot_graph(BallSet(kind.metric, ctx.state, kind.r1), ctx.rule)
        h2 = pivot_graph(BallSet(kind.metric, ctx.state, kind.r2), ctx.rule)
        v = _voted_candidate(tuple(ctx.current))
        kept = frozenset(
            e for e in h2.edges
            if v in e and ctx.prefs.prefers(v, e[0] if e[1] == v else e[1])
        ) if v is not None else frozenset()
        return PivotGraphStructure((h1, PivotGraph(m, h1.edges | kept)))
    if isinstance(kind, (TPragmatist, TStar)):
        T = leaders(ctx.state, kind.T)
        best = ctx.prefs.favourite_among(T)
        return PivotGraphStructure((PivotGraph.star(m, best, T),))
    if isinstance(kind, LeaderRule):
        c1, c2 = leaders(ctx.state, 2)
        return PivotGraphStructure(
            (PivotGraph(m, {(c1, c2)}), PivotGraph.star(m, c1, range(m)))
        )
    raise ConfigError(f"unknown heuristic {kind!r}")


@dataclass(frozen=True)
class HeuristicModel(EpistemicModel):
    kind: object

    @property
    def name(self):
        return f"model:{self.kind.name}"

    def pivot_structure(self, ctx):
        return build_model(self.kind, ctx)


def model_for(kind):
    return HeuristicModel(kind)


# -- justification ------------------------------------------------------------


def model_signature(ballot, struct):
    """Score gaps on the outermost graph's edges; equal signatures are
    interchangeable for graph-based dominance."""
    return tuple(ballot[u] - ballot[v] for u, v in sorted(struct.graphs[-1].edges))


@dataclass
class JustificationReport:
    condition_I: bool = True
    condition_II: bool = True
    strong: bool = True
    strong_literal: bool = True
    contexts: int = 0
    failures: int = 0
    counterexamples: list = field(default_factory=list)  # (state, current, h, uod, failed)

    def record(self, ctx, h, uod, failed, limit):
        self.failures += 1
        if len(self.counterexamples) < limit:
            self.counterexamples.append((ctx.state, tuple(ctx.current), h, uod, failed))

    @property
    def justified(self):
        return self.condition_I and self.condition_II


def check_justification(kind, contexts, max_records=20):
    report = JustificationReport()
    model = model_for(kind)
    for ctx in contexts:
        report.contexts += 1
        h = set(evaluate_heuristic(kind, ctx))
        uod = set(uod_set(ctx, model))
        failed = []
        if (not h) != (not uod):
            report.condition_I = False
            failed.append("I")
        if not h <= uod:
            report.condition_II = False
            failed.append("II")
        if h != uod:
            report.strong_literal = False
            struct = build_model(kind, ctx)
            if {model_signature(b, struct) for b in h} != {model_signature(b, struct) for b in uod}:
                report.strong = False
                failed.append("strong")
        if failed:
            report.record(ctx, tuple(sorted(h)), tuple(sorted(uod)), tuple(failed), max_records)
    report.strong = report.strong and report.condition_II
    return report
