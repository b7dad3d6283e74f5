"""Information sets, pivot graphs and the epistemic models built on them."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import metrics
from ._backend import kernels
from .election import VotingRule, allowed_ballots, as_scores, subtract
from .errors import CapacityError, StructuralError

UPWARD_SEARCH_MAX_M = 6
ENUM_CAP = 5 * 10**7  # states x ballots


# -- graphs -----------------------------------------------------------------


def _edge(c, d):
    if c == d:
        raise StructuralError(f"self-loop on candidate {c}")
    return (c, d) if c < d else (d, c)


@dataclass(frozen=True)
class PivotGraph:
    m: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        edges = frozenset(_edge(int(c), int(d)) for c, d in self.edges)
        for c, d in edges:
            if not (0 <= c < self.m and 0 <= d < self.m):
                raise StructuralError(f"edge {(c, d)} outside 0..{self.m - 1}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def complete(cls, m, vertices=None):
        vs = range(m) if vertices is None else vertices
        return cls(m, frozenset(itertools.combinations(sorted(vs), 2)))

    @classmethod
    def star(cls, m, center, leaves):
        return cls(m, frozenset(_edge(center, x) for x in leaves if x != center))

    def has_edge(self, c, d):
        return c != d and _edge(c, d) in self.edges

    def vertices(self):
        """Non-isolated vertices."""
        return frozenset(v for e in self.edges for v in e)

    def union(self, other):
        return PivotGraph(self.m, self.edges | other.edges)

    def sorted_edges(self):
        return sorted(self.edges)

    def __len__(self):
        return len(self.edges)


@dataclass(frozen=True)
class PivotGraphStructure:
    graphs: tuple

    def __post_init__(self):
        graphs = tuple(self.graphs)
        if not graphs:
            raise StructuralError("a pivot graph structure needs at least one level")
        m = graphs[0].m
        for j, g in enumerate(graphs):
            if g.m != m:
                raise StructuralError("pivot graphs disagree on the number of candidates")
            if j and not graphs[j - 1].edges <= g.edges:
                raise StructuralError(f"level {j} is not a subgraph of level {j + 1}")
        object.__setattr__(self, "graphs", graphs)

    @property
    def m(self):
        return self.graphs[0].m

    @property
    def k(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def __getitem__(self, j):
        return self.graphs[j]

    def edge_arrays(self):
        """Edges ordered by first level, plus the cumulative count per level."""
        return _edge_arrays(self)


@functools.lru_cache(maxsize=8192)
def _edge_arrays(struct):
    eu, ev, ends = [], [], []
    seen = set()
    for g in struct.graphs:
        for e in sorted(g.edges - seen):
            eu.append(e[0])
            ev.append(e[1])
        seen |= g.edges
        ends.append(len(eu))
    return (
        np.array(eu, dtype=np.int64),
        np.array(ev, dtype=np.int64),
        np.array(ends, dtype=np.int64),
    )


# -- information sets -------------------------------------------------------


@dataclass(frozen=True)
class ExplicitSet:
    states: frozenset

    def __post_init__(self):
        states = frozenset(as_scores(s) for s in self.states)
        if not states:
            raise StructuralError("an information set must be non-empty")
        if len({len(s) for s in states}) != 1:
            raise StructuralError("states of different lengths in one information set")
        object.__setattr__(self, "states", states)

    @property
    def m(self):
        return len(next(iter(self.states)))

    def array(self, cap=metrics.BALL_CAP):
        return np.array(sorted(self.states), dtype=np.int64)


@dataclass(frozen=True)
class BallSet:
    metric: metrics.Metric
    center: tuple
    radius: metrics.Radius

    def __post_init__(self):
        object.__setattr__(self, "center", as_scores(self.center))
        if not isinstance(self.radius, metrics.Radius):
            object.__setattr__(self, "radius", metrics.Radius(self.radius))

    @property
    def m(self):
        return len(self.center)

    def array(self, cap=metrics.BALL_CAP):
        return metrics.ball_array(self.metric, self.center, self.radius, cap)


InformationSet = ExplicitSet | BallSet


@dataclass(frozen=True)
class Materialized:
    states: np.ndarray  # outermost set, (N, m)
    level: np.ndarray  # 0-based index of the innermost level containing each state
    k: int

    def level_states(self, j):
        return self.states[self.level <= j]


@dataclass(frozen=True)
class InformationStructure:
    levels: tuple

    def __post_init__(self):
        levels = tuple(self.levels)
        if not levels:
            raise StructuralError("an information structure needs at least one level")
        if len({lv.m for lv in levels}) != 1:
            raise StructuralError("information sets disagree on m")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def concentric(cls, metric, center, radii):
        return cls(tuple(BallSet(metric, center, r) for r in radii))

    @classmethod
    def explicit(cls, *sets):
        return cls(tuple(ExplicitSet(frozenset(s)) for s in sets))

    @property
    def k(self):
        return len(self.levels)

    @property
    def m(self):
        return self.levels[0].m

    def is_concentric(self):
        lv = self.levels
        return all(isinstance(x, BallSet) for x in lv) and all(
            x.metric == lv[0].metric
            and x.center == lv[0].center
            and (i == 0 or lv[i - 1].radius.value <= x.radius.value)
            for i, x in enumerate(lv)
        )

    def materialize(self, cap=metrics.BALL_CAP):
        return _materialize(self, cap)


@functools.lru_cache(maxsize=16)  # arrays can be large
def _materialize(struct, cap):
    k = struct.k
    if struct.is_concentric():
        outer = struct.levels[-1]
        states = outer.array(cap)
        level = np.full(len(states), k - 1, dtype=np.int64)
        for j in range(k - 2, -1, -1):
            inside = metrics.within(outer.metric, outer.center, states, struct.levels[j].radius)
            level[inside] = j
        return Materialized(states, level, k)
    sets = [frozenset(map(tuple, lv.array(cap).tolist())) for lv in struct.levels]
    for j in range(k - 1):
        if not sets[j] <= sets[j + 1]:
            missing = sorted(sets[j] - sets[j + 1])[0]
            raise StructuralError(
                f"level {j + 1} is not contained in level {j + 2} (e.g. {missing})"
            )
    order = sorted(sets[-1])
    first = {}
    for j in range(k - 1, -1, -1):
        for s in sets[j]:
            first[s] = j
    states = np.array(order, dtype=np.int64).reshape(len(order), struct.m)
    level = np.array([first[s] for s in order], dtype=np.int64)
    return Materialized(states, level, k)


def _ballot_array(rule, abstain=False):
    return np.array(allowed_ballots(rule, abstain), dtype=np.int64)


def winner_matrix(states, rule, abstain=False):
    ballots = _ballot_array(rule, abstain)
    size = len(states) * len(ballots)
    if size > ENUM_CAP:
        raise CapacityError(
            f"states x ballots = {size} exceeds the enumeration cap {ENUM_CAP}",
            cap=ENUM_CAP,
            reached=size,
        )
    return kernels.winners(states, ballots)


# -- pivot graphs -----------------------------------------------------------


def pivot_graph(info_set, rule, witnesses=False, cap=metrics.BALL_CAP):
    """Pivot graph of one information set.

    With ``witnesses`` also returns, per edge ``(c, d)``, one
    ``(state, ballot_c, ballot_d)`` with ``f(state, ballot_c) = c``.
    """
    states = info_set.array(cap)
    W = winner_matrix(states, rule)
    lv = np.zeros(len(states), dtype=np.int64)
    el = kernels.edge_levels(W, lv, rule.m, 1)
    edges = frozenset((c, d) for c in range(rule.m) for d in range(c + 1, rule.m) if el[c, d] == 0)
    g = PivotGraph(rule.m, edges)
    if not witnesses:
        return g
    ballots = allowed_ballots(rule)
    wit = {}
    for s in range(len(states)):
        row = W[s]
        for i, x in enumerate(row):
            for k, y in enumerate(row):
                if x < y and (x, y) not in wit:
                    wit[(int(x), int(y))] = (
                        tuple(int(v) for v in states[s]),
                        ballots[i],
                        ballots[k],
                    )
        if len(wit) == len(edges):
            break
    return g, wit


def structure_graphs(struct, rule, cap=metrics.BALL_CAP):
    """Pivot-graph structure induced by an information structure."""
    return _structure_graphs(struct, rule, cap)


@functools.lru_cache(maxsize=8192)
def _structure_graphs(struct, rule, cap):
    mat = struct.materialize(cap)
    W = winner_matrix(mat.states, rule)
    el = kernels.edge_levels(W, mat.level, rule.m, mat.k)
    m = rule.m
    graphs = []
    for j in range(mat.k):
        graphs.append(
            PivotGraph(
                m,
                frozenset((c, d) for c in range(m) for d in range(c + 1, m) if el[c, d] <= j),
            )
        )
    return PivotGraphStructure(tuple(graphs))


# -- voter context and epistemic models ---------------------------------------


@dataclass(frozen=True)
class VoterContext:
    state: tuple
    current: tuple
    prefs: object
    rule: VotingRule

    def __post_init__(self):
        object.__setattr__(self, "state", as_scores(self.state, self.rule.m))
        object.__setattr__(self, "current", tuple(self.current))
        if len(self.current) != self.rule.m or self.prefs.m != self.rule.m:
            raise StructuralError("context components disagree on m")

    @classmethod
    def from_poll(cls, poll, current, prefs, rule):
        return cls(subtract(tuple(poll), tuple(current)), tuple(current), prefs, rule)

    @property
    def poll(self):
        return tuple(x + y for x, y in zip(self.state, self.current))


class EpistemicModel:
    """Maps a voter context to a pivot-graph structure.

    ``exact`` models decide dominance on their information sets instead of on
    the pivot graphs; ``concentric`` marks single-metric increasing-radius
    models.
    """

    name = "model"
    concentric = False
    exact = False

    def information_structure(self, ctx):
        return None

    def pivot_structure(self, ctx):
        raise NotImplementedError


@dataclass(frozen=True)
class DistanceBased(EpistemicModel):
    metric: metrics.Metric
    radii: tuple
    exact: bool = False
    cap: int = metrics.BALL_CAP

    def __post_init__(self):
        radii = tuple(r if isinstance(r, metrics.Radius) else metrics.Radius(r) for r in self.radii)
        if not radii:
            raise StructuralError("distance-based model needs at least one radius")
        object.__setattr__(self, "radii", radii)

    name = "distance"

    @property
    def concentric(self):
        return all(a.value <= b.value for a, b in zip(self.radii, self.radii[1:]))

    def information_structure(self, ctx):
        return InformationStructure.concentric(self.metric, ctx.state, self.radii)

    def pivot_structure(self, ctx):
        return structure_graphs(self.information_structure(ctx), ctx.rule, self.cap)


@dataclass(frozen=True)
class FullInformation(EpistemicModel):
    """The voter knows the state exactly: a single singleton level."""

    name = "full-information"
    exact = True

    def information_structure(self, ctx):
        return InformationStructure.explicit({ctx.state})

    def pivot_structure(self, ctx):
        return structure_graphs(self.information_structure(ctx), ctx.rule)


@dataclass(frozen=True)
class FixedSets(EpistemicModel):
    structure: InformationStructure
    exact: bool = False

    name = "fixed-sets"

    def information_structure(self, ctx):
        return self.structure

    def pivot_structure(self, ctx):
        return structure_graphs(self.structure, ctx.rule)


@dataclass(frozen=True)
class FixedGraphs(EpistemicModel):
    structure: PivotGraphStructure

    name = "fixed-graphs"

    def pivot_structure(self, ctx):
        return self.structure


@dataclass(frozen=True)
class CliqueClosure(EpistemicModel):
    """Completes every level of ``base`` on its non-isolated candidates."""

    base: EpistemicModel

    name = "clique-closure"

    @property
    def concentric(self):
        return self.base.concentric

    def pivot_structure(self, ctx):
        return PivotGraphStructure(
            tuple(PivotGraph.complete(g.m, g.vertices()) for g in self.base.pivot_structure(ctx))
        )


def derive_structure(model, ctx):
    struct = model.pivot_structure(ctx)
    for lo, hi in zip(struct.graphs, struct.graphs[1:]):
        assert lo.edges <= hi.edges, "derived structure violates edge nesting"
    return struct


# -- sharp pivot property -----------------------------------------------------


@dataclass(frozen=True)
class SppViolation:
    level: int  # 1-based
    edge: tuple  # (c1, c2): the pair must be pivotal with c1 the new winner
    pair: tuple  # (a1, a2) ballots


@dataclass
class SppReport:
    holds: bool
    count: int
    violations: list = field(default_factory=list)
    levels: int = 0


def gap_matrix(ballots, m):
    """``G[i, k, x, y] = (a_i(x) - a_i(y)) - (a_k(x) - a_k(y))``."""
    B = np.asarray(ballots, dtype=np.int64)
    D = B[:, :, None] - B[:, None, :]  # (A, m, m)
    return D[:, None, :, :] - D[None, :, :, :]


def spp_check(struct, rule, cap=metrics.BALL_CAP, max_records=1000):
    mat = struct.materialize(cap)
    ballots = allowed_ballots(rule)
    W = winner_matrix(mat.states, rule)
    m, k, A = rule.m, mat.k, len(ballots)
    wit = kernels.witness_levels(W, mat.level, A, m, k).astype(np.int64)
    # first level at which each unordered pair is an edge
    el = wit.min(axis=(0, 1))
    el = np.minimum(el, el.T)
    G = gap_matrix(ballots, m) > 0
    report = SppReport(True, 0, [], k)
    for j in range(k):
        bad = G & (el[None, None, :, :] <= j) & (wit > j)
        cnt = int(bad.sum())
        if not cnt:
            continue
        report.holds = False
        report.count += cnt
        for i, kk, x, y in zip(*np.nonzero(bad)):
            if len(report.violations) >= max_records:
                break
            report.violations.append(
                SppViolation(j + 1, (int(x), int(y)), (ballots[i], ballots[kk]))
            )
    return report


def spp_witness(struct, rule, level, edge, pair, cap=metrics.BALL_CAP):
    """Search level ``level`` (1-based) for a state where ``pair`` is pivotal for ``edge``.

    Plain enumeration, independent of the kernels; returns the state or None.
    """
    x, y = edge
    a1, a2 = pair
    for s in struct.levels[level - 1].array(cap).tolist():
        s1 = [v + b for v, b in zip(s, a1)]
        s2 = [v + b for v, b in zip(s, a2)]
        if s1.index(max(s1)) == x and s2.index(max(s2)) == y:
            return tuple(s)
    return None


# -- topology ---------------------------------------------------------------


def is_cliqued(struct):
    for g in struct:
        vs = sorted(g.vertices())
        if len(g.edges) != len(vs) * (len(vs) - 1) // 2:
            return False
    return True


def _upward_ok(g, rank):
    # rank[c] < rank[d] means c comes before d in L, i.e. c >_L d
    for c, d in g.edges:
        for u, v in ((c, d), (d, c)):
            for w in range(g.m):
                if w != u and rank[w] < rank[v] and not g.has_edge(u, w):
                    return False
    return True


@dataclass(frozen=True)
class UpwardReport:
    holds: bool
    witness_order: tuple | None


def is_upward_closed(struct, order=None, max_m=UPWARD_SEARCH_MAX_M):
    """Whether one order L (best first) makes every level upward closed.

    If (c, c') is an edge and c'' precedes c' in L then (c, c'') must be an edge.
    Without ``order`` all m! orders are searched.
    """
    m = struct.m
    if order is not None:
        rank = {c: i for i, c in enumerate(order)}
        ok = all(_upward_ok(g, rank) for g in struct)
        return UpwardReport(ok, tuple(order) if ok else None)
    if m > max_m:
        raise CapacityError(
            f"order search over {m}! orders exceeds m <= {max_m}; pass an explicit order",
            cap=max_m,
            reached=m,
        )
    for perm in itertools.permutations(range(m)):
        rank = {c: i for i, c in enumerate(perm)}
        if all(_upward_ok(g, rank) for g in struct):
            return UpwardReport(True, perm)
    return UpwardReport(False, None)


# -- large-population SPP scan -----------------------------------------------


def largest_remainder(p, n):
    """Integer vector summing to ``n`` closest to ``p * n`` (Hamilton rounding)."""
    p = [Fraction(x) for x in p]
    if sum(p) != 1 or any(x < 0 for x in p):
        raise StructuralError("p must be a probability vector")
    quotas = [x * n for x in p]
    base = [math.floor(q) for q in quotas]
    short = n - sum(base)
    order = sorted(range(len(p)), key=lambda c: (-(quotas[c] - base[c]), c))
    for c in order[:short]:
        base[c] += 1
    return tuple(base)


@dataclass
class ScanEntry:
    n: int
    state: tuple | None
    holds: bool | None
    violations: int = 0
    report: SppReport | None = None
    error: str | None = None


def spp_scan(p, n_list, metric, radii, rule, cap=metrics.BALL_CAP):
    out = []
    for n in n_list:
        s = largest_remainder(p, n)
        struct = InformationStructure.concentric(metric, s, radii)
        try:
            rep = spp_check(struct, rule, cap)
        except CapacityError as exc:
            out.append(ScanEntry(n, s, None, error=str(exc)))
            continue
        out.append(ScanEntry(n, s, rep.holds, rep.count, rep))
    return out
