"""Ordinal dominance between ballots: the graph check, a set-level oracle,
OD/UOD sets and OD-equilibrium tests."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .election import Bias, add, allowed_ballots, compare, favoured_ballot, subtract, winner
from .epistemic import EpistemicModel, VoterContext, derive_structure
from .errors import StructuralError


@dataclass(frozen=True)
class Verdict:
    dominates: bool
    level: int | None  # 1-based first certifying level
    trace: tuple  # per level (safe, pivot, dom)

    def __bool__(self):
        return self.dominates


def _ballots_for(ctx):
    return allowed_ballots(ctx.rule, ctx.prefs.bias is Bias.LAZY)


def od_check(a_new, a_cur, prefs, struct, rule=None):
    """Graph-based dominance of ``a_new`` over ``a_cur``; O(m^2 k).

    With a biased preference and ``rule`` given, the favoured ballot also
    dominates any ballot it cannot be told apart from on the outermost graph.
    """
    m = struct.m
    if len(a_new) != m or len(a_cur) != m or prefs.m != m:
        raise StructuralError("ballots, preference and structure disagree on m")
    delta = np.subtract(a_new, a_cur, dtype=np.int64)
    eu, ev, ends = struct.edge_arrays()
    out = kernels.od_trace(delta, np.asarray(prefs.ranks, dtype=np.int64), eu, ev, ends)
    trace = tuple(tuple(int(x) for x in row) for row in out)
    for j, row in enumerate(trace):
        if row[2]:
            return Verdict(True, j + 1, trace)
    if rule is not None and prefs.bias is not Bias.NONE and tuple(a_new) != tuple(a_cur):
        fav = favoured_ballot(rule, prefs)
        if tuple(a_new) == fav and trace[-1][:2] == (0, 0):
            return Verdict(True, len(trace), trace[:-1] + ((0, 0, 1),))
    return Verdict(False, None, trace)


class Relation(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED_BY = "dominated-by"
    INDIFFERENT = "indifferent"
    INCOMPARABLE = "incomparable"


def _winners(states, a):
    return np.argmax(states + np.asarray(a, dtype=np.int64)[None, :], axis=1)


def _relation(better, worse):
    if better and not worse:
        return Relation.DOMINATES
    if worse and not better:
        return Relation.DOMINATED_BY
    if not better:
        return Relation.INDIFFERENT
    return Relation.INCOMPARABLE


def sdom_oracle(a_new, a_cur, prefs, info_set, rule):
    """Literal set-level comparison of the outcomes of two ballots."""
    states = info_set.array()
    ranks = np.asarray(prefs.ranks)
    rn = ranks[_winners(states, a_new)]
    rc = ranks[_winners(states, a_cur)]
    return _relation(bool((rn < rc).any()), bool((rn > rc).any()))


def od_oracle_level(a_new, a_cur, prefs, struct, rule):
    """First level (1-based) where ``a_new`` set-dominates ``a_cur``, else None."""
    mat = struct.materialize()
    ranks = np.asarray(prefs.ranks)
    rn = ranks[_winners(mat.states, a_new)]
    rc = ranks[_winners(mat.states, a_cur)]
    for j in range(mat.k):
        inside = mat.level <= j
        better = bool((rn[inside] < rc[inside]).any())
        worse = bool((rn[inside] > rc[inside]).any())
        if better and not worse:
            return j + 1
    if prefs.bias is not Bias.NONE and tuple(a_new) != tuple(a_cur):
        if (rn == rc).all():
            fav = favoured_ballot(rule, prefs)
            if tuple(a_new) == fav:
                return mat.k
    return None


def od_oracle(a_new, a_cur, prefs, struct, rule):
    return od_oracle_level(a_new, a_cur, prefs, struct, rule) is not None


def _use_exact(model, exact):
    return model.exact if exact is None else exact


def dominance(a_new, ctx, model, exact=None, a_cur=None):
    """Verdict of ``a_new`` against ``a_cur`` (default: the current ballot)."""
    a_cur = ctx.current if a_cur is None else a_cur
    if _use_exact(model, exact):
        struct = model.information_structure(ctx)
        if struct is None:
            raise StructuralError(f"model {model.name} has no information sets to check exactly")
        lv = od_oracle_level(a_new, a_cur, ctx.prefs, struct, ctx.rule)
        return Verdict(lv is not None, lv, ())
    return od_check(a_new, a_cur, ctx.prefs, derive_structure(model, ctx), ctx.rule)


def dominance_matrix(ctx, model, exact=None):
    """``D[i, k]``: ballot i ordinally dominates ballot k (canonical ballot order)."""
    ballots = _ballots_for(ctx)
    A = len(ballots)
    D = np.zeros((A, A), dtype=bool)
    if _use_exact(model, exact):
        struct = model.information_structure(ctx)
        for i in range(A):
            for k in range(A):
                if i != k:
                    D[i, k] = od_oracle(ballots[i], ballots[k], ctx.prefs, struct, ctx.rule)
        return D
    return graph_dominance_matrix(ballots, ctx.prefs, derive_structure(model, ctx), ctx.rule)


def graph_dominance_matrix(ballots, prefs, struct, rule=None):
    """All-pairs ``od_check`` in one numpy pass (same semantics, bias included)."""
    B = np.asarray(ballots, dtype=np.int64)
    A = len(B)
    eu, ev, ends = struct.edge_arrays()
    ranks = np.asarray(prefs.ranks, dtype=np.int64)
    ind = np.sign(ranks[ev] - ranks[eu])  # +1 when eu is preferred
    gap = B[:, eu] - B[:, ev]  # (A, E)
    eff = np.sign((gap[:, None, :] - gap[None, :, :]) * ind[None, None, :])
    D = np.zeros((A, A), dtype=bool)
    last_zero = np.ones((A, A), dtype=bool)
    for end in ends:
        if end == 0:
            continue
        e = eff[:, :, :end]
        D |= e.min(axis=2) + e.max(axis=2) >= 1
        last_zero = (e == 0).all(axis=2)
    if rule is not None and prefs.bias is not Bias.NONE:
        fav = favoured_ballot(rule, prefs)
        for i, b in enumerate(ballots):
            if tuple(b) == fav:
                D[i] |= last_zero[i]
    np.fill_diagonal(D, False)
    return D


def od_set(ctx, model, exact=None):
    """Ballots ordinally dominating the current one, in canonical order."""
    return tuple(b for b in _ballots_for(ctx) if dominance(b, ctx, model, exact).dominates)


def uod_set(ctx, model, exact=None):
    """Members of the OD set that no allowed ballot dominates."""
    ballots = _ballots_for(ctx)
    cur = tuple(ctx.current)
    D = dominance_matrix(ctx, model, exact)
    if cur in ballots:
        idx = ballots.index(cur)
        dom_cur = D[:, idx]
    else:
        dom_cur = np.array([dominance(b, ctx, model, exact).dominates for b in ballots])
    undominated = ~D.any(axis=0)
    return tuple(b for i, b in enumerate(ballots) if dom_cur[i] and undominated[i])


@dataclass
class EquilibriumReport:
    is_equilibrium: bool
    deviations: list = field(default_factory=list)  # (voter, ballot, level)


def contexts(profile, prefs_list, rule):
    poll = (0,) * rule.m
    for a in profile:
        poll = add(poll, a)
    return [
        VoterContext(subtract(poll, a), tuple(a), p, rule) for a, p in zip(profile, prefs_list)
    ]


def _per_voter(models, n):
    if isinstance(models, EpistemicModel):
        return [models] * n
    models = list(models)
    if len(models) != n:
        raise StructuralError("one model per voter expected")
    return models


def is_od_equilibrium(profile, prefs_list, models, rule, exact=None):
    ctxs = contexts(profile, prefs_list, rule)
    models = _per_voter(models, len(ctxs))
    devs = []
    for i, (ctx, model) in enumerate(zip(ctxs, models)):
        for b in _ballots_for(ctx):
            v = dominance(b, ctx, model, exact)
            if v.dominates:
                devs.append((i, b, v.level))
                break
    return EquilibriumReport(not devs, devs)


# -- brute-force game-theoretic references ----------------------------------


def better_responses(ctx):
    cur = (winner(add(ctx.state, ctx.current)), ctx.current)
    return tuple(
        b
        for b in _ballots_for(ctx)
        if compare(ctx.prefs, (winner(add(ctx.state, b)), b), cur, ctx.rule) > 0
    )


def best_responses(ctx):
    """Better responses not beaten by any other allowed ballot."""
    ballots = _ballots_for(ctx)
    pairs = [(winner(add(ctx.state, b)), b) for b in ballots]
    best = [p for p in pairs if all(compare(ctx.prefs, q, p, ctx.rule) <= 0 for q in pairs)]
    better = set(better_responses(ctx))
    return tuple(b for _, b in best if b in better)


def is_nash(profile, prefs_list, rule):
    return all(not better_responses(ctx) for ctx in contexts(profile, prefs_list, rule))
