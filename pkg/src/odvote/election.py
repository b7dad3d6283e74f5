"""Candidates, ballots, score-based voting rules and preference orders.

Candidates are the integers ``0..m-1``.  Score vectors and ballots are plain
tuples of non-negative ints.  Ties in the winner are broken towards the lowest
candidate index.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass

from .errors import AmbiguityError, CapacityError, RuleViolation, StructuralError

BORDA_CAP = 6
APPROVAL_CAP = 20


class RuleKind(enum.Enum):
    PLURALITY = "plurality"
    VETO = "veto"
    BORDA = "borda"
    APPROVAL = "approval"
    K_APPROVAL = "k-approval"


class Bias(enum.Enum):
    NONE = "none"
    TRUTH = "truth"
    LAZY = "lazy"


def as_scores(s, m=None):
    s = tuple(int(x) for x in s)
    if not s:
        raise StructuralError("empty score vector")
    if m is not None and len(s) != m:
        raise StructuralError(f"expected {m} entries, got {len(s)}")
    if any(x < 0 for x in s):
        raise StructuralError(f"negative entry in {s}")
    return s


def winner(s):
    """Index of the highest score; ties go to the lowest index."""
    if len(s) == 0:
        raise StructuralError("winner of an empty score vector")
    best = 0
    for c in range(1, len(s)):
        if s[c] > s[best]:
            best = c
    return best


def add(s, a):
    if len(s) != len(a):
        raise StructuralError(f"length mismatch: {len(s)} vs {len(a)}")
    return tuple(x + y for x, y in zip(s, a))


def subtract(s, a):
    out = tuple(x - y for x, y in zip(s, a))
    if len(s) != len(a) or any(x < 0 for x in out):
        raise StructuralError(f"cannot remove ballot {a} from {s}")
    return out


def score_order(s):
    """Candidates by decreasing score, ties by index."""
    return tuple(sorted(range(len(s)), key=lambda c: (-s[c], c)))


@dataclass(frozen=True)
class VotingRule:
    kind: RuleKind
    m: int
    k: int | None = None
    cap: int = BORDA_CAP

    def __post_init__(self):
        if self.m < 2:
            raise StructuralError("a voting rule needs at least two candidates")
        if self.kind is RuleKind.K_APPROVAL:
            if self.k is None or not 1 <= self.k < self.m:
                raise StructuralError(f"k-approval needs 1 <= k < m, got k={self.k}")

    @classmethod
    def plurality(cls, m):
        return cls(RuleKind.PLURALITY, m)

    @classmethod
    def veto(cls, m):
        return cls(RuleKind.VETO, m)

    @classmethod
    def borda(cls, m, cap=BORDA_CAP):
        return cls(RuleKind.BORDA, m, cap=cap)

    @classmethod
    def approval(cls, m):
        return cls(RuleKind.APPROVAL, m)

    @classmethod
    def k_approval(cls, m, k):
        return cls(RuleKind.K_APPROVAL, m, k)

    @property
    def name(self):
        if self.kind is RuleKind.K_APPROVAL:
            return f"{self.k}-approval"
        return self.kind.value

    @property
    def is_permutation_rule(self):
        return self.kind is not RuleKind.APPROVAL

    def template(self):
        """Sorted-descending score template of a permutation rule."""
        m = self.m
        if self.kind is RuleKind.PLURALITY:
            return (1,) + (0,) * (m - 1)
        if self.kind is RuleKind.VETO:
            return (1,) * (m - 1) + (0,)
        if self.kind is RuleKind.BORDA:
            return tuple(range(m - 1, -1, -1))
        if self.kind is RuleKind.K_APPROVAL:
            return (1,) * self.k + (0,) * (m - self.k)
        raise StructuralError("approval ballots have no fixed template")

    def max_score(self):
        return self.m - 1 if self.kind is RuleKind.BORDA else 1

    def ballots(self, abstain=False):
        return allowed_ballots(self, abstain)

    def is_valid(self, a, abstain=False):
        return is_valid_ballot(self, a, abstain)

    def from_ranking(self, ranking):
        """Ballot giving the template scores along ``ranking`` (best first)."""
        if self.kind is RuleKind.APPROVAL:
            raise StructuralError("approval ballots are not rankings")
        scores = [0] * self.m
        for pos, c in enumerate(ranking):
            scores[c] = self.template()[pos]
        return tuple(scores)


@functools.lru_cache(maxsize=256)
def allowed_ballots(rule, abstain=False):
    """Exact enumeration of the allowed set, in canonical order.

    The abstain ballot (all zeros) is appended when ``abstain`` is set and it
    is not already a member.
    """
    m = rule.m
    kind = rule.kind
    if kind is RuleKind.PLURALITY:
        out = [tuple(int(i == c) for i in range(m)) for c in range(m)]
    elif kind is RuleKind.VETO:
        out = [tuple(int(i != c) for i in range(m)) for c in range(m)]
    elif kind is RuleKind.BORDA:
        if m > rule.cap:
            raise CapacityError(
                f"Borda enumeration with m={m} exceeds cap {rule.cap}", cap=rule.cap, reached=m
            )
        out = sorted(set(itertools.permutations(range(m))), reverse=True)
    elif kind is RuleKind.APPROVAL:
        if m > APPROVAL_CAP:
            raise CapacityError(
                f"approval enumeration with m={m} exceeds cap {APPROVAL_CAP}",
                cap=APPROVAL_CAP,
                reached=m,
            )
        out = [tuple(b) for b in itertools.product((1, 0), repeat=m)]
    else:
        out = [
            tuple(int(i in chosen) for i in range(m))
            for chosen in itertools.combinations(range(m), rule.k)
        ]
    zero = (0,) * m
    if abstain and zero not in out:
        out.append(zero)
    return tuple(out)


def ballot_count(rule):
    """Closed-form |A|."""
    m = rule.m
    return {
        RuleKind.PLURALITY: m,
        RuleKind.VETO: m,
        RuleKind.BORDA: math.factorial(m),
        RuleKind.APPROVAL: 2**m,
        RuleKind.K_APPROVAL: math.comb(m, rule.k or 0),
    }[rule.kind]


def is_valid_ballot(rule, a, abstain=False):
    a = tuple(a)
    if len(a) != rule.m or any(x < 0 for x in a):
        return False
    if abstain and not any(a):
        return True
    kind = rule.kind
    if kind is RuleKind.APPROVAL:
        return all(x in (0, 1) for x in a)
    return tuple(sorted(a, reverse=True)) == rule.template()


def check_ballot(rule, a, abstain=False):
    a = tuple(a)
    if not is_valid_ballot(rule, a, abstain):
        raise RuleViolation(f"{a} is not a valid {rule.name} ballot")
    return a


def outcome(s, a, rule=None, abstain=False):
    """Winner once ballot ``a`` is added to state ``s``."""
    if rule is not None:
        check_ballot(rule, a, abstain)
    return winner(add(s, a))


@dataclass(frozen=True)
class Preference:
    """Weak order over candidates: lower rank means more preferred."""

    ranks: tuple
    bias: Bias = Bias.NONE
    threshold: int | None = None  # approve candidates with rank < threshold

    def __post_init__(self):
        if len(self.ranks) < 1:
            raise StructuralError("empty preference")

    @classmethod
    def from_order(cls, order, bias=Bias.NONE, threshold=None):
        """Strict order from a best-first sequence of candidate indices."""
        ranks = [0] * len(order)
        if sorted(order) != list(range(len(order))):
            raise StructuralError(f"{order} is not a permutation")
        for pos, c in enumerate(order):
            ranks[c] = pos
        return cls(tuple(ranks), bias, threshold)

    @classmethod
    def from_classes(cls, classes, bias=Bias.NONE, threshold=None):
        """Weak order from best-first indifference classes."""
        m = sum(len(c) for c in classes)
        ranks = [None] * m
        for pos, group in enumerate(classes):
            for c in group:
                ranks[c] = pos
        if None in ranks:
            raise StructuralError("indifference classes do not cover all candidates")
        return cls(tuple(ranks), bias, threshold)

    @property
    def m(self):
        return len(self.ranks)

    def with_bias(self, bias):
        return Preference(self.ranks, bias, self.threshold)

    def indicator(self, c, d):
        """+1 if c is preferred to d, -1 if d to c, 0 when indifferent."""
        r, q = self.ranks[c], self.ranks[d]
        return (r < q) - (r > q)

    def prefers(self, c, d):
        return self.ranks[c] < self.ranks[d]

    def is_strict(self):
        return len(set(self.ranks)) == len(self.ranks)

    def order(self):
        """Best-first candidate sequence; indifference resolved by index."""
        return tuple(sorted(range(self.m), key=lambda c: (self.ranks[c], c)))

    def classes(self):
        groups = {}
        for c in self.order():
            groups.setdefault(self.ranks[c], []).append(c)
        return [tuple(groups[r]) for r in sorted(groups)]

    def top(self):
        best = min(self.ranks)
        tops = [c for c in range(self.m) if self.ranks[c] == best]
        if len(tops) > 1:
            raise AmbiguityError(f"no unique favourite among {tops}")
        return tops[0]

    def bottom(self):
        worst = max(self.ranks)
        bottoms = [c for c in range(self.m) if self.ranks[c] == worst]
        if len(bottoms) > 1:
            raise AmbiguityError(f"no unique least-preferred among {bottoms}")
        return bottoms[0]

    def favourite_among(self, cands):
        cands = list(cands)
        best = min(self.ranks[c] for c in cands)
        tops = [c for c in cands if self.ranks[c] == best]
        if len(tops) > 1:
            raise AmbiguityError(f"no unique favourite among {tops}")
        return tops[0]


def truthful_ballot(rule, pref, threshold=None):
    m = rule.m
    if pref.m != m:
        raise StructuralError("preference and rule disagree on m")
    if rule.kind is RuleKind.APPROVAL:
        threshold = pref.threshold if threshold is None else threshold
        if threshold is None:
            raise AmbiguityError("approval sincerity needs an approval threshold")
        return tuple(int(pref.ranks[c] < threshold) for c in range(m))
    if not pref.is_strict():
        raise AmbiguityError("truthful ballot needs a strict preference order")
    return rule.from_ranking(pref.order())


def favoured_ballot(rule, pref):
    """The ballot a biased voter prefers among outcome-equivalent ones."""
    if pref.bias is Bias.TRUTH:
        return truthful_ballot(rule, pref)
    if pref.bias is Bias.LAZY:
        return (0,) * rule.m
    return None


def compare(pref, x, y, rule=None):
    """Compare (winner, ballot) pairs: winners first, then the voter's bias.

    Returns 1 if ``x`` is preferred, -1 if ``y`` is, 0 when indifferent.
    """
    wx, ax = x
    wy, ay = y
    c = pref.indicator(wx, wy)
    if c or pref.bias is Bias.NONE:
        return c
    if pref.bias is Bias.TRUTH:
        if rule is None:
            raise StructuralError("truth bias comparison needs the voting rule")
        fav = truthful_ballot(rule, pref)
    else:
        fav = (0,) * len(ax)
    ax, ay = tuple(ax), tuple(ay)
    return (ax == fav and ay != fav) - (ay == fav and ax != fav)
