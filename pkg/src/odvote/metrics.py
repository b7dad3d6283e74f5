"""Distances between score vectors and the balls they induce.

All distances are exact ``Fraction`` values in ``[0, 1]``; a ball is the set
``{t >= 0 : distance(center, t) <= r}`` evaluated exactly, so ball membership
and the distance function never disagree.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._backend import kernels
from .errors import CapacityError, DomainError, StructuralError

BALL_CAP = 10**7

# EMD = l1 / (EMD_SCALE * n): with 2 it is the fraction of relocated votes.
EMD_SCALE = 2


class MetricKind(enum.Enum):
    EMD = "emd"
    L1 = "l1"
    LINF = "linf"
    CANDIDATE_WISE = "candidate-wise"


@dataclass(frozen=True)
class Metric:
    kind: MetricKind
    n: int | None = None
    weights: tuple | None = None  # candidate-wise: D_c(x, y) = min(1, w_c |x - y| / n)
    fixed_total: bool = False  # l1 only; EMD always keeps the total

    def __post_init__(self):
        if self.kind is MetricKind.CANDIDATE_WISE:
            if not self.weights or any(Fraction(w) <= 0 for w in self.weights):
                raise StructuralError("candidate-wise metric needs positive weights")
            object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))

    @classmethod
    def emd(cls, n=None):
        return cls(MetricKind.EMD, n)

    @classmethod
    def l1(cls, n=None, fixed_total=False):
        return cls(MetricKind.L1, n, fixed_total=fixed_total)

    @classmethod
    def linf(cls, n=None):
        return cls(MetricKind.LINF, n)

    @classmethod
    def candidate_wise(cls, weights, n=None):
        return cls(MetricKind.CANDIDATE_WISE, n, tuple(weights))

    def with_n(self, n):
        return Metric(self.kind, n, self.weights, self.fixed_total)

    @property
    def keeps_total(self):
        return self.kind is MetricKind.EMD or (self.kind is MetricKind.L1 and self.fixed_total)

    def __str__(self):
        if self.kind is MetricKind.CANDIDATE_WISE:
            return "candidate-wise(" + ",".join(str(w) for w in self.weights) + ")"
        return self.kind.value


@dataclass(frozen=True)
class Radius:
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        if not 0 <= v <= 1:
            raise StructuralError(f"radius {v} outside [0, 1]")
        object.__setattr__(self, "value", v)

    @classmethod
    def percent(cls, p):
        return cls(Fraction(p) / 100)

    @classmethod
    def votes(cls, k, n):
        return cls(Fraction(k, n))

    @classmethod
    def parse(cls, text):
        """Accepts ``"7%"``, ``"3/100"`` or ``"0.07"``."""
        text = str(text).strip()
        if text.endswith("%"):
            return cls.percent(Fraction(text[:-1]))
        return cls(Fraction(text))

    def vote_units(self, n):
        """Largest whole number of votes ``k`` with ``k / n <= r``."""
        return math.floor(self.value * n)

    def __str__(self):
        pct = self.value * 100
        if pct.denominator == 1:
            return f"{pct.numerator}%"
        return str(self.value)


@dataclass(frozen=True)
class MetricProperties:
    neutral: bool
    candidate_wise: bool


def _norm(metric, s, t=None):
    if metric.n is not None:
        return metric.n
    ns = sum(s)
    if t is not None and sum(t) != ns:
        raise DomainError("vectors of different totals need an explicit normalisation n")
    return ns


def distance(metric, s, t):
    s = tuple(s)
    t = tuple(t)
    if len(s) != len(t):
        raise StructuralError(f"length mismatch: {len(s)} vs {len(t)}")
    if metric.keeps_total and sum(s) != sum(t):
        raise DomainError(f"{metric} is only defined between vectors of equal total")
    n = _norm(metric, s, t)
    if n <= 0:
        return Fraction(0) if s == t else Fraction(1)
    diffs = [abs(x - y) for x, y in zip(s, t)]
    kind = metric.kind
    if kind in (MetricKind.EMD, MetricKind.L1):
        d = Fraction(sum(diffs), EMD_SCALE * n)
    elif kind is MetricKind.LINF:
        d = Fraction(max(diffs), n)
    else:
        if len(metric.weights) != len(s):
            raise StructuralError("candidate-wise weights do not match m")
        d = max(min(Fraction(1), w * x / n) for w, x in zip(metric.weights, diffs))
    return min(Fraction(1), d)


def budgets(metric, r, n, m):
    """Integer bounds equivalent to ``distance <= r``.

    For l1-type metrics a single bound on ``sum|t - c|``; for max-type metrics
    one bound on ``|t_c - c_c|`` per candidate.  ``None`` means unbounded.
    """
    r = r.value if isinstance(r, Radius) else Fraction(r)
    kind = metric.kind
    if kind in (MetricKind.EMD, MetricKind.L1):
        if r >= 1 and not metric.keeps_total:
            return None
        return math.floor(EMD_SCALE * r * n)
    if r >= 1:
        return None
    if kind is MetricKind.LINF:
        return (math.floor(r * n),) * m
    return tuple(math.floor(r * n / w) for w in metric.weights)


def ball_array(metric, center, r, cap=BALL_CAP):
    """Ball around ``center`` as an ``(N, m)`` int64 array in lexicographic order."""
    center = tuple(int(x) for x in center)
    m = len(center)
    n = _norm(metric, center)
    b = budgets(metric, r, n, m)
    if b is None:
        raise DomainError(f"the {metric} ball of radius {r} is unbounded")
    if metric.kind in (MetricKind.EMD, MetricKind.L1):
        if metric.keeps_total:
            # moving more than the total is never needed
            b = min(b, 2 * sum(center))
        states, visited, overflow = kernels.l1_ball(
            np.array(center, dtype=np.int64), b, metric.keeps_total, cap
        )
        if overflow:
            raise CapacityError(
                f"ball enumeration visited more than {cap} candidates", cap=cap, reached=visited
            )
        return states
    axes = [np.arange(max(0, c - k), c + k + 1, dtype=np.int64) for c, k in zip(center, b)]
    size = math.prod(len(a) for a in axes)
    if size > cap:
        raise CapacityError(f"ball has {size} states, over the cap {cap}", cap=cap, reached=size)
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)


def ball(metric, center, r, cap=BALL_CAP):
    return [tuple(int(x) for x in row) for row in ball_array(metric, center, r, cap)]


def within(metric, center, states, r):
    """Boolean mask: which rows of ``states`` lie in the ball."""
    center = np.asarray(center, dtype=np.int64)
    states = np.asarray(states, dtype=np.int64).reshape(-1, len(center))
    n = _norm(metric, tuple(int(x) for x in center))
    b = budgets(metric, r, n, len(center))
    absd = np.abs(states - center[None, :])
    if metric.keeps_total:
        ok = states.sum(axis=1) == center.sum()
    else:
        ok = np.ones(len(states), dtype=bool)
    if b is None:
        return ok
    if metric.kind in (MetricKind.EMD, MetricKind.L1):
        return ok & (absd.sum(axis=1) <= b)
    return ok & np.all(absd <= np.array(b, dtype=np.int64)[None, :], axis=1)


def metric_properties(metric):
    kind = metric.kind
    if kind is MetricKind.CANDIDATE_WISE:
        return MetricProperties(neutral=len(set(metric.weights)) == 1, candidate_wise=True)
    return MetricProperties(neutral=True, candidate_wise=kind is MetricKind.LINF)


def is_neutral_on(metric, samples, perms=None):
    """Empirical neutrality: distance invariant under coordinate permutations."""
    for s, t in samples:
        m = len(s)
        for p in perms or itertools.permutations(range(m)):
            ps = tuple(s[i] for i in p)
            pt = tuple(t[i] for i in p)
            if distance(metric, ps, pt) != distance(metric, s, t):
                return False
    return True
