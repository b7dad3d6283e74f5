import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odvote.errors import CapacityError, DomainError
from odvote.metrics import Metric, Radius, ball, distance, metric_properties, within


def all_vectors(m, total):
    return [v for v in itertools.product(range(total + 1), repeat=m) if sum(v) == total]


def test_distance_examples():
    s = (29, 26, 22, 17, 6)
    assert distance(Metric.emd(), s, s) == 0
    t = (28, 27, 22, 17, 6)
    assert distance(Metric.emd(100), s, t) == Fraction(1, 100)
    assert Fraction(sum(abs(x - y) for x, y in zip(s, t)), 2 * 100) == Fraction(1, 100)
    u = (26, 29, 22, 17, 6)
    assert distance(Metric.linf(100), s, u) == Fraction(3, 100)


def test_emd_needs_equal_totals():
    with pytest.raises(DomainError):
        distance(Metric.emd(), (1, 2), (2, 2))


def test_radius_zero_is_centre():
    for metric in (Metric.emd(), Metric.l1(), Metric.linf(), Metric.candidate_wise((1, 2, 3))):
        assert ball(metric, (4, 1, 2), Radius(0)) == [(4, 1, 2)]


def test_emd_ball_two_candidates():
    got = set(ball(Metric.emd(), (3, 2), Radius.votes(1, 5)))
    assert got == {(3, 2), (2, 3), (4, 1)}
    brute = {t for t in all_vectors(2, 5) if sum(abs(a - b) for a, b in zip(t, (3, 2))) <= 2}
    assert got == brute


def test_linf_ball_two_candidates():
    got = set(ball(Metric.linf(), (3, 2), Radius.votes(1, 5)))
    assert got == {(a, b) for a in (2, 3, 4) for b in (1, 2, 3)}


def test_ball_cap():
    with pytest.raises(CapacityError) as exc:
        ball(Metric.linf(), (50, 50, 50, 50), Radius.percent(10), cap=1000)
    assert exc.value.cap == 1000 and exc.value.reached > 1000


def test_radius_parsing():
    assert Radius.parse("7%").value == Fraction(7, 100)
    assert Radius.parse("3/100") == Radius.parse("0.03")
    assert Radius.votes(3, 100).vote_units(100) == 3
    with pytest.raises(Exception):
        Radius.parse("150%")


def test_metric_properties():
    assert metric_properties(Metric.emd()) == (True, False) or (
        metric_properties(Metric.emd()).neutral and not metric_properties(Metric.emd()).candidate_wise
    )
    lin = metric_properties(Metric.linf())
    assert lin.neutral and lin.candidate_wise
    cw = metric_properties(Metric.candidate_wise((1, 2, 1)))
    assert not cw.neutral and cw.candidate_wise


@pytest.mark.parametrize("name", ["emd", "l1", "linf", "cw"])
def test_nested_balls_and_membership(name):
    for m, total in ((2, 6), (3, 5), (4, 4)):
        metric = {
            "emd": Metric.emd(),
            "l1": Metric.l1(total, fixed_total=True),
            "linf": Metric.linf(total),
            "cw": Metric.candidate_wise(range(1, m + 1), total),
        }[name]
        for centre in all_vectors(m, total):
            prev = set()
            for v in range(total):
                r = Radius.votes(v, total)
                cur = set(ball(metric, centre, r))
                assert prev <= cur
                for t in cur:
                    assert distance(metric, centre, t) <= r.value
                    if metric.keeps_total:
                        assert sum(t) == total
                prev = cur
            # nothing outside the ball is within r
            space = all_vectors(m, total) if metric.keeps_total else itertools.product(range(2 * total + 1), repeat=m)
            r = Radius.votes(1, total)
            inside = set(ball(metric, centre, r))
            for t in space:
                assert (distance(metric, centre, t) <= r.value) == (tuple(t) in inside)


def test_within_agrees_with_ball():
    metric = Metric.emd()
    centre = (4, 3, 1)
    r = Radius.votes(2, 8)
    states = all_vectors(3, 8)
    mask = within(metric, centre, states, r)
    assert {s for s, ok in zip(states, mask) if ok} == set(ball(metric, centre, r))


METRICS = [Metric.emd(30), Metric.l1(30), Metric.linf(30), Metric.candidate_wise((1, 2, 3), 30)]


@settings(max_examples=300)
@given(st.sampled_from(METRICS), st.lists(st.tuples(*[st.integers(0, 10)] * 3), min_size=3, max_size=3))
def test_metric_axioms(metric, vs):
    s, t, u = vs
    if metric.keeps_total:
        # move onto equal totals: replace the last entry
        total = 15
        s, t, u = ((x, y, total - x - y) if x + y <= total else (0, 0, total) for x, y, _ in (s, t, u))
    d = lambda a, b: distance(metric, a, b)
    assert d(s, s) == 0
    assert d(s, t) == d(t, s)
    assert d(s, u) <= d(s, t) + d(t, u)
    assert 0 <= d(s, t) <= 1


def test_triangle_inequality_sampled():
    rng = random.Random(5)
    for metric in METRICS:
        for _ in range(2500):
            if metric.keeps_total:
                vs = []
                for _ in range(3):
                    a = rng.randint(0, 15)
                    b = rng.randint(0, 15 - a)
                    vs.append((a, b, 15 - a - b))
            else:
                vs = [tuple(rng.randint(0, 12) for _ in range(3)) for _ in range(3)]
            s, t, u = vs
            assert distance(metric, s, u) <= distance(metric, s, t) + distance(metric, t, u)
