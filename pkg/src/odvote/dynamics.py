"""Iterative voting: voters take turns making dominance moves until nobody
wants to move or a profile repeats."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import metrics
from .dominance import contexts, is_od_equilibrium, od_set, uod_set
from .election import Bias, Preference, VotingRule, add, allowed_ballots, winner
from .epistemic import CliqueClosure, DistanceBased, FullInformation
from .errors import CapacityError, ConfigError
from .heuristics import evaluate_heuristic, model_for


# -- schedulers -----------------------------------------------------------------


@dataclass
class RoundRobin:
    pointer: int = 0
    name = "round-robin"

    def order(self, n):
        return [(self.pointer + i) % n for i in range(n)]

    def moved(self, voter, n):
        self.pointer = (voter + 1) % n


@dataclass
class RandomSeeded:
    seed: int = 0
    name = "random"

    def __post_init__(self):
        self._rng = random.Random(self.seed)

    def order(self, n):
        out = list(range(n))
        self._rng.shuffle(out)
        return out

    def moved(self, voter, n):
        pass


@dataclass
class ExhaustiveAdversarial:
    """Every activation order; explored by ``explore`` up to ``depth`` moves."""

    depth: int = 10_000
    name = "exhaustive"


# -- move policies --------------------------------------------------------------


@dataclass(frozen=True)
class BestUOD:
    name = "best-uod"

    def propose(self, ctx, model):
        uod = uod_set(ctx, model)
        if not uod:
            return None
        ballots = allowed_ballots(ctx.rule, ctx.prefs.bias is Bias.LAZY)
        return min(
            uod,
            key=lambda b: (ctx.prefs.ranks[winner(add(ctx.state, b))], ballots.index(b)),
        )


@dataclass(frozen=True)
class AnyOD:
    name = "any-od"

    def propose(self, ctx, model):
        od = od_set(ctx, model)
        return od[0] if od else None


@dataclass(frozen=True)
class HeuristicPolicy:
    kind: object

    @property
    def name(self):
        return f"heuristic:{self.kind.name}"

    def propose(self, ctx, model):
        out = evaluate_heuristic(self.kind, ctx)
        return out[0] if out else None

    def model(self):
        return model_for(self.kind)


# -- trajectories ----------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    step: int
    voter: int
    old: tuple
    new: tuple
    aggregate: tuple


@dataclass(frozen=True)
class Converged:
    steps: int
    verified: bool
    kind = "converged"


@dataclass(frozen=True)
class Cycle:
    period: int
    first_repeat: int  # step index of the first visit of the repeated profile
    kind = "cycle"


@dataclass(frozen=True)
class Truncated:
    cap: int
    kind = "truncated"


@dataclass
class Trajectory:
    initial: tuple
    moves: list = field(default_factory=list)
    status: object = None

    @property
    def final(self):
        return self.profile_at(len(self.moves))

    def profile_at(self, k):
        prof = list(self.initial)
        for mv in self.moves[:k]:
            prof[mv.voter] = mv.new
        return tuple(prof)


def _models(models, n):
    if isinstance(models, (list, tuple)):
        if len(models) != n:
            raise ConfigError("one model per voter expected")
        return list(models)
    return [models] * n


def _aggregate(profile, m):
    agg = (0,) * m
    for a in profile:
        agg = add(agg, a)
    return agg


def proposals(profile, prefs_list, models, rule, policy, voters=None):
    """Yields ``(voter, ballot)`` for voters with a move, in ``voters`` order."""
    ctxs = contexts(profile, prefs_list, rule)
    models = _models(models, len(profile))
    for i in voters if voters is not None else range(len(profile)):
        b = policy.propose(ctxs[i], models[i])
        if b is not None:
            yield i, tuple(b)


def step(profile, prefs_list, models, rule, scheduler, policy):
    """One move per the scheduler and policy, or None when nobody moves."""
    n = len(profile)
    for voter, b in proposals(profile, prefs_list, models, rule, policy, scheduler.order(n)):
        scheduler.moved(voter, n)
        return voter, b
    return None


def default_cap(n, m, k):
    return 10 * n * m * k


def _verify(profile, prefs_list, models, rule, policy):
    check_models = policy.model() if isinstance(policy, HeuristicPolicy) else models
    return is_od_equilibrium(list(profile), prefs_list, check_models, rule).is_equilibrium


def run(initial, prefs_list, models, rule, scheduler, policy, step_cap=None):
    profile = tuple(tuple(a) for a in initial)
    n = len(profile)
    if isinstance(scheduler, ExhaustiveAdversarial):
        return explore(profile, prefs_list, models, rule, policy, scheduler.depth).trajectory
    if step_cap is None:
        step_cap = default_cap(n, rule.m, _max_levels(models))
    if step_cap < 1:
        raise ConfigError("step_cap must be at least 1")
    traj = Trajectory(profile)
    seen = {profile: 0}
    for t in range(step_cap):
        mv = step(profile, prefs_list, models, rule, scheduler, policy)
        if mv is None:
            traj.status = Converged(t, _verify(profile, prefs_list, models, rule, policy))
            return traj
        voter, b = mv
        prof = list(profile)
        old = prof[voter]
        prof[voter] = b
        profile = tuple(prof)
        traj.moves.append(Move(t, voter, old, b, _aggregate(profile, rule.m)))
        if profile in seen:
            first = seen[profile]
            traj.status = Cycle(t + 1 - first, first)
            return traj
        seen[profile] = t + 1
    traj.status = Truncated(step_cap)
    return traj


def _max_levels(models):
    ms = models if isinstance(models, (list, tuple)) else [models]
    k = 1
    for md in ms:
        radii = getattr(md, "radii", None)
        if radii:
            k = max(k, len(radii))
    return k


# -- adversarial exploration -----------------------------------------------------


@dataclass
class Exploration:
    reachable: int
    terminals: int
    cycle: list | None  # moves along one cycle witness
    truncated: bool
    trajectory: Trajectory


def explore(initial, prefs_list, models, rule, policy, depth=10_000, max_profiles=200_000):
    """Depth-first search over every activation order from ``initial``.

    A back edge to a profile on the current path is a cycle reachable under
    some scheduler.
    """
    initial = tuple(tuple(a) for a in initial)
    succ_cache = {}

    def successors(prof):
        if prof not in succ_cache:
            succ_cache[prof] = list(proposals(prof, prefs_list, models, rule, policy))
        return succ_cache[prof]

    color = {initial: 1}  # 1 on path, 2 done
    path = [initial]
    path_moves = []
    stack = [iter(successors(initial))]
    terminals = 0
    first_terminal_moves = None
    truncated = False
    cycle = None
    while stack:
        prof = path[-1]
        nxt = next(stack[-1], None)
        if nxt is None:
            if not successors(prof):
                terminals += 1
                if first_terminal_moves is None:
                    first_terminal_moves = list(path_moves)
            color[prof] = 2
            stack.pop()
            path.pop()
            if path_moves:
                path_moves.pop()
            continue
        voter, b = nxt
        new = list(prof)
        old = new[voter]
        new[voter] = b
        new = tuple(new)
        mv = Move(len(path_moves), voter, old, b, _aggregate(new, rule.m))
        state = color.get(new)
        if state == 1:
            start = path.index(new)
            cycle = path_moves[start:] + [mv]
            traj = Trajectory(initial, path_moves + [mv], Cycle(len(path) - start, start))
            return Exploration(len(color), terminals, cycle, False, traj)
        if state == 2:
            continue
        if len(path_moves) >= depth or len(color) >= max_profiles:
            truncated = True
            continue
        color[new] = 1
        path.append(new)
        path_moves.append(mv)
        stack.append(iter(successors(new)))
    moves = first_terminal_moves or []
    status = Truncated(depth) if truncated and first_terminal_moves is None else None
    if status is None:
        final = list(initial)
        for mv in moves:
            final[mv.voter] = mv.new
        status = Converged(len(moves), _verify(tuple(final), prefs_list, models, rule, policy))
    return Exploration(len(color), terminals, None, truncated, Trajectory(initial, moves, status))


# -- batches -------------------------------------------------------------------------


@dataclass
class BatchConfig:
    rule: str = "plurality"
    m: int = 3
    n: int = 5
    m_min: int | None = None
    n_min: int | None = None
    k: int | None = None  # k-approval
    model: str = "linf"  # linf | candidate-wise | emd | l1 | full-information, or clique-<family>
    radii_votes: tuple = (0, 3)  # per-voter radius range (inclusive), in votes
    levels: int = 2
    scheduler: str = "random"  # round-robin | random | mixed | exhaustive
    policy: str = "best-uod"  # best-uod | any-od | both
    trials: int = 100
    seed: int = 0
    truthful_start: bool = False
    step_cap: int | None = None


@dataclass
class TrialResult:
    index: int
    m: int
    n: int
    policy: str
    status: str
    steps: int
    verified: bool | None
    trajectory: Trajectory | None = None
    error: str | None = None


@dataclass
class BatchReport:
    trials: int = 0
    converged: int = 0
    verified: int = 0
    cycles: int = 0
    truncated: int = 0
    errors: int = 0
    steps: list = field(default_factory=list)
    cycle_witnesses: list = field(default_factory=list)
    results: list = field(default_factory=list)

    @property
    def rate(self):
        return self.converged / self.trials if self.trials else None

    @property
    def vacuous(self):
        return self.trials == 0


def make_rule(name, m, k=None):
    if name == "k-approval":
        return VotingRule.k_approval(m, k)
    try:
        return getattr(VotingRule, name.replace("-", "_"))(m)
    except AttributeError:
        raise ConfigError(f"unknown rule {name!r}") from None


def make_model(family, n, m, rng, radii_votes=(0, 3), levels=2):
    if family.startswith("clique-"):
        return CliqueClosure(make_model(family[7:], n, m, rng, radii_votes, levels))
    if family == "full-information":
        return FullInformation()
    lo, hi = radii_votes
    # a radius of n votes or more would make the ball unbounded
    radii = sorted(min(rng.randint(lo, hi), n - 1) for _ in range(levels))
    radii = tuple(metrics.Radius.votes(r, n) for r in radii)
    if family == "linf":
        metric = metrics.Metric.linf(n)
    elif family == "candidate-wise":
        metric = metrics.Metric.candidate_wise((1,) * m, n)
    elif family == "emd":
        metric = metrics.Metric.emd(n)
    elif family == "l1":
        metric = metrics.Metric.l1(n)
    else:
        raise ConfigError(f"unknown model family {family!r}")
    return DistanceBased(metric, radii)


def make_policy(name):
    if name == "best-uod":
        return BestUOD()
    if name == "any-od":
        return AnyOD()
    raise ConfigError(f"unknown policy {name!r}")


def make_scheduler(name, rng):
    if name == "round-robin":
        return RoundRobin()
    if name == "random":
        return RandomSeeded(rng.getrandbits(32))
    if name == "mixed":
        return make_scheduler(rng.choice(("round-robin", "random")), rng)
    if name == "exhaustive":
        return ExhaustiveAdversarial()
    raise ConfigError(f"unknown scheduler {name!r}")


def trial_rng(seed, index):
    return random.Random(seed * 1_000_003 + index)


def sample_trial(cfg, index):
    """Rule, preferences, models and initial profile of one batch trial."""
    rng = trial_rng(cfg.seed, index)
    m = rng.randint(cfg.m_min or cfg.m, cfg.m)
    n = rng.randint(cfg.n_min or cfg.n, cfg.n)
    rule = make_rule(cfg.rule, m, cfg.k)
    prefs = []
    for _ in range(n):
        order = list(range(m))
        rng.shuffle(order)
        prefs.append(Preference.from_order(order))
    models = [make_model(cfg.model, n, m, rng, cfg.radii_votes, cfg.levels) for _ in range(n)]
    ballots = allowed_ballots(rule)
    if cfg.truthful_start and rule.is_permutation_rule:
        profile = [rule.from_ranking(p.order()) for p in prefs]
    else:
        profile = [rng.choice(ballots) for _ in range(n)]
    return rule, prefs, models, profile, rng


def batch_verify(cfg):
    report = BatchReport()
    policies = ["best-uod", "any-od"] if cfg.policy == "both" else [cfg.policy]
    for index in range(cfg.trials):
        rule, prefs, models, profile, rng = sample_trial(cfg, index)
        for pname in policies:
            report.trials += 1
            sched = make_scheduler(cfg.scheduler, rng)
            try:
                traj = run(profile, prefs, models, rule, sched, make_policy(pname), cfg.step_cap)
            except CapacityError as exc:
                report.errors += 1
                report.results.append(
                    TrialResult(index, rule.m, len(prefs), pname, "error", 0, None, error=str(exc))
                )
                continue
            st = traj.status
            verified = getattr(st, "verified", None)
            if isinstance(st, Converged):
                report.converged += 1
                report.verified += bool(verified)
                report.steps.append(st.steps)
            elif isinstance(st, Cycle):
                report.cycles += 1
                report.cycle_witnesses.append((index, pname, traj))
            else:
                report.truncated += 1
            report.results.append(
                TrialResult(index, rule.m, len(prefs), pname, st.kind, len(traj.moves), verified, traj)
            )
    return report
