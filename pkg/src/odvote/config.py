"""Run configuration: YAML or JSON mapping to typed objects, validated up front."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from . import heuristics as H
from .election import Bias, Preference, VotingRule
from .epistemic import CliqueClosure, DistanceBased, FullInformation
from .errors import ConfigError, OdvoteError, ParseError
from .metrics import BALL_CAP, Metric, Radius


def load_mapping(path):
    text = Path(path).read_text()
    try:
        data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        mark = getattr(exc, "problem_mark", None)
        line = getattr(exc, "lineno", None) or (mark.line + 1 if mark else None)
        raise ParseError(f"cannot read config: {exc}", line) from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return data


def _spec(value, what):
    """``"name"`` or ``{name: ..., **params}`` -> (name, params)."""
    if isinstance(value, str):
        return value, {}
    if isinstance(value, dict) and "name" in value:
        params = dict(value)
        return params.pop("name"), params
    raise ConfigError(f"cannot read {what} from {value!r}")


def parse_rule(value, m):
    name, params = _spec(value, "rule")
    try:
        if name == "plurality":
            return VotingRule.plurality(m)
        if name == "veto":
            return VotingRule.veto(m)
        if name == "borda":
            return VotingRule.borda(m, params.get("cap", 6))
        if name == "approval":
            return VotingRule.approval(m)
        if name == "k-approval":
            return VotingRule.k_approval(m, params.get("k"))
    except OdvoteError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown rule {name!r}")


def parse_metric(value, m, n=None):
    name, params = _spec(value, "metric")
    n = params.get("n", n)
    if name == "emd":
        return Metric.emd(n)
    if name == "l1":
        return Metric.l1(n, bool(params.get("fixed_total", False)))
    if name == "linf":
        return Metric.linf(n)
    if name == "candidate-wise":
        w = params.get("weights", [1] * m)
        if len(w) != m:
            raise ConfigError("candidate-wise weights must have one entry per candidate")
        return Metric.candidate_wise(w, n)
    raise ConfigError(f"unknown metric {name!r}")


def parse_radii(values):
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError("radii must be a non-empty list")
    try:
        radii = tuple(Radius.parse(v) for v in values)
    except (ValueError, ZeroDivisionError, OdvoteError) as exc:
        raise ConfigError(f"bad radius: {exc}") from None
    return radii


def parse_heuristic(value, m):
    name, p = _spec(value, "heuristic")

    def radius(key):
        if key not in p:
            raise ConfigError(f"heuristic {name} needs {key}")
        return Radius.parse(p[key])

    metric = parse_metric(p.get("metric", "emd"), m) if "metric" in p or name in (
        "local-dominance", "truth-bias", "lazy-bias") else None
    if name == "not-last":
        return H.NotLast()
    if name == "local-dominance":
        return H.LocalDominance(metric, radius("r"))
    if name == "truth-bias":
        return H.TruthBiasLD(metric, radius("r1"), radius("r2"))
    if name == "lazy-bias":
        return H.LazyBiasLD(metric, radius("r1"), radius("r2"))
    if name in ("t-pragmatist", "t-star"):
        if "T" not in p:
            raise ConfigError(f"heuristic {name} needs T")
        return (H.TPragmatist if name == "t-pragmatist" else H.TStar)(int(p["T"]))
    if name == "leader-rule":
        return H.LeaderRule()
    raise ConfigError(f"unknown heuristic {name!r}")


@dataclass
class RunConfig:
    candidates: tuple
    rule: VotingRule
    metric: Metric | None = None
    radii: tuple = ()
    model: str = "distance"
    heuristic: object = None
    poll: tuple | None = None
    voter: dict = field(default_factory=dict)
    election: str | None = None
    scheduler: str = "round-robin"
    policy: str = "best-uod"
    seed: int = 0
    ball_cap: int = BALL_CAP
    step_cap: int | None = None
    batch: dict = field(default_factory=dict)
    suite: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @property
    def m(self):
        return len(self.candidates)

    def names(self):
        return list(self.candidates)

    def candidate(self, token):
        if token in self.candidates:
            return self.candidates.index(token)
        raise ConfigError(f"unknown candidate {token!r}")

    def ballot(self, token):
        """A ballot from a candidate name (plurality-style) or comma/space separated ints."""
        if isinstance(token, (list, tuple)):
            return tuple(int(x) for x in token)
        token = str(token).strip()
        if token in self.candidates:
            c = self.candidates.index(token)
            if self.rule.kind.value == "veto":
                return tuple(int(i != c) for i in range(self.m))
            return tuple(int(i == c) for i in range(self.m))
        try:
            vals = tuple(int(x) for x in token.replace(",", " ").split())
        except ValueError:
            raise ConfigError(f"cannot read ballot {token!r}") from None
        if len(vals) != self.m:
            raise ConfigError(f"ballot {token!r} needs {self.m} entries")
        return vals

    def preference(self):
        spec = self.voter.get("prefs")
        if spec is None:
            raise ConfigError("config needs voter.prefs")
        from .io import _parse_ranking

        try:
            p = _parse_ranking(spec, list(self.candidates), 0, 0)
        except ParseError as exc:
            raise ConfigError(f"voter.prefs: {exc}") from None
        bias = self.voter.get("bias", "none")
        try:
            bias = Bias(bias)
        except ValueError:
            raise ConfigError(f"unknown bias {bias!r}") from None
        return Preference(p.ranks, bias, self.voter.get("threshold"))

    def epistemic_model(self):
        if self.model == "full-information":
            return FullInformation()
        if self.model in ("distance", "clique-distance"):
            if self.metric is None or not self.radii:
                raise ConfigError(f"model {self.model} needs metric and radii")
            base = DistanceBased(self.metric, self.radii, cap=self.ball_cap)
            return CliqueClosure(base) if self.model == "clique-distance" else base
        if self.model == "heuristic":
            if self.heuristic is None:
                raise ConfigError("model 'heuristic' needs a heuristic entry")
            return H.model_for(self.heuristic)
        raise ConfigError(f"unknown model {self.model!r}")


KNOWN_KEYS = {
    "candidates", "m", "rule", "metric", "radii", "model", "heuristic", "poll", "voter",
    "election", "scheduler", "policy", "seed", "caps", "batch", "suite",
}


def build_config(data, seed=None, cap=None):
    unknown = set(data) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    names = data.get("candidates")
    if names is None:
        m = data.get("m")
        if m is None:
            raise ConfigError("config needs 'candidates' or 'm'")
        names = [f"c{i}" for i in range(int(m))]
    names = tuple(str(x) for x in names)
    if len(set(names)) != len(names):
        raise ConfigError("duplicate candidate names")
    m = len(names)
    rule = parse_rule(data.get("rule", "plurality"), m)
    poll = data.get("poll")
    if poll is not None:
        poll = tuple(int(x) for x in poll)
        if len(poll) != m:
            raise ConfigError("poll length differs from the number of candidates")
    metric = parse_metric(data["metric"], m) if "metric" in data else None
    radii = parse_radii(data["radii"]) if "radii" in data else ()
    heuristic = parse_heuristic(data["heuristic"], m) if "heuristic" in data else None
    if heuristic is not None:
        H.validate(heuristic, rule)
    caps = data.get("caps", {}) or {}
    cfg = RunConfig(
        candidates=names,
        rule=rule,
        metric=metric,
        radii=radii,
        model=data.get("model", "distance"),
        heuristic=heuristic,
        poll=poll,
        voter=dict(data.get("voter", {}) or {}),
        election=data.get("election"),
        scheduler=data.get("scheduler", "round-robin"),
        policy=data.get("policy", "best-uod"),
        seed=int(data.get("seed", 0) if seed is None else seed),
        ball_cap=int(cap if cap is not None else caps.get("ball", BALL_CAP)),
        step_cap=caps.get("step"),
        batch=dict(data.get("batch", {}) or {}),
        suite=dict(data.get("suite", {}) or {}),
        raw=data,
    )
    if cfg.policy == "heuristic" and heuristic is None:
        raise ConfigError("policy 'heuristic' needs a heuristic entry")
    if cfg.scheduler not in ("round-robin", "random", "mixed", "exhaustive"):
        raise ConfigError(f"unknown scheduler {cfg.scheduler!r}")
    if cfg.policy not in ("best-uod", "any-od", "heuristic"):
        raise ConfigError(f"unknown policy {cfg.policy!r}")
    return cfg


def load_config(path, seed=None, cap=None):
    return build_config(load_mapping(path), seed, cap)
