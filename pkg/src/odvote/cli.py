"""``odvote`` command line: derive, dominate, verify, run."""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import dominance as dom
from . import dynamics as dyn
from . import suites
from .config import load_config, load_mapping
from .election import Preference, check_ballot, truthful_ballot
from .epistemic import VoterContext, derive_structure, spp_check
from .errors import ConfigError, OdvoteError, VerificationFailure
from .io import parse_election, record, structure_records, to_dot

FORMATS = ("text", "records")


def _global_flags():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="YAML or JSON run configuration")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.add_argument("--cap", type=int, help="largest information set to enumerate")
    p.add_argument("--out", type=Path, help="directory for output files")
    p.add_argument("--oracle", action="store_true", help="cross-check with the set-level oracle")
    p.add_argument("--format", choices=FORMATS, default="text")
    return p


def build_parser():
    flags = _global_flags()
    parser = argparse.ArgumentParser(prog="odvote", parents=[flags], description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    # flags may also follow the subcommand; SUPPRESS keeps the top-level value otherwise
    sub_flags = _global_flags()
    for action in sub_flags._actions:
        action.default = argparse.SUPPRESS
    sub.add_parser("derive", parents=[sub_flags], help="pivot-graph structure of one voter")
    d = sub.add_parser("dominate", parents=[sub_flags], help="does one ballot dominate another")
    d.add_argument("a_new", nargs="?", help="candidate name or comma-separated scores")
    d.add_argument("a_cur", nargs="?", help="defaults to the voter's ballot")
    v = sub.add_parser("verify", parents=[sub_flags], help="run a verification suite")
    v.add_argument("target", help=", ".join(suites.TARGETS))
    v.add_argument("--trials", type=int, help="overrides suite.trials")
    sub.add_parser("run", parents=[sub_flags], help="iterative voting from an election or a batch")
    return parser


class Output:
    """Collects stdout lines in the requested format."""

    def __init__(self, fmt):
        self.fmt = fmt

    def emit(self, text, rec):
        print(rec if self.fmt == "records" else text)


def _write(out_dir, name, text):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)


def _require_config(args):
    if args.config is None:
        raise ConfigError(f"{args.command} needs --config")
    return load_config(args.config, args.seed, args.cap)


def _own_ballot(cfg):
    b = cfg.voter.get("ballot")
    return None if b is None else cfg.ballot(b)


def _context(cfg):
    """Voter context from ``poll`` minus the voter's own ballot (if given)."""
    if cfg.poll is None:
        raise ConfigError("config needs a poll")
    prefs = cfg.preference() if "prefs" in cfg.voter else Preference.from_order(range(cfg.m))
    own = _own_ballot(cfg)
    if own is None:
        return VoterContext(cfg.poll, (0,) * cfg.m, prefs, cfg.rule)
    check_ballot(cfg.rule, own, prefs.bias.value == "lazy")
    if any(x < y for x, y in zip(cfg.poll, own)):
        raise ConfigError("the voter's ballot exceeds the poll totals")
    return VoterContext.from_poll(cfg.poll, own, prefs, cfg.rule)


def _names_of(cfg, edges):
    return " ".join(cfg.candidates[u] + "-" + cfg.candidates[v] for u, v in edges) or "(none)"


def cmd_derive(args, out):
    cfg = _require_config(args)
    ctx = _context(cfg)
    model = cfg.epistemic_model()
    struct = derive_structure(model, ctx)
    names = cfg.names()
    header = record(
        "structure",
        candidates=names,
        rule=cfg.rule.name,
        model=model.name,
        state=list(ctx.state),
        levels=struct.k,
    )
    levels = structure_records(struct, names)
    if args.out is not None:
        _write(args.out, "structure.jsonl", "\n".join([header] + levels) + "\n")
        for j, g in enumerate(struct, 1):
            _write(args.out, f"level-{j}.txt", "".join(f"{names[u]} {names[v]}\n" for u, v in g.sorted_edges()))
        _write(args.out, "pivot.dot", to_dot(struct, names))
    out.emit(f"state {' '.join(map(str, ctx.state))}", header)
    for j, (g, rec) in enumerate(zip(struct, levels), 1):
        out.emit(f"level {j}: {_names_of(cfg, g.sorted_edges())}", rec)
    return 0


def _ballot_label(cfg, a):
    return ",".join(map(str, a))


def cmd_dominate(args, out):
    cfg = _require_config(args)
    ctx = _context(cfg)
    model = cfg.epistemic_model()
    lazy = ctx.prefs.bias.value == "lazy"
    if args.a_new is None:
        return _dominate_sets(cfg, ctx, model, out)
    a_new = cfg.ballot(args.a_new)
    a_cur = cfg.ballot(args.a_cur) if args.a_cur is not None else ctx.current
    if args.a_cur is None and _own_ballot(cfg) is None:
        raise ConfigError("dominate needs a_cur or voter.ballot")
    for a in (a_new, a_cur):
        check_ballot(cfg.rule, a, lazy)
    verdict = dom.dominance(a_new, ctx, model, a_cur=a_cur)
    fields = dict(a_new=list(a_new), a_cur=list(a_cur), dominates=verdict.dominates, level=verdict.level)
    text = f"{_ballot_label(cfg, a_new)} vs {_ballot_label(cfg, a_cur)}: " + (
        f"dominates at level {verdict.level}" if verdict.dominates else "does not dominate"
    )
    out.emit(text, record("verdict", **fields, trace=[list(r) for r in verdict.trace]))
    for j, row in enumerate(verdict.trace, 1):
        out.emit(f"  level {j}: safe={row[0]} pivot={row[1]} dom={row[2]}", record("trace", level=j, safe=row[0], pivot=row[1], dom=row[2]))
    if args.oracle:
        info = model.information_structure(ctx)
        if info is None:
            raise ConfigError(f"model {model.name} has no information sets for the oracle")
        spp = spp_check(info, cfg.rule, cfg.ball_cap).holds
        oracle = dom.od_oracle(a_new, a_cur, ctx.prefs, info, cfg.rule)
        agree = oracle == verdict.dominates
        out.emit(f"oracle: {oracle} (spp {'holds' if spp else 'fails'}; {'agrees' if agree else 'DISAGREES'})", record("oracle", dominates=oracle, spp=spp, agrees=agree))
        if spp and not agree:
            raise VerificationFailure("graph check and set oracle disagree on an SPP structure")
    return 0


def _dominate_sets(cfg, ctx, model, out):
    ods = dom.od_set(ctx, model)
    uods = dom.uod_set(ctx, model)
    out.emit("od: " + " ".join(_ballot_label(cfg, a) for a in ods), record("od_set", ballots=[list(a) for a in ods]))
    out.emit("uod: " + " ".join(_ballot_label(cfg, a) for a in uods), record("uod_set", ballots=[list(a) for a in uods]))
    return 0


TARGET_ALIASES = {"prop-justify-tstar": "prop-justify-t-star", "prop-justify-ld": "prop-justify-local-dominance"}


def cmd_verify(args, out):
    options = {}
    if args.config is not None:
        suite = load_mapping(args.config).get("suite") or {}
        if not isinstance(suite, dict):
            raise ConfigError("suite must be a mapping")
        options.update(suite)
    if args.seed is not None:
        options["seed"] = args.seed
    if args.trials is not None:
        options["trials"] = args.trials
    target = TARGET_ALIASES.get(args.target, args.target)
    result = suites.run_target(target, options)
    recs = result.records()
    if args.out is not None:
        _write(args.out, f"verify-{target}.jsonl", "\n".join(recs) + "\n")
    out.emit(result.summary(), recs[0])
    for c, rec in zip(result.counterexamples, recs[1:]):
        out.emit(f"  counterexample: {c}", rec)
    if not result.passed:
        raise VerificationFailure(f"{target} failed")
    return 0


def _load_election(cfg, args):
    path = Path(cfg.election)
    if not path.is_absolute() and args.config is not None:
        path = args.config.parent / path
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read election file: {exc}") from None
    election = parse_election(text)
    if tuple(election.candidates) != cfg.candidates:
        raise ConfigError("election candidates differ from the config")
    return election


def _trajectory_records(traj, names):
    recs = [record("start", profile=[list(a) for a in traj.initial])]
    for mv in traj.moves:
        recs.append(record("move", step=mv.step, voter=mv.voter, old=list(mv.old), new=list(mv.new), aggregate=list(mv.aggregate)))
    st = traj.status
    recs.append(record("status", status=st.kind, **{k: v for k, v in vars(st).items()}))
    return recs


def cmd_run(args, out):
    cfg = _require_config(args)
    if cfg.batch:
        return _run_batch(cfg, args, out)
    if cfg.election is None:
        raise ConfigError("run needs an election file or a batch section")
    election = _load_election(cfg, args)
    rule = cfg.rule
    prefs = [v.prefs for v in election.voters]
    profile = []
    for v in election.voters:
        b = v.ballot if v.ballot is not None else truthful_ballot(rule, v.prefs)
        check_ballot(rule, b)
        profile.append(b)
    if cfg.policy == "heuristic":
        policy = dyn.HeuristicPolicy(cfg.heuristic)
        models = policy.model()
    else:
        policy = dyn.make_policy(cfg.policy)
        models = cfg.epistemic_model()
    scheduler = dyn.make_scheduler(cfg.scheduler, random.Random(cfg.seed))
    traj = dyn.run(profile, prefs, models, rule, scheduler, policy, cfg.step_cap)
    recs = _trajectory_records(traj, cfg.names())
    st = traj.status
    summary = record("summary", status=st.kind, steps=len(traj.moves), verified=getattr(st, "verified", None), final=[list(a) for a in traj.final])
    if args.out is not None:
        _write(args.out, "trajectory.jsonl", "\n".join(recs) + "\n")
        _write(args.out, "summary.jsonl", summary + "\n")
    for mv in traj.moves:
        out.emit(f"step {mv.step}: voter {mv.voter} {_ballot_label(cfg, mv.old)} -> {_ballot_label(cfg, mv.new)}", recs[1 + mv.step])
    out.emit(f"{st} after {len(traj.moves)} moves", summary)
    return 0


BATCH_KEYS = set(dyn.BatchConfig.__dataclass_fields__) - {"seed"}


def _run_batch(cfg, args, out):
    unknown = set(cfg.batch) - BATCH_KEYS
    if unknown:
        raise ConfigError(f"unknown batch keys: {', '.join(sorted(unknown))}")
    params = dict(cfg.batch)
    if "radii_votes" in params:
        params["radii_votes"] = tuple(params["radii_votes"])
    bc = dyn.BatchConfig(**params, seed=cfg.seed)
    rep = dyn.batch_verify(bc)
    recs = [
        record("trial", index=r.index, m=r.m, n=r.n, policy=r.policy, status=r.status, steps=r.steps, verified=r.verified, error=r.error)
        for r in rep.results
    ]
    summary = record(
        "summary",
        trials=rep.trials,
        converged=rep.converged,
        verified=rep.verified,
        cycles=rep.cycles,
        truncated=rep.truncated,
        errors=rep.errors,
        rate=rep.rate,
        vacuous=rep.vacuous,
        max_steps=max(rep.steps, default=0),
    )
    if args.out is not None:
        _write(args.out, "trajectory.jsonl", "\n".join(recs) + "\n" if recs else "")
        _write(args.out, "summary.jsonl", summary + "\n")
    rate = "n/a (no trials)" if rep.vacuous else f"{rep.rate:.4f}"
    out.emit(
        f"trials {rep.trials}: converged {rep.converged} (verified {rep.verified}), cycles {rep.cycles}, truncated {rep.truncated}, errors {rep.errors}; rate {rate}",
        summary,
    )
    return 0


COMMANDS = {"derive": cmd_derive, "dominate": cmd_dominate, "verify": cmd_verify, "run": cmd_run}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, Output(args.format))
    except OdvoteError as exc:
        print(f"odvote: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"odvote: ConfigError: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
