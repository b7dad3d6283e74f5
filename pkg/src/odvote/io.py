"""Election files, DOT export and line-delimited JSON records.

Election file::

    # comments start with '#'
    candidates: w b c d e
    poll: 29 26 22 17 6        (optional)
    ---
    e>d>c>b>w ; e              (ballot: a candidate name or m integers)
    a=b>c                      ('=' joins indifference classes)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .election import Preference
from .errors import ParseError


@dataclass
class Voter:
    prefs: Preference
    ballot: tuple | None = None


@dataclass
class Election:
    candidates: tuple
    voters: list = field(default_factory=list)
    poll: tuple | None = None

    @property
    def m(self):
        return len(self.candidates)

    def index(self, name):
        return self.candidates.index(name)


def _parse_ranking(text, names, lineno, col0):
    seen = set()
    classes = []
    pos = 0
    for group in text.split(">"):
        members = []
        for raw in group.split("="):
            name = raw.strip()
            col = col0 + pos + (len(raw) - len(raw.lstrip())) + 1
            pos += len(raw) + 1
            if not name:
                raise ParseError("empty candidate name", lineno, col)
            if name not in names:
                raise ParseError(f"unknown candidate {name!r}", lineno, col)
            if name in seen:
                raise ParseError(f"candidate {name!r} listed twice", lineno, col)
            seen.add(name)
            members.append(names.index(name))
        classes.append(members)
    missing = [n for n in names if n not in seen]
    if missing:
        raise ParseError(f"ranking does not mention {', '.join(missing)}", lineno, col0 + 1)
    return Preference.from_classes(classes)


def _parse_ballot(text, names, lineno, col):
    parts = text.split()
    if len(parts) == 1 and parts[0] in names:
        return tuple(int(n == parts[0]) for n in names)
    try:
        vals = tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"ballot {text.strip()!r} is neither a candidate nor {len(names)} integers", lineno, col) from None
    if len(vals) != len(names) or any(v < 0 for v in vals):
        raise ParseError(f"ballot needs {len(names)} non-negative integers", lineno, col)
    return vals


def parse_election(text):
    names = None
    poll = None
    voters = []
    in_body = False
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        if not in_body:
            if stripped.strip() == "---":
                if names is None:
                    raise ParseError("header lacks a 'candidates:' line", lineno, 1)
                in_body = True
                continue
            key, sep, value = stripped.partition(":")
            if not sep:
                raise ParseError("expected 'key: value' in the header", lineno, 1)
            key = key.strip()
            col = len(key) + 2
            if key == "candidates":
                names = tuple(value.split())
                if len(names) < 2:
                    raise ParseError("need at least two candidates", lineno, col)
                dup = [n for n in names if names.count(n) > 1]
                if dup:
                    raise ParseError(f"duplicate candidate {dup[0]!r}", lineno, col)
                bad = [n for n in names if any(ch in n for ch in ">=;")]
                if bad:
                    raise ParseError(f"candidate name {bad[0]!r} uses a reserved character", lineno, col)
            elif key == "m":
                try:
                    m_decl = int(value)
                except ValueError:
                    raise ParseError("m must be an integer", lineno, col) from None
                if names is not None and m_decl != len(names):
                    raise ParseError(f"m={m_decl} but {len(names)} candidates named", lineno, col)
            elif key == "poll":
                if names is None:
                    raise ParseError("'poll' before 'candidates'", lineno, 1)
                poll = _parse_ballot(value, (None,) * len(names), lineno, col)
            else:
                raise ParseError(f"unknown header key {key!r}", lineno, 1)
            continue
        ranking, sep, ballot = stripped.partition(";")
        prefs = _parse_ranking(ranking, names, lineno, 0)
        b = _parse_ballot(ballot, names, lineno, len(ranking) + 2) if sep else None
        voters.append(Voter(prefs, b))
    if names is None:
        raise ParseError("empty election file", 1, 1)
    return Election(names, voters, poll)


def format_preference(prefs, names):
    return ">".join("=".join(names[c] for c in group) for group in prefs.classes())


def write_election(election):
    names = election.candidates
    lines = [f"candidates: {' '.join(names)}"]
    if election.poll is not None:
        lines.append("poll: " + " ".join(str(x) for x in election.poll))
    lines.append("---")
    for v in election.voters:
        line = format_preference(v.prefs, names)
        if v.ballot is not None:
            line += " ; " + " ".join(str(x) for x in v.ballot)
        lines.append(line)
    return "\n".join(lines) + "\n"


# -- DOT -------------------------------------------------------------------


def _dot_id(text):
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(struct, names=None, title="pivot"):
    names = names or [str(c) for c in range(struct.m)]
    out = [f"graph {_dot_id(title)} {{"]
    for j, g in enumerate(struct, 1):
        out.append(f"  subgraph {_dot_id(f'cluster_level{j}')} {{")
        out.append(f"    label={_dot_id(f'level {j}')};")
        for c in range(struct.m):
            out.append(f"    {_dot_id(f'L{j}_{c}')} [label={_dot_id(names[c])}];")
        for u, v in g.sorted_edges():
            out.append(f"    {_dot_id(f'L{j}_{u}')} -- {_dot_id(f'L{j}_{v}')};")
        out.append("  }")
    out.append("}")
    return "\n".join(out) + "\n"


# -- records ------------------------------------------------------------------


def record(kind, **fields):
    """One JSON line; field order is the call order, prefixed by ``kind``."""
    return json.dumps({"kind": kind, **fields}, separators=(",", ":"), default=_plain)


def _plain(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if hasattr(x, "tolist"):
        return x.tolist()
    return str(x)


def structure_records(struct, names=None):
    names = names or [str(c) for c in range(struct.m)]
    return [
        record("level", level=j, edges=[[names[u], names[v]] for u, v in g.sorted_edges()])
        for j, g in enumerate(struct, 1)
    ]


def parse_structure_records(lines, names=None):
    from .epistemic import PivotGraph, PivotGraphStructure

    graphs = []
    m = len(names) if names else None
    for line in lines:
        rec = json.loads(line)
        if rec.get("kind") != "level":
            continue
        edges = [
            (names.index(u), names.index(v)) if names else (int(u), int(v)) for u, v in rec["edges"]
        ]
        graphs.append((rec["level"], edges))
    if m is None:
        m = 1 + max((max(e) for _, es in graphs for e in es), default=1)
    return PivotGraphStructure(tuple(PivotGraph(m, frozenset(es)) for _, es in sorted(graphs)))
