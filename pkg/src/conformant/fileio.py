"""Line-oriented text formats for elections, problem instances, 3DM
instances, graphs and gadget provenance, plus a strict-order profile importer.

Election and instance files::

    # comment
    election 3 2
    rule: borda
    preferred: a
    manipulators: 1
    a b c
    a>b>c
    c>b>a

Instance headers sit between the ``election m n`` line and the candidate
line: ``rule``, ``preferred``, then exactly one of ``manipulators`` (conformant
manipulation), ``bribe_limit`` (bribery) or ``mode`` with ``limit``
(control), and optionally ``conformant: 0|1``.  Control files end with a
``-- unregistered`` line followed by the unregistered votes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .bribery import BriberyInstance
from .control import MODES, ControlInstance
from .core import Election, parse_rule
from .manipulation import ManipulationInstance
from .matching import WeightedMultigraph
from .threedm import RestrictedThreeDMInstance, ThreeDMInstance

Instance = Union[ManipulationInstance, BriberyInstance, ControlInstance]

_NAME = re.compile(r"^[^\s>:#,{}=]+$")
_HEADERS = ("rule", "preferred", "manipulators", "bribe_limit", "mode", "limit", "conformant")
UNREGISTERED = "-- unregistered"


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        self.line, self.column, self.message = line, column, message
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass
class _Lines:
    """Non-blank lines with comments stripped, keeping 1-based line numbers."""

    items: list[tuple[int, str]]
    pos: int = 0

    @classmethod
    def of(cls, text: str) -> "_Lines":
        out = []
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                out.append((no, line))
        return cls(out)

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self, what: str) -> tuple[int, str]:
        item = self.peek()
        if item is None:
            last = self.items[-1][0] if self.items else 0
            raise ParseError(last + 1, 1, f"unexpected end of input, expected {what}")
        self.pos += 1
        return item

    def done(self) -> bool:
        return self.pos >= len(self.items)


def _int(text: str, no: int, what: str, lo: int = 0) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(no, 1, f"{what} must be an integer, got {text!r}") from None
    if value < lo:
        raise ParseError(no, 1, f"{what} must be at least {lo}")
    return value


def _check_names(names) -> None:
    for name in names:
        if not _NAME.match(name) or name.startswith("--"):
            raise ValueError(f"candidate name {name!r} cannot be written in this format")


# --- elections and instances ---------------------------------------------------

def _parse_vote(line: str, no: int, index: dict[str, int]) -> tuple[int, ...]:
    parts = [x.strip() for x in line.split(">")]
    vote = []
    col = 1
    for part in parts:
        if part not in index:
            raise ParseError(no, col, f"unknown candidate {part!r}")
        vote.append(index[part])
        col += len(part) + 1
    if len(set(vote)) != len(vote):
        raise ParseError(no, 1, "candidate repeated in vote")
    missing = [name for name, c in index.items() if c not in set(vote)]
    if missing:
        raise ParseError(no, len(line), f"vote is missing candidate {missing[0]!r}")
    return tuple(vote)


def parse_election(text: str) -> Election | Instance:
    lines = _Lines.of(text)
    no, head = lines.next("'election m n'")
    fields = head.split()
    if len(fields) != 3 or fields[0] != "election":
        raise ParseError(no, 1, "expected 'election m n'")
    m = _int(fields[1], no, "m", 1)
    n = _int(fields[2], no, "n")

    headers: dict[str, tuple[int, str]] = {}
    while True:
        no, line = lines.next("candidate names")
        key, sep, value = line.partition(":")
        if not sep or " " in key.strip():
            break
        key = key.strip()
        if key not in _HEADERS:
            raise ParseError(no, 1, f"unknown header {key!r}")
        if key in headers:
            raise ParseError(no, 1, f"duplicate header {key!r}")
        headers[key] = (no, value.strip())

    names = line.split()
    if len(names) != m:
        raise ParseError(no, 1, f"expected {m} candidate names, got {len(names)}")
    index: dict[str, int] = {}
    for name in names:
        if name in index:
            raise ParseError(no, line.index(name) + 1, f"duplicate candidate {name!r}")
        if not _NAME.match(name):
            raise ParseError(no, line.index(name) + 1, f"invalid candidate name {name!r}")
        index[name] = len(index)

    votes = []
    for _ in range(n):
        no, line = lines.next("a vote")
        if line == UNREGISTERED:
            raise ParseError(no, 1, f"expected {n} votes before the unregistered section")
        votes.append(_parse_vote(line, no, index))
    unregistered = None
    if not lines.done():
        no, line = lines.next("")
        if line != UNREGISTERED:
            raise ParseError(no, 1, f"expected {UNREGISTERED!r} or end of input")
        unregistered = []
        while not lines.done():
            no, line = lines.next("a vote")
            unregistered.append(_parse_vote(line, no, index))
    election = Election(tuple(names), tuple(votes))
    return _build_instance(election, headers, unregistered)


def _build_instance(election: Election, headers, unregistered) -> Election | Instance:
    def get(key):
        return headers[key][1]

    def line_of(key):
        return headers[key][0]

    kinds = [k for k in ("manipulators", "bribe_limit", "mode") if k in headers]
    if not headers and unregistered is None:
        return election
    if len(kinds) != 1:
        first = min(no for no, _ in headers.values()) if headers else 1
        raise ParseError(first, 1, "need exactly one of manipulators, bribe_limit or mode")
    kind = kinds[0]
    for key in ("rule", "preferred"):
        if key not in headers:
            raise ParseError(line_of(kind), 1, f"missing header {key!r}")
    try:
        rule = parse_rule(get("rule"))
    except ValueError as exc:
        raise ParseError(line_of("rule"), 1, str(exc)) from None
    try:
        p = election.index(get("preferred"))
    except KeyError:
        raise ParseError(line_of("preferred"), 1, f"unknown candidate {get('preferred')!r}") from None
    conformant = True
    if "conformant" in headers:
        if get("conformant") not in ("0", "1"):
            raise ParseError(line_of("conformant"), 1, "conformant must be 0 or 1")
        conformant = get("conformant") == "1"

    allowed = {"rule", "preferred", kind, "conformant"}
    if kind == "mode":
        allowed = {"rule", "preferred", "mode", "limit"}
    for key in headers:
        if key not in allowed:
            raise ParseError(line_of(key), 1, f"header {key!r} does not fit a {kind} instance")
    if kind != "mode" and unregistered is not None:
        raise ParseError(line_of(kind), 1, "only control instances have unregistered voters")

    if kind == "manipulators":
        w = _int(get(kind), line_of(kind), "manipulators")
        return ManipulationInstance(election, w, p, rule, conformant)
    if kind == "bribe_limit":
        k = _int(get(kind), line_of(kind), "bribe_limit")
        return BriberyInstance(election, k, p, rule, conformant)
    mode = get("mode").lower()
    if mode not in MODES:
        raise ParseError(line_of("mode"), 1, f"unknown mode {mode!r}")
    if "limit" not in headers:
        raise ParseError(line_of("mode"), 1, "control instances need a limit header")
    k = _int(get("limit"), line_of("limit"), "limit")
    return ControlInstance(election, tuple(unregistered or ()), k, mode, p, rule)


def serialize_election(obj: Election | Instance) -> str:
    if isinstance(obj, Election):
        e, headers, unregistered = obj, [], None
    elif isinstance(obj, ControlInstance):
        e = obj.registered
        headers = [("rule", str(obj.rule)), ("preferred", e.names[obj.preferred]),
                   ("mode", obj.mode), ("limit", str(obj.limit))]
        unregistered = obj.unregistered
    else:
        e = obj.election
        key, value = (("manipulators", obj.num_manipulators) if isinstance(obj, ManipulationInstance)
                      else ("bribe_limit", obj.limit))
        headers = [("rule", str(obj.rule)), ("preferred", e.names[obj.preferred]),
                   (key, str(value)), ("conformant", "1" if obj.conformant else "0")]
        unregistered = None
    _check_names(e.names)
    out = [f"election {e.m} {e.n}"]
    out += [f"{k}: {v}" for k, v in headers]
    out.append(" ".join(e.names))
    out += [e.format_vote(v) for v in e.votes]
    if unregistered is not None:
        out.append(UNREGISTERED)
        out += [e.format_vote(v) for v in unregistered]
    return "\n".join(out) + "\n"


# --- 3DM -----------------------------------------------------------------------

def parse_3dm(text: str) -> ThreeDMInstance:
    """``3dm k t`` followed by ``t`` lines ``x y z`` of 0-based element indices.
    Restricted instances come back as :class:`RestrictedThreeDMInstance`."""
    lines = _Lines.of(text)
    no, head = lines.next("'3dm k t'")
    fields = head.split()
    if len(fields) != 3 or fields[0] != "3dm":
        raise ParseError(no, 1, "expected '3dm k t'")
    k = _int(fields[1], no, "k", 1)
    t = _int(fields[2], no, "t")
    triples = []
    for _ in range(t):
        no, line = lines.next("a triple")
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(no, 1, "a triple needs three indices")
        triple = tuple(_int(x, no, "element index") for x in parts)
        for col, a in enumerate(triple):
            if a >= k:
                raise ParseError(no, col + 1, f"element index {a} out of range for k={k}")
        triples.append(triple)
    if not lines.done():
        raise ParseError(lines.peek()[0], 1, "trailing content after the triples")
    try:
        inst = ThreeDMInstance(k, tuple(triples))
    except ValueError as exc:
        raise ParseError(no, 1, str(exc)) from None
    return RestrictedThreeDMInstance(k, inst.triples) if inst.is_restricted() else inst


def serialize_3dm(inst: ThreeDMInstance) -> str:
    out = [f"3dm {inst.k} {len(inst.triples)}"]
    out += [" ".join(map(str, t)) for t in inst.triples]
    return "\n".join(out) + "\n"


# --- graphs ----------------------------------------------------------------------

def _parse_graph_lines(lines: _Lines) -> WeightedMultigraph:
    no, head = lines.next("'graph n e'")
    fields = head.split()
    if len(fields) != 3 or fields[0] != "graph":
        raise ParseError(no, 1, "expected 'graph n e'")
    n = _int(fields[1], no, "n")
    e = _int(fields[2], no, "e")
    edges = []
    for _ in range(e):
        no, line = lines.next("an edge 'u v w red'")
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(no, 1, "an edge needs 'u v w red'")
        u, v = _int(parts[0], no, "u"), _int(parts[1], no, "v")
        w = _int(parts[2], no, "weight", -(10**18))
        if parts[3] not in ("0", "1"):
            raise ParseError(no, 4, "red flag must be 0 or 1")
        if u >= n or v >= n:
            raise ParseError(no, 1, f"edge endpoint out of range for n={n}")
        if u == v:
            raise ParseError(no, 1, "self-loops are not allowed")
        edges.append((u, v, w, parts[3] == "1"))
    b = None
    while lines.peek() and lines.peek()[1].split()[0] == "b":
        no, line = lines.next("")
        parts = line.split()
        b = {} if b is None else b
        if len(parts) == 1:
            continue  # a bare 'b' declares a capacity map, possibly empty
        if len(parts) != 3:
            raise ParseError(no, 1, "a capacity line is 'b v cap'")
        v, cap = _int(parts[1], no, "vertex"), _int(parts[2], no, "capacity")
        if v >= n or v in b:
            raise ParseError(no, 3, f"bad or repeated capacity vertex {v}")
        b[v] = cap
    return WeightedMultigraph(n, tuple(edges), b)


def parse_graph(text: str) -> WeightedMultigraph:
    """``graph n e``, ``e`` lines ``u v w red``, then optional capacity lines
    ``b v cap``.  Vertices without a line get capacity 0 once any capacity is
    given; a bare ``b`` line declares an empty capacity map."""
    lines = _Lines.of(text)
    g = _parse_graph_lines(lines)
    if not lines.done():
        raise ParseError(lines.peek()[0], 1, "trailing content after the graph")
    return g


def parse_epbm(text: str) -> tuple[WeightedMultigraph, int]:
    """A graph file followed by ``target k``: the required number of red edges."""
    lines = _Lines.of(text)
    g = _parse_graph_lines(lines)
    no, line = lines.next("'target k'")
    parts = line.split()
    if len(parts) != 2 or parts[0] != "target":
        raise ParseError(no, 1, "expected 'target k'")
    k = _int(parts[1], no, "target")
    if not lines.done():
        raise ParseError(lines.peek()[0], 1, "trailing content after the target")
    return g, k


def serialize_graph(g: WeightedMultigraph, target: int | None = None) -> str:
    out = [f"graph {g.n} {len(g.edges)}"]
    out += [f"{u} {v} {w} {int(red)}" for u, v, w, red in g.edges]
    if g.b is not None:
        out += [f"b {v} {cap}" for v, cap in sorted(g.b.items())] or ["b"]
    if target is not None:
        out.append(f"target {target}")
    return "\n".join(out) + "\n"


# --- provenance ----------------------------------------------------------------

def serialize_provenance(prov: dict[str, tuple[int, ...]]) -> str:
    out = ["provenance"]
    for key, ids in prov.items():
        out.append(f"{key}: {' '.join(map(str, ids))}".rstrip())
    out.append("end")
    return "\n".join(out) + "\n"


def parse_provenance(text: str) -> dict[str, tuple[int, ...]]:
    lines = _Lines.of(text)
    no, head = lines.next("'provenance'")
    if head != "provenance":
        raise ParseError(no, 1, "expected 'provenance'")
    prov: dict[str, tuple[int, ...]] = {}
    while True:
        no, line = lines.next("a role line or 'end'")
        if line == "end":
            break
        key, sep, rest = line.partition(":")
        key = key.strip()
        if not sep or not key or " " in key:
            raise ParseError(no, 1, "expected 'role: ids'")
        if key in prov:
            raise ParseError(no, 1, f"duplicate role {key!r}")
        prov[key] = tuple(_int(x, no, "id") for x in rest.split())
    if not lines.done():
        raise ParseError(lines.peek()[0], 1, "trailing content after 'end'")
    return prov


# --- strict-order profiles -------------------------------------------------------

_ALT_NAME = re.compile(r"^#\s*ALTERNATIVE NAME\s+(\d+)\s*:\s*(.+?)\s*$", re.IGNORECASE)
_NUM_ALTS = re.compile(r"^#\s*NUMBER ALTERNATIVES\s*:\s*(\d+)\s*$", re.IGNORECASE)


def import_strict_order_profile(text: str) -> Election:
    """Import a profile of complete strict orders.

    Data lines are ``count: ranking`` (or a bare ranking), with candidates
    separated by ``>`` or ``,``.  Candidates come from ``candidates: ...``,
    from ``# ALTERNATIVE NAME i: name`` metadata (data lines may then use the
    numbers ``i``), or failing both from the first ranking.  Ties (``{...}``
    or ``=``) and incomplete orders are rejected.
    """
    alt_names: dict[str, str] = {}
    declared: list[str] | None = None
    data: list[tuple[int, str]] = []
    number = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            match = _ALT_NAME.match(line)
            if match:
                alt_names[match.group(1)] = match.group(2)
            match = _NUM_ALTS.match(line)
            if match:
                number = int(match.group(1))
            continue
        if line.lower().startswith("candidates:"):
            declared = line.split(":", 1)[1].split()
            continue
        data.append((no, line))

    if declared is None and alt_names:
        declared = [alt_names[key] for key in sorted(alt_names, key=int)]
    rows = []
    for no, line in data:
        count = 1
        if ":" in line:
            head, line = line.split(":", 1)
            count = _int(head.strip(), no, "multiplicity")
        if any(ch in line for ch in "{}="):
            raise ParseError(no, 1, "ties are not supported: only complete strict orders")
        sep = ">" if ">" in line else ","
        tokens = [t.strip() for t in line.split(sep)]
        tokens = [alt_names.get(t, t) for t in tokens]
        rows.append((no, count, tokens))
    if declared is None:
        if not rows:
            raise ParseError(1, 1, "unsupported profile: no candidates declared and no votes")
        declared = list(rows[0][2])
    if number is not None and number != len(declared):
        raise ParseError(1, 1, f"profile declares {number} alternatives but names {len(declared)}")
    index = {name: i for i, name in enumerate(declared)}
    if len(index) != len(declared):
        raise ParseError(1, 1, "duplicate candidate names")
    votes = []
    for no, count, tokens in rows:
        vote = _parse_vote(">".join(tokens), no, index)
        votes.extend([vote] * count)
    return Election(tuple(declared), tuple(votes))
