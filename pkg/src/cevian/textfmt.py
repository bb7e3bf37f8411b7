"""Scenario files, region text, and report rendering.

A scenario is a flat ``key: value`` file.  Blank lines and ``#`` comments are
ignored, ``kind`` is mandatory, and every other key must belong to that kind.
Values are parsed lazily by the consumer so that diagnostics carry the line
and column of the offending value.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from .cones import EQ, STRICT, WEAK, AmbientCone, Region, constraint
from .errors import ParseError, ValidationError
from .lterm import UnboundVariableError, linear_form, parse_lterm
from .ratcore import INF, RatioSet, fmt_ext

KINDS = {
    "ceva": {"U12", "U23", "U13"},
    "lemma43": {"c12", "c21", "c23", "c32", "c13", "c31"},
    "lattice": {"name", "elements", "covers"},
    "diagram": {"which", "depth"},
    "condensate": {"diagram", "atoms", "target", "map"},
    "cone": {"dimension", "ambient", "A", "B"},
}
REQUIRED = {
    "ceva": {"U12", "U23", "U13"},
    "lemma43": {"c12", "c21", "c23", "c32", "c13", "c31"},
    "lattice": {"elements"},
    "diagram": {"which"},
    "condensate": {"atoms"},
    "cone": {"dimension", "A"},
}

_KEY_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*:")


@dataclass
class Scenario:
    kind: str
    values: Dict[str, str] = field(default_factory=dict)
    where: Dict[str, tuple] = field(default_factory=dict)  # key -> (line, col of value)

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.values.get(key, default)

    def parse_with(self, key: str, fn):
        """Apply ``fn`` to a value, relocating any ParseError to the value's position."""
        text = self.values[key]
        line, col = self.where[key]
        try:
            return fn(text)
        except ParseError as exc:
            raise ParseError(exc.message, line=line, col=col + (exc.col or 1) - 1) from None
        except ValidationError as exc:
            raise ParseError(str(exc), line=line, col=col) from None


def parse_scenario(text: str) -> Scenario:
    values, where = {}, {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _KEY_RE.match(line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected 'key: value'", line=n, col=col)
        key = m.group(1)
        if key in values:
            raise ParseError(f"duplicate key {key!r}", line=n, col=1)
        rest = line[m.end():]
        lead = len(rest) - len(rest.lstrip())
        values[key] = rest.strip()
        where[key] = (n, m.end() + lead + 1)
    if "kind" not in values:
        raise ParseError("missing 'kind'", line=1, col=1)
    kind = values.pop("kind")
    kline, kcol = where.pop("kind")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}; expected one of {', '.join(sorted(KINDS))}", line=kline, col=kcol)
    for key in values:
        if key not in KINDS[kind]:
            line, _ = where[key]
            raise ParseError(f"unknown key {key!r} for kind {kind}", line=line, col=1)
    missing = sorted(REQUIRED[kind] - set(values))
    if missing:
        raise ParseError(f"missing key {missing[0]!r} for kind {kind}", line=kline, col=1)
    return Scenario(kind, values, where)


def read_scenario(path: str, expect: Optional[str] = None) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        sc = parse_scenario(fh.read())
    if expect is not None and sc.kind != expect:
        raise ParseError(f"{path}: expected kind {expect}, found {sc.kind}", line=1, col=1)
    return sc


# ---------------------------------------------------------------- regions

_OPS = {">": STRICT, ">=": WEAK, "=": EQ}


def _var_names(n: int) -> list:
    return [f"x{k}" for k in range(1, n + 1)]


def parse_constraint(text: str, n: int):
    m = re.search(r">=|<=|>|<|=", text)
    if not m:
        raise ParseError("expected a comparison", col=1)
    op = m.group(0)
    lhs, rhs = text[: m.start()], text[m.end():]
    names = _var_names(n)

    def form(side, offset):
        try:
            return linear_form(parse_lterm(side), names)
        except ParseError as exc:
            raise ParseError(exc.message, col=offset + (exc.col or 1)) from None
        except UnboundVariableError as exc:
            raise ParseError(f"{exc}; variables are {', '.join(names)}", col=offset + 1) from None

    fl, fr = form(lhs, 0), form(rhs, m.end())
    diff = [a - b for a, b in zip(fl, fr)]
    if op in ("<", "<="):
        diff = [-d for d in diff]
        op = ">" if op == "<" else ">="
    return constraint(diff, _OPS[op])


def parse_ambient(text: str, n: int) -> AmbientCone:
    cons = []
    for part in [p for p in text.split(",") if p.strip()]:
        c = parse_constraint(part, n)
        if c.op == STRICT:
            raise ParseError("ambient cones take only >=, <= and = constraints", col=1)
        cons.append(c)
    return AmbientCone(n, tuple(cons))


def parse_region(text: str, ambient: AmbientCone) -> Region:
    """``zero``, ``unit``, or cells ``[c, c, ...] | [ ... ]`` with constraints over x1..xn."""
    t = text.strip()
    if t == "zero":
        return Region.zero(ambient)
    if t == "unit":
        return Region.unit(ambient)
    sets = []
    for chunk in _split_top(text, "|"):
        body = chunk[1].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ParseError("a cell is written [constraint, ...]", col=chunk[0] + 1)
        cons = []
        start = chunk[0] + chunk[1].index("[") + 1
        for piece in _split_top(body[1:-1], ","):
            try:
                cons.append(parse_constraint(piece[1], ambient.dimension))
            except ParseError as exc:
                raise ParseError(exc.message, col=start + piece[0] + (exc.col or 1)) from None
        if not any(c.op == STRICT for c in cons):
            raise ParseError("every cell needs a strict constraint", col=chunk[0] + 1)
        sets.append(frozenset(cons))
    return Region.from_constraint_sets(ambient, sets)


def _split_top(text: str, sep: str) -> list:
    """Split on ``sep`` outside brackets; returns (offset, piece) pairs."""
    out, depth, start = [], 0, 0
    for k, ch in enumerate(text):
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((start, text[start:k]))
            start = k + 1
    out.append((start, text[start:]))
    return out


# ---------------------------------------------------------------- reports


def _plain(v):
    if isinstance(v, Fraction) or v is INF:
        return fmt_ext(v)
    if isinstance(v, RatioSet):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return sorted(_plain(x) for x in v)
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    return str(v)


def render_json(report: dict) -> str:
    return json.dumps(_plain(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_text(report: dict) -> str:
    lines = []

    def emit(key, v, indent):
        pad = "  " * indent
        if isinstance(v, dict):
            lines.append(f"{pad}{key}:")
            for k in sorted(v):
                emit(k, v[k], indent + 1)
        elif isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v):
            lines.append(f"{pad}{key}:")
            for k, x in enumerate(v):
                emit(f"- [{k}]", x, indent + 1)
        elif isinstance(v, list):
            lines.append(f"{pad}{key}: [{', '.join(str(x) for x in v)}]")
        else:
            lines.append(f"{pad}{key}: {v}")

    plain = _plain(report)
    for k in sorted(plain):
        emit(k, plain[k], 0)
    return "\n".join(lines) + "\n"
