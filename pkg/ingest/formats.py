"""
ingest/formats.py
──────────────────────────────────────────────────────────────────────────────
Line-oriented text formats for presentations and dense modules.

    # presentation                      # dense module
    field p=7                           field p=7
    gens                                window 0 0 2 2
    0 0                                 dim 0 0 1
    1 0                                 dim 1 0 1
    rels                                xmap 0 0
    1 1 : 0:1 1:6                       1

Modules:
  1.  Tokenizer                  - comments, blank lines, line numbers
  2.  Presentations              - parse_presentation / serialize_presentation
  3.  Dense modules              - parse_module / serialize_module
──────────────────────────────────────────────────────────────────────────────
"""

import logging
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from core import linalg as la
from core.errors import FieldMismatchError, ParseError
from core.gridmod import Bigrade, GridModule, Presentation, Window, build_module

logger = logging.getLogger(__name__)

Line = Tuple[int, List[str]]

# ─────────────────────────────────────────────────────────────────────────────
# 1.  TOKENIZER
# ─────────────────────────────────────────────────────────────────────────────


def _lines(text: str) -> Iterator[Line]:
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield number, body.split()


def _ints(tokens: List[str], line: int, what: str) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers for {what}, got {' '.join(tokens)!r}", line) from None


def _grade(tokens: List[str], line: int) -> Bigrade:
    if len(tokens) != 2:
        raise ParseError(f"a grade needs exactly two integers, got {len(tokens)}", line)
    return Bigrade(*_ints(tokens, line, "a grade"))


def _field_header(tokens: List[str], line: int) -> int:
    if len(tokens) != 2 or not tokens[1].startswith("p="):
        raise ParseError("field header must read 'field p=<prime>'", line)
    try:
        p = int(tokens[1][2:])
    except ValueError:
        raise ParseError(f"field modulus {tokens[1][2:]!r} is not an integer", line) from None
    return la.check_prime(p)


def _resolve_field(declared: Optional[int], requested: Optional[int]) -> int:
    if declared is not None and requested is not None and declared != requested:
        raise FieldMismatchError(f"file declares F_{declared} but F_{requested} was requested")
    return la.check_prime(declared or requested or la.DEFAULT_PRIME)


# ─────────────────────────────────────────────────────────────────────────────
# 2.  PRESENTATIONS
# ─────────────────────────────────────────────────────────────────────────────


def parse_presentation(text: str, p: Optional[int] = None) -> Presentation:
    declared = None
    section = None
    gens: List[Bigrade] = []
    rels: List[Tuple[int, Bigrade, Dict[int, int]]] = []
    for line, tokens in _lines(text):
        head = tokens[0]
        if head == "field":
            declared = _field_header(tokens, line)
        elif head in ("gens", "rels"):
            if len(tokens) != 1:
                raise ParseError(f"section header {head!r} takes no arguments", line)
            section = head
        elif section == "gens":
            gens.append(_grade(tokens, line))
        elif section == "rels":
            if ":" not in tokens:
                raise ParseError("relation lines read 'x y : i:c ...'", line)
            split = tokens.index(":")
            grade = _grade(tokens[:split], line)
            entries: Dict[int, int] = {}
            for item in tokens[split + 1 :]:
                index, sep, coeff = item.partition(":")
                if not sep:
                    raise ParseError(f"entry {item!r} is not of the form index:coefficient", line)
                i, c = _ints([index, coeff], line, "a relation entry")
                entries[i] = entries.get(i, 0) + c
            rels.append((line, grade, entries))
        else:
            raise ParseError(f"unexpected line before any section: {' '.join(tokens)!r}", line)

    field = _resolve_field(declared, p)
    mat = la.zeros(len(gens), len(rels))
    for j, (line, _, entries) in enumerate(rels):
        for i, c in entries.items():
            if not 0 <= i < len(gens):
                raise ParseError(f"generator index {i} out of range (0..{len(gens) - 1})", line)
            mat[i, j] = c % field
    pr = Presentation(field, tuple(gens), tuple(g for _, g, _ in rels), mat)
    logger.debug(f"[INGEST] presentation over F_{field}: {pr.ngens} gens, {pr.nrels} rels")
    return pr


def serialize_presentation(pr: Presentation) -> str:
    out = [f"field p={pr.p}", "gens"]
    out += [f"{g.x} {g.y}" for g in pr.gen_grades]
    out.append("rels")
    for j, r in enumerate(pr.rel_grades):
        entries = " ".join(f"{i}:{int(pr.mat[i, j])}" for i in range(pr.ngens) if pr.mat[i, j])
        out.append(f"{r.x} {r.y} : {entries}".rstrip())
    return "\n".join(out) + "\n"


# ─────────────────────────────────────────────────────────────────────────────
# 3.  DENSE MODULES
# ─────────────────────────────────────────────────────────────────────────────


def parse_module(text: str, p: Optional[int] = None) -> GridModule:
    declared = None
    window: Optional[Window] = None
    dims: Dict[Bigrade, int] = {}
    maps: Dict[str, Dict[Bigrade, List[List[int]]]] = {"xmap": {}, "ymap": {}}
    rows: Optional[List[List[int]]] = None
    for line, tokens in _lines(text):
        head = tokens[0]
        if head == "field":
            declared = _field_header(tokens, line)
            rows = None
        elif head == "window":
            if len(tokens) != 5:
                raise ParseError("window line reads 'window x0 y0 x1 y1'", line)
            x0, y0, x1, y1 = _ints(tokens[1:], line, "the window")
            if x0 > x1 or y0 > y1:
                raise ParseError("window lower corner must lie below the upper corner", line)
            window = Window(Bigrade(x0, y0), Bigrade(x1, y1))
            rows = None
        elif head == "dim":
            if len(tokens) != 4:
                raise ParseError("dim line reads 'dim x y d'", line)
            x, y, d = _ints(tokens[1:], line, "a dimension")
            if d < 0:
                raise ParseError("dimensions are nonnegative", line)
            dims[Bigrade(x, y)] = d
            rows = None
        elif head in maps:
            q = _grade(tokens[1:], line)
            rows = maps[head].setdefault(q, [])
        elif rows is not None:
            rows.append(_ints(tokens, line, "a matrix row"))
        else:
            raise ParseError(f"unexpected line: {' '.join(tokens)!r}", line)

    if window is None:
        raise ParseError("module file has no window line")
    field = _resolve_field(declared, p)
    shaped: Dict[str, Dict[Bigrade, np.ndarray]] = {"xmap": {}, "ymap": {}}
    for kind, e in (("xmap", (1, 0)), ("ymap", (0, 1))):
        for q, entries in maps[kind].items():
            shape = (dims.get(q.plus(e), 0), dims.get(q, 0))
            if entries and len({len(r) for r in entries}) != 1:
                raise ParseError(f"{kind} {q.x} {q.y} has ragged rows")
            got = (len(entries), len(entries[0]) if entries else 0)
            if not shape[0] * shape[1]:
                if entries:
                    raise ParseError(f"{kind} {q.x} {q.y} touches a zero space but has entries")
                continue
            if got != shape:
                raise ParseError(f"{kind} {q.x} {q.y} is {got[0]}x{got[1]}, expected {shape[0]}x{shape[1]}")
            shaped[kind][q] = np.array(entries, dtype=np.int64)
    return build_module(field, window, dims, shaped["xmap"], shaped["ymap"])


def serialize_module(m: GridModule) -> str:
    w = m.window
    out = [f"field p={m.p}", f"window {w.lo.x} {w.lo.y} {w.hi.x} {w.hi.y}"]
    out += [f"dim {q.x} {q.y} {m.dim(q)}" for q in m.points() if m.dim(q)]
    for kind, getter in (("xmap", m.xmap), ("ymap", m.ymap)):
        for q in m.points():
            mat = getter(q)
            if mat.size:
                out.append(f"{kind} {q.x} {q.y}")
                out += [" ".join(str(int(c)) for c in row) for row in mat]
    return "\n".join(out) + "\n"

