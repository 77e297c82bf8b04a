"""
ingest/loader.py
──────────────────────────────────────────────────────────────────────────────
Reads any supported input file and returns the module it describes.
──────────────────────────────────────────────────────────────────────────────
"""

import logging
import sys
from pathlib import Path
from typing import Optional, Union

from core.errors import InputFileError, ParseError
from core.gridmod import GridModule, Window, evaluate_presentation, restrict_module
from ingest.bifiltration import homology_module, parse_bifiltration
from ingest.formats import _lines, _resolve_field, parse_module, parse_presentation

logger = logging.getLogger(__name__)


def detect_format(text: str) -> str:
    """'presentation', 'module' or 'bifiltration', from the first keyword line."""
    for line, tokens in _lines(text):
        head = tokens[0]
        if head in ("gens", "rels"):
            return "presentation"
        if head in ("window", "dim"):
            return "module"
        if head == "simplex":
            return "bifiltration"
        if head != "field":
            raise ParseError(f"cannot tell the file format from {head!r}", line)
    raise ParseError("input is empty")


def load_module(
    text: str,
    p: Optional[int] = None,
    window: Optional[Window] = None,
    degree: int = 0,
    workers: int = 1,
) -> GridModule:
    kind = detect_format(text)
    logger.info(f"[INGEST] reading a {kind} file")
    if kind == "presentation":
        pr = parse_presentation(text, p)
        return evaluate_presentation(pr, window or pr.default_window())
    if kind == "bifiltration":
        bf = parse_bifiltration(text)
        return homology_module(bf, degree, window, p=_resolve_field(bf.p, p), workers=workers)
    m = parse_module(text, p)
    return restrict_module(m, window) if window is not None else m


def read_input(path: Union[str, Path]) -> str:
    """UTF-8 text of a file, or of standard input for "-"."""
    try:
        if str(path) == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise InputFileError(f"{path} is not valid UTF-8 (byte {exc.start})") from exc
    except OSError as exc:
        raise InputFileError(f"cannot read {path}: {exc.strerror or exc}") from exc
