import json
import sys
from datetime import datetime
from typing import Any

import numpy as np
from pydantic import BaseModel

from core.endcurves import SpreadCurve


def to_jsonable(data: Any) -> Any:
    """
    Converts results into plain JSON values.

    Grades become [x, y] pairs, spread curves their sorted point lists,
    matrices nested lists, pydantic models their field dicts.
    """
    if isinstance(data, BaseModel):
        if hasattr(data, "as_dict"):
            return to_jsonable(data.as_dict())
        return to_jsonable(data.model_dump())
    if isinstance(data, SpreadCurve):
        return [[q.x, q.y] for q in data.sorted_points()]
    if isinstance(data, np.ndarray):
        return data.astype(int).tolist()
    if isinstance(data, np.integer):
        return int(data)
    if isinstance(data, dict):
        return {str(k): to_jsonable(v) for k, v in data.items()}
    if isinstance(data, (frozenset, set)):
        return [to_jsonable(v) for v in sorted(data)]
    if isinstance(data, (list, tuple)):
        return [to_jsonable(v) for v in data]
    return data


def emit_json(data: Any) -> str:
    """Byte-stable JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_jsonable(data), sort_keys=True, separators=(",", ":")) + "\n"


def display_json_data(data: Any, title: str = "RESULT", level: str = "INFO") -> None:
    """
    Pretty-prints a result block on stderr, leaving stdout to the JSON emitter.

    Args:
        data: Any value to_jsonable accepts.
        title (str): Title for the console output.
        level (str): Log level label (INFO, DEBUG, etc).
    """
    timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    separator = "=" * 80

    print(f"\n{separator}", file=sys.stderr)
    print(f"[{timestamp}] {level}: {title}", file=sys.stderr)
    print(separator, file=sys.stderr)
    try:
        print(json.dumps(to_jsonable(data), indent=2, sort_keys=True), file=sys.stderr)
    except (TypeError, ValueError) as e:
        print(f"Error stringifying data: {str(e)}", file=sys.stderr)
        print(f"Data type: {type(data)}", file=sys.stderr)
    print(separator + "\n", file=sys.stderr)
