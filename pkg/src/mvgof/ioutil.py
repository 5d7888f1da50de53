"""Deterministic JSON emission.

The stdlib encoder writes floats with repr(); output files here are part
of a byte-reproducibility contract, so floats are pinned to the '%.17g'
format (round-trip exact) and key order is preserved as given.
"""

from __future__ import annotations

import json
import math


def _fmt(value, indent: int) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot serialize non-finite float {value!r}")
        return format(value, ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    pad = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k))}: {_fmt(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}{_fmt(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dump_json(obj) -> str:
    """Render a JSON document with %.17g floats and stable layout."""
    return _fmt(obj, 0)
