"""Deterministic JSON and CSV output."""

from __future__ import annotations

import io
import json
import math
from collections.abc import Mapping, Sequence
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if text.lstrip("-").isdigit():
        text += ".0"
    return text


def _encode(obj: Any) -> str:
    if isinstance(obj, BaseModel):
        return _encode(obj.model_dump(mode="python"))
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Mapping):
        items = ",".join(f"{json.dumps(str(k), ensure_ascii=False)}:{_encode(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, Sequence):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """JSON with insertion-ordered keys and 17 significant digits per float."""
    return _encode(obj)


def to_csv(columns: Mapping[str, Sequence[float]], header: Mapping[str, Any] | None = None) -> str:
    buf = io.StringIO()
    if header:
        for key, value in header.items():
            buf.write(f"# {key}={_encode(value)}\n")
    pd.DataFrame(dict(columns)).to_csv(buf, index=False, sep=",", decimal=".", float_format="%.17g")
    return buf.getvalue()
