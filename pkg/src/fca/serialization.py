"""Deterministic JSON output: sorted keys, floats at 17 significant digits."""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np


def _float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite float cannot be serialized")
    text = "%.17g" % x
    if text == "-0":
        text = "0"
    if "e" not in text and "." not in text and "inf" not in text:
        text += ".0"
    return text


def canonical_dumps(obj) -> str:
    """Serialize ``obj`` deterministically; complex numbers become ``[re, im]``."""
    parts: list[str] = []
    _emit(obj, parts)
    return "".join(parts)


def _emit(obj, out: list[str]) -> None:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _emit([float(obj.real), float(obj.imag)], out)
    elif isinstance(obj, Fraction):
        _emit([obj.numerator, obj.denominator], out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for k, key in enumerate(sorted(obj, key=str)):
            if k:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for k, item in enumerate(list(obj)):
            if k:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif hasattr(obj, "to_json"):
        _emit(obj.to_json(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_complex(value) -> complex:
    """Accept ``[re, im]``, a bare number or ``{"re": .., "im": ..}``."""
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict) and "re" in value:
        return complex(float(value["re"]), float(value.get("im", 0.0)))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ValueError(f"cannot read a complex number from {value!r}")


def parse_assignment(data) -> dict[str, complex]:
    if not isinstance(data, dict):
        raise ValueError("assignment must be a JSON object")
    return {str(k): parse_complex(v) for k, v in data.items()}
