"""Check reports and deterministic JSON emission.

Floats are written with 15 significant digits in scientific notation and
complex numbers as ``[re, im]`` pairs, so identical inputs produce
byte-identical output.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"


@dataclass
class CheckReport:
    name: str
    status: str
    details: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return self.status == PASS

    @classmethod
    def from_violations(cls, name, violations, **details):
        return cls(name, FAIL if violations else PASS, details, list(violations))

    def to_dict(self):
        return {
            "name": self.name,
            "status": self.status,
            "details": self.details,
            "violations": self.violations,
        }


def format_float(x):
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return f"{x:.14e}"


def to_plain(obj):
    """Convert numpy/complex/dataclass-ish values into JSON-ready structures.

    Floats are left as floats; :func:`dumps` formats them.
    """
    if hasattr(obj, "to_dict"):
        return to_plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for k, (key, val) in enumerate(obj.items()):
            out.append(pad + json.dumps(key) + ": ")
            _emit(val, indent, level + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        # numeric leaves stay on one line to keep matrices readable
        if all(not isinstance(v, (dict, list)) for v in obj) or _is_pair_list(obj):
            parts = []
            for v in obj:
                sub = []
                _emit(v, indent, level + 1, sub)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for k, val in enumerate(obj):
            out.append(pad)
            _emit(val, indent, level + 1, out)
            out.append(",\n" if k < len(obj) - 1 else "\n")
        out.append(end + "]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    else:
        out.append(json.dumps(obj))


def _is_pair_list(obj):
    return all(
        isinstance(v, list) and len(v) == 2 and all(isinstance(x, float) for x in v)
        for v in obj
    )


def dumps(obj, indent=2):
    out = []
    _emit(to_plain(obj), indent, 0, out)
    return "".join(out) + "\n"
