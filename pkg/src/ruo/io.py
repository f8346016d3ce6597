"""Ensemble and state documents, builtin ensembles, report re-ingestion.

Wire format (JSON)::

    {"name": "cnot_pair", "dim": 4,
     "unitaries": [{"probability": 0.5, "matrix": [[[re, im], ...], ...]}, ...],
     "tolerances": {"unit_circle": 1e-9, "nullspace": 1e-10, "convergence": 1e-8}}

States use the same matrix encoding under a top-level ``"state"`` key.
"""

from dataclasses import dataclass, field
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from ruo.attractors import AttractorSpace
from ruo.channel import MAX_DIM, as_density_matrix, validate_ensemble
from ruo.errors import DocumentError
from ruo.report import dumps

DATA_DIR = Path(__file__).parent / "data"
TOLERANCE_KEYS = ("unit_circle", "nullspace", "convergence")


@dataclass
class EnsembleDocument:
    dim: int
    unitaries: list  # [(probability, ndarray), ...]
    name: str = ""
    tolerances: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"name": self.name, "dim": self.dim, "unitaries": [
            {"probability": float(p), "matrix": np.asarray(U, dtype=complex)}
            for p, U in self.unitaries
        ]}
        if self.tolerances:
            out["tolerances"] = dict(self.tolerances)
        return out

    def to_json(self):
        return dumps(self.to_dict())

    def digest(self):
        """SHA-256 of the canonical (name-independent) serialization."""
        canon = {"dim": self.dim, "unitaries": self.to_dict()["unitaries"]}
        return hashlib.sha256(dumps(canon).encode()).hexdigest()

    def to_ensemble(self, max_dim=MAX_DIM):
        return validate_ensemble(self.unitaries, name=self.name, max_dim=max_dim)


def _load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno}, column {exc.colno}", f"malformed JSON: {exc.msg}")


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DocumentError(where, f"expected a number, got {json.dumps(x)}")
    if not math.isfinite(x):
        raise DocumentError(where, "number is not finite")
    return float(x)


def parse_matrix(obj, where, dim=None):
    """Decode a list of rows of ``[re, im]`` pairs into a complex array."""
    if not isinstance(obj, list) or not obj:
        raise DocumentError(where, "expected a non-empty list of rows")
    n = dim if dim is not None else len(obj)
    if len(obj) != n:
        raise DocumentError(where, f"expected {n} rows, got {len(obj)}")
    M = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(obj):
        rw = f"{where}[{i}]"
        if not isinstance(row, list):
            raise DocumentError(rw, "expected a list of entries")
        if len(row) != n:
            raise DocumentError(rw, f"expected {n} entries, got {len(row)}")
        for j, entry in enumerate(row):
            ew = f"{rw}[{j}]"
            if not isinstance(entry, list) or len(entry) != 2:
                raise DocumentError(ew, "complex entries must be [re, im] pairs")
            M[i, j] = complex(_number(entry[0], ew + "[0]"), _number(entry[1], ew + "[1]"))
    return M


def parse_ensemble(text):
    """Parse and structurally check an ensemble document (no unitarity check)."""
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise DocumentError("", "top level must be a JSON object")
    for key in ("dim", "unitaries"):
        if key not in doc:
            raise DocumentError(key, "missing required field")
    dim = doc["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise DocumentError("dim", f"expected a positive integer, got {json.dumps(dim)}")
    items = doc["unitaries"]
    if not isinstance(items, list) or not items:
        raise DocumentError("unitaries", "expected a non-empty list")
    unitaries = []
    for k, item in enumerate(items):
        w = f"unitaries[{k}]"
        if not isinstance(item, dict):
            raise DocumentError(w, "expected an object")
        for key in ("probability", "matrix"):
            if key not in item:
                raise DocumentError(f"{w}.{key}", "missing required field")
        p = _number(item["probability"], f"{w}.probability")
        unitaries.append((p, parse_matrix(item["matrix"], f"{w}.matrix", dim)))
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise DocumentError("name", "expected a string")
    tolerances = {}
    tol = doc.get("tolerances", {})
    if not isinstance(tol, dict):
        raise DocumentError("tolerances", "expected an object")
    for key, val in tol.items():
        if key not in TOLERANCE_KEYS:
            raise DocumentError(f"tolerances.{key}", f"unknown tolerance (known: {', '.join(TOLERANCE_KEYS)})")
        val = _number(val, f"tolerances.{key}")
        if val < 0:
            raise DocumentError(f"tolerances.{key}", "must be nonnegative")
        tolerances[key] = val
    return EnsembleDocument(dim, unitaries, name, tolerances)


def parse_state(text, dim=None):
    doc = _load_json(text)
    if not isinstance(doc, dict) or "state" not in doc:
        raise DocumentError("state", "missing required field")
    return as_density_matrix(parse_matrix(doc["state"], "state", dim), dim)


def state_to_json(rho):
    return dumps({"state": np.asarray(rho, dtype=complex)})


# -- builtins ----------------------------------------------------------------

def cnot_matrices():
    """``C1|i,j> = |i, i xor j>`` and ``C2|i,j> = |i xor j, j>`` in the basis 00, 01, 10, 11."""
    C1 = np.zeros((4, 4))
    C2 = np.zeros((4, 4))
    for i in (0, 1):
        for j in (0, 1):
            C1[2 * i + (i ^ j), 2 * i + j] = 1
            C2[2 * (i ^ j) + j, 2 * i + j] = 1
    return C1, C2


def _cnot_pair(p1=0.5):
    C1, C2 = cnot_matrices()
    return [(p1, C1), (1 - p1, C2)]


def _identity(d=2):
    return [(1.0, np.eye(int(d)))]


def _pauli_x():
    return [(1.0, np.array([[0, 1], [1, 0]]))]


def _irrational_phase():
    return [(1.0, np.diag([1.0, np.exp(1j * np.pi * np.sqrt(2))]))]


BUILTINS = {
    "cnot_pair": (_cnot_pair, "p1"),
    "identity": (_identity, "d"),
    "single_unitary_pauli_x": (_pauli_x, None),
    "diag_irrational_phase": (_irrational_phase, None),
}


def builtin(name, **params):
    """Named example ensemble, e.g. ``builtin("cnot_pair", p1=0.9)``."""
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin {name!r} (known: {', '.join(BUILTINS)})")
    make, _ = BUILTINS[name]
    items = make(**params)
    U = np.asarray(items[0][1])
    return EnsembleDocument(
        U.shape[0], [(float(p), np.asarray(M, dtype=complex)) for p, M in items], name
    )


def builtin_from_spec(spec):
    """``"cnot_pair"`` or ``"cnot_pair:0.9"`` / ``"identity:3"``."""
    name, _, arg = spec.partition(":")
    if name not in BUILTINS:
        raise KeyError(f"unknown builtin {name!r}")
    param = BUILTINS[name][1]
    if not arg:
        return builtin(name)
    if param is None:
        raise KeyError(f"builtin {name!r} takes no parameter")
    value = int(arg) if param == "d" else float(arg)
    doc = builtin(name, **{param: value})
    doc.name = spec
    return doc


def resolve_path(ref):
    """A filesystem path, else a file shipped in the package data directory."""
    path = Path(ref)
    if path.exists():
        return path
    for cand in (DATA_DIR / ref, DATA_DIR / f"{ref}.json"):
        if cand.exists():
            return cand
    return None


def load_ensemble_document(ref):
    path = resolve_path(ref)
    if path is not None:
        doc = parse_ensemble(path.read_text(encoding="utf-8"))
        if not doc.name:
            doc.name = path.stem
        return doc
    try:
        return builtin_from_spec(ref)
    except (KeyError, ValueError):
        raise DocumentError(ref, "no such file or builtin ensemble") from None


def load_state(ref, dim=None):
    path = resolve_path(ref)
    if path is None:
        raise DocumentError(ref, "no such state file")
    return parse_state(path.read_text(encoding="utf-8"), dim)


def space_from_report(report):
    """Rebuild an :class:`AttractorSpace` from a ``--full`` attractors report."""
    data = report.get("attractors", report)
    blocks = []
    for k, blk in enumerate(data["blocks"]):
        if "basis" not in blk:
            raise DocumentError(f"blocks[{k}].basis", "report was not emitted with --full")
        lam = complex(*blk["lambda"])
        basis = [parse_matrix(X, f"blocks[{k}].basis[{i}]", data["dim"])
                 for i, X in enumerate(blk["basis"])]
        blocks.append((lam, basis))
    return AttractorSpace(data["dim"], blocks)
