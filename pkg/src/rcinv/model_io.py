"""JSON model and result files.

Both formats store polytope unions as lists of ``{"H": rows, "h": vector}``.
Output uses sorted keys and shortest round-trip float literals, so equal
inputs produce identical bytes.
"""

import json

import numpy as np

from .errors import InputError
from .invariance import ConstraintSpec, SystemModel
from .polytope import HPolytope
from .region import PolyUnion

SCHEMA_VERSION = 1
MODES = ("outer", "inner")
META_KEYS = ("mode", "n", "epsilon", "delta", "rho", "c", "stop_index", "iterations",
             "piece_counts", "verdict")


def _plain(a):
    """Nested lists of Python floats, with ``-0.0`` normalized to ``0.0``."""
    return (np.asarray(a, dtype=float) + 0.0).tolist()


def union_to_json(S):
    return [{"H": _plain(P.H), "h": _plain(P.h)} for P in S]


def union_from_json(items, dim, name):
    if not isinstance(items, list):
        raise InputError(f"{name}: expected a list of {{H, h}} objects")
    pieces = []
    for k, item in enumerate(items):
        try:
            H = np.asarray(item["H"], dtype=float)
            h = np.asarray(item["h"], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"{name}[{k}]: malformed polytope ({e})") from e
        if H.size == 0:
            H = H.reshape(0, dim)
        if H.ndim != 2 or H.shape[1] != dim:
            raise InputError(f"{name}[{k}]: H must have {dim} columns, got shape {H.shape}")
        if h.shape != (H.shape[0],):
            raise InputError(f"{name}[{k}]: h has {h.size} entries for {H.shape[0]} rows")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(h))):
            raise InputError(f"{name}[{k}]: non-finite entries")
        pieces.append(HPolytope(H, h))
    return PolyUnion(pieces, dim=dim)


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=1, allow_nan=False) + "\n"


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def model_to_json(sys, cons):
    return {
        "schema_version": SCHEMA_VERSION,
        "n": sys.n,
        "m": sys.m,
        "A": _plain(sys.A),
        "B": _plain(sys.B),
        "W": union_to_json(sys.W),
        "X": union_to_json(cons.X),
        "U": union_to_json(cons.U),
    }


def model_from_json(doc, source="model"):
    """Validate a model document and build ``(SystemModel, ConstraintSpec)``."""
    if not isinstance(doc, dict):
        raise InputError(f"{source}: top level must be an object")
    missing = [k for k in ("schema_version", "n", "m", "A", "B", "W", "X", "U") if k not in doc]
    if missing:
        raise InputError(f"{source}: missing fields {', '.join(missing)}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise InputError(f"{source}: unsupported schema_version {doc['schema_version']!r}")
    n, m = doc["n"], doc["m"]
    if not (isinstance(n, int) and isinstance(m, int) and n >= 1 and m >= 1):
        raise InputError(f"{source}: n and m must be positive integers")
    try:
        A = np.asarray(doc["A"], dtype=float)
        B = np.asarray(doc["B"], dtype=float)
    except (TypeError, ValueError) as e:
        raise InputError(f"{source}: A and B must be numeric matrices ({e})") from e
    if A.shape != (n, n):
        raise InputError(f"{source}: A must be {n}x{n}, got shape {A.shape}")
    if B.shape != (n, m):
        raise InputError(f"{source}: B must be {n}x{m}, got shape {B.shape}")
    W = union_from_json(doc["W"], n, f"{source}: W")
    X = union_from_json(doc["X"], n, f"{source}: X")
    U = union_from_json(doc["U"], m, f"{source}: U")
    try:
        sys = SystemModel(A, B, W)
        cons = ConstraintSpec(X, U)
    except InputError as e:
        raise InputError(f"{source}: {e}") from e
    return sys, cons


def load_model(path):
    return model_from_json(_read_json(path), str(path))


def save_model(path, sys, cons):
    _write(path, dumps(model_to_json(sys, cons)))


def result_to_json(R, meta):
    """Result document; ``meta["n"]`` keeps the dimension of empty results."""
    meta = dict(meta)
    if meta.get("mode") not in MODES:
        raise InputError(f"result mode must be one of {MODES}")
    for k in META_KEYS:
        meta.setdefault(k, None)
    return {"pieces": [] if R is None else union_to_json(R), "meta": meta}


def save_result(path, R, meta):
    _write(path, dumps(result_to_json(R, meta)))


def load_result(path, dim=None):
    """Return ``(PolyUnion, meta)``.

    The dimension comes from ``dim``, else ``meta["n"]``, else the first piece.
    """
    doc = _read_json(path)
    if not isinstance(doc, dict) or not isinstance(doc.get("pieces"), list):
        raise InputError(f"{path}: not a result file (no 'pieces' list)")
    pieces = doc["pieces"]
    meta = doc.get("meta") or {}
    if dim is None:
        dim = meta.get("n")
    if dim is None:
        if not pieces:
            raise InputError(f"{path}: cannot tell the dimension of an empty result")
        try:
            dim = np.asarray(pieces[0]["H"], dtype=float).shape[1]
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise InputError(f"{path}: malformed first piece ({e})") from e
    return union_from_json(pieces, int(dim), str(path)), meta
