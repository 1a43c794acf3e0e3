"""JSON text format for states, Kraus sets and POVMs.

One document per object::

    {"kind": "density", "dim": 2, "re": [...], "im": [...]}
    {"kind": "pure", "dim": 2, "re": [...], "im": [...]}
    {"kind": "kraus_set", "dim": 2, "dim_out": 2, "trace_preserving": false,
     "blocks": [{"re": [...], "im": [...]}, ...]}
    {"kind": "povm", "dim": 2, "blocks": [{"re": [...], "im": [...]}, ...]}

Arrays are row-major.  Numbers are written with 17 significant digits, which
round-trips every double exactly.  Everything is validated on load.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import KrausChannel, Povm
from .errors import SineDistError
from .states import DensityMatrix, PureState

KINDS = ("density", "pure", "kraus_set", "povm")


class MatrixFileError(SineDistError, ValueError):
    pass


def _num(v: float) -> str:
    return format(float(v), ".17g")


def _array(values) -> str:
    return "[" + ", ".join(_num(v) for v in values) + "]"


def _block(m: np.ndarray) -> str:
    flat = np.asarray(m, dtype=np.complex128).reshape(-1)
    return f'{{"re": {_array(flat.real)}, "im": {_array(flat.imag)}}}'


def dumps(obj) -> str:
    if isinstance(obj, PureState):
        v = obj.amplitudes
        return (
            f'{{"kind": "pure", "dim": {v.size},\n "re": {_array(v.real)},\n "im": {_array(v.imag)}}}\n'
        )
    if isinstance(obj, DensityMatrix):
        flat = obj.matrix.reshape(-1)
        return (
            f'{{"kind": "density", "dim": {obj.dim},\n'
            f' "re": {_array(flat.real)},\n "im": {_array(flat.imag)}}}\n'
        )
    if isinstance(obj, KrausChannel):
        blocks = ",\n  ".join(_block(e) for e in obj.operators)
        tp = "true" if obj.trace_preserving else "false"
        return (
            f'{{"kind": "kraus_set", "dim": {obj.dim_in}, "dim_out": {obj.dim_out}, '
            f'"trace_preserving": {tp},\n "blocks": [\n  {blocks}\n ]}}\n'
        )
    if isinstance(obj, Povm):
        blocks = ",\n  ".join(_block(a) for a in obj.elements)
        return f'{{"kind": "povm", "dim": {obj.dim},\n "blocks": [\n  {blocks}\n ]}}\n'
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dump(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def _read_array(doc: dict, key: str, length: int, where: str) -> np.ndarray:
    if key not in doc:
        raise MatrixFileError(f"{where}: missing '{key}' array")
    vals = doc[key]
    if not isinstance(vals, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
        raise MatrixFileError(f"{where}: '{key}' must be a list of numbers")
    if len(vals) != length:
        raise MatrixFileError(f"{where}: '{key}' has {len(vals)} entries, expected {length}")
    arr = np.array(vals, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise MatrixFileError(f"{where}: '{key}' contains non-finite values")
    return arr


def _complex(doc: dict, length: int, where: str) -> np.ndarray:
    return _read_array(doc, "re", length, where) + 1j * _read_array(doc, "im", length, where)


def _positive_int(doc: dict, key: str) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise MatrixFileError(f"'{key}' must be a positive integer, got {v!r}")
    return v


def loads(text: str):
    """Parse and validate; returns a PureState, DensityMatrix, KrausChannel or Povm."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MatrixFileError("top level must be an object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise MatrixFileError(f"'kind' must be one of {', '.join(KINDS)}, got {kind!r}")
    dim = _positive_int(doc, "dim")
    try:
        if kind == "pure":
            return PureState(_complex(doc, dim, "pure"))
        if kind == "density":
            return DensityMatrix(_complex(doc, dim * dim, "density").reshape(dim, dim))
        blocks = doc.get("blocks")
        if not isinstance(blocks, list) or not blocks:
            raise MatrixFileError(f"{kind}: 'blocks' must be a non-empty list")
        if not all(isinstance(b, dict) for b in blocks):
            raise MatrixFileError(f"{kind}: every block must be an object")
        if kind == "povm":
            els = [_complex(b, dim * dim, f"povm block {i}").reshape(dim, dim) for i, b in enumerate(blocks)]
            return Povm(els)
        dim_out = _positive_int(doc, "dim_out") if "dim_out" in doc else dim
        tp = doc.get("trace_preserving", False)
        if not isinstance(tp, bool):
            raise MatrixFileError("'trace_preserving' must be true or false")
        ops = [
            _complex(b, dim_out * dim, f"kraus block {i}").reshape(dim_out, dim)
            for i, b in enumerate(blocks)
        ]
        return KrausChannel(ops, trace_preserving=tp)
    except MatrixFileError:
        raise
    except SineDistError as exc:
        raise MatrixFileError(f"{kind}: {exc}") from exc


def load(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc.strerror}") from exc
    return loads(text)
