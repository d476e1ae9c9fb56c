"""JSON documents for banks, operators and subspaces.

Bank:      {"dim": d, "frames": [{"name": "F", "vectors": [[...], ...]}, ...],
            "title": ..., "source": ...}   (title/source optional)
Operator:  {"dim": d, "matrix": [[...], ...]}
Subspace:  {"ambient_dim": d, "basis_columns": [[...], ...]}

Floats are written with 17 significant digits so that every float64
survives a write/read cycle unchanged.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError, SubspaceError
from .weaving import FrameBank, Subspace


def _read_json(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: parse error: {exc.msg}") from None


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise InputError(f"{where}: expected a finite number, got {x!r}")
    return float(x)


def _int_field(doc, key, where):
    value = doc.get(key) if isinstance(doc, dict) else None
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise InputError(f"{where}: field {key!r} must be a positive integer")
    return value


def _rows(rows, width, where):
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{where}: expected a non-empty list of vectors")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise InputError(f"{where}, index {i}: vector has length {got}, expected {width}")
        out.append([_number(x, f"{where}, index {i}") for x in row])
    return out


def bank_from_document(doc, where="bank") -> FrameBank:
    dim = _int_field(doc, "dim", where)
    frames = doc.get("frames")
    if not isinstance(frames, list) or not frames:
        raise InputError(f"{where}: 'frames' must be a non-empty list")
    names, arrays = [], []
    for j, fr in enumerate(frames):
        if not isinstance(fr, dict):
            raise InputError(f"{where}: frame {j} must be an object")
        name = str(fr.get("name", f"F{j}"))
        if name in names:
            raise InputError(f"{where}: duplicate frame name {name!r}")
        arrays.append(_rows(fr.get("vectors"), dim, f"{where}: frame {name!r}"))
        names.append(name)
    n = len(arrays[0])
    for name, a in zip(names, arrays):
        if len(a) != n:
            raise InputError(
                f"{where}: frame {name!r} has {len(a)} vectors, frame {names[0]!r} has {n}"
            )
    return FrameBank(np.array(arrays, dtype=np.float64), tuple(names))


def load_bank(path) -> FrameBank:
    return bank_from_document(_read_json(path), str(path))


def load_operator(path) -> np.ndarray:
    doc = _read_json(path)
    dim = _int_field(doc, "dim", str(path))
    rows = _rows(doc.get("matrix"), dim, f"{path}: matrix")
    if len(rows) != dim:
        raise InputError(f"{path}: matrix has {len(rows)} rows, expected {dim}")
    return np.array(rows, dtype=np.float64)


def load_subspace(path) -> Subspace:
    doc = _read_json(path)
    dim = _int_field(doc, "ambient_dim", str(path))
    cols = _rows(doc.get("basis_columns"), dim, f"{path}: basis_columns")
    try:
        return Subspace.from_columns(cols)
    except SubspaceError as exc:
        raise InputError(f"{path}: {exc}") from None


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _rows_text(rows, indent):
    pad = " " * indent
    lines = ["[" + ", ".join(format_float(x) for x in row) + "]" for row in rows]
    return "[\n" + ",\n".join(pad + "  " + ln for ln in lines) + "\n" + pad + "]"


def bank_to_json(bank: FrameBank, title=None, source=None) -> str:
    parts = [f'  "dim": {bank.dim}']
    if title is not None:
        parts.append(f'  "title": {json.dumps(title)}')
    if source is not None:
        parts.append(f'  "source": {json.dumps(source)}')
    frames = []
    for name, vecs in zip(bank.names, bank.vectors):
        frames.append(
            f'    {{"name": {json.dumps(name)}, "vectors": {_rows_text(vecs, 6)}}}'
        )
    parts.append('  "frames": [\n' + ",\n".join(frames) + "\n  ]")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def operator_to_json(matrix) -> str:
    m = np.asarray(matrix, dtype=np.float64)
    return f'{{\n  "dim": {m.shape[0]},\n  "matrix": {_rows_text(m, 2)}\n}}\n'


def subspace_to_json(w: Subspace) -> str:
    return (
        f'{{\n  "ambient_dim": {w.ambient_dim},\n'
        f'  "basis_columns": {_rows_text(w.columns, 2)}\n}}\n'
    )


def save_bank(bank: FrameBank, path, title=None, source=None) -> None:
    Path(path).write_text(bank_to_json(bank, title, source), encoding="utf-8")


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
