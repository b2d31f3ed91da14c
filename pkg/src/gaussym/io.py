"""Serialisation of correlation matrices and CSV tables.

Binary container (all little-endian)::

    offset  size      field
    0       4         magic b"GSYM"
    4       4         uint32 format version (1)
    8       4         uint32 ell
    12      8         float64 tol_herm
    20      8         float64 tol_spec
    28      8         float64 clip_eps
    36      16 ell^2  G, row-major complex128 (real, imag pairs)
    ...     16 ell^2  F, row-major complex128

The JSON form carries the same fields with ``G`` and ``F`` split into
``re`` and ``im`` nested lists.
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .core import DiracCorrelationMatrix, SpectralTolerances
from .errors import FormatError

__all__ = [
    "MAGIC",
    "VERSION",
    "to_bytes",
    "from_bytes",
    "save_binary",
    "load_binary",
    "to_json",
    "from_json",
    "format_value",
    "write_csv",
    "read_csv",
]

MAGIC = b"GSYM"
VERSION = 1
_HEADER = struct.Struct("<4sII3d")


def to_bytes(C):
    tol = C.tolerances
    head = _HEADER.pack(MAGIC, VERSION, C.ell, tol.tol_herm, tol.tol_spec, tol.clip_eps)
    body = [np.ascontiguousarray(X, dtype="<c16").tobytes() for X in (C.G, C.F)]
    return head + b"".join(body)


def from_bytes(data, validate=True):
    """Inverse of :func:`to_bytes`.

    Raises
    ------
    FormatError
        On a bad magic number, unknown version or wrong payload length.
    """
    if len(data) < _HEADER.size:
        raise FormatError("truncated header")
    magic, version, ell, th, ts, ce = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported format version {version}")
    n = 16 * ell * ell
    if len(data) != _HEADER.size + 2 * n:
        raise FormatError(f"payload length {len(data) - _HEADER.size} does not match ell={ell}")
    off = _HEADER.size
    G = np.frombuffer(data, dtype="<c16", count=ell * ell, offset=off).reshape(ell, ell)
    F = np.frombuffer(data, dtype="<c16", count=ell * ell, offset=off + n).reshape(ell, ell)
    tol = SpectralTolerances(th, ts, ce)
    return DiracCorrelationMatrix(G, F, tol, validate=validate)


def save_binary(C, path):
    Path(path).write_bytes(to_bytes(C))


def load_binary(path, validate=True):
    return from_bytes(Path(path).read_bytes(), validate=validate)


def _split(X):
    return {"re": np.real(X).tolist(), "im": np.imag(X).tolist()}


def to_json(C, indent=None):
    tol = C.tolerances
    doc = {
        "format": "gaussym-correlation-matrix",
        "version": VERSION,
        "ell": C.ell,
        "tolerances": {"tol_herm": tol.tol_herm, "tol_spec": tol.tol_spec,
                       "clip_eps": tol.clip_eps},
        "G": _split(C.G),
        "F": _split(C.F),
    }
    return json.dumps(doc, indent=indent)


def from_json(text, validate=True):
    try:
        doc = json.loads(text)
        ell = int(doc["ell"])
        tol = SpectralTolerances(**doc["tolerances"])
        G = np.array(doc["G"]["re"], dtype=float) + 1j * np.array(doc["G"]["im"], dtype=float)
        F = np.array(doc["F"]["re"], dtype=float) + 1j * np.array(doc["F"]["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed correlation-matrix JSON: {exc}") from None
    if G.shape != (ell, ell) or F.shape != (ell, ell):
        raise FormatError(f"blocks do not match ell={ell}")
    return DiracCorrelationMatrix(G.reshape(ell, ell), F.reshape(ell, ell), tol,
                                  validate=validate)


def format_value(x):
    """Shortest round-trip text for floats; integers and strings verbatim."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, header, rows):
    """Write a header row then one row per record, with lossless float text."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(x) for x in row])
    return path


def read_csv(path):
    """Read a numeric CSV written by :func:`write_csv`.

    Returns
    -------
    header : list of str
    data : ndarray, shape (rows, columns)

    Raises
    ------
    FormatError
        If the file has no header, no data rows, ragged rows or non-numeric cells.
    """
    with Path(path).open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise FormatError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if not body:
        raise FormatError(f"{path}: no data rows")
    if any(len(r) != len(header) for r in body):
        raise FormatError(f"{path}: ragged rows")
    try:
        data = np.array([[float(x) for x in r] for r in body])
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return header, data
