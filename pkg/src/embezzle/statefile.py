"""JSON state files.

Two forms are accepted::

    {"kind": "schmidt", "coeffs": [0.7071067811865476, 0.7071067811865476]}
    {"kind": "amplitudes", "rows": 2, "cols": 2,
     "entries": [[0.7071, 0], [0, 0], [0, 0], [0.7071, 0]]}

``entries`` are ``[real, imag]`` pairs in row-major order.
"""

import json
import logging
import math

import numpy as np

from .schmidt import schmidt_decompose
from .validation import NormalizationError, check_schmidt_vector

logger = logging.getLogger(__name__)

INPUT_TOL = 1e-4
# deviations below this are rounding noise and are left alone
SILENT_TOL = 1e-12


class StateFileError(ValueError):
    """Malformed or invalid state file."""


def _fail(path, msg):
    raise StateFileError(f"{path}: {msg}")


def _renormalize(values, norm_sq, path):
    dev = abs(norm_sq - 1.0)
    if dev > INPUT_TOL:
        raise NormalizationError(dev, INPUT_TOL, f"state in {path}")
    if dev > SILENT_TOL:
        logger.warning("%s: renormalizing state (deviation %.3e)", path, dev)
        return values / math.sqrt(norm_sq)
    return values


def _real_list(value, path, field):
    if not isinstance(value, list) or not value:
        _fail(path, f"'{field}' must be a non-empty list")
    for idx, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            _fail(path, f"{field}[{idx}] is not a number: {v!r}")
    return np.asarray(value, dtype=np.float64)


def state_from_dict(doc, path="<state>"):
    """Parse a decoded state document into a Schmidt vector."""
    if not isinstance(doc, dict):
        _fail(path, "top-level value must be an object")
    kind = doc.get("kind")
    if kind == "schmidt":
        coeffs = _real_list(doc.get("coeffs"), path, "coeffs")
        if np.any(coeffs < 0):
            idx = int(np.flatnonzero(coeffs < 0)[0])
            _fail(path, f"coeffs[{idx}] is negative")
        if not np.any(coeffs > 0):
            _fail(path, "state is empty (all coefficients zero)")
        coeffs = _renormalize(coeffs, float(np.dot(coeffs, coeffs)), path)
        return check_schmidt_vector(coeffs, sort=True)
    if kind == "amplitudes":
        rows, cols = doc.get("rows"), doc.get("cols")
        for name, v in (("rows", rows), ("cols", cols)):
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                _fail(path, f"'{name}' must be a positive integer")
        entries = doc.get("entries")
        if not isinstance(entries, list) or len(entries) != rows * cols:
            _fail(path, f"'entries' must be a list of rows*cols = {rows * cols} pairs")
        flat = np.empty(rows * cols, dtype=np.complex128)
        for idx, pair in enumerate(entries):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pair)
            ):
                _fail(path, f"entries[{idx}] must be a [real, imag] pair")
            flat[idx] = complex(pair[0], pair[1])
        norm_sq = float(np.sum(np.abs(flat) ** 2))
        if norm_sq == 0:
            _fail(path, "state is empty (all amplitudes zero)")
        flat = _renormalize(flat, norm_sq, path)
        return schmidt_decompose(flat.reshape(rows, cols))
    _fail(path, f"unknown kind {kind!r} (expected 'schmidt' or 'amplitudes')")


def parse_state_file(path):
    """Read a state file and return the target's Schmidt vector (sorted, zeros stripped)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise StateFileError(f"{path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return state_from_dict(doc, path)


def state_to_dict(coeffs):
    return {"kind": "schmidt", "coeffs": [float(c) for c in coeffs]}


def write_state_file(path, coeffs):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(coeffs), fh)
        fh.write("\n")
