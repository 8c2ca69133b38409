"""Field files: one JSON header line followed by a raw binary payload.

The header is ``{"kind", "d", "n", "L", "rep"}`` plus an optional ``seed``
and free-form ``meta``.  The payload is little-endian float64 ``(re, im)``
pairs in row-major point (or mode) order with components varying fastest.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, KindMismatchError, MalformedHeaderError, TruncatedPayloadError
from .spectral import FIELD_KINDS, PHYSICAL, SPECTRAL, Field, Grid

_DTYPE = np.dtype("<c16")
_REQUIRED = ("kind", "d", "n", "L", "rep")


def header_of(field: Field, seed: int | None = None, meta: dict | None = None) -> dict:
    g = field.grid
    head = {"kind": field.kind, "d": g.d, "n": g.n, "L": g.L, "rep": field.rep}
    if seed is not None:
        head["seed"] = int(seed)
    if meta:
        head["meta"] = meta
    return head


def encode_payload(field: Field) -> bytes:
    """Payload bytes: components fastest, little-endian complex128."""
    return np.ascontiguousarray(np.moveaxis(field.data, 0, -1), dtype=_DTYPE).tobytes()


def write_field(field: Field, path: str | os.PathLike, seed: int | None = None, meta: dict | None = None) -> Path:
    path = Path(path)
    head = json.dumps(header_of(field, seed, meta), sort_keys=True)
    with open(path, "wb") as fh:
        fh.write(head.encode("utf-8") + b"\n")
        fh.write(encode_payload(field))
    return path


def _parse_header(line: bytes) -> dict:
    try:
        head = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedHeaderError(f"header is not valid JSON: {exc}") from None
    if not isinstance(head, dict):
        raise MalformedHeaderError("header must be a JSON object")
    missing = [k for k in _REQUIRED if k not in head]
    if missing:
        raise MalformedHeaderError(f"header is missing {', '.join(missing)}")
    if head["kind"] not in FIELD_KINDS:
        raise MalformedHeaderError(f"unknown field kind {head['kind']!r}")
    if head["rep"] not in (PHYSICAL, SPECTRAL):
        raise MalformedHeaderError(f"unknown representation {head['rep']!r}")
    try:
        Grid(int(head["d"]), int(head["n"]), float(head["L"]))
    except (ConfigurationError, TypeError, ValueError) as exc:
        raise MalformedHeaderError(f"invalid grid in header: {exc}") from None
    return head


def _payload_len(kind: str, d: int, n: int) -> int:
    return FIELD_KINDS[kind].ncomp(d) * n**d * _DTYPE.itemsize


def _alternatives(nbytes: int, n: int) -> list[tuple[str, int]]:
    return [(k, d) for k in FIELD_KINDS for d in (2, 3, 4) if _payload_len(k, d, n) == nbytes]


def read_field(path: str | os.PathLike, expect_kind: str | None = None) -> Field:
    """Decode a field file; distinct errors for header, length and kind problems."""
    with open(path, "rb") as fh:
        line = fh.readline()
        payload = fh.read()
    if not line.endswith(b"\n"):
        raise MalformedHeaderError("missing header line")
    head = _parse_header(line.rstrip(b"\n"))
    kind, d, n = head["kind"], int(head["d"]), int(head["n"])
    if expect_kind is not None and kind != expect_kind:
        raise KindMismatchError(f"expected a {expect_kind} field, file holds {kind}")
    want = _payload_len(kind, d, n)
    got = len(payload)
    if got != want:
        alt = _alternatives(got, n)
        if alt:
            k2, d2 = alt[0]
            raise KindMismatchError(
                f"header says {kind} d={d} ({want} bytes) but the payload length {got} fits {k2} d={d2}"
            )
        if got < want:
            raise TruncatedPayloadError(f"payload has {got} bytes, header requires {want}")
        raise KindMismatchError(f"payload has {got} bytes, more than the {want} the header describes")
    grid = Grid(d, n, float(head["L"]))
    cls = FIELD_KINDS[kind]
    arr = np.frombuffer(payload, dtype=_DTYPE).reshape(*grid.shape, cls.ncomp(d))
    return cls(grid, head["rep"], np.moveaxis(arr, -1, 0).astype(np.complex128))


def read_header(path: str | os.PathLike) -> dict:
    with open(path, "rb") as fh:
        return _parse_header(fh.readline().rstrip(b"\n"))


__all__ = ["encode_payload", "header_of", "read_field", "read_header", "write_field"]
