"""Packed bit-vector helpers.

A point in ``{0,1}^d`` is a Python ``int`` whose most significant of ``d``
bits holds coordinate 0. With this layout integer order is lexicographic
order on the 0/1 strings, and ``format(x, "0{d}b")`` is the string itself.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


def coord_bit(d: int, j: int) -> int:
    return 1 << (d - 1 - j)


def to_string(x: int, d: int) -> str:
    return format(x, f"0{d}b") if d else ""


def from_string(s: str) -> int:
    return int(s, 2) if s else 0


def hamming(x: int, y: int) -> int:
    return (x ^ y).bit_count()


def differing_coords(x: int, y: int, d: int) -> list[int]:
    """Coordinates where ``x`` and ``y`` differ, ascending."""
    z = x ^ y
    out = []
    while z:
        low = z & -z
        out.append(d - low.bit_length())
        z ^= low
    out.reverse()
    return out


def mask_of(coords: Iterable[int], d: int) -> int:
    m = 0
    for j in coords:
        m |= 1 << (d - 1 - j)
    return m


def to_array(points: Sequence[int], d: int) -> np.ndarray:
    """Unpack points into an ``(len(points), d)`` uint8 matrix."""
    if d == 0 or not points:
        return np.zeros((len(points), d), dtype=np.uint8)
    nbytes = (d + 7) // 8
    buf = b"".join(x.to_bytes(nbytes, "big") for x in points)
    packed = np.frombuffer(buf, dtype=np.uint8).reshape(len(points), nbytes)
    return np.unpackbits(packed, axis=1)[:, 8 * nbytes - d:]


def from_array(rows: np.ndarray) -> list[int]:
    """Inverse of :func:`to_array`."""
    m, d = rows.shape
    if d == 0:
        return [0] * m
    pad = (-d) % 8
    if pad:
        rows = np.concatenate([np.zeros((m, pad), dtype=np.uint8), rows], axis=1)
    packed = np.packbits(rows.astype(np.uint8, copy=False), axis=1)
    return [int.from_bytes(r.tobytes(), "big") for r in packed]


def vector_to_int(vec: np.ndarray) -> int:
    """Pack a length-d 0/1 vector into a point."""
    return from_array(np.asarray(vec, dtype=np.uint8).reshape(1, -1))[0]
