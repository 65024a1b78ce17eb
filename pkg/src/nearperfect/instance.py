"""Terminal matrices, components, cuts and patterns."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from typing import BinaryIO, Iterable, Sequence, TextIO, Union

import numpy as np

from .bits import coord_bit, from_string, mask_of, to_array, to_string, vector_to_int
from .forest import ContractError, LabeledForest


class MatrixParseError(ValueError):
    pass


@dataclass(frozen=True)
class TerminalMatrix:
    rows: tuple[int, ...]
    labels: tuple[str, ...]
    d: int

    def __post_init__(self):
        if len(self.labels) != len(self.rows):
            raise ValueError("one label per row required")
        limit = 1 << self.d
        for x in self.rows:
            if not 0 <= x < limit:
                raise ValueError(f"row {x} does not fit in {self.d} bits")

    @classmethod
    def from_strings(cls, rows: Sequence[str], labels: Sequence[str] | None = None) -> "TerminalMatrix":
        d = len(rows[0]) if rows else 0
        if any(len(r) != d for r in rows):
            raise ValueError("rows of unequal length")
        if labels is None:
            labels = [f"t{k}" for k in range(len(rows))]
        return cls(tuple(from_string(r) for r in rows), tuple(labels), d)

    @property
    def n(self) -> int:
        return len(self.rows)

    def strings(self) -> list[str]:
        return [to_string(x, self.d) for x in self.rows]

    def array(self) -> np.ndarray:
        return to_array(self.rows, self.d)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.d}"]
        lines += [f"{s} {lab}" for s, lab in zip(self.strings(), self.labels)]
        return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> TerminalMatrix:
    lines = text.replace("\r\n", "\n").split("\n")
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MatrixParseError("line 1: empty input, expected '<n> <d>' header")
    head = lines[0].split(" ")
    if len(head) != 2 or not all(h.isdigit() for h in head):
        raise MatrixParseError(f"line 1: malformed header {lines[0]!r}, expected '<n> <d>'")
    n, d = int(head[0]), int(head[1])
    if n == 0 or d == 0:
        raise MatrixParseError("line 1: n and d must be positive")
    if len(lines) - 1 < n:
        raise MatrixParseError(f"line {len(lines) + 1}: expected {n} rows, found {len(lines) - 1}")
    if len(lines) - 1 > n:
        raise MatrixParseError(f"line {n + 2}: unexpected content after {n} rows")
    rows, labels = [], []
    for k in range(1, n + 1):
        parts = lines[k].split()
        if not parts:
            raise MatrixParseError(f"line {k + 1}: row {k} is empty, expected {d} characters")
        bits = parts[0]
        if len(parts) > 2:
            raise MatrixParseError(f"line {k + 1}: row {k} has more than one label token")
        if len(bits) != d:
            raise MatrixParseError(f"line {k + 1}: row {k} has length {len(bits)}, expected {d}")
        bad = set(bits) - {"0", "1"}
        if bad:
            raise MatrixParseError(f"line {k + 1}: row {k} has non-binary character {sorted(bad)[0]!r}")
        rows.append(from_string(bits))
        labels.append(parts[1] if len(parts) == 2 else f"t{k - 1}")
    return TerminalMatrix(tuple(rows), tuple(labels), d)


def load_matrix(source: Union[bytes, str, BinaryIO, TextIO], format: str = "matrix-text") -> TerminalMatrix:
    """Read a matrix-text stream, bytes or str."""
    if format != "matrix-text":
        raise ValueError(f"unsupported format {format!r}")
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("ascii")
        except UnicodeDecodeError as exc:
            raise MatrixParseError(f"non-ASCII input: {exc}") from None
    return parse_matrix(source)


@dataclass(frozen=True)
class ColumnMap:
    """How a normalized matrix relates to the original one.

    ``row_map[k]`` is the normalized row index of original row ``k``; it is
    how duplicate species are traced back onto tree nodes.
    """

    d_original: int
    kept: tuple[int, ...]
    dropped_constant: tuple[tuple[int, int], ...]
    row_map: tuple[int, ...] = ()

    @cached_property
    def _base(self) -> int:
        return sum(b << (self.d_original - 1 - j) for j, b in self.dropped_constant)

    def lift_point(self, x: int) -> int:
        d = len(self.kept)
        out = self._base
        for pos, j in enumerate(self.kept):
            if (x >> (d - 1 - pos)) & 1:
                out |= coord_bit(self.d_original, j)
        return out

    def lift_forest(self, forest: LabeledForest) -> LabeledForest:
        lifted = {x: self.lift_point(x) for x in forest.nodes}
        out = LabeledForest(self.d_original, lifted.values())
        for u, v, label in forest.edges:
            out.add_edge(lifted[u], lifted[v], self.kept[label])
        return out


def normalize(m: TerminalMatrix) -> tuple[TerminalMatrix, ColumnMap]:
    """Drop constant coordinates and duplicate rows."""
    arr = m.array()
    kept, dropped = [], []
    for j in range(m.d):
        col = arr[:, j]
        if col.min() == col.max():
            dropped.append((j, int(col[0])))
        else:
            kept.append(j)
    reduced = arr[:, kept]
    d = len(kept)
    rows, labels, row_map, seen = [], [], [], {}
    for k in range(m.n):
        x = vector_to_int(reduced[k]) if d else 0
        if x not in seen:
            seen[x] = len(rows)
            rows.append(x)
            labels.append(m.labels[k])
        row_map.append(seen[x])
    out = TerminalMatrix(tuple(rows), tuple(labels), d)
    return out, ColumnMap(m.d, tuple(kept), tuple(dropped), tuple(row_map))


class Component:
    """A point set with its active (non-constant) coordinates.

    Stored compactly: ``sub`` holds only the active columns, ``fixed`` holds
    the shared values of every inactive coordinate. Instances are treated as
    immutable.
    """

    __slots__ = ("d", "points", "coords", "sub", "fixed", "__dict__")

    def __init__(self, d: int, points: tuple[int, ...], coords: np.ndarray, sub: np.ndarray, fixed: int):
        self.d = d
        self.points = points
        self.coords = coords
        self.sub = sub
        self.fixed = fixed

    @classmethod
    def from_points(cls, points: Iterable[int], d: int) -> "Component":
        pts = tuple(dict.fromkeys(points))
        if not pts:
            raise ContractError("a component needs at least one point")
        arr = to_array(pts, d)
        counts = arr.sum(axis=0, dtype=np.int32)
        coords = np.flatnonzero((counts > 0) & (counts < len(pts)))
        active = mask_of(coords.tolist(), d)
        return cls(d, pts, coords, np.ascontiguousarray(arr[:, coords]), pts[0] & ~active)

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"Component({sorted(to_string(x, self.d) for x in self.points)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Component) and self.d == other.d and self.point_set == other.point_set

    def __hash__(self) -> int:
        return hash((self.d, self.point_set))

    @cached_property
    def point_set(self) -> frozenset[int]:
        return frozenset(self.points)

    @cached_property
    def index(self) -> dict[int, int]:
        return {x: k for k, x in enumerate(self.points)}

    @cached_property
    def active_mask(self) -> frozenset[int]:
        return frozenset(self.coords.tolist())

    @cached_property
    def active_bits(self) -> int:
        return mask_of(self.coords.tolist(), self.d)

    @cached_property
    def position(self) -> dict[int, int]:
        """Coordinate -> column of ``sub``."""
        return {int(j): p for p, j in enumerate(self.coords)}

    @cached_property
    def counts(self) -> np.ndarray:
        return self.sub.sum(axis=0, dtype=np.int32)

    @cached_property
    def leaf_candidate(self) -> tuple[int, int] | None:
        """First ``(column, row)`` where one point alone carries a value.

        Columns ascend by coordinate; the zero side wins when both sides are
        singletons (two-point components).
        """
        m = len(self.points)
        if m < 2 or not len(self.coords):
            return None
        counts = self.counts
        hits = np.flatnonzero((counts == 1) | (counts == m - 1))
        if not len(hits):
            return None
        p = int(hits[0])
        col = self.sub[:, p]
        want = 0 if counts[p] == m - 1 else 1
        return p, int(np.flatnonzero(col == want)[0])

    def is_active(self, i: int) -> bool:
        return i in self.position

    def column(self, i: int) -> np.ndarray:
        if i in self.position:
            return self.sub[:, self.position[i]]
        return np.full(len(self.points), (self.fixed >> (self.d - 1 - i)) & 1, dtype=np.uint8)

    def with_points(self, points: Iterable[int]) -> "Component":
        return Component.from_points(points, self.d)


@dataclass(frozen=True)
class PartitionState:
    components: tuple[Component, ...]

    @classmethod
    def initial(cls, m: TerminalMatrix) -> "PartitionState":
        return cls((Component.from_points(m.rows, m.d),))

    def replace(self, k: int, new: Sequence[Component]) -> "PartitionState":
        comps = self.components
        return PartitionState(comps[:k] + tuple(new) + comps[k + 1:])

    def active_coordinates(self) -> list[int]:
        seen: set[int] = set()
        for c in self.components:
            seen.update(c.active_mask)
        return sorted(seen)

    def first_active(self, i: int) -> int | None:
        for k, c in enumerate(self.components):
            if c.is_active(i):
                return k
        return None


@dataclass(frozen=True)
class CoordinateCut:
    zero_side: frozenset[int]
    one_side: frozenset[int]
    canonical_key: bytes


def cut_of(i: int, c: Component) -> CoordinateCut:
    """The i-cut of ``c`` over point indices."""
    col = c.column(i)
    ref = col[min(range(len(c)), key=c.points.__getitem__)]
    zero = frozenset(np.flatnonzero(col == 0).tolist())
    one = frozenset(np.flatnonzero(col == 1).tolist())
    return CoordinateCut(zero, one, np.packbits(col ^ ref).tobytes())


def _oriented_columns(c: Component) -> np.ndarray:
    """Active columns flipped so the lexicographically first point reads 0."""
    ref = min(range(len(c)), key=c.points.__getitem__)
    return c.sub ^ c.sub[ref]


def interchangeable_classes(c: Component) -> list[list[int]]:
    """Group active coordinates whose cuts coincide (columns equal or complementary)."""
    if not len(c.coords):
        return []
    keys = np.packbits(_oriented_columns(c), axis=0).T
    groups: dict[bytes, list[int]] = {}
    for j, key in zip(c.coords.tolist(), keys):
        groups.setdefault(key.tobytes(), []).append(j)
    return sorted(groups.values())


def interchangeable_with(i: int, c: Component) -> list[int]:
    if not c.is_active(i):
        return [i]
    col = c.sub[:, c.position[i]]
    same = np.all(c.sub == col[:, None], axis=0) | np.all(c.sub != col[:, None], axis=0)
    return c.coords[same].tolist()


@dataclass(frozen=True)
class Pattern:
    """Coordinates fixed on a side of a cut, packed as ``(mask, bits)``.

    A point matches iff ``x & mask == bits``.
    """

    d: int
    mask: int
    bits: int

    @property
    def fixed_coords(self) -> frozenset[int]:
        return frozenset(j for j in range(self.d) if (self.mask >> (self.d - 1 - j)) & 1)

    @property
    def fixed_values(self) -> dict[int, int]:
        return {j: (self.bits >> (self.d - 1 - j)) & 1 for j in sorted(self.fixed_coords)}

    def matches(self, x: int) -> bool:
        return x & self.mask == self.bits


def pattern_of(i: int, c: Component, exclude: Iterable[int] | None = None) -> Pattern:
    """Pattern of coordinate ``i`` on ``c``.

    Coordinates fixed on both sides to differing values are interchangeable
    with ``i`` and belong in ``exclude`` (its default); if a caller leaves one
    in, the zero side's value is used.
    """
    if not c.is_active(i):
        raise ContractError(f"coordinate {i} is not active on the component")
    excl = set(interchangeable_with(i, c) if exclude is None else exclude)
    excl.add(i)
    col = c.sub[:, c.position[i]].astype(bool)
    one, zero = c.sub[col], c.sub[~col]
    ones1, ones0 = one.sum(axis=0), zero.sum(axis=0)
    const1 = (ones1 == 0) | (ones1 == len(one))
    const0 = (ones0 == 0) | (ones0 == len(zero))
    fixed = const0 | const1
    value = np.where(const0, ones0 == len(zero), ones1 == len(one)).astype(np.uint8)
    keep = np.array([j not in excl for j in c.coords.tolist()], dtype=bool)
    fixed &= keep
    active_fixed = c.coords[fixed].tolist()
    mask = (mask_of(range(c.d), c.d) & ~c.active_bits) | mask_of(active_fixed, c.d)
    for j in excl:
        if not c.is_active(j):
            mask &= ~coord_bit(c.d, j)
    bits = (c.fixed & mask) | mask_of(c.coords[fixed & (value == 1)].tolist(), c.d)
    return Pattern(c.d, mask, bits)


def match_pattern(p: Pattern, c: Component) -> frozenset[int]:
    return frozenset(x for x in c.points if x & p.mask == p.bits)
