"""Terminal stage of the recursion.

Interchangeable coordinates are contracted onto their smallest member,
classes heavier than ``q`` are cut along (with a real or synthetic edge
``y -- y_bar``), each piece gets a Hamming MST, and contracted edges are
expanded back into paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .bits import coord_bit, mask_of, to_array
from .forest import ContractError, LabeledForest, StepKind, TraceStep
from .instance import Component, PartitionState, Pattern, _oriented_columns, pattern_of


@dataclass(frozen=True)
class ContractionMap:
    """Interchangeability classes of one component.

    ``classes[k] = (representative, members, flipped)`` where ``flipped``
    lists the members whose column is the complement of the representative's.
    """

    d: int
    classes: tuple[tuple[int, tuple[int, ...], frozenset[int]], ...]

    @cached_property
    def weight(self) -> dict[int, int]:
        return {rep: len(members) for rep, members, _ in self.classes}

    @cached_property
    def hidden_mask(self) -> int:
        """Non-representative members, zeroed in contracted points."""
        return mask_of((j for rep, members, _ in self.classes for j in members if j != rep), self.d)

    @cached_property
    def _lift_terms(self) -> list[tuple[int, int, int]]:
        terms = []
        for rep, members, flipped in self.classes:
            if len(members) > 1:
                rest = mask_of((j for j in members if j != rep), self.d)
                flip = mask_of((j for j in flipped), self.d)
                terms.append((coord_bit(self.d, rep), rest, flip))
        return terms

    @cached_property
    def coordinate_weights(self) -> np.ndarray:
        """Per-coordinate MST weights in contracted space."""
        w = np.ones(self.d, dtype=np.float64)
        for rep, members, _ in self.classes:
            for j in members:
                w[j] = 0.0
            w[rep] = len(members)
        return w

    def contract_point(self, x: int) -> int:
        return x & ~self.hidden_mask

    def lift(self, y: int) -> int:
        out = y & ~self.hidden_mask
        for rep_bit, rest, flip in self._lift_terms:
            out |= (rest ^ flip) if y & rep_bit else flip
        return out


@dataclass(frozen=True)
class SyntheticEndpointPair:
    y: int
    y_bar: int
    i: int
    pattern: Pattern


def contract(c: Component) -> tuple[Component, ContractionMap]:
    """Replace each interchangeability class of ``c`` by its smallest member."""
    classes = []
    if len(c.coords):
        oriented = _oriented_columns(c)
        keys = np.packbits(oriented, axis=0).T
        groups: dict[bytes, list[int]] = {}
        for p, key in enumerate(keys):
            groups.setdefault(key.tobytes(), []).append(p)
        for positions in groups.values():
            rep_pos = positions[0]
            members = tuple(int(c.coords[p]) for p in positions)
            flipped = frozenset(
                int(c.coords[p]) for p in positions if c.sub[0, p] != c.sub[0, rep_pos]
            )
            classes.append((members[0], members, flipped))
    classes.sort()
    cmap = ContractionMap(c.d, tuple(classes))
    if not cmap.hidden_mask:
        return c, cmap
    return Component.from_points((cmap.contract_point(x) for x in c.points), c.d), cmap


def _cut_pieces(piece: Component, i: int, left_extra: int, right_extra: int) -> list[Component]:
    col = piece.column(i)
    zero = [x for x, b in zip(piece.points, col) if not b]
    one = [x for x, b in zip(piece.points, col) if b]
    return [piece.with_points(zero + [left_extra]), piece.with_points(one + [right_extra])]


def split_heavy(
    c: Component, cmap: ContractionMap, q: int
) -> tuple[list[Component], list[SyntheticEndpointPair], list[TraceStep]]:
    """Cut the contracted component along every class of weight above ``q``.

    Heavy classes are taken in representative order; each is cut in the
    first current piece where it is still active.
    """
    pieces = [c]
    pairs: list[SyntheticEndpointPair] = []
    steps: list[TraceStep] = []
    d = c.d
    for rep, members, _ in cmap.classes:
        if len(members) <= q:
            continue
        k = next((k for k, p in enumerate(pieces) if p.is_active(rep)), None)
        if k is None:
            continue
        piece = pieces[k]
        pat = pattern_of(rep, piece)
        col = piece.column(rep)
        matched = [[], []]
        for x, b in zip(piece.points, col):
            if x & pat.mask == pat.bits:
                matched[b].append(x)
        bit = coord_bit(d, rep)
        unique = next((side[0] for side in matched if len(side) == 1), None)
        if unique is not None:
            x_bar = unique ^ bit
            steps.append(TraceStep(StepKind.SPLIT, unique, rep, x_bar))
            lo, hi = (unique, x_bar) if not unique & bit else (x_bar, unique)
        else:
            lo = pat.bits & ~bit
            hi = lo | bit
            pairs.append(SyntheticEndpointPair(lo, hi, rep, pat))
        pieces[k:k + 1] = _cut_pieces(piece, rep, lo, hi)
    return pieces, pairs, steps


def hamming_mst(c: Component, weights: np.ndarray | None = None) -> LabeledForest:
    """Prim's MST under (weighted) Hamming distance, edges expanded to unit flips.

    Ties go to the lexicographically smaller point. With ``weights`` the
    tree minimises the weighted distance but its edges still flip each
    differing coordinate once.
    """
    pts = sorted(c.points)
    forest = LabeledForest(c.d, pts)
    k = len(pts)
    if k < 2:
        return forest
    X = to_array(pts, c.d).astype(np.float64)
    if weights is None:
        weights = np.ones(c.d)
    Xw = X * weights
    dist = Xw @ (1.0 - X).T
    dist += dist.T
    in_tree = np.zeros(k, dtype=bool)
    in_tree[0] = True
    best = dist[0].copy()
    parent = np.zeros(k, dtype=np.int64)
    best[0] = np.inf
    for _ in range(k - 1):
        v = int(np.argmin(best))
        in_tree[v] = True
        forest.add_path(pts[int(parent[v])], pts[v])
        best[v] = np.inf
        closer = (dist[v] < best) & ~in_tree
        best[closer] = dist[v][closer]
        parent[closer] = v
    return forest


def reconnect(
    forests: Sequence[LabeledForest], pairs: Sequence[SyntheticEndpointPair], steps: Sequence[TraceStep]
) -> LabeledForest:
    if not forests:
        raise ContractError("nothing to reconnect")
    out = LabeledForest(forests[0].d)
    for f in forests:
        out.update(f)
    links = [(s.x, s.x_bar, s.i) for s in steps] + [(p.y, p.y_bar, p.i) for p in pairs]
    for u, v, i in links:
        if u not in out or v not in out:
            raise ContractError(f"endpoint of the coordinate-{i} link is missing")
        out.add_edge(u, v, i)
    return out


def expand(f: LabeledForest, cmap: ContractionMap) -> LabeledForest:
    """Lift nodes out of contracted space; class edges become member paths."""
    if not cmap.hidden_mask:
        return f
    out = LabeledForest(f.d, (cmap.lift(x) for x in f.nodes))
    for u, v, _ in sorted(f.edges):
        out.add_path(cmap.lift(u), cmap.lift(v), skip_cycles=False)
    return out


def base_case(state: PartitionState, q: int) -> LabeledForest:
    """Contract, cut heavy classes, MST, reconnect and expand, per component."""
    d = state.components[0].d
    out = LabeledForest(d)
    for comp in state.components:
        if len(comp) == 1:
            out.add_node(comp.points[0])
            continue
        contracted, cmap = contract(comp)
        pieces, pairs, steps = split_heavy(contracted, cmap, q)
        w = cmap.coordinate_weights
        forests = [hamming_mst(p, w) for p in pieces]
        out.update(expand(reconnect(forests, pairs, steps), cmap))
    return out


def plain_base_case(state: PartitionState) -> LabeledForest:
    """Unweighted MST per component, as used by the simple-case algorithm."""
    d = state.components[0].d
    out = LabeledForest(d)
    for comp in state.components:
        out.update(hamming_mst(comp))
    return out
