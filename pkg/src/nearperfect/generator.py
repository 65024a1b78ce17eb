"""Planted near-perfect instances with a known witness tree of cost d + q."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import coord_bit
from .forest import LabeledForest
from .instance import TerminalMatrix
from .oracle import fact_violations, verify


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class PlantedInstance:
    matrix: TerminalMatrix
    witness: LabeledForest
    d: int
    q_planted: int
    seed: int


MAX_ATTEMPTS = 50


def _cut_key(col: np.ndarray) -> bytes:
    return np.packbits(col ^ col[0]).tobytes()


def _grow(d: int, q: int, n: int, rng: np.random.Generator):
    nodes = [0]
    node_set = {0}
    degree = {0: 0}
    leaves = {0}
    leaf_cap = n if n < 4 else (n + 1) // 2
    edges = []

    def attach(j: int) -> bool:
        for _ in range(64):
            if len(leaves) < leaf_cap:
                parent = nodes[int(rng.integers(len(nodes)))]
            else:
                pool = sorted(leaves)
                parent = pool[int(rng.integers(len(pool)))]
            child = parent ^ coord_bit(d, j)
            if child in node_set:
                continue
            nodes.append(child)
            node_set.add(child)
            degree[parent] += 1
            degree[child] = 1
            if degree[parent] > 1:
                leaves.discard(parent)
            leaves.add(child)
            edges.append((parent, child, j))
            return True
        return False

    for j in rng.permutation(d).tolist():
        attach(j)
    for _ in range(q):
        for _ in range(64):
            if attach(int(rng.integers(d))):
                break
        else:
            return None
    return nodes, degree, edges


def _canonical_chains(d, nodes, edges, terms, keys):
    """Reorder flips along terminal-free unbranched chains so equal cuts are adjacent.

    Any order of the flips along such a chain gives a tree of the same cost.
    Returns the new edge list, or None if a relabelled inner node collides.
    """
    adj: dict[int, list[tuple[int, int]]] = {x: [] for x in nodes}
    for u, v, j in edges:
        adj[u].append((v, j))
        adj[v].append((u, j))
    inner = {x for x in nodes if len(adj[x]) == 2 and x not in terms}
    out, done = [], set()
    node_set = set(nodes) - inner
    for start in nodes:
        if start in inner:
            continue
        for nxt, j in adj[start]:
            if (start, nxt) in done:
                continue
            labels, prev, cur = [j], start, nxt
            while cur in inner:
                (a, ja), (b, jb) = adj[cur]
                prev, cur, j = (cur, b, jb) if a == prev else (cur, a, ja)
                labels.append(j)
            done.add((cur, prev))
            x = start
            ordered = sorted(labels, key=lambda l: (keys[l], l))
            for k, lab in enumerate(ordered):
                y = x ^ coord_bit(d, lab)
                if (y == cur) != (k == len(ordered) - 1):
                    return None
                if y != cur:
                    if y in node_set:
                        return None
                    node_set.add(y)
                out.append((x, y, lab))
                x = y
    return out


def plant(d: int, q: int, n: int, seed: int = 0) -> PlantedInstance:
    """Grow a random tree with ``d + q`` edges and read off ``n`` terminals.

    Every coordinate is introduced once (random order, attachment points
    uniform while the leaf budget allows, otherwise at a leaf), then ``q``
    more edges reuse coordinates. All leaves become terminals, topped up
    with random inner nodes. Witnesses that break a structural property of
    optimal trees (a bad coordinate sharing a good one's cut, or a split
    interchangeable run) are provably suboptimal and are regenerated.
    """
    if d < 1 or q < 0 or 2 * q >= d or n < 2:
        raise GenerationError(f"need d >= 1, 0 <= q < d/2, n >= 2 (got d={d}, q={q}, n={n})")
    if q > 0 and n < 4:
        # two or three terminals always have a perfect phylogeny (path or median tripod)
        raise GenerationError(f"q={q} needs n >= 4; fewer terminals always admit cost exactly d")
    if n > d + q + 1:
        raise GenerationError(f"a tree with {d + q} edges has only {d + q + 1} nodes, cannot pick n={n}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    for _ in range(MAX_ATTEMPTS):
        grown = _grow(d, q, n, rng)
        if grown is None:
            continue
        nodes, degree, edges = grown
        leaves = [x for x in nodes if degree[x] <= 1]
        if len(leaves) > n:
            continue
        inner = [x for x in nodes if degree[x] > 1]
        extra = rng.choice(len(inner), size=n - len(leaves), replace=False).tolist() if n > len(leaves) else []
        terms = leaves + [inner[k] for k in extra]
        terms = [terms[k] for k in rng.permutation(len(terms)).tolist()]
        matrix = TerminalMatrix(tuple(terms), tuple(f"t{k}" for k in range(n)), d)
        arr = matrix.array()
        if (arr.min(axis=0) == arr.max(axis=0)).any():
            continue
        keys = {j: _cut_key(arr[:, j]) for j in range(d)}
        edges = _canonical_chains(d, nodes, edges, set(terms), keys)
        if edges is None:
            continue
        witness = LabeledForest(d, sorted({x for e in edges for x in e[:2]}), edges)
        if not verify(witness, matrix).valid:
            continue
        facts = fact_violations(witness, matrix, checks=("1.1", "1.4"))
        if facts["1.1"] or facts["1.4"]:
            continue
        return PlantedInstance(matrix, witness, d, q, seed)
    raise GenerationError(f"no acceptable instance for d={d}, q={q}, n={n} after {MAX_ATTEMPTS} attempts")
