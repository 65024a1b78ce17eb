"""Ground truth for small instances, tree auditing and witness fact checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Protocol

import numpy as np

from .bits import coord_bit, hamming, to_string
from .forest import LabeledForest
from .instance import Component, TerminalMatrix, cut_of, interchangeable_classes, pattern_of


class OracleLimitError(ValueError):
    pass


class TreeLike(Protocol):
    d: int
    nodes: Iterable[int]
    edges: Iterable[tuple[int, int, int]]


@dataclass
class RawTree:
    """An unchecked edge list, e.g. as read from a file."""

    d: int
    nodes: set[int] = field(default_factory=set)
    edges: list[tuple[int, int, int]] = field(default_factory=list)


def exact_steiner(m: TerminalMatrix, max_dim: int = 10, max_terminals: int = 10) -> LabeledForest:
    """Minimum Steiner tree on the full hypercube (Dreyfus-Wagner).

    States are (terminal subset, vertex) with the last terminal as root;
    each subset is seeded by merging complementary sub-subsets at every
    vertex and then relaxed along hypercube edges.
    """
    terms = list(dict.fromkeys(m.rows))
    d = m.d
    if d > max_dim or len(terms) > max_terminals:
        raise OracleLimitError(
            f"oracle limited to d <= {max_dim} and n <= {max_terminals} (got d={d}, n={len(terms)})"
        )
    if len(terms) == 1:
        return LabeledForest(d, terms)
    root = terms[-1]
    others = terms[:-1]
    k = len(others)
    V = 1 << d
    full = (1 << k) - 1
    inf = np.int64(1 << 40)
    verts = np.arange(V)
    nbr = [verts ^ (1 << b) for b in range(d)]
    dp = np.full((full + 1, V), inf, dtype=np.int64)
    how = np.full((full + 1, V), -1, dtype=np.int64)   # -1 seed, -2 merge, b >= 0 came via bit b
    part = np.zeros((full + 1, V), dtype=np.int64)

    def relax(S: int) -> None:
        cur, hw = dp[S], how[S]
        for _ in range(d + 1):
            changed = False
            for b in range(d):
                cand = cur[nbr[b]] + 1
                better = cand < cur
                if better.any():
                    cur[better] = cand[better]
                    hw[better] = b
                    changed = True
            if not changed:
                break

    for S in range(1, full + 1):
        if S & (S - 1) == 0:
            dp[S, others[S.bit_length() - 1]] = 0
        else:
            low = S & -S
            rest = S ^ low
            sub = rest
            while True:
                S1 = sub | low
                if S1 != S:
                    cand = dp[S1] + dp[S ^ S1]
                    better = cand < dp[S]
                    dp[S][better] = cand[better]
                    how[S][better] = -2
                    part[S][better] = S1
                if sub == 0:
                    break
                sub = (sub - 1) & rest
        relax(S)

    edges: set[tuple[int, int, int]] = set()
    stack = [(full, root)]
    while stack:
        S, v = stack.pop()
        h = int(how[S, v])
        if h == -1:
            continue
        if h == -2:
            S1 = int(part[S, v])
            stack.append((S1, v))
            stack.append((S ^ S1, v))
        else:
            u = v ^ (1 << h)
            edges.add((min(u, v), max(u, v), d - 1 - h))
            stack.append((S, u))
    tree = LabeledForest(d, terms)
    for u, v, label in sorted(edges):
        tree.add_edge(u, v, label, skip_cycles=True)
    assert tree.cost == int(dp[full, root])
    return tree


@dataclass
class VerificationReport:
    valid: bool
    violations: list[str]
    cost: int
    per_coordinate_counts: dict[int, int]
    bad_count: int
    excess: int

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "violations": self.violations,
            "cost": self.cost,
            "per_coordinate_counts": {str(k): v for k, v in sorted(self.per_coordinate_counts.items())},
            "bad_count": self.bad_count,
            "excess": self.excess,
        }


def verify(tree: TreeLike, m: TerminalMatrix) -> VerificationReport:
    """Audit ``tree`` as a phylogeny of ``m``; problems are reported, not raised."""
    d = m.d
    violations: list[str] = []
    nodes = set(tree.nodes)
    edges = list(tree.edges)
    if tree.d != d:
        violations.append(f"tree has {tree.d} coordinates, matrix has {d}")
    counts: dict[int, int] = {}
    parent: dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in nodes:
        parent[x] = x
    seen_edges = set()
    for u, v, label in edges:
        su, sv = to_string(u, d), to_string(v, d)
        if not 0 <= label < d:
            violations.append(f"edge {su}-{sv} has label {label} outside 0..{d - 1}")
        else:
            counts[label] = counts.get(label, 0) + 1
            h = hamming(u, v)
            if u ^ v != coord_bit(d, label):
                violations.append(f"edge {su}-{sv} flips {h} coordinates, label claims {label}")
        key = (min(u, v), max(u, v))
        if key in seen_edges:
            violations.append(f"edge {su}-{sv} listed twice")
            continue
        seen_edges.add(key)
        for x in (u, v):
            if x not in parent:
                parent[x] = x
                nodes.add(x)
        ru, rv = find(u), find(v)
        if ru == rv:
            violations.append(f"edge {su}-{sv} closes a cycle")
        else:
            parent[ru] = rv
    for x in nodes:
        if x >> d:
            violations.append(f"node {x:b} is wider than {d} bits")
    for x, label in zip(m.rows, m.labels):
        if x not in nodes:
            violations.append(f"terminal {label} not spanned")
    roots = {find(x) for x in nodes}
    if len(roots) > 1:
        violations.append(f"tree is disconnected ({len(roots)} components)")
    cost = len(edges)
    bad = sum(1 for c in counts.values() if c >= 2)
    return VerificationReport(not violations, violations, cost, counts, bad, cost - d)


ALL_FACTS = ("1.1", "1.2", "1.3", "1.4")


def fact_violations(
    witness: LabeledForest, m: TerminalMatrix, *, good_patterns_only: bool = True, checks=ALL_FACTS
) -> dict[str, list[str]]:
    """Check the structural facts of optimal trees against a witness tree.

    Keys: ``"1.1"`` interchangeable coordinates lie on terminal-free paths;
    ``"1.2"`` no good pair shows all four gametes; ``"1.3"`` both endpoints
    of a good edge match its pattern (restricted to good coordinates when
    ``good_patterns_only``); ``"1.4"`` no good and bad coordinate share a cut.
    """
    d = m.d
    comp = Component.from_points(m.rows, d)
    terminals = set(m.rows)
    counts = witness.label_counts()
    good = sorted(j for j, k in counts.items() if k == 1)
    bad = sorted(j for j, k in counts.items() if k >= 2)
    adj = witness.neighbours()
    edge_of: dict[int, list[tuple[int, int]]] = {}
    for u, v, label in witness.edges:
        edge_of.setdefault(label, []).append((u, v))
    out: dict[str, list[str]] = {k: [] for k in checks}

    for cls in interchangeable_classes(comp) if "1.1" in checks else ():
        if len(cls) < 2:
            continue
        S = set(cls)
        sub: dict[int, list[tuple[int, int]]] = {}
        for j in cls:
            for u, v in edge_of.get(j, []):
                sub.setdefault(u, []).append((v, j))
                sub.setdefault(v, []).append((u, j))
        visited: set[int] = set()
        for start in sub:
            if start in visited:
                continue
            block, stack = {start}, [start]
            while stack:
                x = stack.pop()
                for y, _ in sub[x]:
                    if y not in block:
                        block.add(y)
                        stack.append(y)
            visited |= block
            labels = [j for x in block for _, j in sub[x]]
            labs = sorted(set(labels))
            degs = [len(sub[x]) for x in block]
            is_path = max(degs) <= 2 and degs.count(1) == 2 and len(labels) // 2 == len(block) - 1
            if not is_path or labs != cls or len(labels) // 2 != len(cls):
                out["1.1"].append(f"class {cls}: labelled edges do not form a path over the whole class")
                continue
            for x in block:
                if len(sub[x]) == 2 and (x in terminals or len(adj[x]) != 2):
                    out["1.1"].append(f"class {cls}: inner path node {to_string(x, d)} is a terminal or branches")

    if "1.2" in checks and len(good) >= 2:
        G = m.array()[:, good].astype(np.float64)
        H = 1.0 - G
        both = (G.T @ G > 0) & (G.T @ H > 0) & (H.T @ G > 0) & (H.T @ H > 0)
        for a, b in zip(*np.nonzero(np.triu(both, 1))):
            out["1.2"].append(f"good coordinates {good[a]} and {good[b]} show all four gametes")

    good_mask = 0
    for j in good:
        good_mask |= coord_bit(d, j)
    for i in good if "1.3" in checks else ():
        if not comp.is_active(i):
            continue
        pat = pattern_of(i, comp)
        mask = pat.mask & good_mask if good_patterns_only else pat.mask
        (u, v), = edge_of[i]
        for x in (u, v):
            if x & mask != pat.bits & mask:
                out["1.3"].append(f"endpoint {to_string(x, d)} of coordinate {i} misses its pattern")

    keys = {}
    for j in good + bad if "1.4" in checks else ():
        if comp.is_active(j):
            keys[j] = cut_of(j, comp).canonical_key
    good_keys = {keys[j]: j for j in good if j in keys}
    for j in bad:
        if j in keys and keys[j] in good_keys:
            out["1.4"].append(f"bad coordinate {j} shares its cut with good coordinate {good_keys[keys[j]]}")
    return out
