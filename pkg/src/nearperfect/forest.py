"""Edge-labelled forests embedded in the hypercube."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Optional

from .bits import coord_bit, differing_coords


class ContractError(ValueError):
    """A precondition of a solver primitive was violated."""


class LabeledForest:
    """Nodes are packed points; each edge flips exactly its labelled coordinate.

    Acyclicity is maintained with a union-find over nodes, so the forest can
    be grown incrementally by the solver's reconstruction passes.
    """

    def __init__(self, d: int, nodes: Iterable[int] = (), edges: Iterable[tuple[int, int, int]] = ()):
        self.d = d
        self.nodes: set[int] = set()
        self.edges: set[tuple[int, int, int]] = set()
        self._parent: dict[int, int] = {}
        for x in nodes:
            self.add_node(x)
        for u, v, label in edges:
            self.add_edge(u, v, label)

    @property
    def cost(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, x: int) -> bool:
        return x in self.nodes

    def __repr__(self) -> str:
        return f"LabeledForest(d={self.d}, nodes={len(self.nodes)}, cost={self.cost})"

    def _find(self, x: int) -> int:
        parent = self._parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def add_node(self, x: int) -> None:
        if x not in self.nodes:
            self.nodes.add(x)
            self._parent[x] = x

    def connected(self, u: int, v: int) -> bool:
        return u in self.nodes and v in self.nodes and self._find(u) == self._find(v)

    def add_edge(self, u: int, v: int, label: int, *, skip_cycles: bool = False) -> bool:
        """Add ``(u, v, label)``; returns False if skipped to avoid a cycle.

        With ``skip_cycles=False`` a cycle-closing edge raises ContractError.
        """
        if u ^ v != coord_bit(self.d, label):
            raise ContractError(f"edge {u:b}-{v:b} does not flip exactly coordinate {label}")
        if u not in self.nodes and v in self.nodes:
            self.nodes.add(u)
            self._parent[u] = v
            self.edges.add((u, v, label) if u < v else (v, u, label))
            return True
        self.add_node(u)
        self.add_node(v)
        ru, rv = self._find(u), self._find(v)
        if ru == rv:
            if skip_cycles:
                return False
            raise ContractError(f"edge on coordinate {label} would close a cycle")
        self._parent[ru] = rv
        self.edges.add((u, v, label) if u < v else (v, u, label))
        return True

    def add_path(self, u: int, v: int, *, skip_cycles: bool = True) -> int:
        """Join ``u`` to ``v`` by unit flips in ascending coordinate order.

        Returns the number of edges actually added.
        """
        added = 0
        x = u
        for j in differing_coords(u, v, self.d):
            y = x ^ coord_bit(self.d, j)
            added += self.add_edge(x, y, j, skip_cycles=skip_cycles)
            x = y
        self.add_node(v)
        return added

    def update(self, other: "LabeledForest") -> None:
        """Merge another forest (over disjoint nodes) into this one."""
        for x in other.nodes:
            self.add_node(x)
        for u, v, label in other.edges:
            self.add_edge(u, v, label)

    def copy(self) -> "LabeledForest":
        return LabeledForest(self.d, self.nodes, self.edges)

    def sorted_edges(self) -> list[tuple[int, int, int]]:
        return sorted(self.edges)

    def neighbours(self) -> dict[int, list[tuple[int, int]]]:
        adj: dict[int, list[tuple[int, int]]] = {x: [] for x in self.nodes}
        for u, v, label in self.edges:
            adj[u].append((v, label))
            adj[v].append((u, label))
        return adj

    def label_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for _, _, label in self.edges:
            counts[label] = counts.get(label, 0) + 1
        return counts

    def trees(self) -> Iterator[set[int]]:
        groups: dict[int, set[int]] = {}
        for x in self.nodes:
            groups.setdefault(self._find(x), set()).add(x)
        return iter(groups.values())


class StepKind(str, Enum):
    PLUCK = "pluck"
    SPLIT = "split"


@dataclass(frozen=True)
class TraceStep:
    """One reversible reduction: a plucked leaf or a split edge ``x -- x_bar``."""

    kind: StepKind
    x: int
    i: int
    x_bar: Optional[int] = None

    def partner(self, d: int) -> int:
        return self.x ^ coord_bit(d, self.i)
