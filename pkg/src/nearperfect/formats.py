"""Text formats for trees: sorted edge lists and DOT."""

from __future__ import annotations

from typing import Iterable, Optional

from .bits import from_string, to_string
from .instance import TerminalMatrix
from .oracle import RawTree, TreeLike


class TreeParseError(ValueError):
    pass


def edge_lines(tree: TreeLike) -> list[str]:
    """One ``"<u-bits> <v-bits> <label>"`` line per edge, ``u < v``, sorted."""
    d = tree.d
    lines = []
    for u, v, label in tree.edges:
        if u > v:
            u, v = v, u
        lines.append(f"{to_string(u, d)} {to_string(v, d)} {label}")
    lines.sort()
    return lines


def write_edges(tree: TreeLike) -> str:
    lines = edge_lines(tree)
    return "\n".join(lines) + "\n" if lines else ""


def read_edges(text: str, d: Optional[int] = None) -> RawTree:
    """Parse an edge list without checking it is a tree (see ``verify``).

    ``d`` is taken from the first edge unless given. An empty file is the
    edgeless tree.
    """
    nodes: set[int] = set()
    edges: list[tuple[int, int, int]] = []
    for k, line in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise TreeParseError(f"line {k}: expected '<u-bits> <v-bits> <label>', got {line!r}")
        su, sv, sl = parts
        if d is None:
            d = len(su)
        for s in (su, sv):
            if len(s) != d or set(s) - {"0", "1"}:
                raise TreeParseError(f"line {k}: {s!r} is not a {d}-bit 0/1 string")
        try:
            label = int(sl)
        except ValueError:
            raise TreeParseError(f"line {k}: label {sl!r} is not an integer") from None
        u, v = from_string(su), from_string(sv)
        nodes.update((u, v))
        edges.append((u, v, label))
    return RawTree(d if d is not None else 0, nodes, edges)


def to_dot(tree: TreeLike, terminals: Iterable[int] = (), labels: Optional[dict[int, str]] = None) -> str:
    d = tree.d
    terms = set(terminals)
    labels = labels or {}
    out = ["graph phylogeny {", "  node [shape=circle, fontsize=10];"]
    for x in sorted(set(tree.nodes)):
        s = to_string(x, d)
        text = f"{labels[x]}\\n{s}" if x in labels else s
        shape = ", shape=doublecircle" if x in terms else ""
        out.append(f'  "{s}" [label="{text}"{shape}];')
    for u, v, label in sorted((min(u, v), max(u, v), lab) for u, v, lab in tree.edges):
        out.append(f'  "{to_string(u, d)}" -- "{to_string(v, d)}" [label="{label}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def terminal_labels(m: TerminalMatrix) -> dict[int, str]:
    """Row -> comma-joined labels (duplicates share a node)."""
    out: dict[int, list[str]] = {}
    for x, lab in zip(m.rows, m.labels):
        out.setdefault(x, []).append(lab)
    return {x: ",".join(v) for x, v in out.items()}
