"""Loop-free multigraphs and quivers with open nodes.

Node identifiers are strings.  All outputs are ordered by :func:`node_key`
(natural order: digit runs compare numerically, so ``"2" < "10"``).
Multiplicities are stored per unordered pair; a :class:`Quiver` stores
arrow counts per ordered ``(tail, head)`` pair.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

_DIGITS = re.compile(r"(\d+)")


class GraphError(ValueError):
    pass


def node_key(node: str):
    parts = _DIGITS.split(node)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p != "")


def sort_nodes(nodes: Iterable[str]) -> list[str]:
    return sorted(nodes, key=node_key)


def _pair(u: str, v: str) -> tuple[str, str]:
    return (u, v) if node_key(u) <= node_key(v) else (v, u)


@dataclass(frozen=True)
class Graph:
    nodes: tuple[str, ...]
    mult: Mapping[tuple[str, str], int] = field(default_factory=dict)
    open_nodes: frozenset = frozenset()

    def __post_init__(self):
        nodes = tuple(sort_nodes(self.nodes))
        if len(set(nodes)) != len(nodes):
            raise GraphError("node identifiers must be unique")
        known = set(nodes)
        clean: dict[tuple[str, str], int] = {}
        for (u, v), m in self.mult.items():
            if u == v:
                raise GraphError(f"edge loop at {u!r}")
            if u not in known or v not in known:
                raise GraphError(f"edge ({u!r}, {v!r}) has an undeclared endpoint")
            if m < 0:
                raise GraphError("negative multiplicity")
            if m:
                key = _pair(u, v)
                clean[key] = clean.get(key, 0) + m
        if not set(self.open_nodes) <= known:
            raise GraphError("open nodes must be declared nodes")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "mult", dict(sorted(clean.items(), key=lambda kv: (node_key(kv[0][0]), node_key(kv[0][1])))))
        object.__setattr__(self, "open_nodes", frozenset(self.open_nodes))

    def __hash__(self):
        return hash((self.nodes, tuple(self.mult.items()), self.open_nodes))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.nodes == other.nodes and self.mult == other.mult and self.open_nodes == other.open_nodes

    def multiplicity(self, u: str, v: str) -> int:
        if u == v:
            return 0
        return self.mult.get(_pair(u, v), 0)

    def edges(self) -> Iterator[tuple[str, str, int]]:
        for (u, v), m in self.mult.items():
            yield u, v, m

    @property
    def edge_count(self) -> int:
        return sum(self.mult.values())

    def neighbors(self, u: str) -> list[str]:
        return [v for v in self.nodes if self.multiplicity(u, v)]

    def index(self) -> dict[str, int]:
        return {n: k for k, n in enumerate(self.nodes)}

    def adjacency_matrix(self) -> np.ndarray:
        idx = self.index()
        a = np.zeros((len(self.nodes), len(self.nodes)), dtype=np.int64)
        for u, v, m in self.edges():
            a[idx[u], idx[v]] = m
            a[idx[v], idx[u]] = m
        return a

    def is_connected(self, subset: Iterable[str] | None = None) -> bool:
        keep = set(self.nodes if subset is None else subset)
        if not keep:
            return False
        start = next(iter(keep))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in self.neighbors(u):
                if v in keep and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen == keep

    def oriented(self) -> "Quiver":
        """Canonical orientation: tail precedes head in node order."""
        return Quiver(self.nodes, {(u, v): m for u, v, m in self.edges()}, self.open_nodes)

    def with_open(self, nodes: Iterable[str]) -> "Graph":
        """Mark additional nodes as open."""
        return Graph(self.nodes, self.mult, self.open_nodes | frozenset(nodes))

    def closed(self) -> "Graph":
        """The same graph with no open nodes."""
        return Graph(self.nodes, self.mult)


@dataclass(frozen=True)
class Quiver:
    """An oriented loop-free multigraph: ``arrows[(t, h)]`` arrows from t to h."""

    nodes: tuple[str, ...]
    arrows: Mapping[tuple[str, str], int] = field(default_factory=dict)
    open_nodes: frozenset = frozenset()

    def __post_init__(self):
        nodes = tuple(sort_nodes(self.nodes))
        if len(set(nodes)) != len(nodes):
            raise GraphError("node identifiers must be unique")
        known = set(nodes)
        clean: dict[tuple[str, str], int] = {}
        for (t, h), m in self.arrows.items():
            if t == h:
                raise GraphError(f"edge loop at {t!r}")
            if t not in known or h not in known:
                raise GraphError(f"arrow ({t!r}, {h!r}) has an undeclared endpoint")
            if m < 0:
                raise GraphError("negative multiplicity")
            if m:
                clean[(t, h)] = clean.get((t, h), 0) + m
        if not set(self.open_nodes) <= known:
            raise GraphError("open nodes must be declared nodes")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "arrows", dict(sorted(clean.items(), key=lambda kv: (node_key(kv[0][0]), node_key(kv[0][1])))))
        object.__setattr__(self, "open_nodes", frozenset(self.open_nodes))

    def __hash__(self):
        return hash((self.nodes, tuple(self.arrows.items()), self.open_nodes))

    def __eq__(self, other):
        if not isinstance(other, Quiver):
            return NotImplemented
        return self.nodes == other.nodes and self.arrows == other.arrows and self.open_nodes == other.open_nodes

    @property
    def graph(self) -> Graph:
        return Graph(self.nodes, dict(self.arrows), self.open_nodes)

    def arrow_list(self) -> list[tuple[str, str, int]]:
        """Arrow identifiers ``(tail, head, k)`` in canonical order."""
        return [(t, h, k) for (t, h), m in self.arrows.items() for k in range(m)]

    def with_open(self, nodes: Iterable[str]) -> "Quiver":
        """Mark additional nodes as open."""
        return Quiver(self.nodes, self.arrows, self.open_nodes | frozenset(nodes))

    def closed(self) -> "Quiver":
        """The same quiver with no open nodes."""
        return Quiver(self.nodes, self.arrows)


GraphLike = Graph | Quiver


def _as_quiver(g: GraphLike) -> tuple[Quiver, bool]:
    if isinstance(g, Quiver):
        return g, True
    return g.oriented(), False


def _back(q: Quiver, was_quiver: bool) -> GraphLike:
    return q if was_quiver else q.graph


# constructions -------------------------------------------------------------

def complete_k_partite(parts: Sequence[Iterable[str]]) -> Graph:
    """One edge between nodes of distinct parts, none inside a part."""
    blocks = [list(p) for p in parts]
    if not blocks:
        raise GraphError("need at least one part")
    if any(len(b) == 0 for b in blocks):
        raise GraphError("parts must be nonempty")
    flat = [n for b in blocks for n in b]
    if len(set(flat)) != len(flat):
        raise GraphError("parts must be pairwise disjoint")
    mult = {}
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            for u in blocks[a]:
                for v in blocks[b]:
                    mult[_pair(u, v)] = 1
    return Graph(tuple(flat), mult)


def complete_k_partite_quiver(parts: Sequence[Iterable[str]]) -> Quiver:
    """Complete k-partite graph oriented from earlier parts to later ones."""
    blocks = [list(p) for p in parts]
    g = complete_k_partite(blocks)
    arrows = {}
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            for u in blocks[a]:
                for v in blocks[b]:
                    arrows[(u, v)] = 1
    return Quiver(g.nodes, arrows)


def leg_node(node: str, j: int) -> str:
    return f"{node}.{j}"


def attach_leg(g: GraphLike, node: str, length: int, names: Sequence[str] | None = None) -> GraphLike:
    """Hang a path of ``length`` new nodes from ``node``.

    On a quiver the new arrows point towards ``node``.
    """
    q, wasq = _as_quiver(g)
    if node not in q.nodes:
        raise GraphError(f"unknown node {node!r}")
    if length < 0:
        raise GraphError("leg length must be nonnegative")
    if length == 0:
        return g
    names = list(names) if names is not None else [leg_node(node, j) for j in range(1, length + 1)]
    if len(names) != length:
        raise GraphError("one name per leg node required")
    clash = set(names) & set(q.nodes)
    if clash or len(set(names)) != length:
        raise GraphError(f"leg node names collide: {sorted(clash)}")
    arrows = dict(q.arrows)
    prev = node
    for n in names:
        arrows[(n, prev)] = arrows.get((n, prev), 0) + 1
        prev = n
    return _back(Quiver(q.nodes + tuple(names), arrows, q.open_nodes), wasq)


def path_graph(nodes: Sequence[str]) -> Graph:
    return Graph(tuple(nodes), {_pair(nodes[k], nodes[k + 1]): 1 for k in range(len(nodes) - 1)})


def splay(g: GraphLike, open_node: str, J: Iterable[str]) -> GraphLike:
    """Replace the open node by one open node per element of ``J``."""
    return r_fission(g, open_node, J, 0)


def r_fission(g: GraphLike, open_node: str, J: Iterable[str], r: int) -> GraphLike:
    """Splay ``open_node`` by ``J`` and join each pair of new nodes by ``r`` edges."""
    q, wasq = _as_quiver(g)
    new = list(J)
    if open_node not in q.nodes:
        raise GraphError(f"unknown node {open_node!r}")
    if open_node not in q.open_nodes:
        raise GraphError(f"node {open_node!r} is not open")
    if not new:
        raise GraphError("splaying set must be nonempty")
    if len(set(new)) != len(new):
        raise GraphError("splaying set has repeated names")
    if r < 0:
        raise GraphError("r must be nonnegative")
    rest = [n for n in q.nodes if n != open_node]
    if set(new) & set(rest):
        raise GraphError("new node names collide with existing nodes")

    arrows: dict[tuple[str, str], int] = {}
    for (t, h), m in q.arrows.items():
        tails = new if t == open_node else [t]
        heads = new if h == open_node else [h]
        for tt in tails:
            for hh in heads:
                arrows[(tt, hh)] = arrows.get((tt, hh), 0) + m
    if r:
        for a in range(len(new)):
            for b in range(a + 1, len(new)):
                key = _pair(new[a], new[b])
                arrows[key] = arrows.get(key, 0) + r
    opened = (q.open_nodes - {open_node}) | frozenset(new)
    return _back(Quiver(tuple(rest + new), arrows, opened), wasq)


def glue(g: GraphLike, i: str, j: str, name: str | None = None) -> GraphLike:
    """Identify open nodes ``i`` and ``j`` into one open node (named ``name`` or ``i``)."""
    q, wasq = _as_quiver(g)
    for n in (i, j):
        if n not in q.nodes:
            raise GraphError(f"unknown node {n!r}")
        if n not in q.open_nodes:
            raise GraphError(f"node {n!r} is not open")
    if i == j:
        raise GraphError("cannot glue a node to itself")
    if q.arrows.get((i, j), 0) or q.arrows.get((j, i), 0):
        raise GraphError("gluing adjacent nodes would create an edge loop")
    o = i if name is None else name
    if o not in (i, j) and o in q.nodes:
        raise GraphError(f"name {o!r} already used")

    def ren(n):
        return o if n in (i, j) else n

    arrows: dict[tuple[str, str], int] = {}
    for (t, h), m in q.arrows.items():
        key = (ren(t), ren(h))
        arrows[key] = arrows.get(key, 0) + m
    nodes = [n for n in q.nodes if n not in (i, j)] + [o]
    opened = (q.open_nodes - {i, j}) | {o}
    return _back(Quiver(tuple(nodes), arrows, opened), wasq)


def disjoint_union(a: GraphLike, b: GraphLike) -> GraphLike:
    qa, wasq = _as_quiver(a)
    qb, _ = _as_quiver(b)
    if set(qa.nodes) & set(qb.nodes):
        raise GraphError("node sets must be disjoint")
    arrows = dict(qa.arrows)
    arrows.update(qb.arrows)
    return _back(Quiver(qa.nodes + qb.nodes, arrows, qa.open_nodes | qb.open_nodes), wasq)


# fission trees ---------------------------------------------------------------

@dataclass(frozen=True)
class FissionTree:
    """Nested eigenspace tree for a pole of order k.

    ``levels[i]`` holds the node set J_{i+1}; ``parents[i]`` maps each node
    of level i+1 (i >= 1) to its parent at level i.  ``dims`` gives the
    dimension of each leaf (deepest level).
    """

    levels: tuple[tuple[str, ...], ...]
    parents: tuple[Mapping[str, str], ...]
    dims: Mapping[str, int]

    def __post_init__(self):
        if not self.levels:
            raise GraphError("fission tree needs at least one level")
        if len(self.parents) != len(self.levels) - 1:
            raise GraphError("one parent map per level after the first")
        for lv in self.levels:
            if not lv:
                raise GraphError("empty level")
        all_nodes = [n for lv in self.levels for n in lv]
        if len(set(all_nodes)) != len(all_nodes):
            raise GraphError("tree node names must be unique across levels")
        for k, pm in enumerate(self.parents):
            child, parent = self.levels[k + 1], self.levels[k]
            if set(pm) != set(child):
                raise GraphError(f"parent map at level {k + 2} must cover every node")
            if not set(pm.values()) <= set(parent):
                raise GraphError(f"parent map at level {k + 2} lands outside level {k + 1}")
            if set(pm.values()) != set(parent):
                raise GraphError(f"parent map at level {k + 2} is not surjective")
        leaves = self.levels[-1]
        if set(self.dims) != set(leaves):
            raise GraphError("dims must be given exactly for the leaves")
        if any(d <= 0 for d in self.dims.values()):
            raise GraphError("leaf dimensions must be positive")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def children(self, level: int, node: str) -> list[str]:
        """Children (at ``level + 1``, 1-based levels) of ``node``."""
        pm = self.parents[level - 1]
        return [c for c in self.levels[level] if pm[c] == node]

    def node_dims(self) -> dict[str, int]:
        """Dimension of every node: leaves as given, inner nodes summed."""
        out = dict(self.dims)
        for k in range(len(self.levels) - 1, 0, -1):
            pm = self.parents[k - 1]
            for n in self.levels[k - 1]:
                out[n] = 0
            for c in self.levels[k]:
                out[pm[c]] += out[c]
        return out

    def ancestor(self, leaf: str, level: int) -> str:
        """Ancestor of a leaf at 1-based ``level``."""
        n = leaf
        for k in range(len(self.levels) - 1, level - 1, -1):
            n = self.parents[k - 1][n]
        return n


def fission_graph(t: FissionTree, k: int) -> Graph:
    """Graph of a pole of order ``k`` with nested eigenspace tree ``t``."""
    if k < 2:
        raise GraphError("pole order must be at least 2")
    if t.depth != k - 1:
        raise GraphError(f"pole order {k} needs {k - 1} levels, tree has {t.depth}")
    root = "__root__"
    q: Quiver = Quiver((root,), {}, frozenset({root}))
    q = r_fission(q, root, t.levels[0], k - 2)
    for lvl in range(1, t.depth):
        r = k - 2 - lvl
        for n in t.levels[lvl - 1]:
            q = r_fission(q, n, t.children(lvl, n), r)
    return q.graph


def fission_multiplicity(t: FissionTree, k: int, u: str, v: str) -> int:
    """Direct rule: leaves first separated at level i get k-1-i edges."""
    if u == v:
        return 0
    for lvl in range(1, t.depth + 1):
        if t.ancestor(u, lvl) != t.ancestor(v, lvl):
            return k - 1 - lvl
    raise GraphError("distinct leaves must separate at some level")


def symplectic_dimension(g: Graph, dims: Mapping[str, int]) -> int:
    """dim of the doubled representation space: 2 * sum mult * d_u * d_v."""
    return 2 * sum(m * dims[u] * dims[v] for u, v, m in g.edges())


def fission_orbit_dimension(t: FissionTree, k: int) -> int:
    """sum over i of (k-1-i) * dim h'_i, h'_i the off-diagonal blocks
    between siblings at level i."""
    nd = t.node_dims()
    total = 0
    for lvl in range(1, min(k - 2, t.depth) + 1):
        nodes = t.levels[lvl - 1]
        if lvl == 1:
            groups = {None: list(nodes)}
        else:
            groups: dict = {}
            pm = t.parents[lvl - 2]
            for n in nodes:
                groups.setdefault(pm[n], []).append(n)
        h_dim = 0
        for sib in groups.values():
            for a in sib:
                for b in sib:
                    if a != b:
                        h_dim += nd[a] * nd[b]
        total += (k - 1 - lvl) * h_dim
    return total


# DOT -----------------------------------------------------------------------

def to_dot(g: GraphLike, name: str = "G", node_attrs: Mapping[str, Mapping[str, str]] | None = None) -> str:
    """Undirected DOT text; parallel edges repeated, open nodes dashed."""
    gr = g.graph if isinstance(g, Quiver) else g
    node_attrs = node_attrs or {}
    lines = [f"graph {name} {{"]
    for n in gr.nodes:
        attrs = {}
        if n in gr.open_nodes:
            attrs["shape"] = "circle"
            attrs["style"] = "dashed"
        attrs.update(node_attrs.get(n, {}))
        if attrs:
            body = ",".join(f"{k}={_dot_value(v)}" for k, v in attrs.items())
            lines.append(f'  "{n}" [{body}];')
        else:
            lines.append(f'  "{n}";')
    for u, v, m in gr.edges():
        for _ in range(m):
            lines.append(f'  "{u}" -- "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_value(v: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
        return v
    return '"' + v.replace('"', '\\"') + '"'
