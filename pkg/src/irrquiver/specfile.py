"""JSON specification files: a connection form or a quiver form.

Scalars are exact: an integer, a ``"p/q"`` or ``"a+bi"`` string, or a
``[re, im]`` pair of such rationals.  Floats are rejected.

Connection form::

    {"poles": [{"position": "infinity",
                "parts": [{"a": "0", "nodes": [{"id": "u", "b": "0", "dim": 1,
                                                "orbit": {"roots": ["1/2"], "ranks": []}}]},
                          ...]}],
     "simple_poles": [{"id": "p", "position": "0",
                       "orbit": {"roots": ["1", "0"], "ranks": [1]}}]}

Quiver form::

    {"quiver": {"parts": [["2"], ["3"], ["4"]], "legs": {"2": ["1"]},
                "dims": {"1": 1, "2": 2, "3": 2, "4": 1}, "params": {...}}}

``legs`` maps a centre node to a leg length or to the list of leg node names;
instead of ``parts`` an explicit ``"nodes"`` plus ``"edges"`` list
(``[u, v]`` or ``[u, v, multiplicity]``) may be given.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .exact import CQ, ZERO
from .existence import ConnectionSpec, NodeSpec, PartSpec, SimplePoleSpec, connection_quiver
from .graph_core import Graph, GraphError, Quiver, attach_leg, complete_k_partite_quiver
from .quiver_rep import OrbitSpec, RepError
from .root_system import RootError


class SpecParseError(ValueError):
    """The file is not valid JSON (exit code 2)."""


class SpecError(ValueError):
    """The document is JSON but violates the schema or the math (exit code 3)."""


@dataclass
class QuiverSpec:
    quiver: Quiver
    dims: dict[str, int]
    params: dict[str, CQ]
    parts: list[list[str]] | None = None  # centre partition, when given


@dataclass
class Spec:
    """A loaded spec with its derived (Gamma, d, lambda)."""

    kind: str  # "connection" or "quiver"
    quiver: Quiver
    dims: dict[str, int]
    params: dict[str, CQ]
    parts: list[list[str]] | None
    connection: ConnectionSpec | None = None
    name: str = ""
    notes: list[str] = field(default_factory=list)

    @property
    def graph(self) -> Graph:
        return self.quiver.graph

    @property
    def centre_dims(self) -> dict[str, int]:
        if self.parts is None:
            return {}
        return {n: self.dims[n] for p in self.parts for n in p}


def parse_scalar(v: Any, where: str = "scalar") -> CQ:
    if isinstance(v, bool) or isinstance(v, float):
        raise SpecError(f"{where}: {v!r} is not an exact scalar (use a 'p/q' string)")
    try:
        if isinstance(v, int):
            return CQ(v)
        if isinstance(v, str):
            return CQ.parse(v)
        if isinstance(v, list) and len(v) == 2:
            return CQ(_rational(v[0], where), _rational(v[1], where))
    except (ValueError, ZeroDivisionError, TypeError) as err:
        raise SpecError(f"{where}: cannot parse {v!r} ({err})") from err
    raise SpecError(f"{where}: cannot parse {v!r}")


def _rational(v: Any, where: str):
    if isinstance(v, (bool, float)):
        raise SpecError(f"{where}: {v!r} is not an exact rational")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        return v
    raise SpecError(f"{where}: {v!r} is not an exact rational")


def _int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(f"{where}: expected an integer, got {v!r}")
    return v


def _get(obj: Mapping, key: str, where: str):
    if not isinstance(obj, dict):
        raise SpecError(f"{where}: expected an object")
    if key not in obj:
        raise SpecError(f"{where}: missing field {key!r}")
    return obj[key]


def _orbit(obj: Any, size: int, where: str) -> OrbitSpec:
    roots = _get(obj, "roots", where)
    if not isinstance(roots, list) or not roots:
        raise SpecError(f"{where}.roots: expected a nonempty list")
    ranks = obj.get("ranks", [])
    if not isinstance(ranks, list):
        raise SpecError(f"{where}.ranks: expected a list")
    try:
        return OrbitSpec(size, tuple(parse_scalar(r, f"{where}.roots") for r in roots),
                         tuple(_int(r, f"{where}.ranks") for r in ranks))
    except RepError as err:
        raise SpecError(f"{where}: {err}") from err


def load_spec(path: str | Path) -> Spec:
    text = Path(path).read_text(encoding="utf-8")
    return parse_spec(text, name=Path(path).stem)


def parse_spec(text: str, name: str = "") -> Spec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise SpecParseError(f"invalid JSON at line {err.lineno} column {err.colno}: {err.msg}") from err
    if not isinstance(doc, dict):
        raise SpecError("top level must be an object")
    has_conn = "poles" in doc or "simple_poles" in doc
    has_quiver = "quiver" in doc
    if has_conn == has_quiver:
        raise SpecError("give exactly one of the connection form ('poles') or the quiver form ('quiver')")
    name = doc.get("name", name)
    try:
        if has_quiver:
            return _quiver_form(doc["quiver"], name)
        return _connection_form(doc, name)
    except (GraphError, RootError, RepError) as err:
        raise SpecError(str(err)) from err


def _connection_form(doc: dict, name: str) -> Spec:
    poles = _get(doc, "poles", "spec")
    if not isinstance(poles, list) or len(poles) != 1:
        raise SpecError("poles: exactly one irregular pole (at infinity) is supported")
    pole = poles[0]
    raw_parts = _get(pole, "parts", "poles[0]")
    if not isinstance(raw_parts, list) or not raw_parts:
        raise SpecError("poles[0].parts: expected a nonempty list")
    parts = []
    for k, rp in enumerate(raw_parts):
        where = f"poles[0].parts[{k}]"
        raw_nodes = _get(rp, "nodes", where)
        if not isinstance(raw_nodes, list) or not raw_nodes:
            raise SpecError(f"{where}.nodes: expected a nonempty list")
        nodes = []
        for m, rn in enumerate(raw_nodes):
            w = f"{where}.nodes[{m}]"
            nid = str(_get(rn, "id", w))
            dim = _int(_get(rn, "dim", w), f"{w}.dim")
            if dim < 1:
                raise SpecError(f"{w}.dim: must be positive")
            orbit = _orbit(_get(rn, "orbit", w), dim, f"{w}.orbit")
            nodes.append(NodeSpec(nid, orbit, parse_scalar(rn.get("b", m), f"{w}.b")))
        parts.append(PartSpec(tuple(nodes), parse_scalar(rp.get("a", k), f"{where}.a")))
    rank = sum(n.dim for p in parts for n in p.nodes)
    simple = []
    for k, rs in enumerate(doc.get("simple_poles", [])):
        w = f"simple_poles[{k}]"
        sid = str(_get(rs, "id", w))
        simple.append(SimplePoleSpec(sid, parse_scalar(_get(rs, "position", w), f"{w}.position"),
                                     _orbit(_get(rs, "orbit", w), rank, f"{w}.orbit")))
    conn = ConnectionSpec(tuple(parts), tuple(simple))
    q, dims, params = connection_quiver(conn)
    centre = [[n.name for n in p.nodes] for p in conn.parts]
    if conn.simple_poles:
        centre = [[s.name for s in conn.simple_poles]] + centre
    notes = []
    if "order" in pole:
        declared = _int(pole["order"], "poles[0].order")
        derived = 3 if len(parts) >= 2 else (2 if len(parts[0].nodes) >= 2 else 1)
        if declared != derived:
            notes.append(f"declared pole order {declared}; the eigenvalue data has order {derived}")
    return Spec("connection", q, dims, params, centre, conn, name, notes)


def _quiver_form(obj: Any, name: str) -> Spec:
    if not isinstance(obj, dict):
        raise SpecError("quiver: expected an object")
    parts = None
    if "parts" in obj:
        raw = obj["parts"]
        if not isinstance(raw, list) or not all(isinstance(p, list) and p for p in raw) or not raw:
            raise SpecError("quiver.parts: expected a list of nonempty lists of node ids")
        parts = [[str(n) for n in p] for p in raw]
        q = complete_k_partite_quiver(parts)
    elif "edges" in obj:
        nodes = [str(n) for n in _get(obj, "nodes", "quiver")]
        arrows: dict[tuple[str, str], int] = {}
        for e in obj["edges"]:
            if not isinstance(e, list) or len(e) not in (2, 3):
                raise SpecError(f"quiver.edges: bad edge {e!r}")
            t, h = str(e[0]), str(e[1])
            m = _int(e[2], "quiver.edges multiplicity") if len(e) == 3 else 1
            arrows[(t, h)] = arrows.get((t, h), 0) + m
        q = Quiver(tuple(nodes), arrows)
    else:
        raise SpecError("quiver: give 'parts' or 'nodes' and 'edges'")
    for node, leg in (obj.get("legs") or {}).items():
        if isinstance(leg, list):
            q = attach_leg(q, str(node), len(leg), [str(x) for x in leg])
        else:
            q = attach_leg(q, str(node), _int(leg, f"quiver.legs.{node}"))
    raw_dims = _get(obj, "dims", "quiver")
    if not isinstance(raw_dims, dict):
        raise SpecError("quiver.dims: expected an object")
    dims = {str(k): _int(v, f"quiver.dims.{k}") for k, v in raw_dims.items()}
    if set(dims) != set(q.nodes):
        missing = sorted(set(q.nodes) - set(dims))
        extra = sorted(set(dims) - set(q.nodes))
        raise SpecError(f"quiver.dims: missing {missing}, unexpected {extra}")
    if any(v < 0 for v in dims.values()):
        raise SpecError("quiver.dims: dimensions must be nonnegative")
    raw_params = obj.get("params") or {}
    params = {n: ZERO for n in q.nodes}
    for k, v in raw_params.items():
        if str(k) not in params:
            raise SpecError(f"quiver.params: unknown node {k!r}")
        params[str(k)] = parse_scalar(v, f"quiver.params.{k}")
    return Spec("quiver", q, dims, params, parts, None, name)
