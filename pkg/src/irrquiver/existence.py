"""Root-theoretic criteria for non-emptiness and for stable points, and the
passage from connection data to a quiver with dimension and parameters."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .exact import CQ, ZERO
from .graph_core import Graph, GraphLike, Quiver, attach_leg, complete_k_partite_quiver, leg_node
from .quiver_rep import OrbitSpec
from .root_system import (
    ResourceLimitError,
    RootError,
    _check_keys,
    _graph,
    classify_root,
    delta,
    enumerate_positive_roots_bounded,
    pairing,
)

DEFAULT_MAX_STATES = 1_000_000


class ResonanceWarning(UserWarning):
    pass


@dataclass
class ExistenceVerdict:
    nonempty: bool | None = None
    nonempty_witness: list[dict[str, int]] | None = None
    stable: bool | None = None
    violation: list[dict[str, int]] | None = None
    reason: str = ""
    graph: Graph | None = None
    dims: dict[str, int] | None = None
    params: dict[str, CQ] | None = None
    warnings: list[str] = field(default_factory=list)


def _is_zero(x) -> bool:
    if isinstance(x, complex):
        return abs(x) < 1e-12
    return not x


def _orthogonal_roots(g: Graph, d: Mapping[str, int], lam: Mapping[str, object]) -> list[tuple[int, ...]]:
    nodes = list(g.nodes)
    roots = enumerate_positive_roots_bounded(g, d)
    out = [tuple(r[n] for n in nodes) for r in roots if _is_zero(pairing(r, lam))]
    # descending canonical order: larger height first, then lexicographically larger
    out.sort(key=lambda v: (sum(v), v), reverse=True)
    return out


def _sub(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...] | None:
    out = tuple(x - y for x, y in zip(a, b))
    return out if all(v >= 0 for v in out) else None


class _Budget:
    def __init__(self, limit: int | None):
        self.limit = limit
        self.count = 0

    def tick(self) -> None:
        self.count += 1
        if self.limit is not None and self.count > self.limit:
            raise ResourceLimitError(f"search exceeded {self.limit} partial states")


def decompositions(g: GraphLike, d: Mapping[str, int], lam: Mapping[str, object],
                   min_parts: int = 1, max_states: int | None = DEFAULT_MAX_STATES) -> Iterator[list[dict[str, int]]]:
    """All unordered decompositions of d into positive roots orthogonal to lam.

    Each decomposition is listed once, parts in descending canonical order.
    """
    g = _graph(g)
    _check_keys(g, d)
    nodes = list(g.nodes)
    roots = _orthogonal_roots(g, d, lam)
    budget = _Budget(max_states)
    target = tuple(d[n] for n in nodes)

    def rec(rem, start, acc):
        budget.tick()
        if not any(rem):
            if len(acc) >= min_parts:
                yield [dict(zip(nodes, r)) for r in acc]
            return
        for k in range(start, len(roots)):
            nxt = _sub(rem, roots[k])
            if nxt is not None:
                acc.append(roots[k])
                yield from rec(nxt, k, acc)
                acc.pop()

    if any(target):
        yield from rec(target, 0, [])


def nonempty(g: GraphLike, d: Mapping[str, int], lam: Mapping[str, object],
             max_states: int | None = DEFAULT_MAX_STATES) -> ExistenceVerdict:
    """mu^{-1}(lambda) // G is nonempty iff d is a sum of lambda-orthogonal positive roots."""
    g = _graph(g)
    _check_keys(g, d)
    _check_keys(g, lam, "parameter vector")
    if any(v < 0 for v in d.values()):
        raise RootError("dimension vector must be nonnegative")
    if not any(d.values()):
        return ExistenceVerdict(nonempty=True, nonempty_witness=[], reason="zero dimension vector")
    if not _is_zero(pairing(d, lam)):
        return ExistenceVerdict(nonempty=False, reason="lambda.d != 0, so the moment-map fibre is empty")
    nodes = list(g.nodes)
    roots = _orthogonal_roots(g, d, lam)
    budget = _Budget(max_states)
    dead: set[tuple[tuple[int, ...], int]] = set()

    def rec(rem, start, acc) -> bool:
        budget.tick()
        if not any(rem):
            return True
        if (rem, start) in dead:
            return False
        for k in range(start, len(roots)):
            nxt = _sub(rem, roots[k])
            if nxt is not None:
                acc.append(roots[k])
                if rec(nxt, k, acc):
                    return True
                acc.pop()
        dead.add((rem, start))
        return False

    acc: list[tuple[int, ...]] = []
    ok = rec(tuple(d[n] for n in nodes), 0, acc)
    if ok:
        return ExistenceVerdict(nonempty=True, nonempty_witness=[dict(zip(nodes, r)) for r in acc],
                                reason="d is a sum of lambda-orthogonal positive roots")
    return ExistenceVerdict(nonempty=False, reason="no decomposition into lambda-orthogonal positive roots")


def has_stable(g: GraphLike, d: Mapping[str, int], lam: Mapping[str, object],
               max_states: int | None = DEFAULT_MAX_STATES) -> ExistenceVerdict:
    """A stable point exists iff d is a positive root with lambda.d = 0 and
    Delta(d) > sum Delta(beta_i) for every decomposition into >= 2
    lambda-orthogonal positive roots."""
    g = _graph(g)
    _check_keys(g, d)
    _check_keys(g, lam, "parameter vector")
    verdict = nonempty(g, d, lam, max_states)
    if not _is_zero(pairing(d, lam)):
        verdict.stable = False
        return verdict
    if not classify_root(g, d).kind.is_positive:
        verdict.stable = False
        verdict.reason = "d is not a positive root"
        return verdict
    nodes = list(g.nodes)
    roots = _orthogonal_roots(g, d, lam)
    deltas = {r: delta(g, dict(zip(nodes, r))) for r in roots}
    budget = _Budget(max_states)
    memo: dict[tuple[int, ...], tuple[float, tuple[int, ...] | None]] = {}

    def best(rem: tuple[int, ...]) -> tuple[float, tuple[int, ...] | None]:
        """Max of sum Delta over decompositions of rem (>= 1 part), with a first part."""
        if rem in memo:
            return memo[rem]
        budget.tick()
        out: tuple[float, tuple[int, ...] | None] = (float("-inf"), None)
        for r in roots:
            nxt = _sub(rem, r)
            if nxt is None:
                continue
            if not any(nxt):
                val = deltas[r]
            else:
                sub = best(nxt)[0]
                if sub == float("-inf"):
                    continue
                val = deltas[r] + sub
            if val > out[0]:
                out = (val, r)
        memo[rem] = out
        return out

    target = tuple(d[n] for n in nodes)
    top = float("-inf")
    first = None
    for r in roots:
        if r == target:
            continue
        nxt = _sub(target, r)
        if nxt is None:
            continue
        sub = best(nxt)[0]
        if sub == float("-inf"):
            continue
        if deltas[r] + sub > top:
            top, first = deltas[r] + sub, r
    dd = delta(g, d)
    if first is not None and top >= dd:
        parts = [first]
        rem = _sub(target, first)
        while any(rem):
            r = best(rem)[1]
            parts.append(r)
            rem = _sub(rem, r)
        verdict.stable = False
        verdict.violation = [dict(zip(nodes, p)) for p in sorted(parts, key=lambda v: (sum(v), v), reverse=True)]
        verdict.reason = f"Delta(d) = {dd} is not greater than {int(top)} for a decomposition into {len(parts)} roots"
    else:
        verdict.stable = True
        verdict.reason = f"d is a positive root and Delta(d) = {dd} exceeds every proper decomposition"
    return verdict


# connection data ---------------------------------------------------------------

@dataclass(frozen=True)
class NodeSpec:
    """An eigenspace of A1 inside an eigenspace of A0, with the orbit of the
    corresponding component of the formal residue."""

    name: str
    orbit: OrbitSpec
    b: object = ZERO

    @property
    def dim(self) -> int:
        return self.orbit.size


@dataclass(frozen=True)
class PartSpec:
    nodes: tuple[NodeSpec, ...]
    a: object = ZERO


@dataclass(frozen=True)
class SimplePoleSpec:
    name: str
    position: object
    orbit: OrbitSpec


@dataclass(frozen=True)
class ConnectionSpec:
    """Formal type (A0/z^3 + A1/z^2 + Lambda/z)dz at infinity plus simple poles."""

    parts: tuple[PartSpec, ...]
    simple_poles: tuple[SimplePoleSpec, ...] = ()

    @property
    def rank(self) -> int:
        return sum(n.dim for p in self.parts for n in p.nodes)

    def validate(self) -> None:
        if not self.parts or any(not p.nodes for p in self.parts):
            raise RootError("the irregular pole needs nonempty parts")
        names = [n.name for p in self.parts for n in p.nodes] + [s.name for s in self.simple_poles]
        if len(set(names)) != len(names):
            raise RootError("node and pole names must be distinct")
        avals = [p.a for p in self.parts]
        if len(set(avals)) != len(avals):
            raise RootError("A0 eigenvalues of distinct parts must differ")
        for p in self.parts:
            bvals = [n.b for n in p.nodes]
            if len(set(bvals)) != len(bvals):
                raise RootError("A1 eigenvalues within a part must differ")
        positions = [s.position for s in self.simple_poles]
        if len(set(positions)) != len(positions):
            raise RootError("simple pole positions must be distinct")
        for s in self.simple_poles:
            if s.orbit.size != self.rank:
                raise RootError(f"orbit at pole {s.name!r} has size {s.orbit.size}, expected rank {self.rank}")


def resonance_warnings(spec: ConnectionSpec) -> list[str]:
    out = []
    orbits = [(n.name, n.orbit) for p in spec.parts for n in p.nodes]
    orbits += [(s.name, s.orbit) for s in spec.simple_poles]
    for name, orb in orbits:
        vals = orb.distinct_eigenvalues()
        for x in vals:
            for y in vals:
                diff = CQ.coerce(x) - CQ.coerce(y)
                if diff and diff.is_integer():
                    out.append(f"orbit at {name!r}: eigenvalues {x} and {y} differ by the nonzero integer {diff}")
    return out


def connection_quiver(spec: ConnectionSpec) -> tuple[Quiver, dict[str, int], dict[str, CQ]]:
    """(Gamma, d, lambda) for the connection spec.

    Centre: the complete k-partite quiver on the parts, with the simple
    poles as one extra (minimal) part.  Each node carries the leg of its
    orbit; the twist at a simple pole is its first root y_1, which shifts
    every node residue by sum_h y_1^(h).
    """
    spec.validate()
    parts = [[n.name for n in p.nodes] for p in spec.parts]
    if spec.simple_poles:
        parts = [[s.name for s in spec.simple_poles]] + parts
    q = complete_k_partite_quiver(parts)
    dims: dict[str, int] = {}
    params: dict[str, CQ] = {}
    shift = sum((CQ.coerce(s.orbit.roots[0]) for s in spec.simple_poles), ZERO)
    for p in spec.parts:
        for n in p.nodes:
            orb = n.orbit
            ld = orb.leg_dims()
            lp = orb.leg_params()
            q = attach_leg(q, n.name, len(ld) - 1)
            dims[n.name] = ld[0]
            params[n.name] = CQ.coerce(lp[0]) - shift
            for j in range(1, len(ld)):
                dims[leg_node(n.name, j)] = ld[j]
                params[leg_node(n.name, j)] = CQ.coerce(lp[j])
    for s in spec.simple_poles:
        orb = s.orbit
        ld = orb.leg_dims()[1:]  # node dim is rank(B - y_1)
        roots = [CQ.coerce(r) for r in orb.roots]
        q = attach_leg(q, s.name, max(len(ld) - 1, 0))
        dims[s.name] = ld[0] if ld else 0
        params[s.name] = roots[0] - roots[1] if len(roots) > 1 else ZERO
        for j in range(1, len(ld)):
            dims[leg_node(s.name, j)] = ld[j]
            params[leg_node(s.name, j)] = roots[j] - roots[j + 1]
    return q, dims, params


def exists_stable_connection(spec: ConnectionSpec, max_states: int | None = DEFAULT_MAX_STATES) -> ExistenceVerdict:
    warn = resonance_warnings(spec)
    for w in warn:
        warnings.warn(w, ResonanceWarning, stacklevel=2)
    q, d, lam = connection_quiver(spec)
    g = q.graph
    total = pairing(d, lam)
    if total:
        v = ExistenceVerdict(nonempty=False, stable=False,
                             reason=("lambda.d = %s != 0: the eigenvalues violate the residue theorem "
                                     "for the determinant connection (trace of all residues must vanish)" % total))
    else:
        v = has_stable(g, d, lam, max_states)
    v.graph, v.dims, v.params, v.warnings = g, d, lam, warn
    return v
