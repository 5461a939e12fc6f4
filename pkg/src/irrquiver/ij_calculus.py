"""Abstract data (I, J), its representations, and their passage to
connections and to quivers.

A representation stores one big matrix ``alpha`` in End(V), V = sum_j W_j,
W_j = sum_{i in I_j} V_i, with blocks in J order and nodes inside a part in
node order.  The block in rows W_i and columns W_j is alpha_ij in
Hom(W_j, W_i); diagonal blocks are zero.  Matrices are either numpy object
arrays of :class:`~irrquiver.exact.CQ` (exact) or complex arrays.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import exact as ex
from .exact import CQ, ZERO
from .graph_core import (
    Quiver,
    attach_leg,
    complete_k_partite_quiver,
    leg_node,
    sort_nodes,
)
from .quiver_rep import (
    QuiverRep,
    RepError,
    is_stable,
    leg_from_matrix,
    numerical_rank,
)

log = logging.getLogger(__name__)

SNAP_TOL = 1e-7


class IJError(ValueError):
    pass


class InconsistencyError(RuntimeError):
    """A proven implication failed numerically (e.g. stable data whose inner maps are not of full rank)."""


@dataclass(frozen=True)
class IJData:
    J: tuple[str, ...]
    parts: Mapping[str, tuple[str, ...]]
    I0: tuple[str, ...] = ()

    def __post_init__(self):
        J = tuple(self.J)
        if not J:
            raise IJError("J must be nonempty")
        if len(set(J)) != len(J):
            raise IJError("part labels must be distinct")
        if set(self.parts) != set(J):
            raise IJError("one node set per element of J")
        parts = {}
        seen: set[str] = set()
        for j in J:
            nodes = tuple(sort_nodes(self.parts[j]))
            if not nodes:
                raise IJError(f"part {j!r} is empty")
            if seen & set(nodes) or len(set(nodes)) != len(nodes):
                raise IJError("parts must be disjoint")
            seen |= set(nodes)
            parts[j] = nodes
        i0 = tuple(sort_nodes(self.I0))
        if seen & set(i0) or len(set(i0)) != len(i0):
            raise IJError("I0 must be disjoint from the parts")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "I0", i0)

    @classmethod
    def from_parts(cls, parts: Sequence[Iterable[str]], I0: Iterable[str] = (), labels: Sequence[str] | None = None) -> "IJData":
        parts = [list(p) for p in parts]
        labels = list(labels) if labels is not None else [str(k + 1) for k in range(len(parts))]
        return cls(tuple(labels), dict(zip(labels, parts)), tuple(I0))

    @property
    def is_complete(self) -> bool:
        return not self.I0

    @property
    def central_nodes(self) -> list[str]:
        return [n for j in self.J for n in self.parts[j]]

    def part_of(self, node: str) -> str:
        for j in self.J:
            if node in self.parts[j]:
                return j
        raise IJError(f"node {node!r} is not in any part")

    def __hash__(self):
        return hash((self.J, tuple((j, self.parts[j]) for j in self.J), self.I0))

    def __eq__(self, other):
        if not isinstance(other, IJData):
            return NotImplemented
        return self.J == other.J and dict(self.parts) == dict(other.parts) and self.I0 == other.I0


@dataclass
class IJRep:
    data: IJData
    dims: dict[str, int]
    alpha: np.ndarray
    B: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if set(self.dims) != set(self.data.central_nodes):
            raise IJError("dims must be given for exactly the nodes of the parts")
        if any(d < 0 for d in self.dims.values()):
            raise IJError("negative dimension")
        n = self.rank
        if self.alpha.shape != (n, n):
            raise IJError(f"alpha must be {n}x{n}, got {self.alpha.shape}")
        for j in self.data.J:
            s = self.part_slice(j)
            blk = self.alpha[s, s]
            if blk.size and any(v != 0 for v in blk.flat):
                raise IJError(f"diagonal block of part {j!r} must vanish")
        if set(self.B) != set(self.data.I0):
            raise IJError("one residue matrix B_i per element of I0")
        for i, b in self.B.items():
            if b.shape != (n, n):
                raise IJError(f"B_{i} must be {n}x{n}")

    @property
    def exact(self) -> bool:
        return ex.is_exact_array(self.alpha)

    @property
    def rank(self) -> int:
        return sum(self.dims.values())

    def part_dim(self, j: str) -> int:
        return sum(self.dims[n] for n in self.data.parts[j])

    def offsets(self) -> dict[str, tuple[int, int]]:
        """Row/column range of every part and every node."""
        out = {}
        pos = 0
        for j in self.data.J:
            start = pos
            for n in self.data.parts[j]:
                out[n] = (pos, pos + self.dims[n])
                pos += self.dims[n]
            out[("part", j)] = (start, pos)
        return out

    def part_slice(self, j: str) -> slice:
        a, b = self.offsets()[("part", j)]
        return slice(a, b)

    def node_slice(self, n: str) -> slice:
        a, b = self.offsets()[n]
        return slice(a, b)

    def block(self, i: str, j: str) -> np.ndarray:
        """alpha_ij in Hom(W_j, W_i)."""
        return self.alpha[self.part_slice(i), self.part_slice(j)]

    def equals(self, other: "IJRep") -> bool:
        """Exact equality of all data (numeric arrays compared bitwise)."""
        if self.data != other.data or self.dims != other.dims:
            return False
        if not _arr_eq(self.alpha, other.alpha):
            return False
        return set(self.B) == set(other.B) and all(_arr_eq(self.B[i], other.B[i]) for i in self.B)


def _arr_eq(a: np.ndarray, b: np.ndarray) -> bool:
    if a.shape != b.shape:
        return False
    if a.dtype == object or b.dtype == object:
        return all(x == y for x, y in zip(a.flat, b.flat))
    return bool(np.array_equal(a, b))


def _mm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == object or b.dtype == object:
        if a.shape[1] == 0:
            return ex.zeros(a.shape[0], b.shape[1])
        return a.dot(b)
    return a @ b


def _neg(a: np.ndarray) -> np.ndarray:
    return -a


def _zeros_like(rep_exact: bool, m: int, n: int) -> np.ndarray:
    return ex.zeros(m, n, rep_exact)


def _scalar(x, exact: bool):
    return CQ.coerce(x) if exact else complex(x)


# realization ---------------------------------------------------------------

@dataclass(frozen=True)
class RealizationData:
    a: Mapping[str, object]  # part label -> a_j
    b: Mapping[str, object]  # node (parts and I0) -> b_i

    def validate(self, data: IJData) -> None:
        if set(self.a) != set(data.J):
            raise IJError("realization data needs a_j for every part")
        avals = [self.a[j] for j in data.J]
        if len(set(avals)) != len(avals):
            raise IJError("the a_j must be distinct")
        need = set(data.central_nodes) | set(data.I0)
        if set(self.b) != need:
            raise IJError("realization data needs b_i for every node of I")
        for group in [data.parts[j] for j in data.J] + [data.I0]:
            bvals = [self.b[n] for n in group]
            if len(set(bvals)) != len(bvals):
                raise IJError("b_i must be distinct within each part (and within I0)")


@dataclass
class ConnectionMatrices:
    """The connection -(A0 w + B - sum_i B_i / (w - b_i)) dw."""

    A0: np.ndarray
    A1: np.ndarray
    B: np.ndarray
    residues: list[tuple[str, object, np.ndarray]]  # (node, position b_i, B_i)
    pole_order_at_infinity: int = 3
    notes: list[str] = field(default_factory=list)
    grading: tuple[IJData, dict[str, int]] | None = None

    @classmethod
    def from_laurent(cls, A: np.ndarray, B: np.ndarray, C: np.ndarray, position=0) -> "ConnectionMatrices":
        """(A/z^3 + B/z^2 + C/z) dz on P^1, rewritten in w = 1/z.

        Gives A0 = A, the same B, and a simple pole at w = 0 with residue -C.
        A1 is the part of B preserving the eigenspaces of A.
        """
        A = np.asarray(A, dtype=complex)
        B = np.asarray(B, dtype=complex)
        C = np.asarray(C, dtype=complex)
        vals, vecs = np.linalg.eig(A)
        clusters = _cluster(vals)
        inv = np.linalg.inv(vecs)
        A1 = np.zeros_like(B)
        for members in clusters:
            E = vecs[:, members] @ inv[members, :]
            A1 += E @ B @ E
        return cls(A, A1, B, [("p", position, -C)])


def realize(rep: IJRep, rd: RealizationData) -> ConnectionMatrices:
    data = rep.data
    rd.validate(data)
    exact = rep.exact and all(ex.is_exact(v) for v in list(rd.a.values()) + list(rd.b.values()))
    if rep.exact and not exact:
        alpha = ex.to_complex_array(rep.alpha)
        Bs = {i: ex.to_complex_array(b) for i, b in rep.B.items()}
    else:
        alpha, Bs = rep.alpha, rep.B
    n = rep.rank
    A0 = _zeros_like(exact, n, n)
    A1 = _zeros_like(exact, n, n)
    B = _zeros_like(exact, n, n)
    order = {j: k for k, j in enumerate(data.J)}
    for j in data.J:
        s = rep.part_slice(j)
        for k in range(s.start, s.stop):
            A0[k, k] = _scalar(rd.a[j], exact)
        for node in data.parts[j]:
            ns = rep.node_slice(node)
            for k in range(ns.start, ns.stop):
                A1[k, k] = _scalar(rd.b[node], exact)
    for i in data.J:
        for j in data.J:
            si, sj = rep.part_slice(i), rep.part_slice(j)
            if i == j:
                B[si, sj] = A1[si, sj]
            elif order[i] > order[j]:
                B[si, sj] = _neg(alpha[si, sj])
            else:
                c = _scalar(rd.a[j], exact) - _scalar(rd.a[i], exact)
                B[si, sj] = ex.scale(alpha[si, sj], c) if exact else alpha[si, sj] * c
    residues = [(i, rd.b[i], Bs[i].copy()) for i in data.I0]
    order_inf, notes = _pole_order(data)
    return ConnectionMatrices(A0, A1, B, residues, order_inf, notes,
                              (data, dict(rep.dims)))


def _pole_order(data: IJData) -> tuple[int, list[str]]:
    notes = []
    if data.is_complete:
        notes.append("complete data: the only pole is at w = infinity")
    if len(data.J) == 1:
        j = data.J[0]
        if len(data.parts[j]) == 1:
            notes.append("#J = 1 and #I_j = 1: A0 and A1 may be taken zero (Fuchsian system)")
            return 1, notes
        notes.append("#J = 1: A0 may be taken zero, pole at infinity of order at most 2")
        return 2, notes
    return 3, notes


def _cluster(vals: np.ndarray, tol: float = SNAP_TOL) -> list[list[int]]:
    """Group indices of numerically equal eigenvalues (first-appearance order)."""
    groups: list[list[int]] = []
    scale = max(1.0, float(np.max(np.abs(vals)))) if len(vals) else 1.0
    for k, v in enumerate(vals):
        for g in groups:
            if abs(vals[g[0]] - v) <= tol * scale:
                g.append(k)
                break
        else:
            groups.append([k])
    return groups


def _is_exact_diagonal(m: np.ndarray) -> bool:
    if m.dtype != object:
        return False
    n = m.shape[0]
    return all(not m[r, c] for r in range(n) for c in range(n) if r != c)


def from_connection(cm: ConnectionMatrices, labels: tuple[IJData, Mapping[str, int]] | None = None,
                    tol: float = 1e-8) -> tuple[IJRep, RealizationData]:
    """Recover (I, J, V, alpha, B) and realization data from a connection.

    Exact diagonal A0, A1 give an exact inverse of :func:`realize`.  Otherwise
    A0 and A1 are simultaneously diagonalized numerically.
    """
    labels = labels if labels is not None else cm.grading
    n = cm.A0.shape[0]
    if _is_exact_diagonal(cm.A0) and _is_exact_diagonal(cm.A1):
        a_diag = [cm.A0[k, k] for k in range(n)]
        b_diag = [cm.A1[k, k] for k in range(n)]
        groups: list[tuple[object, list[tuple[object, list[int]]]]] = []
        for k in range(n):
            g = next((g for g in groups if g[0] == a_diag[k]), None)
            if g is None:
                g = (a_diag[k], [])
                groups.append(g)
            sub = next((s for s in g[1] if s[0] == b_diag[k]), None)
            if sub is None:
                sub = (b_diag[k], [])
                g[1].append(sub)
            sub[1].append(k)
        perm = [k for _, subs in groups for _, ks in subs for k in ks]
        Bm = cm.B[np.ix_(perm, perm)]
        res = [(node, pos, m[np.ix_(perm, perm)]) for node, pos, m in cm.residues]
        exact = all(m.dtype == object for _, _, m in res) and Bm.dtype == object
        a_vals = [g[0] for g in groups]
        b_vals = [[s[0] for s in g[1]] for g in groups]
        sizes = [[len(s[1]) for s in g[1]] for g in groups]
    else:
        exact = False
        S, a_vals, b_vals, sizes = _simultaneous_diagonalization(
            ex.to_complex_array(cm.A0), ex.to_complex_array(cm.A1), tol)
        Sinv = np.linalg.inv(S)
        Bm = Sinv @ ex.to_complex_array(cm.B) @ S
        res = [(node, pos, Sinv @ ex.to_complex_array(m) @ S) for node, pos, m in cm.residues]

    data, dims, node_names = _labels_for(labels, a_vals, b_vals, sizes, [r[0] for r in res])
    rep_J = data.J
    # B is already in block order; invert the sign rule block by block
    alpha = _zeros_like(exact, n, n)
    offs = []
    pos = 0
    for k, j in enumerate(rep_J):
        w = sum(sizes[k])
        offs.append((pos, pos + w))
        pos += w
    for ki, i in enumerate(rep_J):
        for kj, j in enumerate(rep_J):
            si = slice(*offs[ki])
            sj = slice(*offs[kj])
            blk = Bm[si, sj]
            if ki == kj:
                diag = _zeros_like(exact, blk.shape[0], blk.shape[1])
                pos2 = 0
                for bv, sz in zip(b_vals[ki], sizes[ki]):
                    for t in range(sz):
                        diag[pos2 + t, pos2 + t] = bv
                    pos2 += sz
                if exact:
                    ok = ex.exact_equal(blk, diag)
                else:
                    ok = np.linalg.norm(blk - diag) <= tol * max(1.0, np.linalg.norm(Bm))
                if not ok:
                    raise IJError("diagonal blocks of B must equal A1 (not a realization)")
            elif ki > kj:
                alpha[si, sj] = _neg(blk)
            else:
                c = a_vals[kj] - a_vals[ki]
                alpha[si, sj] = ex.scale(blk, CQ(1) / c) if exact else blk / c
    rd_a = {j: a_vals[k] for k, j in enumerate(rep_J)}
    rd_b = {}
    for k, j in enumerate(rep_J):
        for node, bv in zip(node_names[k], b_vals[k]):
            rd_b[node] = bv
    Bdict = {}
    for node, pos, m in res:
        rd_b[node] = pos
        Bdict[node] = m
    rep = IJRep(data, dims, alpha, Bdict)
    return rep, RealizationData(rd_a, rd_b)


def _simultaneous_diagonalization(A0, A1, tol):
    n = A0.shape[0]
    if np.linalg.norm(A0 @ A1 - A1 @ A0) > tol * max(1.0, np.linalg.norm(A0) * np.linalg.norm(A1)):
        raise IJError("A0 and A1 do not commute")
    vals, vecs = np.linalg.eig(A0)
    if n and np.linalg.cond(vecs) > 1e8:
        raise IJError("A0 is not semisimple")
    cols, a_vals, b_vals, sizes = [], [], [], []
    # parts (and nodes within a part) in (re, im) order of the eigenvalues
    clusters = sorted(_cluster(vals), key=lambda m: _root_key(np.mean(vals[m])))
    for members in clusters:
        a = complex(np.mean(vals[members]))
        P = vecs[:, members]
        # A1 preserves the eigenspace: A1 P = P M
        M = np.linalg.lstsq(P, A1 @ P, rcond=None)[0]
        if np.linalg.norm(A1 @ P - P @ M) > tol * max(1.0, np.linalg.norm(A1)):
            raise IJError("A1 does not preserve the eigenspaces of A0")
        mv, mvec = np.linalg.eig(M)
        if len(mv) and np.linalg.cond(mvec) > 1e8:
            raise IJError("A1 is not semisimple")
        sub_b, sub_sz = [], []
        for sm in sorted(_cluster(mv), key=lambda m: _root_key(np.mean(mv[m]))):
            cols.append(P @ mvec[:, sm])
            sub_b.append(complex(np.mean(mv[sm])))
            sub_sz.append(len(sm))
        a_vals.append(a)
        b_vals.append(sub_b)
        sizes.append(sub_sz)
    S = np.hstack(cols) if cols else np.zeros((0, 0), dtype=complex)
    return S, a_vals, b_vals, sizes


def _labels_for(labels, a_vals, b_vals, sizes, res_nodes):
    if labels is not None:
        data0, dims0 = labels
        ok = len(data0.J) == len(a_vals) and all(
            [dims0[nd] for nd in data0.parts[j]] == sizes[k] for k, j in enumerate(data0.J)
        ) and set(data0.I0) == set(res_nodes)
        if ok:
            names = [list(data0.parts[j]) for j in data0.J]
            return data0, dict(dims0), names
        raise IJError("supplied labels do not match the eigenstructure")
    J = tuple(f"j{k + 1}" for k in range(len(a_vals)))
    parts = {}
    names = []
    dims = {}
    counter = 0
    for k, j in enumerate(J):
        nk = []
        for sz in sizes[k]:
            counter += 1
            nd = f"v{counter}"
            nk.append(nd)
            dims[nd] = sz
        parts[j] = tuple(nk)
        names.append(nk)
    return IJData(J, parts, tuple(res_nodes)), dims, names


# completion, cycling, incompletion -------------------------------------------

def _fresh_label(taken: Iterable[str], base: str = "0") -> str:
    taken = set(taken)
    lab = base
    while lab in taken:
        lab += "'"
    return lab


def _factor(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """m = q @ p with q injective, p surjective."""
    if m.dtype == object:
        return ex.image_factorization(m)
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex), np.zeros((0, m.shape[1]), dtype=complex)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = numerical_rank(m)
    return u[:, :r], (s[:r, None] * vh[:r])


def twist_is_proper(rep: IJRep, twist: Mapping[str, object]) -> dict[str, bool]:
    """x_i is an eigenvalue of B_i, for each i in I0."""
    out = {}
    for i in rep.data.I0:
        m = ex.shift(rep.B[i], -_scalar(twist[i], rep.exact)) if rep.exact else rep.B[i] - complex(twist[i]) * np.eye(rep.rank)
        r = ex.rank(m) if m.dtype == object else numerical_rank(m)
        out[i] = r < rep.rank
    return out


def complete(rep: IJRep, twist: Mapping[str, object] | None = None, label: str | None = None) -> IJRep:
    """Pass to complete data: a new minimal part holding V_i = Im(B_i - x_i)."""
    data = rep.data
    if data.is_complete:
        return rep
    twist = twist or {}
    if set(twist) - set(data.I0):
        raise IJError("twist must be indexed by I0")
    x = {i: twist.get(i, 0) for i in data.I0}
    exact = rep.exact and all(ex.is_exact(v) for v in x.values())
    label = label or _fresh_label(data.J)
    n = rep.rank
    ps, qs, newdims = {}, {}, {}
    for i in data.I0:
        b = rep.B[i] if exact or not rep.exact else rep.B[i]
        if rep.exact and not exact:
            b = ex.to_complex_array(b)
        m = ex.shift(b, -_scalar(x[i], exact)) if exact else b - complex(x[i]) * np.eye(n)
        q, p = _factor(m)
        qs[i], ps[i] = q, p
        newdims[i] = q.shape[1]
    w0 = sum(newdims.values())
    alpha_old = rep.alpha if (exact or not rep.exact) else ex.to_complex_array(rep.alpha)
    big = _zeros_like(exact, w0 + n, w0 + n)
    pos = 0
    for i in data.I0:
        d = newdims[i]
        big[pos:pos + d, w0:] = ps[i]
        big[w0:, pos:pos + d] = qs[i]
        pos += d
    big[w0:, w0:] = alpha_old
    parts = {label: data.I0}
    parts.update(data.parts)
    new_data = IJData((label,) + data.J, parts, ())
    dims = dict(newdims)
    dims.update(rep.dims)
    proper = twist_is_proper(rep, x)
    log.debug("completion twist proper: %s", proper)
    return IJRep(new_data, dims, big, {})


def incomplete(rep: IJRep, twist: Mapping[str, object] | None = None) -> IJRep:
    """Left inverse of :func:`complete`: strip the minimal part."""
    data = rep.data
    if not data.is_complete:
        raise IJError("incomplete() needs complete data")
    if len(data.J) < 2:
        raise IJError("need at least two parts to strip the minimal one")
    r0 = data.J[0]
    I0 = data.parts[r0]
    twist = twist or {}
    if set(twist) - set(I0):
        raise IJError("twist must be indexed by the minimal part")
    x = {i: twist.get(i, 0) for i in I0}
    exact = rep.exact and all(ex.is_exact(v) for v in x.values())
    alpha = rep.alpha if (exact or not rep.exact) else ex.to_complex_array(rep.alpha)
    w0 = rep.part_dim(r0)
    Bs = {}
    for i in I0:
        s = rep.node_slice(i)
        p = alpha[s, w0:]
        q = alpha[w0:, s]
        m = _mm(q, p)
        Bs[i] = ex.shift(m, _scalar(x[i], exact)) if exact else m + complex(x[i]) * np.eye(m.shape[0])
    parts = {j: data.parts[j] for j in data.J[1:]}
    new_data = IJData(data.J[1:], parts, I0)
    dims = {k: v for k, v in rep.dims.items() if k not in I0}
    return IJRep(new_data, dims, alpha[w0:, w0:].copy(), Bs)


def cycle(rep: IJRep) -> IJRep:
    """Move the minimal part to the end, negating the blocks alpha_{j0}."""
    data = rep.data
    if not data.is_complete:
        raise IJError("cycle() needs complete data")
    r0 = data.J[0]
    w0 = rep.part_dim(r0)
    n = rep.rank
    perm = list(range(w0, n)) + list(range(w0))
    a = rep.alpha[np.ix_(perm, perm)].copy()
    # columns of the old W_0 are now last; negate alpha_{j0} (rows of V)
    tail = n - w0
    a[:tail, tail:] = _neg(a[:tail, tail:])
    new_data = IJData(data.J[1:] + (r0,), dict(data.parts), ())
    return IJRep(new_data, dict(rep.dims), a, {})


def check_B(rep: IJRep, i: str) -> np.ndarray:
    """The End(V_i) component of -sum_{h<j} a_jh a_hj + sum_{h>j} a_jh a_hj."""
    data = rep.data
    if not data.is_complete:
        raise IJError("check_B needs complete data")
    if i not in data.central_nodes:
        raise IJError(f"node {i!r} is not a node of the parts")
    j = data.part_of(i)
    kj = data.J.index(j)
    offs = rep.offsets()
    a0, _ = offs[("part", j)]
    ni = slice(offs[i][0], offs[i][1])
    rows = rep.alpha[ni, :]  # V_i rows of alpha: components alpha_{j h} restricted
    di = rep.dims[i]
    total = None
    for kh, h in enumerate(data.J):
        if h == j:
            continue
        sh = rep.part_slice(h)
        term = _mm(rows[:, sh], rep.alpha[sh, ni])
        if kh < kj:
            term = _neg(term)
        total = term if total is None else total + term
    if total is None:
        total = _zeros_like(rep.exact, di, di)
    return total


# quiver point ---------------------------------------------------------------

def _root_key(x):
    if isinstance(x, CQ):
        return (float(x.re), float(x.im))
    c = complex(x)
    return (c.real, c.imag)


def minimal_polynomial_roots(m: np.ndarray, candidates: Sequence = (), tol: float = SNAP_TOL) -> list:
    """Roots of the minimal polynomial with multiplicity, sorted by (re, im).

    Numeric eigenvalues within ``tol`` of a candidate are replaced by it.
    """
    mc = ex.to_complex_array(m) if m.dtype == object else np.asarray(m, dtype=complex)
    n = mc.shape[0]
    if n == 0:
        return []
    vals = np.linalg.eigvals(mc)
    scale = max(1.0, float(np.linalg.norm(mc, 2)))
    candidates = list(candidates)
    if m.dtype == object:
        candidates += _exact_eigenvalue_guesses(m, vals)
    out = []
    for members in _cluster(vals, tol=1e-6):
        v = complex(np.mean(vals[members]))
        snapped = None
        for c in candidates:
            if abs(complex(c) - v) <= tol * max(1.0, abs(v)):
                snapped = c
                break
        x = snapped if snapped is not None else v
        mult = len(members)
        shifted = mc - complex(x) * np.eye(n)
        # index: smallest k with rank((m - x)^k) == n - mult
        power = np.eye(n, dtype=complex)
        k = 0
        while k < mult:
            power = shifted @ power
            k += 1
            if numerical_rank(power, scale ** k, rtol=1e-7) <= n - mult:
                break
        out.extend([x] * k)
    if not all(isinstance(x, CQ) for x in out):
        out = [complex(x) for x in out]
    out.sort(key=_root_key)
    return out


def _exact_eigenvalue_guesses(m: np.ndarray, vals: np.ndarray, max_den: int = 1000) -> list[CQ]:
    """Gaussian rationals near the numeric eigenvalues that are exact eigenvalues of m."""
    out: list[CQ] = []
    for v in vals:
        x = CQ(Fraction(v.real).limit_denominator(max_den), Fraction(v.imag).limit_denominator(max_den))
        if x not in out and ex.rank(ex.shift(m, -x)) < m.shape[0]:
            out.append(x)
    return out


@dataclass
class QuiverPoint:
    quiver: Quiver
    dims: dict[str, int]
    params: dict[str, object]
    rep: QuiverRep
    roots: dict[str, list]
    centre: tuple[str, ...]

    def moment_residuals(self) -> dict[str, float]:
        from .quiver_rep import moment_map

        mu = moment_map(self.rep)
        out = {}
        for n, m in mu.values.items():
            if m.size:
                out[n] = float(np.linalg.norm(m - complex(self.params[n]) * np.eye(m.shape[0])))
            else:
                out[n] = 0.0
        return out


def central_quiver(data: IJData) -> Quiver:
    return complete_k_partite_quiver([data.parts[j] for j in data.J])


def central_rep(rep: IJRep) -> QuiverRep:
    """alpha as a rep of the doubled complete k-partite quiver."""
    data = rep.data
    if not data.is_complete:
        raise IJError("central_rep needs complete data")
    q = central_quiver(data)
    alpha = ex.to_complex_array(rep.alpha)
    offs = rep.offsets()
    phi, phs = {}, {}
    for e in q.arrow_list():
        t, h, _ = e
        st, sh = slice(*offs[t]), slice(*offs[h])
        phi[e] = alpha[sh, st]
        phs[e] = alpha[st, sh]
    return QuiverRep(q, dict(rep.dims), phi, phs)


def to_quiver_point(rep: IJRep, orderings: Mapping[str, Sequence] | None = None,
                    exact_values: Sequence = (), rtol: float = 1e-8) -> QuiverPoint:
    """Centre quiver plus one leg per node built from check_B, as a point of
    mu^{-1}(lambda) with lambda_{i0} = -x_{i1}, lambda_{ij} = x_{ij} - x_{i(j+1)}."""
    data = rep.data
    if not data.is_complete:
        raise IJError("to_quiver_point needs complete data")
    orderings = dict(orderings or {})
    q = central_quiver(data)
    base = central_rep(rep)
    dims = dict(rep.dims)
    params: dict[str, object] = {}
    roots_used: dict[str, list] = {}
    phi, phs = dict(base.phi), dict(base.phi_star)
    for i in data.central_nodes:
        bc = check_B(rep, i)
        bcc = ex.to_complex_array(bc) if bc.dtype == object else bc
        if i in orderings:
            roots = list(orderings[i])
        elif dims[i] == 0:
            roots = [ZERO]
        else:
            roots = minimal_polynomial_roots(bc, exact_values)
        if not roots:
            raise IJError(f"no roots for node {i!r}")
        try:
            leg = leg_from_matrix(bcc, roots, rtol=rtol) if dims[i] else None
        except RepError as err:
            raise IJError(f"ordering for node {i!r} does not annihilate check_B: {err}") from err
        length = len(roots) - 1
        q = attach_leg(q, i, length)
        params[i] = -roots[0]
        for j in range(1, length + 1):
            nd = leg_node(i, j)
            params[nd] = roots[j - 1] - roots[j]
            if leg is not None:
                dims[nd] = leg.dims[j]
                e = (nd, i if j == 1 else leg_node(i, j - 1), 0)
                phi[e] = leg.q[j - 1]
                phs[e] = leg.p[j - 1]
            else:
                dims[nd] = 0
                e = (nd, i if j == 1 else leg_node(i, j - 1), 0)
                phi[e] = np.zeros((0, 0), dtype=complex)
                phs[e] = np.zeros((0, 0), dtype=complex)
        roots_used[i] = roots
    if not all(isinstance(x, CQ) for x in params.values()):
        params = {n: complex(x) for n, x in params.items()}
    qrep = QuiverRep(q, dims, phi, phs)
    return QuiverPoint(q, dims, params, qrep, roots_used, tuple(data.central_nodes))


# readings -------------------------------------------------------------------

@dataclass(frozen=True)
class ReadingReport:
    removed_part: str | None
    bundle_rank: int
    simple_pole_count: int
    pole_orders: tuple[int, ...]
    roles: tuple[tuple[str, str], ...]
    order_at_infinity: int

    def as_dict(self) -> dict:
        return {
            "removed_part": self.removed_part,
            "bundle_rank": self.bundle_rank,
            "simple_poles": self.simple_pole_count,
            "pole_orders": list(self.pole_orders),
            "order_at_infinity": self.order_at_infinity,
            "roles": {n: r for n, r in self.roles},
        }


def _order_for(parts: list[list[str]]) -> int:
    if len(parts) >= 2:
        return 3
    if len(parts[0]) >= 2:
        return 2
    return 1


def enumerate_readings(data_or_parts, dims: Mapping[str, int]) -> list[ReadingReport]:
    """The principal reading plus one reading per removable part."""
    if isinstance(data_or_parts, IJData):
        data = data_or_parts
    else:
        data = IJData.from_parts(data_or_parts)
    if not data.is_complete:
        raise IJError("readings need complete data")
    parts = [list(data.parts[j]) for j in data.J]
    for n in data.central_nodes:
        if n not in dims:
            raise IJError(f"missing dimension for node {n!r}")
    total = sum(dims[n] for n in data.central_nodes)
    out = []
    order = _order_for(parts)
    roles = tuple((n, f"eigenspace of A1 in W_{j}") for j in data.J for n in data.parts[j])
    out.append(ReadingReport(None, total, 0, (order,), roles, order))
    if len(data.J) >= 2:
        for j in data.J:
            rest = [list(data.parts[h]) for h in data.J if h != j]
            o = _order_for(rest)
            npoles = len(data.parts[j])
            rank = total - sum(dims[n] for n in data.parts[j])
            rl = tuple((n, "simple pole" if h == j else f"eigenspace of A1 in W_{h}")
                       for h in data.J for n in data.parts[h])
            orders = tuple(sorted([o] + [1] * npoles, reverse=True))
            out.append(ReadingReport(j, rank, npoles, orders, rl, o))
    return out


# stability ------------------------------------------------------------------

def inner_maps(rep: IJRep, i: str) -> tuple[np.ndarray, np.ndarray]:
    """p_i : V^(j) -> V_i and q_i : V_i -> V^(j) for i in I_j."""
    j = rep.data.part_of(i)
    sj = rep.part_slice(j)
    others = [k for k in range(rep.rank) if not (sj.start <= k < sj.stop)]
    ni = rep.node_slice(i)
    a = ex.to_complex_array(rep.alpha)
    return a[ni, :][:, others], a[others, :][:, ni]


def is_stable_ijrep(rep: IJRep, trials: int = 8, seed: int = 0,
                    twist: Mapping[str, object] | None = None) -> bool:
    r = rep if rep.data.is_complete else complete(rep, twist)
    stable = is_stable(central_rep(r), trials, seed)
    if stable:
        for i in r.data.central_nodes:
            if not r.dims[i]:
                continue
            p, q = inner_maps(r, i)
            if numerical_rank(p) < r.dims[i] or numerical_rank(q) < r.dims[i]:
                raise InconsistencyError(f"stable rep with non-surjective p or non-injective q at {i!r}")
    return stable


# random instances -----------------------------------------------------------

def random_ijrep(data: IJData, dims: Mapping[str, int], seed: int, exact: bool = True,
                 bound: int = 3) -> IJRep:
    """Random representation; exact entries are Gaussian integers in [-bound, bound]."""
    rng = np.random.default_rng(seed)
    n = sum(dims[nd] for nd in data.central_nodes)
    tmp = IJRep(data, dict(dims), ex.zeros(n, n, exact), {i: ex.zeros(n, n, exact) for i in data.I0})

    def draw(m, k):
        if exact:
            re = rng.integers(-bound, bound + 1, size=(m, k))
            im = rng.integers(-bound, bound + 1, size=(m, k))
            out = np.empty((m, k), dtype=object)
            for idx in np.ndindex(m, k):
                out[idx] = CQ(int(re[idx]), int(im[idx]))
            return out
        return (rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))) / np.sqrt(2)

    alpha = tmp.alpha
    for i in data.J:
        for j in data.J:
            if i != j:
                si, sj = tmp.part_slice(i), tmp.part_slice(j)
                alpha[si, sj] = draw(si.stop - si.start, sj.stop - sj.start)
    Bs = {i: draw(n, n) for i in data.I0}
    return IJRep(data, dict(dims), alpha, Bs)
