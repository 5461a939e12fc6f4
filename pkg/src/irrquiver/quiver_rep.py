"""Numeric representations of doubled quivers.

For an arrow ``e = (t, h, k)`` the rep stores ``phi[e]`` of shape
``dims[h] x dims[t]`` and ``phi_star[e]`` of shape ``dims[t] x dims[h]``.
The moment map at node i is

    mu_i = sum_{h(e)=i} phi_e phi_e*  -  sum_{t(e)=i} phi_e* phi_e.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .exact import ZERO
from .graph_core import Quiver, leg_node, path_graph
from .root_system import dual_reflection, simple_reflection

Arrow = tuple[str, str, int]

RANK_RTOL = 1e-9


class RepError(ValueError):
    pass


class ReflectionUndefined(RepError):
    pass


def numerical_rank(m: np.ndarray, scale: float | None = None, rtol: float = RANK_RTOL) -> int:
    """Singular values above ``rtol * scale`` (``scale`` defaults to sigma_max)."""
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    ref = s[0] if scale is None else max(scale, s[0]) if scale else s[0]
    if ref == 0:
        return 0
    return int(np.sum(s > rtol * ref))


def orth(m: np.ndarray, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the column space."""
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = numerical_rank(m, scale)
    return u[:, :r]


def null_space(m: np.ndarray, scale: float | None = None) -> np.ndarray:
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    r = numerical_rank(m, scale)
    return vh[r:].conj().T


@dataclass
class QuiverRep:
    quiver: Quiver
    dims: dict[str, int]
    phi: dict[Arrow, np.ndarray]
    phi_star: dict[Arrow, np.ndarray]

    def __post_init__(self):
        if set(self.dims) != set(self.quiver.nodes):
            raise RepError("dims must be indexed by the quiver's nodes")
        if any(d < 0 for d in self.dims.values()):
            raise RepError("negative dimension")
        arrows = self.quiver.arrow_list()
        if set(self.phi) != set(arrows) or set(self.phi_star) != set(arrows):
            raise RepError("every arrow of the doubled quiver needs a matrix")
        for e in arrows:
            t, h, _ = e
            self.phi[e] = np.asarray(self.phi[e], dtype=complex).reshape(self.dims[h], self.dims[t])
            self.phi_star[e] = np.asarray(self.phi_star[e], dtype=complex).reshape(self.dims[t], self.dims[h])

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def arrows(self) -> list[Arrow]:
        return self.quiver.arrow_list()

    def max_norm(self) -> float:
        norms = [np.linalg.norm(m, 2) for m in list(self.phi.values()) + list(self.phi_star.values()) if m.size]
        return max(norms, default=0.0)

    def copy(self) -> "QuiverRep":
        return QuiverRep(self.quiver, dict(self.dims),
                         {e: m.copy() for e, m in self.phi.items()},
                         {e: m.copy() for e, m in self.phi_star.items()})

    def transpose(self) -> "QuiverRep":
        """The dual rep: every map transposed (arrows reversed in effect)."""
        return QuiverRep(self.quiver, dict(self.dims),
                         {e: self.phi_star[e].T.copy() for e in self.arrows()},
                         {e: self.phi[e].T.copy() for e in self.arrows()})

    def act(self, g: Mapping[str, np.ndarray]) -> "QuiverRep":
        """Base change by block-diagonal g: phi -> g_h phi g_t^{-1}."""
        inv = {n: np.linalg.inv(m) if m.size else m for n, m in g.items()}
        phi, phs = {}, {}
        for e in self.arrows():
            t, h, _ = e
            phi[e] = g[h] @ self.phi[e] @ inv[t]
            phs[e] = g[t] @ self.phi_star[e] @ inv[h]
        return QuiverRep(self.quiver, dict(self.dims), phi, phs)

    def path_maps(self) -> list[tuple[str, str, np.ndarray]]:
        """All doubled-arrow maps as (source, target, matrix)."""
        out = []
        for e in self.arrows():
            t, h, _ = e
            out.append((t, h, self.phi[e]))
            out.append((h, t, self.phi_star[e]))
        return out


@dataclass
class MomentValue:
    values: dict[str, np.ndarray]

    def trace_sum(self) -> complex:
        return complex(sum(np.trace(m) for m in self.values.values()))

    def residual(self, lam: Mapping[str, object]) -> float:
        """max_i || mu_i - lambda_i Id ||_F."""
        worst = 0.0
        for n, m in self.values.items():
            if m.size == 0:
                continue
            diff = m - complex(lam[n]) * np.eye(m.shape[0])
            worst = max(worst, float(np.linalg.norm(diff)))
        return worst


def moment_map(rep: QuiverRep) -> MomentValue:
    out = {n: np.zeros((d, d), dtype=complex) for n, d in rep.dims.items()}
    for e in rep.arrows():
        t, h, _ = e
        out[h] += rep.phi[e] @ rep.phi_star[e]
        out[t] -= rep.phi_star[e] @ rep.phi[e]
    return MomentValue(out)


def random_rep(q: Quiver, dims: Mapping[str, int], seed: int) -> QuiverRep:
    """Entries i.i.d. standard complex Gaussian, drawn in arrow order."""
    if any(d < 0 for d in dims.values()):
        raise RepError("negative dimension")
    rng = np.random.default_rng(seed)

    def draw(m, n):
        return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)

    phi, phs = {}, {}
    for e in q.arrow_list():
        t, h, _ = e
        phi[e] = draw(dims[h], dims[t])
        phs[e] = draw(dims[t], dims[h])
    return QuiverRep(q, dict(dims), phi, phs)


def zero_rep(q: Quiver, dims: Mapping[str, int]) -> QuiverRep:
    phi, phs = {}, {}
    for e in q.arrow_list():
        t, h, _ = e
        phi[e] = np.zeros((dims[h], dims[t]), dtype=complex)
        phs[e] = np.zeros((dims[t], dims[h]), dtype=complex)
    return QuiverRep(q, dict(dims), phi, phs)


# legs and orbits -------------------------------------------------------------

@dataclass(frozen=True)
class OrbitSpec:
    """Closure of an adjoint orbit in gl_n via a leg.

    ``roots`` x_1..x_w (the roots of an annihilating polynomial, repeated
    by multiplicity for non-semisimple orbits) and ``ranks`` d_1..d_l (l = w-1) with
    d_i = rank (A - x_1)...(A - x_i).
    """

    size: int
    roots: tuple
    ranks: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        if self.size < 0:
            raise RepError("orbit size must be nonnegative")
        if len(self.roots) < 1:
            raise RepError("an orbit needs at least one root")
        if len(self.ranks) != len(self.roots) - 1:
            raise RepError("need exactly one rank per root after the first")
        prev = self.size
        for r in self.ranks:
            if r < 1 or r > prev:
                raise RepError("ranks must be positive and weakly decreasing from the size")
            prev = r

    @property
    def leg_length(self) -> int:
        return len(self.ranks)

    def leg_dims(self) -> list[int]:
        return [self.size, *self.ranks]

    def leg_params(self) -> list:
        """[lambda_0 = -x_1, lambda_1 = x_1 - x_2, ...]."""
        x = self.roots
        return [-x[0]] + [x[j] - x[j + 1] for j in range(len(x) - 1)]

    def trace(self):
        """Trace of any element: sum_j (d_{j-1} - d_j) x_j with d_w = 0."""
        d = [self.size, *self.ranks, 0]
        total = ZERO if not any(isinstance(x, complex) for x in self.roots) else 0j
        for j, x in enumerate(self.roots):
            total = total + x * (d[j] - d[j + 1])
        return total

    def eigenvalue_multiplicities(self) -> dict:
        d = [self.size, *self.ranks, 0]
        out: dict = {}
        for j, x in enumerate(self.roots):
            out[x] = out.get(x, 0) + d[j] - d[j + 1]
        return out

    def distinct_eigenvalues(self) -> list:
        return [x for x, m in self.eigenvalue_multiplicities().items() if m]


@dataclass
class Leg:
    dims: list[int]          # (n, d_1, ..., d_l)
    params: list              # (lambda_0 = -x_1, lambda_1, ..., lambda_l)
    q: list[np.ndarray]       # q_j : V_j -> V_{j-1}, injective
    p: list[np.ndarray]       # p_j : V_{j-1} -> V_j, surjective
    bases: list[np.ndarray]   # orthonormal basis of V_j inside C^n

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def orbit(self, roots: Sequence) -> OrbitSpec:
        return OrbitSpec(self.dims[0], tuple(roots), tuple(self.dims[1:]))


def leg_from_matrix(a: np.ndarray, roots: Sequence, rtol: float = 1e-8) -> Leg:
    """Leg data of ``a`` for an ordered list of roots of a polynomial killing ``a``.

    V_j = (A - x_j) V_{j-1}, q_j the inclusion, p_j = (A - x_j) restricted.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise RepError("square matrix required")
    if len(roots) < 1:
        raise RepError("need at least one root")
    xs = [complex(x) for x in roots]
    scale = max(1.0, float(np.linalg.norm(a, 2)) if n else 0.0, max(abs(x) for x in xs))

    # annihilation check on the full product
    prod = np.eye(n, dtype=complex)
    for x in xs:
        prod = (a - x * np.eye(n)) @ prod
    if n and np.linalg.norm(prod, 2) > rtol * scale ** len(xs):
        raise RepError(f"roots do not annihilate the matrix (residual {np.linalg.norm(prod, 2):.3e})")

    bases = [np.eye(n, dtype=complex)]
    qs, ps, dims = [], [], [n]
    for j in range(len(xs) - 1):
        shifted = a - xs[j] * np.eye(n)
        u_prev = bases[-1]
        img = shifted @ u_prev
        u = orth(img, scale) if img.size else np.zeros((n, 0), dtype=complex)
        dims.append(u.shape[1])
        qs.append(u_prev.conj().T @ u)
        ps.append(u.conj().T @ shifted @ u_prev)
        bases.append(u)
    if qs:
        recon = qs[0] @ ps[0] + xs[0] * np.eye(n)
    else:
        recon = xs[0] * np.eye(n)
    if n and np.linalg.norm(recon - a, 2) > rtol * scale:
        raise RepError("leg does not reconstruct the matrix")
    params = [-roots[0]] + [roots[j] - roots[j + 1] for j in range(len(roots) - 1)]
    return Leg(dims, params, qs, ps, bases)


def leg_quiver(node: str, length: int, open_node: bool = True) -> Quiver:
    names = [node] + [leg_node(node, j) for j in range(1, length + 1)]
    g = path_graph(names)
    arrows = {(names[j + 1], names[j]): 1 for j in range(length)}
    return Quiver(g.nodes, arrows, frozenset({node}) if open_node else frozenset())


def leg_rep(node: str, leg: Leg) -> QuiverRep:
    """The leg as a rep of its doubled quiver, arrows pointing at ``node``."""
    q = leg_quiver(node, leg.length)
    names = [node] + [leg_node(node, j) for j in range(1, leg.length + 1)]
    dims = {names[j]: leg.dims[j] for j in range(len(names))}
    phi, phs = {}, {}
    for j in range(1, leg.length + 1):
        e = (names[j], names[j - 1], 0)
        phi[e] = leg.q[j - 1]
        phs[e] = leg.p[j - 1]
    return QuiverRep(q, dims, phi, phs)


# reflection functor --------------------------------------------------------

def _incident(rep: QuiverRep, i: str):
    """Arrows at i as (arrow, other end, sign, in-map, out-map).

    sign is +1 when i is the head, so that sum sign * in @ out = mu_i.
    """
    out = []
    for e in rep.arrows():
        t, h, _ = e
        if h == i:
            out.append((e, t, 1, rep.phi[e], rep.phi_star[e]))
        elif t == i:
            out.append((e, h, -1, rep.phi_star[e], rep.phi[e]))
    return out


def reflection_functor(rep: QuiverRep, lam: Mapping[str, object], i: str,
                       atol: float = 1e-8) -> tuple[QuiverRep, dict]:
    """Reflect a point of mu^{-1}(lambda) at node i (lambda_i != 0).

    With X the sum of the far ends of arrows at i, a_in : X -> V_i and
    a_out : V_i -> X satisfy a_in a_out = lambda_i.  The new space is
    ker(a_in) with a_out' the inclusion and a_in' = -lambda_i times the
    projection along im(a_out); then a_out' a_in' = a_out a_in - lambda_i
    on X, which gives moment value r_i(lambda).
    """
    if i not in rep.dims:
        raise RepError(f"unknown node {i!r}")
    li_exact = lam[i]
    if not li_exact:
        raise ReflectionUndefined(f"lambda_{i} = 0: reflection undefined")
    li = complex(li_exact)
    mu = moment_map(rep)
    scale = max(1.0, rep.max_norm() ** 2)
    res = mu.residual(lam)
    if res > atol * scale:
        raise RepError(f"rep is not in the moment fibre (residual {res:.3e})")

    inc = _incident(rep, i)
    sizes = [rep.dims[u] for _, u, _, _, _ in inc]
    offs = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    nx = int(offs[-1])
    di = rep.dims[i]
    a_in = np.zeros((di, nx), dtype=complex)
    a_out = np.zeros((nx, di), dtype=complex)
    for k, (_, _, sgn, m_in, m_out) in enumerate(inc):
        a_in[:, offs[k]:offs[k + 1]] = sgn * m_in
        a_out[offs[k]:offs[k + 1], :] = m_out

    kernel = null_space(a_in) if di else np.eye(nx, dtype=complex)
    proj = np.eye(nx) - (a_out @ a_in) / li
    new_out = kernel
    new_in = -li * (kernel.conj().T @ proj)

    newd = dict(rep.dims)
    newd[i] = kernel.shape[1]
    phi = {e: m.copy() for e, m in rep.phi.items()}
    phs = {e: m.copy() for e, m in rep.phi_star.items()}
    for k, (e, _, sgn, _, _) in enumerate(inc):
        blk_in = sgn * new_in[:, offs[k]:offs[k + 1]]
        blk_out = new_out[offs[k]:offs[k + 1], :]
        t, h, _ = e
        if h == i:
            phi[e], phs[e] = blk_in, blk_out
        else:
            phi[e], phs[e] = blk_out, blk_in
    out = QuiverRep(rep.quiver, newd, phi, phs)
    g = rep.quiver.graph
    expected = simple_reflection(g, i, rep.dims)
    if expected != newd:
        raise RepError(f"reflected dims {newd} differ from s_i(d) {expected}")
    return out, dual_reflection(g, i, lam)


def closed_walk_traces(rep: QuiverRep, max_length: int = 6, limit: int = 20000) -> dict[tuple, complex]:
    """Traces of the maps along closed walks in the doubled quiver.

    Walks are keyed by their step sequence; enumeration order is
    deterministic and stops after ``limit`` walks.
    """
    steps = []
    for e in rep.arrows():
        t, h, _ = e
        steps.append(((e, "+"), t, h, rep.phi[e]))
        steps.append(((e, "*"), h, t, rep.phi_star[e]))
    by_src: dict[str, list] = {}
    for s in steps:
        by_src.setdefault(s[1], []).append(s)
    out: dict[tuple, complex] = {}

    def walk(start, node, mat, seq):
        if len(out) >= limit:
            return
        if seq and node == start:
            out[tuple(seq)] = complex(np.trace(mat)) if mat.size else 0j
        if len(seq) == max_length:
            return
        for key, _, tgt, m in by_src.get(node, []):
            walk(start, tgt, m @ mat, seq + [key])

    for n in rep.quiver.nodes:
        if rep.dims[n]:
            walk(n, n, np.eye(rep.dims[n], dtype=complex), [])
    return out


# stability -----------------------------------------------------------------

def _closure(rep: QuiverRep, node: str, v: np.ndarray, scale: float) -> int:
    """Dimension of the submodule generated by v in V_node."""
    maps = rep.path_maps()
    bases: dict[str, np.ndarray] = {n: np.zeros((d, 0), dtype=complex) for n, d in rep.dims.items()}
    queue = []

    def add(n, w):
        b = bases[n]
        r = w - b @ (b.conj().T @ w) if b.shape[1] else w.copy()
        nr = np.linalg.norm(r)
        if nr > 1e-9 * max(scale, np.linalg.norm(w)) and nr > 1e-12:
            bases[n] = np.hstack([b, (r / nr).reshape(-1, 1)])
            queue.append((n, r / nr))

    add(node, v)
    while queue:
        n, w = queue.pop()
        for src, tgt, m in maps:
            if src == n and m.size:
                add(tgt, m @ w)
    return sum(b.shape[1] for b in bases.values())


def _generates_all(rep: QuiverRep, i: str, scale: float) -> bool:
    """Burnside on the left ideal: do paths from i span Hom(V_i, V)?"""
    di = rep.dims[i]
    n_total = rep.total_dim
    maps = rep.path_maps()
    bases = {n: np.zeros((d * di, 0), dtype=complex) for n, d in rep.dims.items()}
    queue = []

    def add(n, mat):
        w = mat.reshape(-1)
        b = bases[n]
        r = w - b @ (b.conj().T @ w) if b.shape[1] else w.copy()
        nr = np.linalg.norm(r)
        if nr > 1e-9 * max(1.0, np.linalg.norm(w)) and nr > 1e-12:
            # re-orthogonalize once for stability
            if b.shape[1]:
                r = r - b @ (b.conj().T @ r)
                nr = np.linalg.norm(r)
            bases[n] = np.hstack([b, (r / nr).reshape(-1, 1)])
            queue.append((n, (r / nr).reshape(rep.dims[n], di)))

    add(i, np.eye(di, dtype=complex))
    while queue:
        n, w = queue.pop()
        for src, tgt, m in maps:
            if src == n and m.size:
                add(tgt, m @ w)
        got = sum(b.shape[1] for b in bases.values())
        if got == di * n_total:
            return True
    return sum(b.shape[1] for b in bases.values()) == di * n_total


def is_stable(rep: QuiverRep, trials: int = 8, seed: int = 0) -> bool:
    """Is the rep a simple module over the doubled quiver's path algebra?

    Random single-node vectors whose generated submodule is proper (in the
    rep or its transpose) give a quick negative.  The decision itself uses
    Burnside: the rep is simple iff the image of the path algebra is all of
    End(V), checked one node at a time as paths-from-i spanning Hom(V_i, V).
    """
    n_total = rep.total_dim
    if n_total == 0:
        return False
    scale = max(1.0, rep.max_norm())
    live = [n for n in rep.quiver.nodes if rep.dims[n]]
    if trials > 0:
        rng = np.random.default_rng(seed)
        for k in range(trials):
            node = live[k % len(live)]
            d = rep.dims[node]
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            if _closure(rep, node, v, scale) < n_total:
                return False
            if _closure(rep.transpose(), node, v, scale) < n_total:
                return False
    return all(_generates_all(rep, i, scale) for i in live)
