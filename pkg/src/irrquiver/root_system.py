"""Kac-Moody root system of a loop-free graph.

Dimension vectors are dicts ``node -> int`` and parameter vectors are dicts
``node -> CQ``; both are keyed by exactly the graph's nodes.  Weyl words
are sequences of node ids acting right to left: ``[a, b, c]`` means
``s_a s_b s_c``, so ``s_c`` is applied first.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .exact import CQ, ZERO
from .graph_core import Graph, GraphLike, Quiver

DimVector = dict[str, int]
ParamVector = dict[str, CQ]


class RootError(ValueError):
    pass


def _graph(g: GraphLike) -> Graph:
    return g.graph if isinstance(g, Quiver) else g


def _check_keys(g: Graph, v: Mapping, what: str = "vector") -> None:
    if set(v) != set(g.nodes):
        missing = sorted(set(g.nodes) - set(v))
        extra = sorted(set(v) - set(g.nodes))
        raise RootError(f"{what} index mismatch (missing {missing}, unexpected {extra})")


def _check_node(g: Graph, i: str) -> None:
    if i not in g.nodes:
        raise RootError(f"unknown node {i!r}")


def cartan_matrix(g: GraphLike) -> np.ndarray:
    g = _graph(g)
    return 2 * np.eye(len(g.nodes), dtype=np.int64) - g.adjacency_matrix()


def simple_root(g: GraphLike, i: str) -> DimVector:
    g = _graph(g)
    _check_node(g, i)
    return {n: int(n == i) for n in g.nodes}


def form_with_simple(g: Graph, i: str, beta: Mapping[str, int]) -> int:
    """(eps_i, beta) = 2 beta_i - sum_j A_ij beta_j."""
    total = 2 * beta[i]
    for j in g.nodes:
        m = g.multiplicity(i, j)
        if m:
            total -= m * beta[j]
    return total


def bilinear_form(g: GraphLike, beta: Mapping[str, int], gamma: Mapping[str, int]) -> int:
    g = _graph(g)
    _check_keys(g, beta)
    _check_keys(g, gamma)
    return sum(beta[i] * form_with_simple(g, i, gamma) for i in g.nodes)


def delta(g: GraphLike, v: Mapping[str, int]) -> int:
    """Expected quiver variety dimension 2 - (v, v)."""
    return 2 - bilinear_form(g, v, v)


def pairing(beta: Mapping[str, int], lam: Mapping[str, object]):
    """beta . lambda = sum_i beta_i lambda_i (exact when lambda is)."""
    total = ZERO
    for i, b in beta.items():
        if b:
            total = total + lam[i] * b
    return total


def simple_reflection(g: GraphLike, i: str, beta: Mapping[str, int]) -> DimVector:
    g = _graph(g)
    _check_node(g, i)
    _check_keys(g, beta)
    out = dict(beta)
    out[i] = beta[i] - form_with_simple(g, i, beta)
    return out


def dual_root(g: GraphLike, i: str) -> dict[str, int]:
    """alpha_i = sum_j (eps_i, eps_j) eps_j, i.e. row i of the Cartan matrix."""
    g = _graph(g)
    _check_node(g, i)
    return {j: (2 if j == i else -g.multiplicity(i, j)) for j in g.nodes}


def dual_reflection(g: GraphLike, i: str, lam: Mapping[str, object]) -> ParamVector:
    """r_i(lambda) = lambda - lambda_i alpha_i."""
    g = _graph(g)
    _check_node(g, i)
    _check_keys(g, lam, "parameter vector")
    li = lam[i]
    if not li:
        return dict(lam)
    alpha = dual_root(g, i)
    return {j: lam[j] - li * alpha[j] if alpha[j] else lam[j] for j in g.nodes}


class WeylAction(NamedTuple):
    dims: DimVector
    params: ParamVector | None
    degenerate_steps: list[str]  # nodes reflected while lambda_i was zero


def apply_weyl_word(g: GraphLike, word: Sequence[str], beta: Mapping[str, int],
                    lam: Mapping[str, object] | None = None) -> WeylAction:
    """Act by s_{w1} ... s_{wn} on beta and r_{w1} ... r_{wn} on lambda."""
    g = _graph(g)
    _check_keys(g, beta)
    b = dict(beta)
    lm = dict(lam) if lam is not None else None
    if lm is not None:
        _check_keys(g, lm, "parameter vector")
    flagged = []
    for i in reversed(list(word)):
        b = simple_reflection(g, i, b)
        if lm is not None:
            if not lm[i]:
                flagged.append(i)
            lm = dual_reflection(g, i, lm)
    return WeylAction(b, lm, flagged)


def support(beta: Mapping[str, int]) -> list[str]:
    return [i for i, b in beta.items() if b]


def in_fundamental_region(g: GraphLike, beta: Mapping[str, int]) -> bool:
    g = _graph(g)
    _check_keys(g, beta)
    if any(b < 0 for b in beta.values()) or not any(beta.values()):
        return False
    if not g.is_connected(support(beta)):
        return False
    return all(form_with_simple(g, i, beta) <= 0 for i in g.nodes)


class RootKind(enum.Enum):
    NOT_A_ROOT = "NotARoot"
    REAL_POSITIVE = "RealPositive"
    REAL_NEGATIVE = "RealNegative"
    IMAGINARY_POSITIVE = "ImaginaryPositive"
    IMAGINARY_NEGATIVE = "ImaginaryNegative"

    @property
    def is_root(self) -> bool:
        return self is not RootKind.NOT_A_ROOT

    @property
    def is_positive(self) -> bool:
        return self in (RootKind.REAL_POSITIVE, RootKind.IMAGINARY_POSITIVE)

    @property
    def is_real(self) -> bool:
        return self in (RootKind.REAL_POSITIVE, RootKind.REAL_NEGATIVE)

    @property
    def is_imaginary(self) -> bool:
        return self in (RootKind.IMAGINARY_POSITIVE, RootKind.IMAGINARY_NEGATIVE)

    def flipped(self) -> "RootKind":
        return _FLIP[self]


_FLIP = {
    RootKind.NOT_A_ROOT: RootKind.NOT_A_ROOT,
    RootKind.REAL_POSITIVE: RootKind.REAL_NEGATIVE,
    RootKind.REAL_NEGATIVE: RootKind.REAL_POSITIVE,
    RootKind.IMAGINARY_POSITIVE: RootKind.IMAGINARY_NEGATIVE,
    RootKind.IMAGINARY_NEGATIVE: RootKind.IMAGINARY_POSITIVE,
}


@dataclass(frozen=True)
class RootClass:
    kind: RootKind
    witness: tuple[str, ...]  # Weyl word (right-to-left) reaching the target
    target: tuple[tuple[str, int], ...]  # where the witness lands (last vector reached)

    @property
    def is_root(self) -> bool:
        return self.kind.is_root

    @property
    def is_positive_root(self) -> bool:
        return self.kind.is_positive


def classify_root(g: GraphLike, beta: Mapping[str, int]) -> RootClass:
    """Decide whether beta is a root by descending the height.

    For beta >= 0: while beta is neither simple nor in the fundamental
    region, reflect at the first node (in node order) with (eps_i, beta) > 0.
    Each such reflection lowers coordinate i, so the loop terminates.
    """
    g = _graph(g)
    _check_keys(g, beta)
    vals = list(beta.values())
    if not any(vals):
        return RootClass(RootKind.NOT_A_ROOT, (), tuple(sorted(beta.items())))
    if any(v < 0 for v in vals) and any(v > 0 for v in vals):
        return RootClass(RootKind.NOT_A_ROOT, (), tuple(beta.items()))
    if all(v <= 0 for v in vals):
        pos = classify_root(g, {i: -v for i, v in beta.items()})
        return RootClass(pos.kind.flipped(), pos.witness,
                         tuple((i, -v) for i, v in pos.target))

    b = dict(beta)
    applied: list[str] = []
    while True:
        nz = support(b)
        if len(nz) == 1 and b[nz[0]] == 1:
            return _result(RootKind.REAL_POSITIVE, applied, b, g)
        if in_fundamental_region(g, b):
            return _result(RootKind.IMAGINARY_POSITIVE, applied, b, g)
        step = next((i for i in g.nodes if form_with_simple(g, i, b) > 0), None)
        if step is None:
            # all (eps_i, b) <= 0 but support disconnected (or a multiple of a
            # simple root): not a root
            return _result(RootKind.NOT_A_ROOT, applied, b, g)
        b = simple_reflection(g, step, b)
        applied.append(step)
        if any(v < 0 for v in b.values()):
            return _result(RootKind.NOT_A_ROOT, applied, b, g)


def _result(kind: RootKind, applied: list[str], b: Mapping[str, int], g: Graph) -> RootClass:
    return RootClass(kind, tuple(reversed(applied)), tuple((n, b[n]) for n in g.nodes))


def is_positive_root(g: GraphLike, beta: Mapping[str, int]) -> bool:
    return classify_root(g, beta).kind.is_positive


def enumerate_positive_roots_bounded(g: GraphLike, bound: Mapping[str, int],
                                     max_candidates: int | None = 2_000_000) -> list[DimVector]:
    """All positive roots beta <= bound, ordered by height then coordinates."""
    g = _graph(g)
    _check_keys(g, bound)
    if any(b < 0 for b in bound.values()):
        raise RootError("bound must be nonnegative")
    nodes = list(g.nodes)
    count = 1
    for n in nodes:
        count *= bound[n] + 1
    if max_candidates is not None and count > max_candidates:
        raise ResourceLimitError(f"{count} candidate vectors exceed the bound {max_candidates}")
    out = []
    for coords in itertools.product(*(range(bound[n] + 1) for n in nodes)):
        if not any(coords):
            continue
        beta = dict(zip(nodes, coords))
        if classify_root(g, beta).kind.is_positive:
            out.append(beta)
    out.sort(key=lambda v: (sum(v.values()), tuple(v[n] for n in nodes)))
    return out


class ResourceLimitError(RuntimeError):
    pass


def lattice_translation(g: GraphLike, d: Mapping[str, int], lam: Mapping[str, object],
                        t: Mapping[str, int]) -> ParamVector:
    """lambda + t for t in the lattice {t in Z^I : t.d = 0}."""
    g = _graph(g)
    _check_keys(g, d)
    _check_keys(g, lam, "parameter vector")
    _check_keys(g, t, "translation")
    if sum(t[i] * d[i] for i in g.nodes) != 0:
        raise RootError("translation must satisfy t.d = 0")
    return {i: CQ.coerce(lam[i]) + t[i] if not isinstance(lam[i], complex) else lam[i] + t[i] for i in g.nodes}


def zero_params(g: GraphLike) -> ParamVector:
    return {n: ZERO for n in _graph(g).nodes}
