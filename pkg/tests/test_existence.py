from __future__ import annotations

import itertools
import warnings
from fractions import Fraction

import numpy as np
import pytest

from irrquiver.exact import CQ
from irrquiver.existence import (
    ConnectionSpec,
    NodeSpec,
    PartSpec,
    ResonanceWarning,
    SimplePoleSpec,
    connection_quiver,
    decompositions,
    exists_stable_connection,
    has_stable,
    nonempty,
)
from irrquiver.graph_core import Graph
from irrquiver.quiver_rep import OrbitSpec
from irrquiver.root_system import ResourceLimitError, classify_root, delta, pairing


def v(g, *xs):
    return dict(zip(g.nodes, xs))


def lam_of(g, *xs):
    return {n: CQ(x) for n, x in zip(g.nodes, xs)}


def _brute_decompositions(g, d, lam):
    """Every multiset of lambda-orthogonal positive roots summing to d, by
    scanning all vectors below d (independent of the library enumerator)."""
    nodes = list(g.nodes)
    target = tuple(d[n] for n in nodes)
    cands = []
    for c in itertools.product(*(range(x + 1) for x in target)):
        if any(c):
            vec = dict(zip(nodes, c))
            if classify_root(g, vec).kind.is_positive and pairing(vec, lam) == 0:
                cands.append(c)
    found = set()

    def rec(rem, start, acc):
        if not any(rem):
            found.add(tuple(sorted(acc)))
            return
        for k in range(start, len(cands)):
            nxt = tuple(a - b for a, b in zip(rem, cands[k]))
            if min(nxt) >= 0:
                rec(nxt, k, acc + [cands[k]])

    rec(target, 0, [])
    return found


def _canon(decomp, nodes):
    return tuple(sorted(tuple(b[n] for n in nodes) for b in decomp))


def test_triangle_delta_nonempty(triangle):
    verdict = nonempty(triangle, v(triangle, 1, 1, 1), lam_of(triangle, 1, -1, 0))
    assert verdict.nonempty
    for b in verdict.nonempty_witness:
        assert classify_root(triangle, b).kind.is_positive and pairing(b, lam_of(triangle, 1, -1, 0)) == 0
    assert sum(b["1"] for b in verdict.nonempty_witness) == 1


def test_simple_root_nonempty(a2pp):
    d = {n: int(n == "3") for n in a2pp.nodes}
    verdict = nonempty(a2pp, d, {n: CQ(0) for n in a2pp.nodes})
    assert verdict.nonempty and verdict.nonempty_witness == [d]


def test_constraint_violation_empty(triangle):
    verdict = nonempty(triangle, v(triangle, 1, 1, 0), lam_of(triangle, 1, 0, -1))
    assert verdict.nonempty is False and "lambda.d" in verdict.reason


def test_triangle_2delta_zero_lambda_unstable(triangle):
    verdict = has_stable(triangle, v(triangle, 2, 2, 2), lam_of(triangle, 0, 0, 0))
    assert verdict.stable is False
    assert verdict.violation == [v(triangle, 1, 1, 1), v(triangle, 1, 1, 1)]
    assert sum(delta(triangle, b) for b in verdict.violation) == 4 > delta(triangle, v(triangle, 2, 2, 2))


def test_triangle_delta_generic_stable(triangle):
    verdict = has_stable(triangle, v(triangle, 1, 1, 1), lam_of(triangle, 1, 2, -3))
    assert verdict.stable and verdict.nonempty


def test_indivisible_imaginary_root_generic(a2pp):
    lam = {"1": CQ(1, 1), "2": CQ(2, -1), "3": CQ(-3, 5), "4": None}
    d = v(a2pp, 1, 2, 2, 1)
    lam["4"] = -(lam["1"] * 1 + lam["2"] * 2 + lam["3"] * 2)
    assert has_stable(a2pp, d, lam).stable


def test_not_a_root_unstable(triangle):
    g = Graph(("a", "b"), {})
    verdict = has_stable(g, {"a": 1, "b": 1}, {"a": CQ(0), "b": CQ(0)})
    assert verdict.stable is False and "not a positive root" in verdict.reason


def test_stable_implies_nonempty(triangle):
    for d in itertools.product(range(3), repeat=3):
        if not any(d):
            continue
        verdict = has_stable(triangle, v(triangle, *d), lam_of(triangle, 0, 0, 0))
        if verdict.stable:
            assert verdict.nonempty


@pytest.mark.parametrize("d,lam", [
    ((2, 2, 2), (0, 0, 0)),
    ((2, 1, 1), (0, 0, 0)),
    ((1, 2, 2), (2, -1, 0)),
    ((2, 2, 1), (1, -1, 0)),
])
def test_decompositions_match_brute_force(triangle, d, lam):
    dv, lv = v(triangle, *d), lam_of(triangle, *lam)
    ours = {_canon(x, triangle.nodes) for x in decompositions(triangle, dv, lv)}
    assert ours == _brute_decompositions(triangle, dv, lv)


def test_decompositions_a2pp_brute_force(a2pp):
    dv, lv = v(a2pp, 1, 2, 2, 1), lam_of(a2pp, 0, 0, 0, 0)
    ours = {_canon(x, a2pp.nodes) for x in decompositions(a2pp, dv, lv)}
    assert ours == _brute_decompositions(a2pp, dv, lv)


def test_resource_guard(triangle):
    with pytest.raises(ResourceLimitError):
        has_stable(triangle, v(triangle, 4, 4, 4), lam_of(triangle, 0, 0, 0), max_states=5)


def _random_instance(rng, triangle):
    d = tuple(int(x) for x in rng.integers(0, 3, size=3))
    lam = [int(x) for x in rng.integers(-2, 3, size=2)]
    # adjust the last coordinate so that lambda.d = 0 when possible
    if d[2]:
        lam.append(None)
        rest = -(lam[0] * d[0] + lam[1] * d[1])
        lam[2] = CQ(rest) / d[2]
    else:
        lam.append(CQ(int(rng.integers(-2, 3))))
    return v(triangle, *d), {n: CQ.coerce(x) for n, x in zip(triangle.nodes, lam)}


def test_weyl_covariance_random(triangle):
    from irrquiver.root_system import dual_reflection, simple_reflection

    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 20:
        d, lam = _random_instance(rng, triangle)
        if not any(d.values()):
            continue
        for i in triangle.nodes:
            if not lam[i]:
                continue
            sd = simple_reflection(triangle, i, d)
            if min(sd.values()) < 0 or not any(sd.values()):
                continue
            a = has_stable(triangle, d, lam).stable
            b = has_stable(triangle, sd, dual_reflection(triangle, i, lam)).stable
            assert a == b
            checked += 1


def p4_spec(theta=(CQ(1, 3), CQ(-2)), y=(CQ(1, -3), CQ(0))):  # Gaussian integers 1+3i, -2, 1-3i, 0
    return ConnectionSpec(
        (PartSpec((NodeSpec("u", OrbitSpec(1, (theta[0],))),), CQ(0)),
         PartSpec((NodeSpec("v", OrbitSpec(1, (theta[1],))),), CQ(1))),
        (SimplePoleSpec("p", CQ(0), OrbitSpec(2, y, (1,))),),
    )


def test_p4_connection_is_triangle():
    q, d, lam = connection_quiver(p4_spec())
    assert q.graph.edge_count == 3 and d == {"p": 1, "u": 1, "v": 1}
    assert pairing(d, lam) == 0
    verdict = exists_stable_connection(p4_spec())
    assert verdict.stable


def test_residue_theorem_violation():
    spec = p4_spec(theta=(CQ(1), CQ(1)))
    verdict = exists_stable_connection(spec)
    assert verdict.nonempty is False and verdict.stable is False
    assert "residue theorem" in verdict.reason


def test_fuchsian_star():
    # rank 2, three simple poles plus a regular-singular infinity: affine D4 star
    node = NodeSpec("u", OrbitSpec(2, (CQ(Fraction(-1, 3)), CQ(Fraction(-7, 10))), (1,)))
    poles = tuple(SimplePoleSpec(n, CQ(k), OrbitSpec(2, (y, CQ(0)), (1,)))
                  for k, (n, y) in enumerate([("p", CQ(Fraction(1, 2))), ("q", CQ(Fraction(1, 3))), ("r", CQ(Fraction(1, 5)))]))
    spec = ConnectionSpec((PartSpec((node,)),), poles)
    q, d, lam = connection_quiver(spec)
    g = q.graph
    assert sorted(len(g.neighbors(n)) for n in g.nodes) == [1, 1, 1, 1, 4]
    assert d["u"] == 2 and pairing(d, lam) == 0
    assert exists_stable_connection(spec).stable


def test_resonance_warning():
    node = NodeSpec("u", OrbitSpec(2, (CQ(0), CQ(1)), (1,)))
    spec = ConnectionSpec((PartSpec((node,)),), (SimplePoleSpec("p", CQ(0), OrbitSpec(2, (CQ(1), CQ(0)), (1,))),))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        exists_stable_connection(spec)
    assert any(issubclass(w.category, ResonanceWarning) for w in rec)
