from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irrquiver.exact import CQ
from irrquiver.graph_core import Quiver, attach_leg, complete_k_partite_quiver
from irrquiver.quiver_rep import (
    OrbitSpec,
    QuiverRep,
    ReflectionUndefined,
    RepError,
    closed_walk_traces,
    is_stable,
    leg_from_matrix,
    leg_rep,
    moment_map,
    random_rep,
    reflection_functor,
    zero_rep,
)
from irrquiver.root_system import dual_reflection, simple_reflection

from conftest import DATA

TRIANGLE = complete_k_partite_quiver([["1"], ["2"], ["3"]])


def test_random_rep_golden():
    gold = json.loads((DATA / "random_rep_triangle_seed42.json").read_text())
    rep = random_rep(TRIANGLE, gold["dims"], gold["seed"])
    for entry in gold["arrows"]:
        e = (entry["tail"], entry["head"], 0)
        assert rep.phi[e][0, 0] == complex(*entry["phi"][0])
        assert rep.phi_star[e][0, 0] == complex(*entry["phi_star"][0])


def test_random_rep_draw_order():
    """phi then phi* per arrow, (N + iN)/sqrt 2 entries."""
    rng = np.random.default_rng(7)
    rep = random_rep(TRIANGLE, {"1": 2, "2": 1, "3": 3}, 7)
    for t, h, k in TRIANGLE.arrow_list():
        m, n = rep.dims[h], rep.dims[t]
        phi = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)
        phs = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)
        assert np.array_equal(rep.phi[(t, h, k)], phi)
        assert np.array_equal(rep.phi_star[(t, h, k)], phs)


def test_shape_mismatch_rejected():
    with pytest.raises(RepError):
        QuiverRep(TRIANGLE, {"1": 1, "2": 1}, {}, {})


@pytest.mark.parametrize("seed", range(5))
def test_moment_trace_sum_vanishes(seed):
    q = attach_leg(complete_k_partite_quiver([["a", "b"], ["c"]]), "c", 2)
    dims = {"a": 2, "b": 1, "c": 3, "c.1": 2, "c.2": 1}
    mu = moment_map(random_rep(q, dims, seed))
    assert abs(mu.trace_sum()) < 1e-12


def test_moment_sign_convention():
    q = Quiver(("t", "h"), {("t", "h"): 1})
    e = ("t", "h", 0)
    rep = QuiverRep(q, {"t": 1, "h": 1}, {e: [[2.0]]}, {e: [[3.0]]})
    mu = moment_map(rep)
    assert mu.values["h"][0, 0] == 6 and mu.values["t"][0, 0] == -6


def _jordan(blocks: list[tuple[complex, int]]) -> np.ndarray:
    n = sum(s for _, s in blocks)
    a = np.zeros((n, n), dtype=complex)
    pos = 0
    for x, s in blocks:
        for k in range(s):
            a[pos + k, pos + k] = x
            if k + 1 < s:
                a[pos + k, pos + k + 1] = 1
        pos += s
    return a


def _oracle_ranks(a, roots):
    n = a.shape[0]
    out, prod = [n], np.eye(n, dtype=complex)
    for x in roots[:-1]:
        prod = (a - x * np.eye(n)) @ prod
        out.append(int(np.linalg.matrix_rank(prod, tol=1e-8)))
    return out


@pytest.mark.parametrize("blocks,roots", [
    ([(2, 2), (2, 1), (5, 1)], [2, 2, 5]),
    ([(1, 3)], [1, 1, 1]),
    ([(0, 1), (1, 1), (2, 1), (3, 1)], [0, 1, 2, 3]),
    ([(1j, 2), (-1, 2), (4, 1)], [1j, 1j, -1, -1, 4]),
])
def test_leg_dims_match_rank_oracle(blocks, roots):
    a = _jordan(blocks)
    s = np.linalg.qr(np.random.default_rng(1).standard_normal(a.shape))[0]
    a = s @ a @ s.T
    leg = leg_from_matrix(a, roots)
    assert leg.dims == _oracle_ranks(a, roots)


def test_regular_matrix_leg_dims():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((5, 5))
    roots = list(np.linalg.eigvals(a))
    leg = leg_from_matrix(a, roots)
    assert leg.dims == [5, 4, 3, 2, 1]


def test_leg_rejects_non_annihilating_roots():
    with pytest.raises(RepError):
        leg_from_matrix(np.diag([1.0, 2.0]), [1.0])


def test_leg_point_satisfies_moment_relations():
    a = _jordan([(2, 2), (-1, 1)])
    roots = [2, 2, -1]
    leg = leg_from_matrix(a, roots)
    rep = leg_rep("x", leg)
    mu = moment_map(rep)
    for j, lam in enumerate(leg.params[1:], start=1):
        node = f"x.{j}"
        m = mu.values[node]
        assert np.allclose(m, lam * np.eye(m.shape[0]), atol=1e-10)


def test_orbit_spec_bookkeeping():
    orb = OrbitSpec(3, (CQ(2), CQ(5)), (1,))
    assert orb.leg_dims() == [3, 1]
    assert orb.leg_params() == [CQ(-2), CQ(-3)]
    assert orb.trace() == CQ(2) * 2 + CQ(5)
    with pytest.raises(RepError):
        OrbitSpec(2, (CQ(1), CQ(2)), (3,))


def _fibre_point(seed):
    """A point of mu^{-1}(lambda): the quiver point of random abstract data."""
    from irrquiver.ij_calculus import IJData, random_ijrep, to_quiver_point

    data = IJData.from_parts([["a"], ["b", "c"]])
    pt = to_quiver_point(random_ijrep(data, {"a": 2, "b": 1, "c": 2}, seed, exact=False))
    return pt.rep, {n: complex(x) for n, x in pt.params.items()}


@pytest.mark.parametrize("seed", range(4))
def test_reflection_functor_contract(seed):
    rep, lam = _fibre_point(seed)
    g = rep.quiver.graph
    for i in rep.quiver.nodes:
        if abs(lam[i]) < 1e-9:
            continue
        new, lam2 = reflection_functor(rep, lam, i)
        assert new.dims == simple_reflection(g, i, rep.dims)
        assert lam2 == dual_reflection(g, i, lam)
        assert moment_map(new).residual(lam2) < 1e-8
        back, lam3 = reflection_functor(new, lam2, i)
        assert back.dims == rep.dims
        t1, t3 = closed_walk_traces(rep), closed_walk_traces(back)
        assert max(abs(t1[k] - t3[k]) for k in t1) < 1e-7


def test_reflection_undefined_at_zero():
    rep, lam = _fibre_point(0)
    lam = dict(lam)
    lam["a"] = 0
    with pytest.raises(ReflectionUndefined):
        reflection_functor(rep, lam, "a")


def test_reflection_requires_fibre_point():
    rep = random_rep(TRIANGLE, {"1": 1, "2": 1, "3": 1}, 0)
    with pytest.raises(RepError):
        reflection_functor(rep, {"1": 1.0, "2": 0.0, "3": -1.0}, "1")


def test_zero_rep_unstable():
    assert not is_stable(zero_rep(TRIANGLE, {"1": 1, "2": 1, "3": 0}))


def test_generic_rep_stable():
    assert is_stable(random_rep(TRIANGLE, {"1": 2, "2": 1, "3": 1}, 4))


def test_rep_with_subrep_unstable():
    q = Quiver(("a", "b"), {("a", "b"): 1})
    e = ("a", "b", 0)
    # phi* = 0: the line V_b is a subrepresentation
    rep = QuiverRep(q, {"a": 1, "b": 1}, {e: [[1.0]]}, {e: [[0.0]]})
    assert not is_stable(rep)
    rep2 = QuiverRep(q, {"a": 1, "b": 1}, {e: [[1.0]]}, {e: [[1.0]]})
    assert is_stable(rep2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.integers(0, 3), min_size=3, max_size=3))
def test_equivariance(seed, dims):
    d = dict(zip(["1", "2", "3"], dims))
    rep = random_rep(TRIANGLE, d, seed)
    rng = np.random.default_rng(seed)
    g = {}
    for n, k in d.items():
        z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        g[n] = np.linalg.qr(z)[0] if k else np.zeros((0, 0))
    mu, mu2 = moment_map(rep), moment_map(rep.act(g))
    for n in d:
        if d[n]:
            assert np.allclose(mu2.values[n], g[n] @ mu.values[n] @ g[n].conj().T, atol=1e-9)
