"""Randomized invariant suites run by ``irrquiver verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import exact as ex
from .graph_core import FissionTree, fission_graph, fission_orbit_dimension, symplectic_dimension
from .ij_calculus import (
    IJData,
    RealizationData,
    check_B,
    complete,
    cycle,
    from_connection,
    incomplete,
    random_ijrep,
    realize,
    to_quiver_point,
)
from .exact import CQ
from .quiver_rep import QuiverRep, moment_map, random_rep, reflection_functor
from .root_system import simple_reflection
from .specfile import Spec

Tamper = Callable[[QuiverRep], QuiverRep]


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float | None
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "residual": None if self.residual is None else float(f"{self.residual:.3e}"),
                "detail": self.detail}


def _unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def check_moment(spec: Spec, seed: int, trials: int, tamper: Tamper | None = None) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst_tr, worst_eq = 0.0, 0.0
    for t in range(trials):
        rep = random_rep(spec.quiver, spec.dims, seed + t)
        if tamper is not None:
            rep = tamper(rep)
        mu = moment_map(rep)
        scale = max(1.0, sum(np.linalg.norm(m) ** 2 for m in list(rep.phi.values()) + list(rep.phi_star.values())))
        worst_tr = max(worst_tr, abs(mu.trace_sum()) / scale)
        g = {n: _unitary(d, rng) for n, d in rep.dims.items()}
        mu2 = moment_map(rep.act(g))
        for n, m in mu.values.items():
            if m.size:
                diff = mu2.values[n] - g[n] @ m @ g[n].conj().T
                worst_eq = max(worst_eq, float(np.linalg.norm(diff)) / scale)
    return [
        CheckResult("moment trace sum", worst_tr <= 1e-10, worst_tr, "relative |sum_i tr mu_i|"),
        CheckResult("moment equivariance", worst_eq <= 1e-9, worst_eq, "unitary base change"),
    ]


def _ij_instances(spec: Spec, seed: int, trials: int):
    data = IJData.from_parts(spec.parts)
    dims = spec.centre_dims
    for t in range(trials):
        yield data, dims, random_ijrep(data, dims, seed + t)


def check_ij(spec: Spec, seed: int, trials: int, tamper: Tamper | None = None) -> list[CheckResult]:
    if not spec.parts or trials <= 0:
        return []
    ok_cycle = ok_round = ok_real = True
    worst_b = worst_mu = worst_refl = 0.0
    dims_ok = True
    for data, dims, rep in _ij_instances(spec, seed, trials):
        order = 2 * len(data.J)
        c = rep
        for _ in range(order):
            c = cycle(c)
        ok_cycle &= c.equals(rep)
        c1 = cycle(rep)
        for i in data.central_nodes:
            d = ex.to_complex_array(check_B(rep, i)) - ex.to_complex_array(check_B(c1, i))
            worst_b = max(worst_b, float(np.linalg.norm(d)) if d.size else 0.0)
        if len(data.J) >= 2:
            r0 = data.parts[data.J[0]]
            twist = {i: CQ(k) for k, i in enumerate(r0)}
            inc = incomplete(rep, twist)
            ok_round &= complete(inc, twist, label=data.J[0]).data == rep.data
            ok_round &= incomplete(complete(inc, twist, label=data.J[0]), twist).equals(inc)
        rd = RealizationData({j: CQ(k, k % 2) for k, j in enumerate(data.J)},
                             {n: CQ(k) for j in data.J for k, n in enumerate(data.parts[j])})
        back, rd2 = from_connection(realize(rep, rd))
        ok_real &= back.equals(rep) and dict(rd2.a) == dict(rd.a) and dict(rd2.b) == dict(rd.b)
        pt = to_quiver_point(rep)
        qrep = tamper(pt.rep) if tamper is not None else pt.rep
        scale = max(1.0, qrep.max_norm() ** 2)
        mu = moment_map(qrep)
        worst_mu = max(worst_mu, mu.residual(pt.params) / scale)
        if tamper is None:
            for i in pt.quiver.nodes:
                if not pt.params[i] or abs(complex(pt.params[i])) < 1e-6:
                    continue
                new, lam2 = reflection_functor(qrep, pt.params, i)
                sc = max(1.0, new.max_norm() ** 2)
                worst_refl = max(worst_refl, moment_map(new).residual(lam2) / sc)
                dims_ok &= new.dims == simple_reflection(pt.quiver, i, qrep.dims)
    out = [
        CheckResult("cycle order 2|J|", ok_cycle, None, "exact"),
        CheckResult("check-B cycling invariance", worst_b <= 1e-10, worst_b, "Frobenius"),
        CheckResult("complete/incomplete round trip", ok_round, None, "exact"),
        CheckResult("realize/from_connection round trip", ok_real, None, "exact"),
        CheckResult("quiver point moment relations", worst_mu <= 1e-8, worst_mu, "relative"),
    ]
    if tamper is None:
        out.append(CheckResult("reflection functor", worst_refl <= 1e-8 and dims_ok, worst_refl,
                               "new point in mu^-1(r_i lambda) with dims s_i(d)"))
    return out


def random_fission_tree(rng: np.random.Generator, k: int, max_dim: int = 3) -> FissionTree:
    levels = []
    parents = []
    prev = [f"a{m}" for m in range(int(rng.integers(1, 4)))]
    levels.append(tuple(prev))
    for lvl in range(2, k):
        cur, pm = [], {}
        for p in prev:
            for c in range(int(rng.integers(1, 3))):
                name = f"{p}.{c}"
                cur.append(name)
                pm[name] = p
        levels.append(tuple(cur))
        parents.append(pm)
        prev = cur
    dims = {n: int(rng.integers(1, max_dim + 1)) for n in prev}
    return FissionTree(tuple(levels), tuple(parents), dims)


def check_fission(seed: int, trials: int) -> list[CheckResult]:
    if trials <= 0:
        return []
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(trials):
        k = int(rng.integers(2, 6))
        t = random_fission_tree(rng, k)
        g = fission_graph(t, k)
        if symplectic_dimension(g, t.dims) != fission_orbit_dimension(t, k):
            bad += 1
    return [CheckResult("fission dimension count", bad == 0, float(bad), f"{trials} random trees")]


def run_verification(spec: Spec, seed: int = 0, trials: int = 5, tamper: Tamper | None = None) -> list[CheckResult]:
    if trials <= 0:
        return []
    out = check_moment(spec, seed, trials, tamper)
    out += check_ij(spec, seed, trials, tamper)
    out += check_fission(seed, trials)
    return out
