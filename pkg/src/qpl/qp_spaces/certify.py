"""Pointwise residuals certifying quasi-Poisson and moment map identities."""

from __future__ import annotations

import numpy as np

from qpl.fields.algebra import norm, push
from qpl.fields.calculus import schouten


def invariance_residual(qp, m):
    """max_b |[(e_b)_M, P]| over all action components."""
    out = 0.0
    for j, comp in enumerate(qp.components):
        gens = qp.generators(j)
        for b in range(comp.h):
            out = max(out, norm(schouten(gens.column(b), qp.P, m)))
    return out


def quasi_poisson_residual(qp, m):
    """|[P, P] - phi_M| at m."""
    return norm(schouten(qp.P, qp.P, m) - qp.phi_M()(m))


def _thetaR(qp, j, m, fd=False):
    mm, comp = qp.moments[j], qp.components[j]
    th = mm.fd_thetaR(m, qp.space) if fd else mm.thetaR(m, qp.space)
    return th if comp.E is None else comp.E.T @ th


def moment_residual(qp, m, fd=False):
    """max_j |P#(Phi_j^* theta^R) - 1/2 (1 + Ad_Phi_j) (e)_M^j|."""
    P = qp.P(m)
    out = 0.0
    for j, comp in enumerate(qp.components):
        if qp.moments[j] is None:
            continue
        th = _thetaR(qp, j, m, fd)
        A = comp.Ad(qp.moments[j](m))
        L = qp.generators(j)(m)
        out = max(out, norm(th @ P - 0.5 * (np.eye(comp.h) + A) @ L.T))
    return out


def moment_map_push_residual(qp, m, fd=False):
    """max_j |Phi_* P - P_G(Phi)| (the moment map is a quasi-Poisson map)."""
    P = qp.P(m)
    out = 0.0
    for j, comp in enumerate(qp.components):
        if qp.moments[j] is None:
            continue
        A = comp.Ad(qp.moments[j](m))
        thL = A.T @ _thetaR(qp, j, m, fd)
        out = max(out, norm(push(P, thL) - 0.5 * (A.T - A)))
    return out


def equivariance_residual(qp, m, rng):
    out = 0.0
    for j, comp in enumerate(qp.components):
        model = comp.model
        if comp.E is None:
            g = model.random_element(rng, 1.0)
        else:
            g = model.exp(comp.E @ (0.3 * rng.standard_normal(comp.h)))
        gm = comp.act(g, m)
        for k, mm in enumerate(qp.moments):
            if mm is None:
                continue
            expect = mm(m)
            if k == j:
                expect = g @ expect @ model.inverse(g)
            out = max(out, float(np.max(np.abs(mm(gm) - expect))))
    return out


def certify(qp, rng, points=50, checks=None):
    """Max residual of each named check over ``points`` seeded sample points."""
    table = {
        "invariance": lambda m: invariance_residual(qp, m),
        "quasi_poisson": lambda m: quasi_poisson_residual(qp, m),
        "moment": lambda m: moment_residual(qp, m),
        "moment_push": lambda m: moment_map_push_residual(qp, m),
        "equivariance": lambda m: equivariance_residual(qp, m, rng),
    }
    if not qp.hamiltonian:
        for key in ("moment", "moment_push", "equivariance"):
            table.pop(key)
    names = list(table) if checks is None else [c for c in checks if c in table]
    out = {name: 0.0 for name in names}
    for _ in range(points):
        m = qp.random_point(rng)
        for name in names:
            out[name] = max(out[name], table[name](m))
    return out
