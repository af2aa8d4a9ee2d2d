"""Quasi-Poisson maps: multiplication, action map, R-twist, plus class checks."""

from __future__ import annotations

import numpy as np

from qpl.fields.algebra import norm, push
from qpl.fields.calculus import NamedMap, multiplication_map
from qpl.fields.field import pair_bivector
from qpl.fields.space import Factor, ModelSpace
from qpl.lie import RANK_RTOL
from qpl.qp_spaces.core import (
    ambient_group_bivector, canonical_group_space, fuse, fusion_product, product,
)


def group_bivector_at(model, g):
    """P_G at g: the array 1/2 (Ad_g^T - Ad_g)."""
    A = model.Ad(g)
    return 0.5 * (A.T - A)


def mult_residual(model, m, fd=False):
    """|Mult_* P_fus - P_G| at m in G (*) G."""
    GG = fusion_product(canonical_group_space(model), canonical_group_space(model))
    target = ModelSpace([Factor(model)])
    F = multiplication_map(GG.space, target, [(0, 1), (1, 1)])
    J = F.fd_jacobian(m) if fd else F.jacobian(m)
    return norm(push(GG.P(m), J) - group_bivector_at(model, F(m)[0]))


def action_map(qp):
    """A: G (*) M -> M for a space with one action component, as a named map."""
    comp = qp.components[0]
    model = comp.model
    src = ModelSpace((Factor(model),) + qp.space.factors, qp.space.engine)
    sp = qp.space

    def fn(p):
        return comp.act(p[0], p[1:])

    def jac(p):
        g, m = p[0], p[1:]
        J = np.zeros((sp.D, src.D))
        d = model.d
        for i, fac in enumerate(sp.factors):
            sl = sp.slice(i)
            cols = slice(d + sl.start, d + sl.stop)
            spec = comp.entries.get(i)
            if spec is None:
                J[sl, cols] = np.eye(fac.d)
            elif spec == "adjoint":
                A = model.Ad(g)
                J[sl, cols] = A
                J[sl, :d] = -A @ model.ad(m[i])
            else:
                l, r = spec
                gr = g if r else model.identity()
                J[sl, cols] = model.Ad(gr)
                if l:
                    J[sl, :d] += model.Ad(gr @ model.inverse(m[i]))
                if r:
                    J[sl, :d] -= model.Ad(g)
        return J

    return NamedMap("act", src, sp, fn, jac)


def action_map_residual(qp, m_big, fd=False):
    """|A_*(P_G + P - psi) - P| at a point (g, m) of G (*) M."""
    GM = fusion_product(canonical_group_space(qp.components[0].model), qp)
    A = action_map(qp)
    J = A.fd_jacobian(m_big) if fd else A.jacobian(m_big)
    return norm(push(GM.P(m_big), J) - qp.P(A(m_big)))


def r_twist(qp, i=0, j=1):
    """R(m) = (e, Phi^i(m), e).m together with its residual evaluators.

    Returns (R, moment_residual(m), twist_residual(m, fd)).
    """
    mi, mj = qp.moments[i], qp.moments[j]
    if mi is None or mj is None:
        raise ValueError("r_twist needs moment maps on both components")
    cj = qp.components[j]
    R = NamedMap("R", qp.space, qp.space, lambda m: cj.act(mi(m), m), None)
    before = qp.P - pair_bivector([(0.5, qp.generators(i), qp.generators(j))])
    after = qp.P - pair_bivector([(0.5, qp.generators(j), qp.generators(i))])

    def moment_residual(m):
        Rm = R(m)
        return float(np.max(np.abs(mj(Rm) @ mi(Rm) - mi(m) @ mj(m))))

    def twist_residual(m):
        return norm(push(before(m), R.fd_jacobian(m)) - after(R(m)))

    return R, moment_residual, twist_residual


def associativity_residual(model, m):
    """Fusing (12)3 versus 1(23) on G x G x G with conjugation components."""
    G = canonical_group_space(model)
    triple = product(product(G, G), G)
    left = fuse(fuse(triple, 0, 1), 0, 1)
    right = fuse(fuse(triple, 1, 2), 0, 1)
    return norm(left.P(m) - right.P(m)), float(
        np.max(np.abs(left.moments[0](m) - right.moments[0](m))))


# --------------------------------------------------------------------------
# conjugacy classes and non-degeneracy


def class_vs_ambient_residual(qp, m):
    """|P_class - P_G| at a class point, and the tangency defect of P_G."""
    ambient = ambient_group_bivector(qp.space)(m)
    L = qp.generators(0)(m)
    U, s, _ = np.linalg.svd(L)
    rank = int(np.sum(s > RANK_RTOL * max(s[0] if s.size else 0.0, 1.0)))
    proj = U[:, :rank] @ U[:, :rank].T
    tangency = norm(ambient - proj @ ambient)
    return norm(qp.P(m) - ambient), tangency


def nondegeneracy(qp, m):
    """Rank of D_m = im P# + orbit directions, and dim ker(1 + Ad_Phi)."""
    Q = qp.space.tangent_basis(m)
    t = Q.shape[1]
    if t == 0:
        return {"rank": 0, "dim": 0, "nondegenerate": True, "ker_one_plus_Ad": 0}
    Pt = Q.T @ qp.P(m) @ Q
    Ls = [Q.T @ qp.generators(j)(m) for j in range(len(qp.components))]
    stack = np.concatenate([Pt] + Ls, axis=1)
    s = np.linalg.svd(stack, compute_uv=False)
    rank = int(np.sum(s > RANK_RTOL * max(s[0], 1.0)))
    ker = 0
    for j, comp in enumerate(qp.components):
        if qp.moments[j] is not None:
            A = comp.Ad(qp.moments[j](m))
            sv = np.linalg.svd(np.eye(comp.h) + A, compute_uv=False)
            ker += int(np.sum(sv <= RANK_RTOL * max(sv[0], 1.0)))
    return {"rank": rank, "dim": t, "nondegenerate": rank == t, "ker_one_plus_Ad": ker}
