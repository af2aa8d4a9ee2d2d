"""The 2-form omega of a non-degenerate space and the P <-> omega correspondence.

Matrices are written in tangent coordinates given by an orthonormal tangent
basis Q. With row-vector conventions P#(a) = a P and omega_flat(X) = X W,
the defining relation reads ``W P = I - 1/4 (TL - TR)^T L^T`` where L holds
the generating fields and TL, TR the pulled-back Maurer-Cartan forms.
"""

from __future__ import annotations

import numpy as np

from qpl.errors import DegeneratePointError
from qpl.fields.algebra import norm, push
from qpl.fields.calculus import exterior_derivative
from qpl.fields.field import (
    DifferentialForm, MultiVectorField, left_frame, pair_bivector, right_frame,
)
from qpl.lie import RANK_RTOL


def _data(qp, m):
    """Tangent basis and stacked (L, TL, TR, Ad) over all Hamiltonian components."""
    Q = qp.space.tangent_basis(m)
    Ls, TL, TR, Ads = [], [], [], []
    for j, comp in enumerate(qp.components):
        mm = qp.moments[j]
        th = mm.thetaR(m, qp.space)
        if comp.E is not None:
            th = comp.E.T @ th
        A = comp.Ad(mm(m))
        Ls.append(qp.generators(j)(m) @ np.eye(comp.h))
        TR.append(th)
        TL.append(A.T @ th)
        Ads.append(A)
    L = np.concatenate(Ls, axis=1)
    TL, TR = np.concatenate(TL, axis=0), np.concatenate(TR, axis=0)
    n = sum(a.shape[0] for a in Ads)
    Ad = np.zeros((n, n))
    k = 0
    for A in Ads:
        Ad[k:k + len(A), k:k + len(A)] = A
        k += len(A)
    return Q, L, TL, TR, Ad


def omega_solve(qp, m):
    """Solve for omega at m; returns (W ambient D x D, consistency residual)."""
    Q, L, TL, TR, _ = _data(qp, m)
    t = Q.shape[1]
    if t == 0:
        return np.zeros((qp.space.D,) * 2), 0.0
    Pt = Q.T @ qp.P(m) @ Q
    Lt, TLt, TRt = Q.T @ L, TL @ Q, TR @ Q
    A = np.concatenate([Pt, Lt.T], axis=0)
    B = np.concatenate([np.eye(t) - 0.25 * Lt @ (TLt - TRt), 0.5 * (TLt + TRt)], axis=0)
    s = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(s > RANK_RTOL * max(s[0], 1.0)))
    if rank < t:
        raise DegeneratePointError(f"omega is not determined: kernel dimension {t - rank}",
                                   kernel_dim=t - rank)
    Wt = np.linalg.lstsq(A, B, rcond=None)[0]
    res = norm(A @ Wt - B)
    Wt = 0.5 * (Wt - Wt.T)
    return Q @ Wt @ Q.T, res


def omega_from_P(qp):
    """omega as a 2-form field (pointwise linear solve)."""
    return DifferentialForm(qp.space, 2, lambda m: omega_solve(qp, m)[0], None, "omega")


def P_solve(qp, omega, m):
    """Solve W P = I - 1/4 (TL - TR)^T L^T together with the moment condition."""
    Q, L, TL, TR, Ad = _data(qp, m)
    t = Q.shape[1]
    if t == 0:
        return np.zeros((qp.space.D,) * 2), 0.0
    Wt = Q.T @ omega(m) @ Q
    Lt, TLt, TRt = Q.T @ L, TL @ Q, TR @ Q
    A = np.concatenate([Wt, TRt], axis=0)
    B = np.concatenate([np.eye(t) - 0.25 * (TLt - TRt).T @ Lt.T,
                        0.5 * (np.eye(len(Ad)) + Ad) @ Lt.T], axis=0)
    s = np.linalg.svd(A, compute_uv=False)
    rank = int(np.sum(s > RANK_RTOL * max(s[0], 1.0)))
    if rank < t:
        raise DegeneratePointError(f"P is not determined: kernel dimension {t - rank}",
                                   kernel_dim=t - rank)
    Pt = np.linalg.lstsq(A, B, rcond=None)[0]
    res = norm(A @ Pt - B)
    return Q @ (0.5 * (Pt - Pt.T)) @ Q.T, res


def P_from_omega(qp, omega):
    return MultiVectorField(qp.space, 2, lambda m: P_solve(qp, omega, m)[0], None, "P(omega)")


def defining_residual(qp, omega, m, P=None):
    """max of |W P - (I - 1/4 ...)| and the transposed relation, in tangent coordinates."""
    Q, L, TL, TR, _ = _data(qp, m)
    if Q.shape[1] == 0:
        return 0.0
    P = qp.P(m) if P is None else P
    Pt, Wt = Q.T @ P @ Q, Q.T @ omega(m) @ Q
    Lt, TLt, TRt = Q.T @ L, TL @ Q, TR @ Q
    I = np.eye(Q.shape[1])
    r1 = Wt @ Pt - (I - 0.25 * (TLt - TRt).T @ Lt.T)
    r2 = Pt @ Wt - (I - 0.25 * Lt @ (TLt - TRt))
    return max(norm(r1), norm(r2))


def moment_two_form_residual(qp, omega, m):
    """|iota((e_a)_M) omega - 1/2 Phi^*(theta^L + theta^R)_a| on tangent vectors."""
    Q, L, TL, TR, _ = _data(qp, m)
    return norm((L.T @ omega(m) - 0.5 * (TL + TR)) @ Q)


def kernel_dimensions(qp, omega, m):
    """(dim ker omega_m, dim ker(1 + Ad_Phi)) in tangent coordinates."""
    Q, _, _, _, Ad = _data(qp, m)
    Wt = Q.T @ omega(m) @ Q
    s = np.linalg.svd(Wt, compute_uv=False) if Wt.size else np.zeros(0)
    kw = int(np.sum(s <= 1e-7 * max(s[0] if s.size else 0.0, 1.0)))
    sa = np.linalg.svd(np.eye(len(Ad)) + Ad, compute_uv=False)
    ka = int(np.sum(sa <= RANK_RTOL * max(sa[0], 1.0)))
    return kw, ka


def eta_pullback(qp, m):
    """Phi^* eta with eta = 1/12 f_abc theta^R_a ^ theta^R_b ^ theta^R_c, summed over components."""
    out = 0.0
    for j, comp in enumerate(qp.components):
        th = qp.moments[j].thetaR(m, qp.space)
        if comp.E is not None:
            th = comp.E.T @ th
        out = out + push(comp.f / 2.0, th.T)
    return out


def d_omega_residual(qp, omega, m):
    return norm(exterior_derivative(omega, m) - eta_pullback(qp, m))


def double_omega(qp):
    """The explicit 2-form -1/2 (theta^{1,L} ^ theta^{2,R} + theta^{1,R} ^ theta^{2,L}) on D(G)."""
    sp = qp.space
    return pair_bivector([(-0.5, left_frame(sp, 0), right_frame(sp, 1)),
                          (-0.5, right_frame(sp, 0), left_frame(sp, 1))],
                         cls=DifferentialForm, label="omega_D")


def fusion_two_form(qp, omega, i, j):
    """omega - 1/2 Phi_i^* theta^L_a ^ Phi_j^* theta^R_a, as a form on the same space."""
    mi, mj = qp.moments[i], qp.moments[j]
    sp = qp.space

    def coeff(m):
        a = mi.thetaL(m, sp)
        b = mj.thetaR(m, sp)
        return omega(m) - 0.5 * (a.T @ b - b.T @ a)

    return DifferentialForm(sp, 2, coeff, None, "omega_fus")


def embed_forms(space, parts):
    """Block sum of 2-forms living on consecutive factor groups of ``space``.

    ``parts`` is a list of (form, first_factor, n_factors).
    """

    def coeff(m):
        out = np.zeros((space.D, space.D))
        for w, k, n in parts:
            lo = space.slice(k).start
            hi = lo + w.space.D
            out[lo:hi, lo:hi] = w(tuple(m[k:k + n]))
        return out

    return DifferentialForm(space, 2, coeff, None, "omega")
