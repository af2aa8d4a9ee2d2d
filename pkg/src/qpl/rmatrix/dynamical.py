"""The dynamical r-matrix T(xi) = phi(ad_xi) and its identities."""

from __future__ import annotations

import numpy as np

from qpl.errors import DomainError
from qpl.fields.space import DEFAULT_ENGINE
from qpl.lie import (
    NU, NU_INV, PHI, ScalarFunction, _near_nonzero_2pi_i, analytic_of_ad, frechet_of_matrix,
)

DPHI = ScalarFunction(
    "dphi",
    lambda s: -1.0 / s**2 + 0.25 / np.sinh(s / 2.0) ** 2,
    (-1 / 12, 0.0, 3 / 720, 0.0, -5 / 30240, 0.0, 7 / 1209600),
    _near_nonzero_2pi_i,
)


def check_domain(model, xi):
    if not model.in_natural_domain(xi):
        raise DomainError("xi lies outside the domain where exp has maximal rank")


def T_of(model, xi):
    """T(xi) = phi(ad_xi), an antisymmetric d x d matrix."""
    check_domain(model, xi)
    return analytic_of_ad(model, PHI, xi)


def dT_fd(model, xi, engine=DEFAULT_ENGINE):
    """dT/dxi_c by finite differences; shape (c, a, b)."""
    return np.stack([
        engine.diff(lambda s, e=e: T_of(model, xi + s * e)) for e in np.eye(model.d)
    ])


def dT_frechet(model, xi):
    """dT/dxi_c through the Daleckii-Krein derivative of phi at ad_xi."""
    check_domain(model, xi)
    A = model.ad(xi)
    return np.stack([frechet_of_matrix(PHI, DPHI, A, model.ad(e)) for e in np.eye(model.d)])


def _cycl(X):
    return X + np.transpose(X, (1, 2, 0)) + np.transpose(X, (2, 0, 1))


def cdybe_residual(model, xi, method="fd", engine=DEFAULT_ENGINE):
    """Cycl_abc(dT_ab/dxi_c + T_ak f_kbl T_lc) - 1/4 f_abc as a 3-tensor."""
    T = T_of(model, xi)
    dT = dT_fd(model, xi, engine) if method == "fd" else dT_frechet(model, xi)
    lhs = np.transpose(dT, (1, 2, 0)) + np.einsum("ak,kbl,lc->abc", T, model.f, T)
    return _cycl(lhs) - 0.25 * model.f


def exp_frames(model, xi):
    """Coordinate components of e_a^L and e_a^R pulled back by exp (columns a)."""
    J = analytic_of_ad(model, NU_INV, xi)
    Jinv = np.linalg.inv(J)
    A = model.Ad(model.exp(xi))
    return Jinv, Jinv @ A.T


def tab_identity_residual(model, xi, transpose=True):
    """Residual of the T-identity relating T, the adjoint generators and exp^*(e^L + e^R).

    With ``transpose=True`` the left side is sum_b T_ba (e_b)_g, the form that
    holds in this package's index convention; ``transpose=False`` evaluates
    the literal T_ab (e_b)_g for comparison.
    """
    T = T_of(model, xi)
    gens = model.ad(xi)  # columns (e_b)_g in coordinates
    eL, eR = exp_frames(model, xi)
    rhs = np.eye(model.d) - 0.5 * (eL + eR)  # column a
    Tm = T if transpose else T.T
    lhs = gens @ Tm  # column a: sum_b T_ba (e_b)
    return lhs - rhs


def nu_phi_identity_residual(s):
    """1/2 (nu(s) + nu(-s)) - (1 - s phi(s)) on an array of points."""
    s = np.asarray(s, dtype=complex)
    return 0.5 * (NU(s) + NU(-s)) - (1.0 - s * PHI(s))


def T_equivariance_residual(model, xi, g):
    A = model.Ad(g)
    return float(np.max(np.abs(T_of(model, A @ xi) - A @ T_of(model, xi) @ A.T)))


def T_odd_residual(model, xi):
    return float(np.max(np.abs(T_of(model, -xi) + T_of(model, xi))))


def exp_pullback_residual(model, xi):
    """|exp^* P_G - (P_0 - T_g)| at xi, with P_0 = -ad_xi."""
    J = analytic_of_ad(model, NU_INV, xi)
    Jinv = np.linalg.inv(J)
    A = model.Ad(model.exp(xi))
    PG = 0.5 * (A.T - A)
    pulled = Jinv @ PG @ Jinv.T
    L = model.ad(xi)
    return float(np.max(np.abs(pulled - (-model.ad(xi) - L @ T_of(model, xi) @ L.T))))
