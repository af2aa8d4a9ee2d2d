"""The differential d_P, the BV operator of a volume form and the modular vector field."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qpl.errors import DomainError, InvarianceError
from qpl.fields.algebra import (
    combos, complement_order, compress, d_tables, expand, norm, star_signs,
)
from qpl.fields.calculus import schouten, schouten_field
from qpl.fields.field import MultiVectorField, function_field


@dataclass(frozen=True, eq=False)
class VolumeStructure:
    """mu = rho theta^1 ^ ... ^ theta^D in the left frame; rho = 1 is the invariant volume.

    ``drho(m)`` is the left-frame differential of rho (finite differences if omitted).
    """

    space: object
    rho: object = None
    drho: object = None

    def density(self, m):
        return 1.0 if self.rho is None else float(self.rho(m))

    def gradient(self, m):
        if self.rho is None:
            return np.zeros(self.space.D)
        if self.drho is not None:
            return np.asarray(self.drho(m), dtype=float)
        return self.space.directional(self.rho, m, np.eye(self.space.D))

    def scaled(self, f, df=None):
        """The volume f mu for a positive function f."""
        if self.rho is None:
            return VolumeStructure(self.space, f, df)
        rho, drho = self.rho, self.drho
        dd = None
        if df is not None and drho is not None:
            dd = lambda m: f(m) * drho(m) + rho(m) * df(m)
        return VolumeStructure(self.space, lambda m: f(m) * rho(m), dd)


def _signs(D, k):
    """Star signs for iota(X_1 ^ ... ^ X_k) = iota(X_1) ... iota(X_k)."""
    return star_signs(D, k) * (-1) ** (k * (k - 1) // 2)


def star(mu, u, m):
    """Compressed coefficients of iota(u) mu (a (D-k)-form) from a k-vector array u."""
    D = mu.space.D
    k = np.ndim(u)
    out = np.zeros(len(combos(D, D - k)))
    out[complement_order(D, k)] = mu.density(m) * _signs(D, k) * compress(u)
    return out


def star_inverse(mu, w, m, k):
    """k-vector array u with iota(u) mu = w, for w given compressed in degree D - k."""
    D = mu.space.D
    rho = mu.density(m)
    if abs(rho) < 1e-300:
        raise DomainError("degenerate volume form")
    c = w[complement_order(D, k)] * _signs(D, k) / rho
    return expand(c, D, k)


def bv_apply(u, m, mu=None):
    """(d_mu u)(m) = -(*^-1 d *) u for a multivector field u on an unconstrained space."""
    space = u.space
    if space.constrained:
        raise DomainError("the BV operator is implemented on unconstrained spaces only")
    mu = VolumeStructure(space) if mu is None else mu
    D, k = space.D, u.degree
    if k == 0:
        return np.zeros(())
    if k > D:
        return np.zeros((D,) * (k - 1))
    a = u(m)
    da = u.derivative(m)
    rho = mu.density(m)
    drho = mu.gradient(m)
    p = D - k
    order, signs = complement_order(D, k), _signs(D, k)
    F = np.zeros(len(combos(D, p)))
    F[order] = rho * signs * compress(a)
    dF = np.zeros((D, len(F)))
    for c in range(D):
        dF[c, order] = signs * (drho[c] * compress(a) + rho * compress(da[c]))
    Dtab, Ctab = d_tables(D, p, space.structure_key)
    dw = Dtab @ dF.ravel() + Ctab @ F
    return -star_inverse(mu, dw, m, k - 1)


def bv_field(u, mu=None, label=None):
    return MultiVectorField(u.space, max(u.degree - 1, 0), lambda m: bv_apply(u, m, mu), None,
                            label or f"d_mu({u.label})")


def modular_field(qp, mu=None):
    """X_mu = d_mu P."""
    return bv_field(qp.P, mu, "X_mu")


def lie_homology(f, beta):
    """Chevalley-Eilenberg boundary of beta in the exterior algebra (degrees <= 3).

    d(x ^ y) = -[x, y] and d(x ^ y ^ z) = -[x, y] ^ z - [y, z] ^ x - [z, x] ^ y.
    """
    beta = np.asarray(beta, dtype=float)
    k = beta.ndim
    if k <= 1:
        return np.zeros(())
    if k == 2:
        return -0.5 * np.einsum("ab,abc->c", beta, f)
    if k == 3:
        X = -0.5 * np.einsum("abc,abk->kc", beta, f)
        return X - X.T
    raise ValueError("Lie algebra homology is implemented for degrees <= 3")


# --------------------------------------------------------------------------
# d_P on invariant multivectors


def invariance_certificate(qp, u, m):
    """max_j,b |[(e_b)_M, u]| at m."""
    out = 0.0
    for j, comp in enumerate(qp.components):
        gens = qp.generators(j)
        for b in range(comp.h):
            out = max(out, norm(schouten(gens.column(b), u, m)))
    return out


@dataclass(frozen=True, eq=False)
class InvariantMultivector:
    """A multivector field on a quasi-Poisson space, certified invariant at sample points."""

    qp: object
    field: object

    def certificate(self, points):
        return max((invariance_certificate(self.qp, self.field, m) for m in points), default=0.0)


def d_P(qp, u, m, check=False, tol=1e-9):
    """[P, u] at m; with ``check`` the invariance certificate of u is enforced."""
    if check:
        res = invariance_certificate(qp, u, m)
        if res > tol:
            raise InvarianceError(f"multivector is not invariant ({res:.2e})")
    if u.degree == 0 and u.has_closed_derivative and not np.any(u.closed_derivative(m)):
        return np.zeros(qp.space.D)
    return schouten(qp.P, u, m)


def d_P_squared_residual(qp, u, m):
    """|[P, [P, u]] - 1/2 [phi_M, u]|."""
    inner = schouten_field(qp.P, u)
    return norm(schouten(qp.P, inner, m) - 0.5 * schouten(qp.phi_M(), u, m))


def generator_residual(u, v, m, mu=None):
    """[u, v] + (-1)^|u| (d(u ^ v) - du ^ v - (-1)^|u| u ^ dv)."""
    k = u.degree
    s = (-1) ** k
    uv = u.wedge(v)
    du, dv = bv_field(u, mu), bv_field(v, mu)
    term = bv_apply(uv, m, mu) - s * _wedge_at(u, dv, m)
    if k > 0:
        term = term - _wedge_at(du, v, m)
    return norm(schouten(u, v, m) - s * term)


def _wedge_at(a, b, m):
    return a.wedge(b)(m)


def gauge_residual(qp, f, df, m, mu=None):
    """|X_{f mu} - X_mu - d_P(ln f)| for a positive function f (df by FD if omitted)."""
    mu = VolumeStructure(qp.space) if mu is None else mu
    if df is None:
        df = lambda p: qp.space.directional(f, p, np.eye(qp.space.D))
    X = bv_apply(qp.P, m, mu)
    Xf = bv_apply(qp.P, m, mu.scaled(f, df))
    lnf = function_field(qp.space, lambda p: np.log(f(p)), lambda p: df(p) / f(p), "ln f")
    return norm(Xf - X - schouten(qp.P, lnf, m))
