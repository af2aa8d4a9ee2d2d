"""Schouten bracket, exterior derivative, contractions and pushforwards.

The Schouten bracket is expanded in the left frame: a coefficient-derivative
part plus a structure-constant part coming from ``[e_A, e_B] = c_AB^C e_C``.
On constrained spaces both arguments must be tangent; derivatives are then
only taken along tangent directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from qpl.errors import DomainError
from qpl.fields.algebra import alt, push
from qpl.fields.field import DifferentialForm, MultiVectorField
from qpl.lie import NU, NU_INV, analytic_of_ad


def _coef(n, a, b):
    return factorial(n) / (factorial(a) * factorial(b))


def schouten_arrays(a, b, da, db, Q, c):
    """[a, b] from coefficient arrays and their derivatives along the columns of Q.

    ``da`` has shape (t,) + a.shape, likewise ``db``; ``c`` holds the frame
    structure constants c_AB^C.
    """
    k, l = a.ndim, b.ndim
    if k + l == 0:
        return np.zeros(())
    n = k + l - 1
    out = 0.0
    if k >= 1:
        aQ = np.tensordot(a, Q, axes=([-1], [0]))
        out = out + _coef(n, k - 1, l) * alt(np.tensordot(aQ, db, axes=([-1], [0])))
    if l >= 1:
        bQ = np.tensordot(b, Q, axes=([-1], [0]))
        sign = -((-1) ** ((k - 1) * (l - 1)))
        out = out + sign * _coef(n, l - 1, k) * alt(np.tensordot(bQ, da, axes=([-1], [0])))
    if k >= 1 and l >= 1:
        Z = np.tensordot(c, a, axes=([0], [0]))  # (B, C, R...)
        Z = np.tensordot(Z, b, axes=([0], [0]))  # (C, R..., S...)
        out = out + _coef(n, k - 1, l - 1) * alt(Z)
    return np.asarray(out, dtype=float)


def schouten(u, v, m):
    """Coefficients of the Schouten bracket [u, v] at m."""
    space = u.space
    Q = space.tangent_basis(m)
    return schouten_arrays(u(m), v(m), u.derivative(m, Q), v.derivative(m, Q), Q, space.structure)


def schouten_field(u, v):
    """[u, v] as a field (derivatives by finite differences)."""
    return MultiVectorField(u.space, u.degree + v.degree - 1,
                            lambda m: schouten(u, v, m), None, f"[{u.label},{v.label}]")


def exterior_derivative_arrays(w, dw, c):
    """Frame formula dw = (k+1) alt(dw) - (k+1)k/2 alt(c . w) for full-frame derivatives."""
    k = w.ndim
    out = (k + 1) * alt(dw)
    if k >= 1:
        cw = np.tensordot(c, w, axes=([2], [0]))  # (A, B, R...)
        out = out - (k + 1) * k / 2 * alt(cw)
    return out


def exterior_derivative(w, m):
    space = w.space
    if space.constrained:
        raise DomainError("exterior derivative is implemented on unconstrained spaces only")
    return exterior_derivative_arrays(w(m), w.derivative(m), space.structure)


def d_field(w):
    return DifferentialForm(w.space, w.degree + 1, lambda m: exterior_derivative(w, m),
                            None, f"d{w.label}")


def contract(P, alpha):
    """P#(alpha) with P#(a)(b) = P(a, b); arrays in, vector out."""
    return np.tensordot(np.asarray(alpha), np.asarray(P), axes=([0], [0]))


def pair(omega, X):
    """omega_flat(X) with omega_flat(X)(Y) = omega(X, Y)."""
    return np.tensordot(np.asarray(X), np.asarray(omega), axes=([0], [0]))


def interior(u, w):
    """Contraction of a form array w by a vector array u on the leading slots."""
    u, w = np.asarray(u), np.asarray(w)
    k = u.ndim
    return np.tensordot(u, w, axes=(list(range(k)), list(range(k)))) / factorial(k)


# --------------------------------------------------------------------------
# smooth maps between model spaces


@dataclass(frozen=True, eq=False)
class NamedMap:
    """A smooth map F: source -> target with an optional closed-form Jacobian.

    ``jacobian_fn(m)`` returns the matrix of the tangent map in left frames,
    shape (D_target, D_source).
    """

    name: str
    source: object
    target: object
    fn: object
    jacobian_fn: object = None

    def __call__(self, m):
        return self.fn(m)

    def fd_jacobian(self, m):
        y = self.fn(m)
        Q = self.source.tangent_basis(m)
        cols = self.source.directional(lambda p: self.target.left_difference(y, self.fn(p)), m, Q)
        return cols.T @ Q.T

    def jacobian(self, m):
        if self.jacobian_fn is not None:
            return np.asarray(self.jacobian_fn(m), dtype=float)
        return self.fd_jacobian(m)

    def then(self, other):
        """Composition other . self."""
        jac = None
        if self.jacobian_fn is not None and other.jacobian_fn is not None:
            jac = lambda m: other.jacobian_fn(self.fn(m)) @ self.jacobian_fn(m)
        return NamedMap(f"{other.name}.{self.name}", self.source, other.target,
                        lambda m: other.fn(self.fn(m)), jac)


def pushforward_at(F, m, u, fd=False):
    """Coefficients of F_* u at F(m) for a multivector field u on F.source."""
    J = F.fd_jacobian(m) if fd else F.jacobian(m)
    return push(u(m), J)


def pullback_at(F, m, w, fd=False):
    """Coefficients of F^* w at m for a form w on F.target."""
    J = F.fd_jacobian(m) if fd else F.jacobian(m)
    return push(w(F(m)), J.T)


def identity_map(space):
    return NamedMap("id", space, space, lambda m: m, lambda m: np.eye(space.D))


def multiplication_map(source, target, word):
    """m -> product over word [(factor, +1/-1)] as a point of the one-factor target."""
    model = target.factors[0].model

    def fn(m):
        out = model.identity()
        for i, e in word:
            out = out @ (m[i] if e > 0 else model.inverse(m[i]))
        return (out,)

    def jac(m):
        # right-trivialised differential, converted to the left frame at the product
        th = np.zeros((model.d, source.D))
        prefix = model.identity()
        for i, e in word:
            sl = source.slice(i)
            A = model.Ad(prefix)
            if e > 0:
                th[:, sl] += A @ model.Ad(m[i])
                prefix = prefix @ m[i]
            else:
                th[:, sl] -= A
                prefix = prefix @ model.inverse(m[i])
        return model.Ad(prefix).T @ th

    return NamedMap("mult", source, target, fn, jac)


def inversion_map(space, i=0):
    model = space.factors[i].model

    def fn(m):
        out = list(m)
        out[i] = model.inverse(m[i])
        return tuple(out)

    def jac(m):
        J = np.eye(space.D)
        J[space.slice(i), space.slice(i)] = -model.Ad(m[i])
        return J

    return NamedMap("inv", space, space, fn, jac)


def exp_map(source, target):
    """exp from an algebra factor to a group factor; Jacobian nu_inv(ad_xi)."""
    model = target.factors[0].model
    return NamedMap("exp", source, target, lambda m: (model.exp(m[0]),),
                    lambda m: analytic_of_ad(model, NU_INV, m[0]))


def log_map(source, target):
    """log from a group factor to an algebra factor; Jacobian nu(ad_xi)."""
    model = source.factors[0].model

    def fn(m):
        return (model.log(m[0]),)

    def jac(m):
        return analytic_of_ad(model, NU, model.log(m[0]))

    return NamedMap("log", source, target, fn, jac)


def projection_map(source, target, indices):
    indices = list(indices)

    def jac(m):
        J = np.zeros((target.D, source.D))
        for j, i in enumerate(indices):
            J[target.slice(j), source.slice(i)] = np.eye(source.factors[i].d)
        return J

    return NamedMap("proj", source, target, lambda m: tuple(m[i] for i in indices), jac)
