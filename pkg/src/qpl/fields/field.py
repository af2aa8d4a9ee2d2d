"""Multivector fields and differential forms in the global left frame.

A field of degree k evaluates at a point to a totally antisymmetric array of
shape ``(D,)*k``. Fields may carry a closed-form derivative evaluator
returning an array of shape ``(D,) + (D,)*k`` whose leading index is the left
frame direction ``e_c``; otherwise derivatives come from the space's
finite-difference engine along flows.
"""

from __future__ import annotations

import numpy as np

from qpl.fields.algebra import push, wedge


class Field:
    kind = "field"

    def __init__(self, space, degree, coeff, dcoeff=None, label=""):
        self.space = space
        self.degree = degree
        self._coeff = coeff
        self._dcoeff = dcoeff
        self.label = label

    def _new(self, degree, coeff, dcoeff=None, label=""):
        return type(self)(self.space, degree, coeff, dcoeff, label)

    def __call__(self, m):
        return np.asarray(self._coeff(m), dtype=float)

    at = __call__

    @property
    def has_closed_derivative(self):
        return self._dcoeff is not None

    def closed_derivative(self, m):
        return np.asarray(self._dcoeff(m), dtype=float)

    def fd_derivative(self, m, Q=None):
        Q = self.space.tangent_basis(m) if Q is None else Q
        return self.space.directional(self._coeff, m, Q)

    def derivative(self, m, Q=None):
        """Derivatives along the columns of Q (default: a tangent basis at m)."""
        if self._dcoeff is None:
            return self.fd_derivative(m, Q)
        dc = self.closed_derivative(m)
        if Q is None:
            if not self.space.constrained:
                return dc
            Q = self.space.tangent_basis(m)
        return np.tensordot(Q.T, dc, axes=1)

    # ---- arithmetic -------------------------------------------------------

    def _combine(self, other, op, sym):
        if isinstance(other, Field):
            if other.degree != self.degree:
                raise ValueError("degree mismatch in field arithmetic")
            d = None
            if self._dcoeff is not None and other._dcoeff is not None:
                d = lambda m: op(self._dcoeff(m), other._dcoeff(m))
            return self._new(self.degree, lambda m: op(self(m), other(m)), d,
                             f"({self.label}{sym}{other.label})")
        return NotImplemented

    def __add__(self, other):
        return self._combine(other, np.add, "+")

    def __sub__(self, other):
        return self._combine(other, np.subtract, "-")

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, c):
        d = None if self._dcoeff is None else (lambda m: c * self._dcoeff(m))
        return self._new(self.degree, lambda m: c * self(m), d, f"{c}*{self.label}")

    def __rmul__(self, c):
        if np.isscalar(c):
            return self.scale(float(c))
        return NotImplemented

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scale(float(other))
        if isinstance(other, Field):
            return self.wedge(other)
        return NotImplemented

    def wedge(self, other):
        k, l = self.degree, other.degree
        coeff = lambda m: wedge(self(m), other(m))
        d = None
        if self._dcoeff is not None and other._dcoeff is not None:
            def d(m):
                a, b = self(m), other(m)
                da, db = self._dcoeff(m), other._dcoeff(m)
                return np.stack([wedge(da[c], b) + wedge(a, db[c]) for c in range(len(da))])
        kind = self if k > 0 or not isinstance(other, Field) else other
        return kind._new(k + l, coeff, d, f"{self.label}^{other.label}")


class MultiVectorField(Field):
    kind = "vector"


class DifferentialForm(Field):
    kind = "form"


# --------------------------------------------------------------------------
# scalar functions


def function_field(space, fn, dfn=None, label="f", cls=MultiVectorField):
    """Degree-0 field from ``fn(m) -> float``; ``dfn(m)`` returns the left differential."""
    return cls(space, 0, lambda m: np.asarray(fn(m), dtype=float), dfn, label)


def trace_function(space, i, label=None):
    """Re tr of the group entry of factor i, with its closed-form differential."""
    model = space.factors[i].model

    def fn(m):
        return np.real(np.trace(m[i]))

    def dfn(m):
        out = np.zeros(space.D)
        out[space.slice(i)] = np.real(np.einsum("ij,aji->a", m[i], model.basis))
        return out

    return function_field(space, fn, dfn, label or f"tr{i}")


def differential(f):
    """The exact 1-form df of a degree-0 field (FD fallback if no closed form)."""
    space = f.space

    def coeff(m):
        if f.has_closed_derivative and not space.constrained:
            return f.closed_derivative(m)
        Q = space.tangent_basis(m)
        return Q @ f.derivative(m, Q)

    return DifferentialForm(space, 1, coeff, None, f"d{f.label}")


# --------------------------------------------------------------------------
# vector families: point -> (D x n) matrix of column vectors (or covectors)


class Family:
    """A point-dependent D x n matrix whose columns are fields of degree one.

    ``dvalue(m)`` (optional) returns the derivatives along every left frame
    direction, shape (D, D, n).
    """

    def __init__(self, space, value, dvalue=None, label=""):
        self.space = space
        self._value = value
        self._dvalue = dvalue
        self.label = label

    def __call__(self, m):
        return np.asarray(self._value(m), dtype=float)

    def dvalue(self, m):
        return None if self._dvalue is None else np.asarray(self._dvalue(m), dtype=float)

    @property
    def has_closed_derivative(self):
        return self._dvalue is not None

    def __add__(self, other):
        d = None
        if self._dvalue is not None and other._dvalue is not None:
            d = lambda m: self._dvalue(m) + other._dvalue(m)
        return Family(self.space, lambda m: self(m) + other(m), d, f"{self.label}+{other.label}")

    def __neg__(self):
        return self.times(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def times(self, c):
        d = None if self._dvalue is None else (lambda m: c * self._dvalue(m))
        return Family(self.space, lambda m: c * self(m), d, self.label)

    def right_multiply(self, E):
        """Columns recombined by the constant matrix E (n x h)."""
        d = None if self._dvalue is None else (lambda m: self._dvalue(m) @ E)
        return Family(self.space, lambda m: self(m) @ E, d, self.label)

    def column(self, a, cls=MultiVectorField):
        d = None if self._dvalue is None else (lambda m: self._dvalue(m)[:, :, a])
        return cls(self.space, 1, lambda m: self(m)[:, a], d, f"{self.label}[{a}]")


def left_frame(space, i):
    """Columns e_a^L of factor i (coordinate fields on an algebra factor)."""
    d = space.factors[i].d
    X = space.block(i, np.eye(d))
    Z = np.zeros((space.D, space.D, d))
    return Family(space, lambda m: X, lambda m: Z, f"L{i}")


def right_frame(space, i):
    """Columns e_a^R of factor i: (e_a^R)_b = (Ad_g)_ab in the left frame."""
    fac = space.factors[i]
    if fac.kind != "group":
        raise ValueError("right frame needs a group factor")
    model, sl = fac.model, space.slice(i)
    adc = np.stack([model.ad(e) for e in np.eye(model.d)])

    def value(m):
        return space.block(i, model.Ad(m[i]).T)

    def dvalue(m):
        out = np.zeros((space.D, space.D, model.d))
        At = model.Ad(m[i]).T
        out[sl, sl] = -np.einsum("cab,bk->cak", adc, At)
        return out

    return Family(space, value, dvalue, f"R{i}")


def left_frame_field(space, i, a):
    if not 0 <= a < space.factors[i].d:
        raise IndexError(f"frame index {a} out of range")
    return left_frame(space, i).column(a)


def right_frame_field(space, i, a):
    if not 0 <= a < space.factors[i].d:
        raise IndexError(f"frame index {a} out of range")
    return right_frame(space, i).column(a)


# --------------------------------------------------------------------------
# builders


def pair_bivector(pairs, cls=MultiVectorField, label="P"):
    """Sum of c * sum_a X_a ^ Y_a over ``pairs = [(c, X, Y), ...]`` of families."""
    space = pairs[0][1].space

    def coeff(m):
        out = np.zeros((space.D, space.D))
        for c, X, Y in pairs:
            x, y = X(m), Y(m)
            out += c * (x @ y.T - y @ x.T)
        return out

    d = None
    if all(X.has_closed_derivative and Y.has_closed_derivative for _, X, Y in pairs):
        def d(m):
            out = np.zeros((space.D, space.D, space.D))
            for c, X, Y in pairs:
                x, y, dx, dy = X(m), Y(m), X.dvalue(m), Y.dvalue(m)
                t = dx @ y.T + np.einsum("ak,cbk->cab", x, dy)
                out += c * (t - np.swapaxes(t, 1, 2))
            return out

    return cls(space, 2, coeff, d, label)


def generate(beta, family, cls=MultiVectorField, label=None):
    """beta_M for a constant antisymmetric array beta on the family's columns."""
    beta = np.asarray(beta, dtype=float)
    space, k = family.space, beta.ndim
    coeff = lambda m: push(beta, family(m))

    d = None
    if family.has_closed_derivative and k > 0:
        def d(m):
            X, dX = family(m), family.dvalue(m)
            return np.stack([
                sum(_push_slots(beta, [dX[c] if t == s else X for t in range(k)]) for s in range(k))
                for c in range(space.D)
            ])
    elif k == 0:
        d = lambda m: np.zeros(space.D)

    return cls(space, k, coeff, d, label or f"gen{k}")


def _push_slots(beta, mats):
    out = beta
    for J in mats:
        out = np.tensordot(out, J, axes=([0], [1]))
    return out


def constant_field(space, array, cls=MultiVectorField, label="const"):
    array = np.asarray(array, dtype=float)
    Z = np.zeros((space.D,) + array.shape)
    return cls(space, array.ndim, lambda m: array, lambda m: Z, label)
