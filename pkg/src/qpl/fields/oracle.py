"""Independent finite-difference oracles for the Schouten bracket and d.

Each group factor is charted by ``x -> g exp(x)``; the chart differential is
exact (``scipy.linalg.expm_frechet``), coefficients are moved to chart
coordinates, the holonomic formulas are evaluated with explicit index loops,
and only the outer derivative is taken by central differences. No code is
shared with :mod:`qpl.fields.calculus`.
"""

from __future__ import annotations

import itertools
from math import factorial

import numpy as np
from scipy.linalg import expm, expm_frechet

from qpl.errors import DomainError

STEP = 1e-3


def _perm_parity(p):
    p, s = list(p), 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def _chart(space, m):
    """Return (point(x), jac(x)) for the exponential chart centred at m."""

    def point(x):
        out = []
        for i, fac in enumerate(space.factors):
            xi = x[space.slice(i)]
            if fac.kind == "algebra":
                out.append(m[i] + xi)
            else:
                g = m[i] @ expm(fac.model.matrix(xi))
                out.append(np.real(g) if fac.model.real else g)
        return tuple(out)

    def jac(x):
        # columns: left-frame components of the coordinate fields d/dx_b
        J = np.zeros((space.D, space.D))
        for i, fac in enumerate(space.factors):
            sl = space.slice(i)
            if fac.kind == "algebra":
                J[sl, sl] = np.eye(fac.d)
                continue
            X = fac.model.matrix(x[sl])
            inv = expm(-X)
            for b in range(fac.d):
                dE = expm_frechet(X, fac.model.basis[b], compute_expm=False)
                J[sl, space.slice(i).start + b] = fac.model.coords(inv @ dE)
        return J

    return point, jac


def _to_coords(u, M):
    out = np.asarray(u, dtype=float)
    for _ in range(out.ndim):
        out = np.tensordot(out, M, axes=([0], [1]))
    return out


def _holonomic_field(space, m, field, covariant):
    point, jac = _chart(space, m)

    def coords(x):
        J = jac(x)
        M = J.T if covariant else np.linalg.inv(J)
        return _to_coords(field(point(x)), M)

    return coords


def _partials(fn, D, h=STEP):
    if h < 1e-12:
        raise DomainError("oracle step underflow")
    out = []
    for j in range(D):
        e = np.zeros(D)
        e[j] = h
        out.append((-fn(2 * e) + 8 * fn(e) - 8 * fn(-e) + fn(-2 * e)) / (12 * h))
    return np.stack(out)


def oracle_schouten(u, v, m, h=STEP):
    """[u, v] at m from holonomic chart coordinates (unconstrained spaces)."""
    space = u.space
    if space.constrained:
        raise DomainError("oracle works on unconstrained spaces")
    D, k, l = space.D, u.degree, v.degree
    n = k + l - 1
    if n < 0:
        return np.zeros(())
    uc = _holonomic_field(space, m, u, covariant=False)
    vc = _holonomic_field(space, m, v, covariant=False)
    x0 = np.zeros(D)
    U, V = uc(x0), vc(x0)
    dU = _partials(uc, D, h) if l >= 1 else None
    dV = _partials(vc, D, h) if k >= 1 else None
    out = np.zeros((D,) * n)
    sign2 = (-1) ** ((k - 1) * (l - 1))
    perms = [(p, _perm_parity(p)) for p in itertools.permutations(range(n))]
    for A in itertools.product(range(D), repeat=n):
        total = 0.0
        for p, s in perms:
            B = tuple(A[i] for i in p)
            if k >= 1:
                for j in range(D):
                    total += s * U[B[:k - 1] + (j,)] * dV[(j,) + B[k - 1:]] / (
                        factorial(k - 1) * factorial(l))
            if l >= 1:
                for j in range(D):
                    total -= sign2 * s * V[B[:l - 1] + (j,)] * dU[(j,) + B[l - 1:]] / (
                        factorial(l - 1) * factorial(k))
        out[A] = total
    # at x = 0 the chart frame coincides with the left frame
    return out


def oracle_d(w, m, h=STEP):
    """dw at m from holonomic chart coordinates (unconstrained spaces)."""
    space = w.space
    if space.constrained:
        raise DomainError("oracle works on unconstrained spaces")
    D, k = space.D, w.degree
    wc = _holonomic_field(space, m, w, covariant=True)
    dW = _partials(wc, D, h)
    out = np.zeros((D,) * (k + 1))
    for A in itertools.product(range(D), repeat=k + 1):
        out[A] = sum((-1) ** i * dW[(A[i],) + A[:i] + A[i + 1:]] for i in range(k + 1))
    return out
