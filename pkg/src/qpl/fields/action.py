"""Group actions on model spaces and group-valued moment maps.

An :class:`ActionComponent` describes the action of one copy of a group on a
product space. On a group factor the copy acts by ``a -> g^l a g^(-r)`` with
``l, r`` in {0, 1}; on an algebra factor it acts by the adjoint action.
Conventions: ``xi_M(m) = d/dt exp(-t xi) . m`` at t = 0, and the generating
matrix ``L(m)`` has the fields ``(e_b)_M`` as columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qpl.errors import FusionError
from qpl.fields.field import Family, generate
from qpl.lie import GroupModel


@dataclass(frozen=True, eq=False)
class ActionComponent:
    """One acting group copy. ``entries`` maps factor index -> (l, r) or "adjoint".

    ``E`` (d x h, orthonormal columns) restricts the acting group to a
    subgroup with Lie algebra spanned by the columns of E.
    """

    model: GroupModel
    entries: dict
    E: np.ndarray = None
    label: str = ""

    @property
    def h(self):
        return self.model.d if self.E is None else self.E.shape[1]

    @property
    def f(self):
        """Structure constants of the acting algebra in its own basis."""
        if self.E is None:
            return self.model.f
        return np.einsum("abc,ai,bj,ck->ijk", self.model.f, self.E, self.E, self.E)

    @property
    def phi(self):
        return self.f / 2.0

    def ad(self, xi):
        return -np.einsum("abc,c->ab", self.f, xi)

    def Ad(self, g):
        A = self.model.Ad(g)
        return A if self.E is None else self.E.T @ A @ self.E

    def restrict(self, E):
        E0 = np.eye(self.model.d) if self.E is None else self.E
        return ActionComponent(self.model, dict(self.entries), E0 @ E, self.label)

    # ---- generating fields ------------------------------------------------

    def generators(self, space):
        """Family of generating vector fields (e_b)_M, b over the acting basis."""
        model, d = self.model, self.model.d
        adc = np.stack([model.ad(e) for e in np.eye(d)])
        entries = sorted(self.entries.items())
        for i, spec in entries:
            fac = space.factors[i]
            if fac.model.d != d:
                raise ValueError("acting group does not match factor")
            if spec == "adjoint" and fac.kind != "algebra":
                raise ValueError("adjoint action needs an algebra factor")
            if spec != "adjoint" and fac.kind != "group":
                raise ValueError("left/right actions need a group factor")

        def value(m):
            out = np.zeros((space.D, d))
            for i, spec in entries:
                sl = space.slice(i)
                if spec == "adjoint":
                    out[sl] = model.ad(m[i])
                else:
                    l, r = spec
                    out[sl] = -l * model.Ad(m[i]).T + r * np.eye(d)
            return out

        def dvalue(m):
            out = np.zeros((space.D, space.D, d))
            for i, spec in entries:
                sl = space.slice(i)
                if spec == "adjoint":
                    out[sl, sl] = adc
                else:
                    l, r = spec
                    if l:
                        out[sl, sl] = l * np.einsum("cab,bk->cak", adc, model.Ad(m[i]).T)
            return out

        fam = Family(space, value, dvalue, f"gen:{self.label}")
        return fam if self.E is None else fam.right_multiply(self.E)

    def generating_field(self, space, beta):
        """beta_M for a constant beta in the exterior algebra of the acting algebra."""
        return generate(beta, self.generators(space))

    def phi_field(self, space):
        return generate(self.phi, self.generators(space), label=f"phi_M:{self.label}")

    def act(self, g, m):
        """Action of the group element g (in the ambient group) on the point m."""
        out = list(m)
        gi = self.model.inverse(g)
        for i, spec in self.entries.items():
            if spec == "adjoint":
                out[i] = self.model.coords(g @ self.model.matrix(m[i]) @ gi)
            else:
                l, r = spec
                x = m[i]
                if l:
                    x = g @ x
                if r:
                    x = x @ gi
                out[i] = x
        return tuple(out)


def fuse_components(c1, c2):
    if c1.model is not c2.model and c1.model.name != c2.model.name:
        raise FusionError("fused components must carry the same group")
    if c1.E is not None or c2.E is not None:
        raise FusionError("fusion of restricted actions is not supported")
    entries = dict(c1.entries)
    for i, s in c2.entries.items():
        if i not in entries:
            entries[i] = s
            continue
        t = entries[i]
        if "adjoint" in (s, t) or (s[0] and t[0]) or (s[1] and t[1]):
            raise FusionError(f"actions on factor {i} do not combine into a diagonal action")
        entries[i] = (s[0] + t[0], s[1] + t[1])
    return ActionComponent(c1.model, entries, None, f"{c1.label}*{c2.label}")


# --------------------------------------------------------------------------
# moment maps


@dataclass(frozen=True, eq=False)
class MomentMap:
    """Group-valued map with optional closed-form pullback of theta^R.

    ``thetaR(m)`` returns the d x D matrix with Phi^* theta^R_a = sum_A M_aA theta^A.
    """

    model: GroupModel
    value: object
    thetaR_fn: object = None
    label: str = "Phi"

    def __call__(self, m):
        return self.value(m)

    def thetaR(self, m, space=None):
        if self.thetaR_fn is not None:
            return self.thetaR_fn(m)
        return self.model.Ad(self.value(m)) @ self.fd_thetaL(m, space)

    def thetaL(self, m, space=None):
        return self.model.Ad(self.value(m)).T @ self.thetaR(m, space)

    def fd_thetaL(self, m, space):
        """Phi^* theta^L by finite differences along the left frame of ``space``."""
        g = self.value(m)
        gi = self.model.inverse(g)
        Q = space.tangent_basis(m)
        cols = space.directional(lambda p: self.model.log(gi @ self.value(p)), m, Q)
        return cols.T @ Q.T

    def fd_thetaR(self, m, space):
        return self.model.Ad(self.value(m)) @ self.fd_thetaL(m, space)

    def times(self, other):
        """Pointwise product Phi1 * Phi2 (moment of a fusion)."""
        A, B = self, other

        def value(m):
            return A(m) @ B(m)

        th = None
        if A.thetaR_fn is not None and B.thetaR_fn is not None:
            th = lambda m: A.thetaR_fn(m) + A.model.Ad(A(m)) @ B.thetaR_fn(m)
        return MomentMap(self.model, value, th, f"{A.label}{B.label}")


def word_moment(space, model, word, label=None):
    """Moment map m -> product of factor entries; word = [(factor, +1 or -1), ...]."""
    word = list(word)

    def value(m):
        out = model.identity()
        for i, e in word:
            out = out @ (m[i] if e > 0 else model.inverse(m[i]))
        return out

    def thetaR(m):
        out = np.zeros((model.d, space.D))
        prefix = model.identity()
        for i, e in word:
            sl = space.slice(i)
            A = model.Ad(prefix)
            if e > 0:
                out[:, sl] += A @ model.Ad(m[i])
                prefix = prefix @ m[i]
            else:
                out[:, sl] -= A
                prefix = prefix @ model.inverse(m[i])
        return out

    name = label or "".join(f"g{i}" + ("" if e > 0 else "'") for i, e in word)
    return MomentMap(model, value, thetaR, name)
