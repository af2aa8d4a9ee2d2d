"""Product model spaces, points, and the finite-difference engine.

A point of a :class:`ModelSpace` is a tuple with one entry per factor: an
``n x n`` matrix for a group factor, a coordinate vector for an algebra
factor. Tangent vectors are coefficient vectors of length ``D`` in the
global left-invariant frame (coordinate frame on algebra factors).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qpl.errors import DomainError
from qpl.fields.algebra import register_structure
from qpl.lie import GroupModel, RANK_RTOL, centralizer_split


@dataclass(frozen=True)
class DerivativeEngine:
    """Central finite differences with optional Richardson extrapolation."""

    h: float = 1e-4
    order: int = 4
    richardson: int = 1

    def _stencil(self, F, h):
        if self.order == 2:
            return (F(h) - F(-h)) / (2 * h)
        if self.order == 4:
            return (-F(2 * h) + 8 * F(h) - 8 * F(-h) + F(-2 * h)) / (12 * h)
        raise ValueError(f"unsupported order {self.order}")

    def diff(self, F):
        """d/ds F(s) at s = 0 for an array-valued F."""
        if self.h < 1e-12:
            raise DomainError("finite-difference step underflow")
        table = [np.asarray(self._stencil(F, self.h / 2 ** j)) for j in range(self.richardson + 1)]
        for level in range(1, self.richardson + 1):
            w = 2.0 ** (self.order + 2 * (level - 1))
            table = [(w * table[j + 1] - table[j]) / (w - 1) for j in range(len(table) - 1)]
        return table[0]


DEFAULT_ENGINE = DerivativeEngine()


# --------------------------------------------------------------------------
# constraints on a single group factor


@dataclass(frozen=True, eq=False)
class ConjugacyConstraint:
    """Restrict a group factor to the conjugacy class of ``base``."""

    model: GroupModel
    base: np.ndarray

    @property
    def dim(self):
        return self.model.d - centralizer_split(self.model, self.base)[0].shape[1]

    def tangent_basis(self, g):
        M = np.eye(self.model.d) - self.model.Ad(g).T
        U, s, _ = np.linalg.svd(M)
        top = s[0] if s.size else 0.0
        rank = int(np.sum(s > RANK_RTOL * max(top, 1.0))) if top > 0 else 0
        return U[:, :rank]

    def flow(self, g, v, s):
        M = np.eye(self.model.d) - self.model.Ad(g).T
        xi = np.linalg.pinv(M, rcond=1e-8) @ v
        k = self.model.exp(-s * xi)
        return k @ g @ self.model.inverse(k)

    def distance(self, g):
        """Spectral distance between g and the class (sorted eigenvalue angles)."""
        a = np.sort(np.angle(np.linalg.eigvals(g)))
        b = np.sort(np.angle(np.linalg.eigvals(self.base)))
        return float(np.max(np.abs(np.exp(1j * a) - np.exp(1j * b))))

    def sample(self, rng, scale=1.5):
        k = self.model.random_element(rng, scale)
        return k @ self.base @ self.model.inverse(k)


@dataclass(frozen=True, eq=False)
class SubgroupConstraint:
    """Restrict a group factor to a neighbourhood of ``base`` in a closed subgroup.

    ``E`` is an orthonormal basis (d x h) of the subalgebra.
    """

    model: GroupModel
    base: np.ndarray
    E: np.ndarray
    radius: float = 0.2

    @property
    def dim(self):
        return self.E.shape[1]

    def tangent_basis(self, g):
        return self.E

    def flow(self, g, v, s):
        return g @ self.model.exp(s * (self.E @ (self.E.T @ v)))

    def sample(self, rng, scale=None):
        scale = self.radius if scale is None else scale
        xi = rng.standard_normal(self.E.shape[1])
        xi *= scale * rng.uniform(0.2, 1.0) / max(np.linalg.norm(xi), 1e-300)
        return self.base @ self.model.exp(self.E @ xi)


@dataclass(frozen=True, eq=False)
class LevelSet:
    """The submanifold c = 0 of an ambient space, c a submersion near the level.

    ``fn(m)`` returns c(m) (length k) and ``jac(m)`` its differential (k x D)
    in the left frame. Flows move along the ambient flow and return to the
    level by Gauss-Newton steps; ``sampler(rng)`` draws points on the level.
    """

    ambient: object
    fn: object
    jac: object
    codim: int
    sampler: object = None
    tol: float = 1e-13
    max_iter: int = 30

    @property
    def dim(self):
        return self.ambient.dim - self.codim

    def tangent_basis(self, m):
        B = self.ambient.tangent_basis(m)
        JB = self.jac(m) @ B
        if JB.shape[0] == 0:
            return B
        _, s, Vh = np.linalg.svd(JB)
        rank = int(np.sum(s > RANK_RTOL * max(s[0] if s.size else 0.0, 1.0)))
        return B @ Vh[rank:].T

    def project(self, m):
        for _ in range(self.max_iter):
            c = self.fn(m)
            if np.max(np.abs(c), initial=0.0) <= self.tol:
                return m
            B = self.ambient.tangent_basis(m)
            step = -B @ np.linalg.lstsq(self.jac(m) @ B, c, rcond=None)[0]
            m = self.ambient.flow(m, step, 1.0)
        if np.max(np.abs(self.fn(m)), initial=0.0) > 1e3 * self.tol:
            raise DomainError("projection onto the level set did not converge")
        return m

    def flow(self, m, v, s):
        return self.project(self.ambient.flow(m, v, s))

    def sample(self, rng):
        if self.sampler is None:
            raise DomainError("level set has no sampler")
        return self.sampler(rng)


# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Factor:
    model: GroupModel
    kind: str = "group"
    constraint: object = None

    def __post_init__(self):
        if self.kind not in ("group", "algebra"):
            raise ValueError(f"unknown factor kind {self.kind!r}")

    @property
    def d(self):
        return self.model.d


@dataclass(frozen=True, eq=False)
class ModelSpace:
    factors: tuple
    engine: DerivativeEngine = field(default=DEFAULT_ENGINE)
    level: object = None

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        offsets = np.cumsum([0] + [f.d for f in self.factors])
        object.__setattr__(self, "_offsets", tuple(int(o) for o in offsets))
        C = np.zeros((self.D, self.D, self.D))
        for i, fac in enumerate(self.factors):
            if fac.kind == "group":
                sl = self.slice(i)
                C[sl, sl, sl] = fac.model.f
        object.__setattr__(self, "structure", C)
        object.__setattr__(self, "structure_key", register_structure(C))

    # ---- layout -----------------------------------------------------------

    @property
    def D(self):
        return self._offsets[-1]

    def slice(self, i):
        return slice(self._offsets[i], self._offsets[i + 1])

    def block(self, i, M):
        """Embed a (d_i x k) block as rows of a (D x k) matrix."""
        out = np.zeros((self.D,) + np.shape(M)[1:])
        out[self.slice(i)] = M
        return out

    @property
    def constrained(self):
        return self.level is not None or any(f.constraint is not None for f in self.factors)

    @property
    def dim(self):
        if self.level is not None:
            return self.level.dim
        return sum(f.constraint.dim if f.constraint is not None else f.d for f in self.factors)

    def with_factors(self, factors):
        return ModelSpace(tuple(factors), self.engine)

    # ---- points -----------------------------------------------------------

    def identity_point(self):
        return tuple(
            f.model.identity() if f.kind == "group" else np.zeros(f.d) for f in self.factors
        )

    def random_point(self, rng, scale=1.0):
        if self.level is not None:
            return self.level.sample(rng)
        pts = []
        for f in self.factors:
            if f.constraint is not None:
                pts.append(f.constraint.sample(rng))
            elif f.kind == "group":
                pts.append(f.model.random_element(rng, scale))
            else:
                pts.append(f.model.random_algebra(rng, scale))
        return tuple(pts)

    def check_point(self, m, tol=1e-9):
        for f, x in zip(self.factors, m):
            if f.kind == "group" and not f.model.is_group_element(x, max(tol, 1e-10)):
                return False
            if isinstance(f.constraint, ConjugacyConstraint) and f.constraint.distance(x) > tol:
                return False
        return True

    # ---- tangent structure ------------------------------------------------

    def tangent_basis(self, m):
        """Orthonormal basis (D x t) of the tangent space at m in the left frame."""
        if self.level is not None:
            return self.level.tangent_basis(m)
        if not self.constrained:
            return np.eye(self.D)
        cols = []
        for i, (f, x) in enumerate(zip(self.factors, m)):
            B = np.eye(f.d) if f.constraint is None else f.constraint.tangent_basis(x)
            cols.append(self.block(i, B))
        return np.concatenate(cols, axis=1)

    def flow(self, m, v, s):
        """Point reached from m after parameter s along the tangent vector v."""
        if self.level is not None:
            return self.level.flow(m, v, s)
        v = np.asarray(v, dtype=float)
        out = []
        for i, (f, x) in enumerate(zip(self.factors, m)):
            vi = v[self.slice(i)]
            if not np.any(vi):
                out.append(x)
            elif f.kind == "algebra":
                out.append(x + s * vi)
            elif f.constraint is not None:
                out.append(f.constraint.flow(x, vi, s))
            else:
                out.append(x @ f.model.exp(s * vi))
        return tuple(out)

    def left_difference(self, m, m2):
        """Left-frame coordinates of the displacement from m to a nearby m2."""
        out = []
        for f, x, y in zip(self.factors, m, m2):
            if f.kind == "algebra":
                out.append(y - x)
            else:
                out.append(f.model.log(f.model.inverse(x) @ y))
        return np.concatenate(out)

    def directional(self, F, m, directions):
        """FD derivatives of F along each column of ``directions``."""
        directions = np.asarray(directions)
        if directions.shape[1] == 0:
            return np.zeros((0,) + np.shape(F(m)))
        return np.stack([
            self.engine.diff(lambda s, v=directions[:, j]: np.asarray(F(self.flow(m, v, s))))
            for j in range(directions.shape[1])
        ])
