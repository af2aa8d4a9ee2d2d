"""Representation varieties as fused spaces, invariant trace words and reduced brackets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qpl.errors import ConvergenceError, DomainError, InvarianceError
from qpl.fields.action import ActionComponent, MomentMap
from qpl.fields.field import MultiVectorField
from qpl.fields.space import ConjugacyConstraint, ModelSpace
from qpl.lie import RANK_RTOL
from qpl.moduli.words import Letter, invert, parse_word
from qpl.qp_spaces.core import (
    QuasiPoissonSpace, canonical_group_space, double_bold_DG, fusion_product,
)

VARIANTS = ("qu", "free")


@dataclass(frozen=True)
class SurfaceData:
    """Genus h with r >= 1 boundary circles."""

    genus: int
    boundary: int

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        if self.boundary < 1:
            raise ValueError("the construction needs at least one boundary circle")

    def relator(self):
        """Letters of prod_j [a_j, b_j] prod_k c_k."""
        out = []
        for j in range(1, self.genus + 1):
            out += [Letter("a", j), Letter("b", j), Letter("a", j, -1), Letter("b", j, -1)]
        out += [Letter("c", k) for k in range(1, self.boundary + 1)]
        return tuple(out)


@dataclass(frozen=True, eq=False)
class RepVariety:
    """A fused space whose quotient by G is the representation variety.

    ``factors`` maps generator names to factor indices. In the ``free``
    variant the last boundary generator is not a factor; it is replaced by
    the inverse of the moment word.
    """

    surface: SurfaceData
    variant: str
    qp: QuasiPoissonSpace
    factors: dict

    @property
    def model(self):
        return self.qp.components[0].model

    @property
    def space(self):
        return self.qp.space

    @property
    def moment(self):
        return self.qp.moments[0]

    def moment_letters(self):
        return tuple(x for x in self.surface.relator() if f"{x.kind}{x.index}" in self.factors)

    def resolve(self, letters):
        """Translate letters into (factor, power) pairs."""
        out = []
        for x in letters:
            name = f"{x.kind}{x.index}"
            if name in self.factors:
                out.append((self.factors[name], x.power))
            elif self.variant == "free" and x.kind == "c" and x.index == self.surface.boundary:
                sub = self.moment_letters()
                out += self.resolve(invert(sub) if x.power > 0 else sub)
            else:
                raise ValueError(f"unknown generator {name} for genus {self.surface.genus} "
                                 f"with {self.surface.boundary} boundary circles")
        return out

    def random_point(self, rng, scale=1.0):
        return self.space.random_point(rng, scale)


def _point_space(model):
    space = ModelSpace([])
    P = MultiVectorField(space, 2, lambda m: np.zeros((0, 0)), lambda m: np.zeros((0, 0, 0)), "0")
    comp = ActionComponent(model, {}, label="trivial")
    mom = MomentMap(model, lambda m: model.identity(), lambda m: np.zeros((model.d, 0)), "e")
    return QuasiPoissonSpace(space, (comp,), P, (mom,), "pt", provenance=("point",))


def build_rep_variety(surface, model, variant="qu"):
    """D(G) fused h times, then G fused r times (``qu``) or r - 1 times (``free``)."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    h, r = surface.genus, surface.boundary
    names, parts = [], []
    for j in range(1, h + 1):
        parts.append(double_bold_DG(model))
        names += [f"a{j}", f"b{j}"]
    n_c = r if variant == "qu" else r - 1
    for k in range(1, n_c + 1):
        parts.append(canonical_group_space(model))
        names.append(f"c{k}")
    if not parts:
        qp = _point_space(model)
    else:
        qp = parts[0]
        for p in parts[1:]:
            qp = fusion_product(qp, p)
    return RepVariety(surface, variant, qp, {n: i for i, n in enumerate(names)})


def embed_point(free, m):
    """m -> (m, Phi(m)^-1): a point of the free variant to the identity level of ``qu``."""
    if free.variant != "free":
        raise ValueError("embedding starts from the free variant")
    return tuple(m) + (free.model.inverse(free.moment(m)),)


# --------------------------------------------------------------------------
# invariant functions


def _product(model, mats):
    out = model.identity()
    for x in mats:
        out = out @ x
    return out


@dataclass(frozen=True, eq=False)
class InvariantFunction:
    """F(m) = Re tr(word(m)) with its closed differential in the left frame."""

    rv: RepVariety
    letters: tuple
    label: str = ""

    @classmethod
    def from_text(cls, rv, text):
        letters = parse_word(text)
        rv.resolve(letters)
        return cls(rv, letters, text)

    def _mats(self, m):
        model = self.rv.model
        word = self.rv.resolve(self.letters)
        mats = [m[i] if p > 0 else model.inverse(m[i]) for i, p in word]
        return word, mats

    def __call__(self, m):
        _, mats = self._mats(m)
        return float(np.real(np.trace(_product(self.rv.model, mats))))

    def differential(self, m):
        """Row covector dF (length D) in the left frame."""
        model, space = self.rv.model, self.rv.space
        word, mats = self._mats(m)
        pre = [model.identity()]
        for x in mats:
            pre.append(pre[-1] @ x)
        post = [model.identity()]
        for x in reversed(mats):
            post.append(x @ post[-1])
        post = post[::-1]  # post[p] = mats[p] ... mats[n-1]
        out = np.zeros(space.D)
        for p, (i, s) in enumerate(word):
            cyc = post[p + 1] @ pre[p]
            M = cyc @ mats[p] if s > 0 else -mats[p] @ cyc
            out[space.slice(i)] += np.real(np.einsum("aij,ji->a", model.basis, M))
        return out

    def fd_differential(self, m):
        space = self.rv.space
        return space.directional(self, m, np.eye(space.D))

    def invariance_residual(self, m, rng, trials=3):
        comp = self.rv.qp.components[0]
        out = 0.0
        for _ in range(trials):
            g = self.rv.model.random_element(rng, 1.0)
            out = max(out, abs(self(comp.act(g, m)) - self(m)))
        return out


def bracket(qp, dF1, dF2, m):
    return float(dF1 @ qp.P(m) @ dF2)


def reduced_bracket(F1, F2, m, rng=None, check=True, tol=1e-9):
    """{F1, F2}(m) = P(dF1, dF2); with ``check`` both inputs are tested for invariance."""
    rv = F1.rv
    if check:
        rng = np.random.default_rng(0) if rng is None else rng
        for F in (F1, F2):
            res = F.invariance_residual(m, rng)
            if res > tol * max(1.0, abs(F(m))):
                raise InvarianceError(f"{F.label or 'function'} is not invariant ({res:.2e})")
    return bracket(rv.qp, F1.differential(m), F2.differential(m), m)


def jacobi_residual(qp, fns, m):
    """Cyclic sum of {{f1, f2}, f3} minus 2 phi_M(df1, df2, df3).

    ``fns`` holds three pairs (value, differential) of callables on points.
    """
    space = qp.space
    I = np.eye(space.D)
    d = [dfn(m) for _, dfn in fns]

    def br(i, j):
        return lambda p: bracket(qp, fns[i][1](p), fns[j][1](p), p)

    total = 0.0
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        dbr = space.directional(br(i, j), m, I)
        total += bracket(qp, dbr, d[k], m)
    phi = qp.phi_M()(m)
    return float(total - 2.0 * np.einsum("abc,a,b,c->", phi, d[0], d[1], d[2]))


# --------------------------------------------------------------------------
# level sets


@dataclass(frozen=True, eq=False)
class LevelSetPoint:
    point: tuple
    distance: float
    iterations: int
    locally_free: bool


def _class_distance(model, g, c0):
    return ConjugacyConstraint(model, c0).distance(g)


def locally_free(qp, m, j=0):
    L = qp.generators(j)(m)
    s = np.linalg.svd(L, compute_uv=False)
    return int(np.sum(s > RANK_RTOL * max(s[0] if s.size else 0.0, 1.0))) == L.shape[1]


def project_to_level_set(rv, m0, c0=None, tol=1e-9, max_iter=100):
    """Gauss-Newton on (m, k) -> log(c0^-1 k^-1 Phi(m) k) until Phi(m) lies on the class of c0."""
    model, space = rv.model, rv.space
    c0 = model.identity() if c0 is None else np.asarray(c0)
    mm = rv.moment
    m = tuple(m0)
    if _class_distance(model, mm(m), c0) <= tol:
        return LevelSetPoint(m, _class_distance(model, mm(m), c0), 0, locally_free(rv.qp, m))
    if space.D == 0:
        raise ConvergenceError("moment is constant and misses the requested class")
    ci = model.inverse(c0)
    k = model.identity()
    d = model.d

    def residual(m, k):
        return model.log(ci @ model.inverse(k) @ mm(m) @ k)

    for it in range(1, max_iter + 1):
        try:
            R = residual(m, k)
        except DomainError:
            R = None
        if R is None:
            raise ConvergenceError("level-set iteration left the domain of log")
        if np.linalg.norm(R) <= 1e-2 * tol:
            break

        def F(v):
            return residual(space.flow(m, v[:space.D], 1.0), k @ model.exp(v[space.D:]))

        J = np.stack([space.engine.diff(lambda s, e=e: F(s * e))
                      for e in np.eye(space.D + d)], axis=1)
        step = -np.linalg.lstsq(J, R, rcond=None)[0]
        n = np.linalg.norm(step)
        step *= min(1.0, 0.5 / max(n, 1e-300))
        m = space.flow(m, step[:space.D], 1.0)
        k = k @ model.exp(step[space.D:])
    dist = _class_distance(model, mm(m), c0)
    if dist > tol:
        raise ConvergenceError(f"level-set projection stalled at distance {dist:.2e}")
    return LevelSetPoint(m, dist, it, locally_free(rv.qp, m))


def tangency_and_rank_checks(qp, dF, m, j=0):
    """Hamiltonian field of F against dPhi, and the rank of dPhi at m."""
    mm = qp.moments[j]
    th = mm.thetaR(m, qp.space)
    v = dF @ qp.P(m)
    s = np.linalg.svd(th, compute_uv=False)
    rank = int(np.sum(s > RANK_RTOL * max(s[0] if s.size else 0.0, 1.0)))
    free = locally_free(qp, m, j)
    return {
        "tangency": float(np.linalg.norm(th @ v)),
        "rank": rank,
        "locally_free": free,
        "max_rank": rank == qp.components[j].h,
    }
