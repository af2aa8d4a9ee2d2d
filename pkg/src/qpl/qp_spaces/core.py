"""Hamiltonian quasi-Poisson spaces and their basic constructions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from qpl.errors import FusionError
from qpl.fields.action import ActionComponent, MomentMap, fuse_components, word_moment
from qpl.fields.field import MultiVectorField, left_frame, pair_bivector, right_frame
from qpl.fields.space import ConjugacyConstraint, Factor, ModelSpace
from qpl.lie import restricted_cayley


@dataclass(frozen=True, eq=False)
class QuasiPoissonSpace:
    """A model space with group action components, bivector P and moment maps.

    ``moments[j]`` is the moment map of ``components[j]`` (or None).
    """

    space: ModelSpace
    components: tuple
    P: MultiVectorField
    moments: tuple = None
    label: str = ""
    omega: object = None
    provenance: tuple = field(default_factory=tuple)
    sample_scale: float = 1.0

    def __post_init__(self):
        if self.moments is None:
            object.__setattr__(self, "moments", (None,) * len(self.components))

    @property
    def hamiltonian(self):
        return all(mm is not None for mm in self.moments)

    def generators(self, j):
        return self.components[j].generators(self.space)

    def phi_M(self):
        out = None
        for c in self.components:
            ph = c.phi_field(self.space)
            out = ph if out is None else out + ph
        return out

    def random_point(self, rng, scale=None):
        return self.space.random_point(rng, self.sample_scale if scale is None else scale)

    def act(self, j, g, m):
        return self.components[j].act(g, m)

    def with_P(self, P, label=None):
        return replace(self, P=P, label=label or self.label)


# --------------------------------------------------------------------------
# constructors


def canonical_group_space(model):
    """(G, P_G = 1/2 e_a^R ^ e_a^L) with conjugation and moment map the identity."""
    space = ModelSpace([Factor(model)])
    P = pair_bivector([(0.5, right_frame(space, 0), left_frame(space, 0))], label="P_G")
    comp = ActionComponent(model, {0: (1, 1)}, label="conj")
    return QuasiPoissonSpace(space, (comp,), P, (word_moment(space, model, [(0, 1)], "id"),),
                             "G", provenance=("canonical",))


def class_bivector(space, comp, i=0):
    """P = 1/4 K_ab (e_a)_G ^ (e_b)_G with K the restricted Cayley transform of Ad_g."""
    model = space.factors[i].model
    gens = comp.generators(space)

    def coeff(m):
        L = gens(m)
        K = restricted_cayley(model, m[i])
        return 0.5 * L @ K @ L.T

    return MultiVectorField(space, 2, coeff, None, "P_class")


def conjugacy_class_space(model, g0):
    space = ModelSpace([Factor(model, "group", ConjugacyConstraint(model, np.asarray(g0)))])
    comp = ActionComponent(model, {0: (1, 1)}, label="conj")
    P = class_bivector(space, comp)
    return QuasiPoissonSpace(space, (comp,), P, (word_moment(space, model, [(0, 1)], "incl"),),
                             "class", provenance=("conjugacy_class",))


def ambient_group_bivector(space, i=0):
    """P_G of factor i written with the left and right frames (valid on a class)."""
    return pair_bivector([(0.5, right_frame(space, i), left_frame(space, i))], label="P_G")


def bi_action_space(model):
    """G with (g1, g2).a = g1 a g2^-1 and P = 0 (no moment map)."""
    space = ModelSpace([Factor(model)])
    Z = np.zeros((space.D,) * 3)
    P = MultiVectorField(space, 2, lambda m: np.zeros((space.D, space.D)), lambda m: Z, "0")
    comps = (ActionComponent(model, {0: (1, 0)}, label="left"),
             ActionComponent(model, {0: (0, 1)}, label="right"))
    return QuasiPoissonSpace(space, comps, P, (None, None), "G_bi", provenance=("bi_action",))


def double_DG(model):
    """D(G) = G x G with the G x G action of the internal fusion double."""
    space = ModelSpace([Factor(model), Factor(model)])
    P = pair_bivector([(0.5, left_frame(space, 0), right_frame(space, 1)),
                       (0.5, right_frame(space, 0), left_frame(space, 1))], label="P_D")
    comps = (ActionComponent(model, {0: (1, 0), 1: (0, 1)}, label="g1"),
             ActionComponent(model, {0: (0, 1), 1: (1, 0)}, label="g2"))
    moments = (word_moment(space, model, [(0, 1), (1, 1)], "a1a2"),
               word_moment(space, model, [(0, -1), (1, -1)], "a1'a2'"))
    return QuasiPoissonSpace(space, comps, P, moments, "D(G)", provenance=("double",))


def double_bold_DG(model):
    """The conjugation double with the commutator moment map."""
    return replace(fuse(double_DG(model), 0, 1), label="DD(G)")


# --------------------------------------------------------------------------
# products and fusion


def _embed_field(f, space, offset_factor, cls=None):
    sub = f.space
    lo = space.slice(offset_factor).start
    hi = lo + sub.D
    nf = len(sub.factors)
    k = f.degree
    idx = (slice(lo, hi),) * k

    def restrict(m):
        return tuple(m[offset_factor:offset_factor + nf])

    def coeff(m):
        out = np.zeros((space.D,) * k)
        out[idx] = f(restrict(m))
        return out

    d = None
    if f.has_closed_derivative:
        def d(m):
            out = np.zeros((space.D,) * (k + 1))
            out[(slice(lo, hi),) + idx] = f.closed_derivative(restrict(m))
            return out

    return (cls or type(f))(space, k, coeff, d, f.label)


def _embed_moment(mm, space, offset_factor, nf):
    lo = space.slice(offset_factor).start

    def restrict(m):
        return tuple(m[offset_factor:offset_factor + nf])

    th = None
    if mm.thetaR_fn is not None:
        def th(m):
            t = mm.thetaR_fn(restrict(m))
            out = np.zeros((t.shape[0], space.D))
            out[:, lo:lo + t.shape[1]] = t
            return out

    return MomentMap(mm.model, lambda m: mm.value(restrict(m)), th, mm.label)


def _shift(comp, k):
    return ActionComponent(comp.model, {i + k: s for i, s in comp.entries.items()}, comp.E,
                           comp.label)


def product(A, B):
    """Direct product with the union of the action components and P_A + P_B."""
    space = ModelSpace(A.space.factors + B.space.factors, A.space.engine)
    nA = len(A.space.factors)
    P = _embed_field(A.P, space, 0) + _embed_field(B.P, space, nA)
    comps = tuple(A.components) + tuple(_shift(c, nA) for c in B.components)
    moments = tuple(None if mm is None else _embed_moment(mm, space, 0, nA) for mm in A.moments)
    moments += tuple(None if mm is None else _embed_moment(mm, space, nA, len(B.space.factors))
                     for mm in B.moments)
    return QuasiPoissonSpace(space, comps, P, moments, f"{A.label}x{B.label}",
                             provenance=("product", A.provenance, B.provenance))


def psi_field(qp, i, j):
    """psi_M = 1/2 (e_a)^i_M ^ (e_a)^j_M for two components."""
    return pair_bivector([(0.5, qp.generators(i), qp.generators(j))], label="psi_M")


def fuse(qp, i, j):
    """Fuse components i and j; the fused component takes the lower position."""
    if i == j:
        raise FusionError("cannot fuse a component with itself")
    n = len(qp.components)
    if not (0 <= i < n and 0 <= j < n):
        raise FusionError(f"component index out of range: {i}, {j}")
    c = fuse_components(qp.components[i], qp.components[j])
    P = (qp.P - psi_field(qp, i, j))
    P.label = "P_fus"
    mi, mj = qp.moments[i], qp.moments[j]
    mm = None if mi is None or mj is None else mi.times(mj)
    lo, hi = min(i, j), max(i, j)
    comps = list(qp.components)
    moms = list(qp.moments)
    comps[lo], moms[lo] = c, mm
    del comps[hi], moms[hi]
    return QuasiPoissonSpace(qp.space, tuple(comps), P, tuple(moms), f"fus({qp.label})",
                             provenance=("fuse", i, j, qp.provenance))


def fusion_product(A, B):
    """A (*) B: the product with its two (single) components fused."""
    if len(A.components) != 1 or len(B.components) != 1:
        raise FusionError("fusion product needs spaces with one action component each")
    pr = product(A, B)
    return replace(fuse(pr, 0, 1), label=f"{A.label}*{B.label}")
