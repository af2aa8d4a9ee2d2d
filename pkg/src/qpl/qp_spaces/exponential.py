"""Hamiltonian Poisson spaces with algebra-valued moments, and exp/log transfers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qpl.errors import DomainError
from qpl.fields.action import ActionComponent, MomentMap
from qpl.fields.algebra import norm, push
from qpl.fields.calculus import schouten
from qpl.fields.field import MultiVectorField
from qpl.fields.space import Factor, ModelSpace
from qpl.lie import NU, NU_INV, analytic_of_ad
from qpl.qp_spaces.core import QuasiPoissonSpace
from qpl.rmatrix.dynamical import T_of


@dataclass(frozen=True, eq=False)
class AlgebraMoment:
    """Algebra-valued moment map with Jacobian ``jac(m)`` (d x D)."""

    model: object
    value: object
    jac: object
    label: str = "Phi0"

    def __call__(self, m):
        return self.value(m)


@dataclass(frozen=True, eq=False)
class PoissonSpace:
    space: ModelSpace
    components: tuple
    P0: MultiVectorField
    moments: tuple
    label: str = ""
    sample_scale: float = 0.5
    provenance: tuple = field(default_factory=tuple)

    def generators(self, j):
        return self.components[j].generators(self.space)

    def random_point(self, rng):
        return self.space.random_point(rng, self.sample_scale)


def linear_poisson_space(model, sample_scale=0.5):
    """(g, P_0 = -ad_xi, id) with the adjoint action."""
    space = ModelSpace([Factor(model, "algebra")])
    adc = np.stack([-model.ad(e) for e in np.eye(model.d)])
    P0 = MultiVectorField(space, 2, lambda m: -model.ad(m[0]), lambda m: adc, "P0")
    comp = ActionComponent(model, {0: "adjoint"}, label="adj")
    mom = AlgebraMoment(model, lambda m: m[0], lambda m: np.eye(model.d), "id")
    return PoissonSpace(space, (comp,), P0, (mom,), "g*", sample_scale, ("linear",))


def T_M(components, moments, space):
    """(Phi0^* T)_M summed over components, as a field."""

    def coeff(m):
        out = np.zeros((space.D, space.D))
        for comp, mom in zip(components, moments):
            L = comp.generators(space)(m)
            out += push(T_of(comp.model, mom(m)), L)
        return out

    return MultiVectorField(space, 2, coeff, None, "T_M")


def exponentiate(ps):
    """P = P0 - T_M with moment exp(Phi0); refuses moments outside the natural domain."""
    sp = ps.space
    TM = T_M(ps.components, ps.moments, sp)
    P = ps.P0 - TM
    P.label = "exp(P0)"
    moms = []
    for comp, mom in zip(ps.components, ps.moments):
        model = comp.model

        def value(m, mom=mom, model=model):
            xi = mom(m)
            if not model.in_natural_domain(xi):
                raise DomainError("moment value outside the natural domain of exp")
            return model.exp(xi)

        def thetaR(m, mom=mom, model=model):
            xi = mom(m)
            return model.Ad(model.exp(xi)) @ analytic_of_ad(model, NU_INV, xi) @ mom.jac(m)

        moms.append(MomentMap(model, value, thetaR, f"exp({mom.label})"))
    qp = QuasiPoissonSpace(sp, ps.components, P, tuple(moms), f"exp({ps.label})",
                           provenance=("exponentiate", ps.provenance),
                           sample_scale=ps.sample_scale)
    return qp


def logarithmize(qp, sample_scale=0.5):
    """P0 = P + T_M with Phi0 = log(Phi)."""
    sp = qp.space
    moms = []
    for comp, mm in zip(qp.components, qp.moments):
        model = comp.model

        def value(m, mm=mm, model=model):
            return model.log(mm(m))

        def jac(m, mm=mm, model=model):
            xi = model.log(mm(m))
            return analytic_of_ad(model, NU, xi) @ mm.thetaL(m, sp)

        moms.append(AlgebraMoment(model, value, jac, f"log({mm.label})"))
    P0 = qp.P + T_M(qp.components, moms, sp)
    P0.label = "log(P)"
    return PoissonSpace(sp, qp.components, P0, tuple(moms), f"log({qp.label})", sample_scale,
                        ("logarithmize", qp.provenance))


def poisson_residual(ps, m):
    return norm(schouten(ps.P0, ps.P0, m))


def linear_moment_residual(ps, m):
    """|P0#(Phi0^* d xi_a) - (e_a)_M| for every component."""
    P0 = ps.P0(m)
    out = 0.0
    for j, mom in enumerate(ps.moments):
        out = max(out, norm(mom.jac(m) @ P0 - ps.generators(j)(m).T))
    return out


def exp_pullback_bivector(model, xi):
    """exp^* P_G at xi in coordinates."""
    J = analytic_of_ad(model, NU_INV, xi)
    Jinv = np.linalg.inv(J)
    A = model.Ad(model.exp(xi))
    return Jinv @ (0.5 * (A.T - A)) @ Jinv.T


def linearization_check(model, xi, ts=(1e-1, 3e-2, 1e-2, 3e-3, 1e-3)):
    """Ratios |exp^*P_G(t xi) - t P0(xi)| / t^2 (and / t^3) over a decreasing t-grid."""
    xi = np.asarray(xi, dtype=float)
    if not np.any(xi):
        raise ValueError("linearization check needs a nonzero xi")
    P0 = -model.ad(xi)
    diffs = np.array([norm(exp_pullback_bivector(model, t * xi) - t * P0) for t in ts])
    ts = np.asarray(ts, dtype=float)
    r2, r3 = diffs / ts**2, diffs / ts**3

    def variation(r):
        top = np.max(np.abs(r))
        return 0.0 if top == 0 else float((np.max(r) - np.min(r)) / top)

    return {
        "t": ts.tolist(),
        "diff": diffs.tolist(),
        "ratio_t2": r2.tolist(),
        "ratio_t3": r3.tolist(),
        "variation_t2": variation(r2),
        "variation_t3": variation(r3),
    }
