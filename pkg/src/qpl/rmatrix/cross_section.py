"""Cross-sections Y = Phi^-1(U) of a Hamiltonian quasi-Poisson space over a slice U."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qpl.errors import DomainError
from qpl.fields.algebra import norm, push
from qpl.fields.field import MultiVectorField
from qpl.fields.space import LevelSet, ModelSpace
from qpl.lie import NU, PHI, analytic_of_ad, analytic_of_matrix
from qpl.qp_spaces.certify import moment_residual, quasi_poisson_residual
from qpl.qp_spaces.core import QuasiPoissonSpace
from qpl.qp_spaces.exponential import AlgebraMoment, PoissonSpace
from qpl.rmatrix.slices import ev2_residual, slice_r


@dataclass(frozen=True, eq=False)
class CrossSection:
    """The H-space (Y, P_Y, Phi_Y) cut out of ``parent`` by component ``j`` over ``slice``."""

    parent: QuasiPoissonSpace
    slice: object
    j: int
    qp: QuasiPoissonSpace
    base_point: tuple

    @property
    def space(self):
        return self.qp.space

    def random_point(self, rng):
        return self.qp.random_point(rng)


def _rebind(f, space):
    return type(f)(space, f.degree, f._coeff, f._dcoeff, f.label)


def _level_data(parent, j, sl):
    mm = parent.moments[j]
    model = sl.model
    gi = model.inverse(sl.base)
    amb = parent.space

    def xi(m):
        return model.log(gi @ mm(m))

    def fn(m):
        return sl.E_perp.T @ xi(m)

    def jac(m):
        x = xi(m)
        return sl.E_perp.T @ analytic_of_ad(model, NU, x) @ mm.thetaL(m, amb)

    def full(m):
        return xi(m)

    def full_jac(m):
        return analytic_of_ad(model, NU, xi(m)) @ mm.thetaL(m, amb)

    return fn, jac, full, full_jac


def find_level_point(parent, j, sl, rng, attempts=20, scale=0.3):
    """Gauss-Newton search for m with Phi_j(m) equal to the slice base."""
    amb = parent.space
    model = sl.model
    mm = parent.moments[j]
    for _ in range(attempts):
        m = amb.random_point(rng, scale)
        try:
            for _ in range(60):
                g = model.inverse(sl.base) @ mm(m)
                x = model.log(g)
                if np.linalg.norm(x) < 1e-13:
                    return m
                B = amb.tangent_basis(m)
                J = analytic_of_ad(model, NU, x) @ mm.thetaL(m, amb) @ B
                step = -B @ np.linalg.lstsq(J, x, rcond=None)[0]
                n = np.linalg.norm(step)
                m = amb.flow(m, step * min(1.0, 0.5 / max(n, 1e-300)), 1.0)
        except (DomainError, ValueError, np.linalg.LinAlgError):
            continue
    raise DomainError("no sample points found in the preimage of the slice")


def cross_section(parent, sl, j=0, rng=None, base_point=None, sample_scale=0.5):
    """Y = Phi_j^-1(U) with P_Y = P|_Y + Phi_Y^* r and the action of component j cut to H."""
    if parent.moments[j] is None:
        raise ValueError("cross-sections need a moment map on the chosen component")
    comp = parent.components[j]
    if comp.E is not None or comp.model is not sl.model and comp.model.name != sl.model.name:
        raise ValueError("component does not carry the slice's group")
    rng = np.random.default_rng(0) if rng is None else rng
    amb = parent.space
    fn, jac, full, _ = _level_data(parent, j, sl)
    m0 = find_level_point(parent, j, sl, rng) if base_point is None else tuple(base_point)
    if np.max(np.abs(fn(m0)), initial=0.0) > 1e-9:
        raise DomainError("base point does not lie over the slice")
    k = sl.E_perp.shape[1]

    level = None

    def sampler(r):
        for _ in range(200):
            v = level.tangent_basis(m0) @ r.standard_normal(amb.dim - k)
            v *= sample_scale * r.uniform(0.1, 1.0) / max(np.linalg.norm(v), 1e-300)
            try:
                m = level.flow(m0, v, 1.0)
            except DomainError:
                continue
            if np.linalg.norm(full(m)) <= sl.radius:
                return m
        raise DomainError("no sample points found in the preimage of the slice")

    level = LevelSet(amb, fn, jac, k, sampler)
    space = ModelSpace(amb.factors, amb.engine, level)

    gens = comp.generators(space)
    mm = parent.moments[j]

    def correction(m):
        return push(slice_r(sl, mm(m)), gens(m))

    P = _rebind(parent.P, space) + MultiVectorField(space, 2, correction, None, "-Phi*r")
    P.label = "P_Y"
    comps = list(parent.components)
    comps[j] = comp.restrict(sl.E)
    qp = QuasiPoissonSpace(space, tuple(comps), P, parent.moments, f"Y({parent.label})",
                           provenance=("cross_section", parent.provenance))
    return CrossSection(parent, sl, j, qp, m0)


def splitting_residuals(cs, m):
    """Orthogonality of the splitting for P|_Y, and tangency of P_Y to Y.

    Returns (orthogonality, tangency, perp): the first is |P(alpha, beta)| for
    alpha in the conormal part and beta annihilating the orbit directions of
    the complement, the second |alpha . P_Y|, the last the mismatch between
    the complement block of P and -Phi^* r.
    """
    parent, sl = cs.parent, cs.slice
    amb = parent.space
    mm = parent.moments[cs.j]
    B = amb.tangent_basis(m)
    L = parent.generators(cs.j)(m)
    N = B @ (B.T @ L @ sl.E_perp)  # orbit directions of the complement
    alpha = sl.E_perp.T @ mm.thetaR(m, amb) @ B @ B.T
    U, s, _ = np.linalg.svd(B.T @ N)
    rank = int(np.sum(s > 1e-10 * max(s[0] if s.size else 0.0, 1.0)))
    beta = (B @ U[:, rank:]).T  # covectors vanishing on N
    P = parent.P(m)
    PY = cs.qp.P(m)
    ortho = norm(alpha @ P @ beta.T)
    tang = norm(alpha @ PY)
    # complement block: P - P_Y should equal -Phi^* r
    perp = norm((P - PY) + push(slice_r(sl, mm(m)), L))
    return ortho, tang, perp


def poisson_cross_section(cs):
    """(Y, P_Y + T_Y, log(g^-1 Phi_Y)) as a Hamiltonian Poisson H-space."""
    if len(cs.qp.components) != 1:
        raise ValueError("the Poisson form needs a single acting component")
    sl, qp = cs.slice, cs.qp
    model = sl.model
    E = sl.E
    space = qp.space
    mm = qp.moments[0]
    comp = qp.components[0]
    gi = model.inverse(sl.base)
    gens = comp.generators(space)

    def ad_h(eta):
        return E.T @ model.ad(E @ eta) @ E

    def value(m):
        return E.T @ model.log(gi @ mm(m))

    def jacobian(m):
        eta = value(m)
        return analytic_of_matrix(NU, ad_h(eta)) @ E.T @ mm.thetaL(m, space)

    def T_Y(m):
        return push(analytic_of_matrix(PHI, ad_h(value(m))), gens(m))

    P0 = qp.P + MultiVectorField(space, 2, T_Y, None, "T_Y")
    P0.label = "P0_Y"
    mom = AlgebraMoment(model, value, jacobian, f"log(g^-1 {mm.label})")
    return PoissonSpace(space, (comp,), P0, (mom,), f"P0({qp.label})", qp.sample_scale,
                        ("poisson_cross_section", qp.provenance))


def grid_rows(cs, rng, samples=10):
    """Per-sample residual rows (slice coordinates, checks) for export."""
    rows = []
    mm = cs.parent.moments[cs.j]
    sl = cs.slice
    for _ in range(samples):
        m = cs.random_point(rng)
        eta = sl.E.T @ sl.coords(mm(m))
        ortho, tang, _ = splitting_residuals(cs, m)
        row = {f"eta{i}": float(x) for i, x in enumerate(eta)}
        row.update({
            "quasi_poisson": quasi_poisson_residual(cs.qp, m),
            "moment": moment_residual(cs.qp, m),
            "orthogonality": ortho,
            "tangency": tang,
            "ev2": float(np.max(np.abs(ev2_residual(sl, mm(m))))),
        })
        rows.append(row)
    return rows
