"""Seeded verification suites behind ``qpl verify``.

Each suite fills a :class:`qpl.report.Report` with max residuals over sample
points. Checks named ``oracle:*`` compare a closed-form derivative path with
the independent finite-difference oracle.
"""

from __future__ import annotations

import time
from datetime import datetime, timezone

import numpy as np

from qpl.cohomology import (
    VolumeStructure, d_P_squared_residual, gauge_residual, generator_residual, modular_field,
)
from qpl.errors import UnsupportedModelError
from qpl.fields import oracle
from qpl.fields.algebra import norm
from qpl.fields.calculus import exterior_derivative, schouten
from qpl.fields.field import left_frame_field, right_frame_field, trace_function
from qpl.lie import build_model
from qpl.moduli import (
    InvariantFunction, SurfaceData, build_rep_variety, embed_point, jacobi_residual,
    project_to_level_set, reduced_bracket, tangency_and_rank_checks,
)
from qpl.qp_spaces import (
    canonical_group_space, certify, conjugacy_class_space, double_DG, double_bold_DG, fuse,
    fusion_product, moment_residual, product, quasi_poisson_residual,
)
from qpl.qp_spaces.exponential import (
    exponentiate, linear_poisson_space, linearization_check, logarithmize, poisson_residual,
)
from qpl.qp_spaces.maps import (
    action_map_residual, associativity_residual, class_vs_ambient_residual, mult_residual,
    nondegeneracy, r_twist,
)
from qpl.qp_spaces.twoform import (
    P_solve, d_omega_residual, defining_residual, double_omega, embed_forms, fusion_two_form,
    kernel_dimensions, moment_two_form_residual, omega_from_P, omega_solve,
)
from qpl.report import Report
from qpl.rmatrix import (
    T_of, base_from_angles, cdybe_residual, class_consistency_residual, ev2_residual,
    exp_pullback_residual, make_slice, nu_phi_identity_residual, tab_identity_residual,
)
from qpl.rmatrix.cross_section import cross_section, poisson_cross_section, splitting_residuals
from qpl.rmatrix.dynamical import T_equivariance_residual, T_odd_residual, dT_fd, dT_frechet

# Eigen-angles of the default slice base point per group.
DEFAULT_BASE = {"su2": [0.5], "su3": [0.4, 1.1], "so3": [0.7]}

# Extra bases with a non-abelian centralizer (u(2) inside su(3)).
EXTRA_BASES = {"su3": [[0.5, 0.5]]}

ORACLE_POINTS = 3


def default_base(model):
    if model.name in DEFAULT_BASE:
        return DEFAULT_BASE[model.name]
    return [0.3 * (k + 1) for k in range(model.n)]


def _max(fn, pts):
    return max((float(fn(m)) for m in pts), default=0.0)


def _points(qp, rng, n):
    return [qp.random_point(rng) for _ in range(n)]


def _xi_samples(model, rng, n, scale=1.0):
    out = []
    while len(out) < n:
        xi = model.random_algebra(rng, scale)
        if model.in_natural_domain(xi):
            out.append(xi)
    return out


def _certify_into(rep, name, qp, rng, points, ov, checks=("quasi_poisson", "moment",
                                                          "moment_push")):
    res = certify(qp, rng, points, list(checks))
    identity = {
        "invariance": "[xi_M, P] = 0",
        "quasi_poisson": "[P, P] = phi_M",
        "moment": "P#(Phi^* theta^R) = 1/2 (1 + Ad_Phi) e_M",
        "moment_push": "Phi_* P = P_G",
        "equivariance": "Phi(g.m) = g Phi(m) g^-1",
    }
    for key, val in res.items():
        rep.add(f"{name}:{key}", identity[key], val, "closed", overrides=ov)


def _oracle_schouten(rep, name, u, v, pts, ov):
    val = max(norm(schouten(u, v, m) - oracle.oracle_schouten(u, v, m)) for m in pts)
    rep.add(f"oracle:{name}", "closed Schouten = FD oracle", val, "fd2", overrides=ov)


# --------------------------------------------------------------------------
# suites


def suite_qp_core(model, rng, points, rep, ov):
    G = canonical_group_space(model)
    _certify_into(rep, "G", G, rng, points, ov,
                  ("invariance", "quasi_poisson", "moment", "moment_push", "equivariance"))
    C = conjugacy_class_space(model, model.random_element(rng))
    pts = _points(C, rng, points)
    rep.add("class:quasi_poisson", "[P, P] = phi_M", _max(lambda m: quasi_poisson_residual(C, m),
                                                          pts), "closed", overrides=ov)
    rep.add("class:moment", "P#(Phi^* theta^R) = 1/2 (1 + Ad_Phi) e_M",
            _max(lambda m: moment_residual(C, m), pts), "closed", overrides=ov)
    rep.add("class:ambient", "P_class = P_G on the class",
            _max(lambda m: class_vs_ambient_residual(C, m)[0], pts), "closed", tol=1e-9,
            overrides=ov)
    rep.add("class:nondegenerate", "im P# + orbit directions = TM (defect count)",
            sum(not nondegeneracy(C, m)["nondegenerate"] for m in pts), "closed", tol=0.0,
            overrides=ov)
    xis = _xi_samples(model, rng, points)
    rep.add("exp:pullback", "exp^* P_G = P_0 - T_g",
            max(exp_pullback_residual(model, xi) for xi in xis), "closed", overrides=ov)
    lin = linearization_check(model, xis[0])
    rep.add("exp:linearization_t3", "|exp^* P_G(t xi) - t P_0| / t^3 variation",
            lin["variation_t3"], "closed", tol=0.2, overrides=ov)
    _oracle_schouten(rep, "P_G", G.P, G.P, _points(G, rng, ORACLE_POINTS), ov)


def suite_fusion(model, rng, points, rep, ov):
    G = canonical_group_space(model)
    C = conjugacy_class_space(model, model.random_element(rng))
    spaces = {
        "GxG": fusion_product(G, G),
        "classxG": fusion_product(C, G),
        "D(G)": double_DG(model),
        "DD(G)": double_bold_DG(model),
        "DD(G)xclass": fusion_product(double_bold_DG(model), C),
    }
    for name, qp in spaces.items():
        _certify_into(rep, name, qp, rng, points, ov)
    triple = product(product(G, G), G)
    pts = _points(triple, rng, points)
    rep.add("associativity", "(12)3 = 1(23)",
            max(max(associativity_residual(model, m)) for m in pts), "closed", tol=1e-12,
            overrides=ov)
    GG = spaces["GxG"]
    pts = _points(GG, rng, points)
    rep.add("mult", "Mult_* P_fus = P_G", _max(lambda m: mult_residual(model, m), pts),
            "closed", overrides=ov)
    rep.add("oracle:mult", "Mult_* P_fus = P_G (FD Jacobian)",
            _max(lambda m: mult_residual(model, m, fd=True), pts[:ORACLE_POINTS]), "fd",
            overrides=ov)
    for name in ("G", "DD(G)"):
        qp = G if name == "G" else spaces["DD(G)"]
        big = fusion_product(G, qp)
        bp = _points(big, rng, points)
        rep.add(f"action:{name}", "A_*(P_G + P - psi) = P",
                _max(lambda m: action_map_residual(qp, m), bp), "closed", overrides=ov)
    D = spaces["D(G)"]
    _, mres, tres = r_twist(D, 0, 1)
    pts = _points(D, rng, min(points, 10))
    rep.add("rtwist:moment", "Phi_j(R m) Phi_i(R m) = Phi_i(m) Phi_j(m)", _max(mres, pts),
            "closed", overrides=ov)
    rep.add("rtwist:bivector", "R_*(P - psi_ij) = P - psi_ji", _max(tres, pts), "fd",
            overrides=ov)


def suite_rmatrix(model, rng, points, rep, ov):
    xis = _xi_samples(model, rng, points)
    rep.add("cdybe", "Cycl(dT + T f T) = 1/4 f (FD derivative)",
            max(np.max(np.abs(cdybe_residual(model, xi))) for xi in xis), "fd2", overrides=ov)
    rep.add("cdybe:dk", "Cycl(dT + T f T) = 1/4 f (Daleckii-Krein)",
            max(np.max(np.abs(cdybe_residual(model, xi, "dk"))) for xi in xis), "closed",
            overrides=ov)
    rep.add("oracle:dT", "Daleckii-Krein dT = FD dT",
            max(np.max(np.abs(dT_frechet(model, xi) - dT_fd(model, xi))) for xi in xis),
            "fd", overrides=ov)
    rep.add("tab", "T_ba (e_b)_g = e_a - 1/2 exp^*(e_a^L + e_a^R)",
            max(np.max(np.abs(tab_identity_residual(model, xi))) for xi in xis), "closed",
            tol=1e-10, overrides=ov)
    rep.add("T:odd", "T(-xi) = -T(xi)", max(T_odd_residual(model, xi) for xi in xis), "closed",
            overrides=ov)
    rep.add("T:equivariant", "T(Ad_g xi) = Ad_g T(xi) Ad_g^T",
            max(T_equivariance_residual(model, xi, model.random_element(rng)) for xi in xis),
            "closed", overrides=ov)
    rep.add("T:antisymmetric", "T^T = -T",
            max(np.max(np.abs(T_of(model, xi) + T_of(model, xi).T)) for xi in xis), "closed",
            overrides=ov)
    s = np.linspace(-6.0, 6.0, 25) + 0.1j
    rep.add("nu_phi", "1/2 (nu(s) + nu(-s)) = 1 - s phi(s)",
            float(np.max(np.abs(nu_phi_identity_residual(s)))), "closed", overrides=ov)
    lin = exponentiate(linear_poisson_space(model))
    _certify_into(rep, "exp(g*)", lin, rng, points, ov, ("quasi_poisson", "moment"))
    back = logarithmize(canonical_group_space(model), 0.5)
    pts = _points(back, rng, min(points, 10))
    rep.add("log(G):poisson", "[P_0, P_0] = 0", _max(lambda m: poisson_residual(back, m), pts),
            "closed", overrides=ov)
    sl = make_slice(model, base_from_angles(model, default_base(model)))
    hs = [sl.sample(rng) for _ in range(points)]
    rep.add("slice:ev2", "Cycl(V dr + r f r) = 1/4 (f - f^h)",
            max(np.max(np.abs(ev2_residual(sl, h))) for h in hs), "fd", tol=1e-6, overrides=ov)
    rep.add("slice:class", "-Phi^* r = class bivector",
            max(class_consistency_residual(sl, h) for h in hs), "closed", overrides=ov)


def _cross_section_parents(model):
    out = {"G": canonical_group_space(model)}
    if np.any(model.f):
        # for abelian groups the commutator moment is constant and misses the slice
        out["DD(G)"] = double_bold_DG(model)
    return out


def suite_cross_section(model, rng, points, rep, ov, base=None):
    bases = [default_base(model)] + EXTRA_BASES.get(model.name, []) if base is None else [base]
    n = max(2, min(points, 5))
    for k, angles in enumerate(bases):
        sl = make_slice(model, base_from_angles(model, angles))
        tag = "" if k == 0 else f"@{','.join(str(a) for a in angles)}"
        for name, parent in _cross_section_parents(model).items():
            _cross_section_checks(rep, f"{name}{tag}", cross_section(parent, sl, rng=rng), rng,
                                  n, ov)


def _cross_section_checks(rep, name, cs, rng, n, ov):
    sl, parent = cs.slice, cs.parent
    pts = _points(cs.qp, rng, n)
    split = [splitting_residuals(cs, m) for m in pts]
    rep.add(f"Y({name}):orthogonality", "P(conormal, orbit annihilator) = 0",
            max(s[0] for s in split), "closed", tol=1e-9, overrides=ov)
    rep.add(f"Y({name}):tangency", "P_Y# conormal = 0", max(s[1] for s in split), "closed",
            tol=1e-9, overrides=ov)
    rep.add(f"Y({name}):quasi_poisson", "[P_Y, P_Y] = phi_Y",
            _max(lambda m: quasi_poisson_residual(cs.qp, m), pts), "fd", overrides=ov)
    rep.add(f"Y({name}):moment", "P_Y#(Phi^* theta^R) = 1/2 (1 + Ad_Phi) e_M",
            _max(lambda m: moment_residual(cs.qp, m), pts), "fd", overrides=ov)
    mm = parent.moments[cs.j]
    rep.add(f"Y({name}):ev2", "Cycl(V dr + r f r) = 1/4 (f - f^h)",
            _max(lambda m: np.max(np.abs(ev2_residual(sl, mm(m)))), pts), "fd", tol=1e-6,
            overrides=ov)
    if len(cs.qp.components) == 1:
        ps = poisson_cross_section(cs)
        rep.add(f"P0Y({name}):poisson", "[P_0Y, P_0Y] = 0",
                _max(lambda m: poisson_residual(ps, m), pts), "fd", overrides=ov)


def _omega_checks(rep, name, qp, omega, pts, ov):
    rt = 0.0
    for m in pts:
        Pw, _ = P_solve(qp, omega, m)
        rt = max(rt, norm(Pw - qp.P(m)))
    rep.add(f"{name}:roundtrip", "P -> omega -> P", rt, "closed", overrides=ov)
    rep.add(f"{name}:defining", "omega P = 1 - 1/4 (theta^L - theta^R) e_M",
            _max(lambda m: defining_residual(qp, omega, m), pts), "closed", overrides=ov)
    rep.add(f"{name}:moment2", "iota(e_M) omega = 1/2 Phi^*(theta^L + theta^R)",
            _max(lambda m: moment_two_form_residual(qp, omega, m), pts), "closed", tol=1e-9,
            overrides=ov)
    if not qp.space.constrained:
        rep.add(f"{name}:d_omega", "d omega = Phi^* eta",
                _max(lambda m: d_omega_residual(qp, omega, m), pts), "fd", overrides=ov)
    ker = [kernel_dimensions(qp, omega, m) for m in pts]
    rep.add(f"{name}:kernel", "dim ker omega = dim ker(1 + Ad_Phi) (mismatch count)",
            sum(a != b for a, b in ker), "closed", tol=0.0, overrides=ov)


def suite_omega(model, rng, points, rep, ov):
    n = max(2, min(points, 10))
    D = double_DG(model)
    ex = double_omega(D)
    pts = _points(D, rng, n)
    _omega_checks(rep, "D(G)", D, omega_from_P(D), pts, ov)
    rep.add("D(G):explicit", "solved omega = explicit double form",
            _max(lambda m: norm(omega_solve(D, m)[0] - ex(m)), pts), "closed", tol=1e-9,
            overrides=ov)
    DD = double_bold_DG(model)
    rep.add("DD(G):fusion_form", "omega_fus = omega - 1/2 theta^L_1 . theta^R_2",
            _max(lambda m: defining_residual(DD, fusion_two_form(D, ex, 0, 1), m), pts),
            "closed", overrides=ov)
    C1 = conjugacy_class_space(model, model.random_element(rng))
    C2 = conjugacy_class_space(model, model.random_element(rng))
    pr = product(C1, C2)
    CC = fuse(pr, 0, 1)
    w = embed_forms(pr.space, [(omega_from_P(C1), 0, 1), (omega_from_P(C2), 1, 1)])
    wf = fusion_two_form(pr, w, 0, 1)
    pts = _points(pr, rng, n)
    rep.add("classxclass:fusion_form", "omega_fus = omega - 1/2 theta^L_1 . theta^R_2",
            _max(lambda m: defining_residual(CC, wf, m), pts), "closed", overrides=ov)
    cp = [(m[0],) for m in pts]
    _omega_checks(rep, "class", C1, omega_from_P(C1), cp, ov)
    rep.add("oracle:d_omega", "closed d = FD oracle d", _oracle_d(ex, _points(D, rng, 2)),
            "fd2", overrides=ov)


def _oracle_d(w, pts):
    return max(norm(exterior_derivative(w, m) - oracle.oracle_d(w, m)) for m in pts)


def suite_cohomology(model, rng, points, rep, ov):
    G = canonical_group_space(model)
    sp = G.space
    pts = _points(G, rng, max(2, min(points, 10)))
    X = modular_field(G)
    rep.add("modular:G", "X_mu(P_G) = 0", _max(lambda m: norm(X(m)), pts), "closed",
            overrides=ov)
    f = trace_function(sp, 0)
    fields = {
        "f": f,
        "eL": left_frame_field(sp, 0, 0),
        "eR": right_frame_field(sp, 0, min(1, model.d - 1)),
        "P": G.P,
    }
    rep.add("d_P^2", "[P, [P, u]] = 1/2 [phi_M, u]",
            max(_max(lambda m: d_P_squared_residual(G, u, m), pts[:3]) for u in fields.values()),
            "closed", overrides=ov)
    pairs = [("f", "eL"), ("eL", "eR"), ("eR", "P"), ("P", "P")]
    rep.add("generator", "[u, v] from the BV operator",
            max(_max(lambda m: generator_residual(fields[a], fields[b], m), pts[:3])
                for a, b in pairs), "fd", overrides=ov)
    shift = 2.0 * model.n
    pos = lambda m: shift + float(np.real(np.trace(m[0])))
    dpos = lambda m: f.closed_derivative(m)
    rep.add("gauge", "X_{f mu} = X_mu + d_P ln f",
            _max(lambda m: gauge_residual(G, pos, dpos, m), pts), "fd", overrides=ov)
    mu = VolumeStructure(sp, pos, dpos)
    rep.add("modular:scaled", "X_{f mu}(P_G) = 0 for invariant f",
            _max(lambda m: norm(modular_field(G, mu)(m)), pts), "fd", overrides=ov)
    _oracle_schouten(rep, "eL,eR", fields["eL"], fields["eR"], pts[:ORACLE_POINTS], ov)


def suite_moduli(model, rng, points, rep, ov, words=("a1", "b1", "a1b1")):
    surf = SurfaceData(1, 1)
    qu = build_rep_variety(surf, model, "qu")
    free = build_rep_variety(surf, model, "free")
    n = max(2, min(points, 5))
    fns_free = [InvariantFunction.from_text(free, w) for w in words]
    fns_qu = [InvariantFunction.from_text(qu, w) for w in words]
    pts = _points(free.qp, rng, n)
    rep.add("jacobi", "Cycl {{F1, F2}, F3} = 2 phi_M(dF1, dF2, dF3)",
            _max(lambda m: abs(jacobi_residual(free.qp, [(F, F.differential) for F in fns_free],
                                               m)), pts[:2]), "fd2", overrides=ov)
    orbit = variant = tang = dF = 0.0
    comp = free.qp.components[0]
    for m in pts:
        b = reduced_bracket(fns_free[0], fns_free[1], m, check=False)
        g = model.random_element(rng)
        orbit = max(orbit, abs(reduced_bracket(fns_free[0], fns_free[1], comp.act(g, m),
                                               check=False) - b))
        mq = embed_point(free, m)
        variant = max(variant, abs(reduced_bracket(fns_qu[0], fns_qu[1], mq, check=False) - b))
        tang = max(tang, tangency_and_rank_checks(free.qp, fns_free[2].differential(m),
                                                  m)["tangency"])
        dF = max(dF, norm(fns_free[0].differential(m) - fns_free[0].fd_differential(m)))
    rep.add("orbit", "{F1, F2}(g.m) = {F1, F2}(m)", orbit, "closed", tol=1e-9, overrides=ov)
    rep.add("variants", "bracket on M equals bracket on M (*) G at the embedded point", variant,
            "closed", overrides=ov)
    rep.add("tangency", "dPhi(X_F) = 0", tang, "closed", tol=1e-9, overrides=ov)
    rep.add("oracle:word", "closed word differential = FD differential", dF, "fd",
            overrides=ov)
    lp = project_to_level_set(qu, qu.random_point(rng, 0.5))
    rep.add("level:distance", "Phi(m) on the identity class", lp.distance, "closed",
            tol=1e-9, overrides=ov)
    rep.add("level:jacobi", "Cycl {{F1, F2}, F3} = 0 at a level point",
            abs(jacobi_residual(qu.qp, [(F, F.differential) for F in fns_qu], lp.point)),
            "fd2", overrides=ov)


SUITES = {
    "qp-core": suite_qp_core,
    "fusion": suite_fusion,
    "rmatrix": suite_rmatrix,
    "cross-section": suite_cross_section,
    "omega-equivalence": suite_omega,
    "cohomology": suite_cohomology,
    "moduli": suite_moduli,
}


def run_suite(config):
    """Run the suite named in a :class:`qpl.report.SuiteConfig` and return its report."""
    if config.suite not in SUITES:
        raise ValueError(f"unknown suite {config.suite!r}; choose from {', '.join(SUITES)}")
    try:
        model = build_model(config.group)
    except UnsupportedModelError as exc:
        raise ValueError(str(exc)) from exc
    rng = np.random.default_rng(config.seed)
    rep = Report(config.suite, config.group, config.seed, config.points)
    overrides = dict(config.tol)
    if "all" in overrides:
        val = overrides.pop("all")
        for key in ("closed", "fd", "fd2"):
            overrides.setdefault(key, val)
    t0 = time.perf_counter()
    SUITES[config.suite](model, rng, config.points, rep, overrides)
    if "all" in config.tol:
        # explicit per-check tolerances also yield to the global override
        for r in rep.records:
            if r.name not in config.tol:
                r.tol = config.tol["all"]
                r.passed = bool(np.isfinite(r.residual) and r.residual <= r.tol)
    rep.timing = {"seconds": round(time.perf_counter() - t0, 3)}
    rep.timestamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return rep
