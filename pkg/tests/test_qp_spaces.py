import numpy as np
import pytest

from qpl import build_model
from qpl.errors import DegeneratePointError, DomainError, FusionError
from qpl.qp_spaces import (
    bi_action_space, canonical_group_space, certify, conjugacy_class_space, double_DG,
    double_bold_DG, fuse, fusion_product, product,
)
from qpl.qp_spaces.exponential import (
    exponentiate, linear_poisson_space, linearization_check, logarithmize, poisson_residual,
)
from qpl.qp_spaces.maps import (
    action_map_residual, associativity_residual, class_vs_ambient_residual, mult_residual,
    nondegeneracy, r_twist,
)
from qpl.qp_spaces.twoform import (
    P_solve, defining_residual, double_omega, kernel_dimensions, omega_from_P, omega_solve,
)


def _ok(res, tol=1e-8):
    return all(v <= tol for v in res.values())


def test_group_space(model, rng):
    assert _ok(certify(canonical_group_space(model), rng, 10))


def test_class_space(nonabelian, rng):
    C = conjugacy_class_space(nonabelian, nonabelian.random_element(rng))
    assert _ok(certify(C, rng, 5))
    m = C.random_point(rng)
    amb, tang = class_vs_ambient_residual(C, m)
    assert amb < 1e-9 and tang < 1e-9
    assert nondegeneracy(C, m)["nondegenerate"]


def test_doubles_and_fusions(nonabelian, rng):
    G = canonical_group_space(nonabelian)
    for qp in (double_DG(nonabelian), double_bold_DG(nonabelian), fusion_product(G, G)):
        assert _ok(certify(qp, rng, 3))


def test_bi_action_space_has_no_moment(rng):
    qp = bi_action_space(build_model("su2"))
    res = certify(qp, rng, 3)
    assert "moment" not in res and _ok(res)


def test_fusion_errors():
    model = build_model("su2")
    D = double_DG(model)
    with pytest.raises(FusionError):
        fuse(D, 0, 0)
    with pytest.raises(FusionError):
        fuse(D, 0, 5)
    with pytest.raises(FusionError):
        fusion_product(D, D)


def test_associativity(nonabelian, rng):
    G = canonical_group_space(nonabelian)
    m = product(product(G, G), G).random_point(rng)
    assert max(associativity_residual(nonabelian, m)) <= 1e-12


def test_multiplication_and_action_maps(nonabelian, rng):
    G = canonical_group_space(nonabelian)
    m = fusion_product(G, G).random_point(rng)
    assert mult_residual(nonabelian, m) < 1e-8
    assert mult_residual(nonabelian, m, fd=True) < 1e-7
    assert action_map_residual(G, m) < 1e-8


def test_r_twist(rng):
    D = double_DG(build_model("su2"))
    R, mres, tres = r_twist(D)
    m = D.random_point(rng)
    assert mres(m) < 1e-8 and tres(m) < 1e-7


def test_omega_on_double(nonabelian, rng):
    D = double_DG(nonabelian)
    m = D.random_point(rng)
    W, _ = omega_solve(D, m)
    assert np.allclose(W, double_omega(D)(m), atol=1e-9)
    P, _ = P_solve(D, omega_from_P(D), m)
    assert np.allclose(P, D.P(m), atol=1e-8)
    om = omega_from_P(D)
    assert defining_residual(D, om, m) < 1e-8
    kw, ka = kernel_dimensions(D, om, m)
    assert kw == ka


def test_omega_refused_on_degenerate_group_space(rng):
    G = canonical_group_space(build_model("su2"))
    with pytest.raises(DegeneratePointError):
        omega_solve(G, G.random_point(rng))


def test_exponentiate_linear_space(nonabelian, rng):
    qp = exponentiate(linear_poisson_space(nonabelian))
    assert _ok(certify(qp, rng, 3, ["quasi_poisson", "moment"]))


def test_exponentiate_refuses_outside_domain():
    model = build_model("su2")
    qp = exponentiate(linear_poisson_space(model))
    with pytest.raises(DomainError):
        qp.moments[0]((np.array([0.0, 0.0, 2 * np.pi]),))


def test_logarithmize_group(nonabelian, rng):
    ps = logarithmize(canonical_group_space(nonabelian))
    assert poisson_residual(ps, ps.random_point(rng)) < 1e-8


def test_linearization_is_third_order(nonabelian, rng):
    res = linearization_check(nonabelian, nonabelian.random_algebra(rng))
    assert res["variation_t3"] < 0.2
    with pytest.raises(ValueError):
        linearization_check(nonabelian, np.zeros(nonabelian.d))
