import numpy as np
import pytest

from qpl import build_model
from qpl.cohomology import (
    InvariantMultivector, VolumeStructure, bv_apply, bv_field, d_P, d_P_squared_residual,
    gauge_residual, generator_residual, lie_homology, modular_field,
)
from qpl.errors import DomainError, InvarianceError
from qpl.fields.algebra import norm
from qpl.fields.field import left_frame_field, right_frame_field, trace_function
from qpl.qp_spaces import canonical_group_space, conjugacy_class_space


def test_modular_field_of_group_vanishes(model, rng):
    G = canonical_group_space(model)
    assert norm(modular_field(G)(G.random_point(rng))) < 1e-8


def test_bv_squares_to_zero(nonabelian, rng):
    G = canonical_group_space(nonabelian)
    m = G.random_point(rng)
    u = left_frame_field(G.space, 0, 0).wedge(right_frame_field(G.space, 0, 1))
    assert norm(bv_apply(bv_field(u), m)) < 1e-7


def test_bv_on_generated_fields_is_lie_homology(nonabelian, rng):
    G = canonical_group_space(nonabelian)
    m = G.random_point(rng)
    beta = rng.standard_normal((nonabelian.d,) * 2)
    beta = beta - beta.T
    gens = G.components[0]
    lhs = bv_apply(gens.generating_field(G.space, beta), m)
    rhs = gens.generating_field(G.space, lie_homology(nonabelian.f, beta))(m)
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_d_P_squared_and_generator(nonabelian, rng):
    G = canonical_group_space(nonabelian)
    sp = G.space
    m = G.random_point(rng)
    f, X = trace_function(sp, 0), left_frame_field(sp, 0, 0)
    for u in (f, X, G.P):
        assert d_P_squared_residual(G, u, m) < 1e-8
    for u, v in ((f, X), (X, G.P), (G.P, G.P)):
        assert generator_residual(u, v, m) < 1e-7


def test_d_P_checks_invariance(rng):
    G = canonical_group_space(build_model("su2"))
    m = G.random_point(rng)
    f = trace_function(G.space, 0)
    assert norm(d_P(G, f, m, check=True)) < 1e-9
    with pytest.raises(InvarianceError):
        d_P(G, left_frame_field(G.space, 0, 0), m, check=True)
    assert InvariantMultivector(G, G.P).certificate([m]) < 1e-9


def test_gauge_law(nonabelian, rng):
    G = canonical_group_space(nonabelian)
    tr = trace_function(G.space, 0)
    f = lambda p: 2.0 * nonabelian.n + tr(p)
    for _ in range(3):
        m = G.random_point(rng)
        assert gauge_residual(G, f, tr.closed_derivative, m) < 1e-7
        assert gauge_residual(G, f, None, m) < 1e-7


def test_non_invariant_volume_changes_modular_field(rng):
    model = build_model("su2")
    G = canonical_group_space(model)
    rho = lambda p: 2.0 + float(np.real(p[0][0, 1]))  # Re g_00 would be invariant on SU(2)
    X = modular_field(G, VolumeStructure(G.space, rho))
    assert norm(X(G.random_point(rng))) > 1e-3


def test_bv_refuses_constrained_space(rng):
    model = build_model("su2")
    C = conjugacy_class_space(model, model.random_element(rng))
    with pytest.raises(DomainError):
        bv_apply(C.P, C.random_point(rng))
