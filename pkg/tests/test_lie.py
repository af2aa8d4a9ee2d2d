import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpl import GroupModel, build_model
from qpl.errors import DomainError, UnsupportedModelError
from qpl.lie import NU, NU_INV, PHI, analytic_of_ad, centralizer_split, restricted_cayley

seeds = st.integers(min_value=0, max_value=2**31 - 1)


def test_basis_is_orthonormal(model):
    G = np.array([[model.inner(a, b) for b in model.basis] for a in model.basis])
    assert np.allclose(G, np.eye(model.d), atol=1e-13)


def test_structure_constants_antisymmetric_and_jacobi(model):
    f = model.f
    assert np.allclose(f, -np.transpose(f, (1, 0, 2)), atol=1e-13)
    assert np.allclose(f, np.transpose(f, (1, 2, 0)), atol=1e-13)
    jac = np.einsum("abk,kcd->abcd", f, f)
    cyc = jac + np.transpose(jac, (1, 2, 0, 3)) + np.transpose(jac, (2, 0, 1, 3))
    assert np.max(np.abs(cyc)) < 1e-12


def test_bracket_matches_commutator(model, rng):
    x, y = model.random_algebra(rng), model.random_algebra(rng)
    X, Y = model.matrix(x), model.matrix(y)
    assert np.allclose(model.coords(X @ Y - Y @ X), model.ad(x) @ y, atol=1e-12)


@given(seeds)
def test_exp_log_round_trip(seed):
    rng = np.random.default_rng(seed)
    for kind in ("su2", "su3", "so3"):
        G = build_model(kind)
        g = G.random_element(rng)
        assert np.allclose(G.exp(G.log(g)), g, atol=1e-12)


@given(seeds)
def test_Ad_is_a_homomorphism(seed):
    rng = np.random.default_rng(seed)
    G = build_model("su3")
    g, h = G.random_element(rng), G.random_element(rng)
    assert np.allclose(G.Ad(g @ h), G.Ad(g) @ G.Ad(h), atol=1e-12)
    assert np.allclose(G.Ad(g).T @ G.Ad(g), np.eye(G.d), atol=1e-12)


def test_torus_is_abelian():
    T = build_model("torus(3)")
    assert T.d == 3 and not np.any(T.f)


def test_unknown_group():
    with pytest.raises(UnsupportedModelError):
        build_model("e8")


def test_log_refuses_cut_locus():
    G = build_model("su2")
    with pytest.raises(DomainError):
        G.log(-G.identity())


def test_nu_inverse_pair(nonabelian, rng):
    xi = nonabelian.random_algebra(rng, 0.8)
    A, B = analytic_of_ad(nonabelian, NU, xi), analytic_of_ad(nonabelian, NU_INV, xi)
    assert np.allclose(A @ B, np.eye(nonabelian.d), atol=1e-12)
    T = analytic_of_ad(nonabelian, PHI, xi)
    assert np.allclose(T, -T.T, atol=1e-13)


def test_centralizer_and_cayley(rng):
    G = build_model("su3")
    g = np.diag(np.exp(1j * np.array([0.5, 0.5, -1.0])))
    E, _, proj_perp = centralizer_split(G, g)
    assert E.shape[1] == 4  # u(2)
    K = restricted_cayley(G, g)
    assert np.allclose(K, -K.T, atol=1e-12)
    assert np.allclose(K @ E, 0, atol=1e-12)


def test_json_round_trip(model):
    back = GroupModel.from_json(model.to_json())
    assert back.name == model.name
    assert np.array_equal(back.basis, model.basis) and np.array_equal(back.f, model.f)
