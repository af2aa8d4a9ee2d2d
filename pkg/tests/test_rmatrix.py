import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpl import build_model
from qpl.errors import DomainError, SingularityError
from qpl.qp_spaces import canonical_group_space, double_bold_DG, quasi_poisson_residual
from qpl.qp_spaces.exponential import poisson_residual
from qpl.rmatrix import (
    T_of, base_from_angles, cdybe_residual, class_consistency_residual, ev2_residual,
    exp_pullback_residual, make_slice, nu_phi_identity_residual, tab_identity_residual,
)
from qpl.rmatrix.cross_section import (
    cross_section, grid_rows, poisson_cross_section, splitting_residuals,
)
from qpl.rmatrix.dynamical import T_equivariance_residual, T_odd_residual


def _xi(model, rng):
    while True:
        xi = model.random_algebra(rng)
        if model.in_natural_domain(xi):
            return xi


@given(st.integers(0, 10**6))
def test_cdybe_two_derivative_paths(seed):
    rng = np.random.default_rng(seed)
    model = build_model("su3")
    xi = _xi(model, rng)
    assert np.max(np.abs(cdybe_residual(model, xi))) < 1e-6
    assert np.max(np.abs(cdybe_residual(model, xi, "dk"))) < 1e-8


def test_T_symmetries(nonabelian, rng):
    xi = _xi(nonabelian, rng)
    T = T_of(nonabelian, xi)
    assert np.allclose(T, -T.T, atol=1e-13)
    assert T_odd_residual(nonabelian, xi) < 1e-12
    assert T_equivariance_residual(nonabelian, xi, nonabelian.random_element(rng)) < 1e-12
    assert exp_pullback_residual(nonabelian, xi) < 1e-8


def test_tab_identity_holds_transposed_only(rng):
    model = build_model("su3")
    xi = _xi(model, rng)
    assert np.max(np.abs(tab_identity_residual(model, xi))) < 1e-10
    assert np.max(np.abs(tab_identity_residual(model, xi, transpose=False))) > 1e-3


def test_T_refuses_outside_domain():
    model = build_model("su2")
    with pytest.raises(DomainError):
        T_of(model, np.array([0.0, 0.0, 2 * np.pi]))


def test_nu_phi_identity():
    s = np.linspace(-5, 5, 11) + 0.3j
    assert np.max(np.abs(nu_phi_identity_residual(s))) < 1e-12


@pytest.mark.parametrize("kind,angles,h", [
    ("su2", [0.5], 1), ("su3", [0.4, 1.1], 2), ("su3", [0.5, 0.5], 4), ("so3", [0.7], 1),
])
def test_slice_ev2(kind, angles, h, rng):
    model = build_model(kind)
    sl = make_slice(model, base_from_angles(model, angles))
    assert sl.h == h and 0 < sl.radius <= 1.0
    for _ in range(3):
        p = sl.sample(rng)
        assert sl.contains(p)
        assert np.max(np.abs(ev2_residual(sl, p))) < 1e-6
        assert class_consistency_residual(sl, p) < 1e-12


def test_slice_refuses_singular_base():
    model = build_model("su2")
    with pytest.raises(SingularityError):
        make_slice(model, base_from_angles(model, [np.pi - 1e-4]))


def test_base_from_angles_validation():
    with pytest.raises(ValueError):
        base_from_angles(build_model("su3"), [0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        base_from_angles(build_model("so3"), [0.1, 0.2])


@pytest.mark.parametrize("parent", ["G", "DD"])
def test_cross_section_su2(parent, rng):
    model = build_model("su2")
    qp = canonical_group_space(model) if parent == "G" else double_bold_DG(model)
    sl = make_slice(model, base_from_angles(model, [0.5]))
    cs = cross_section(qp, sl, rng=rng)
    m = cs.random_point(rng)
    ortho, tang, perp = splitting_residuals(cs, m)
    assert ortho < 1e-9 and tang < 1e-9 and perp < 1e-9
    assert quasi_poisson_residual(cs.qp, m) < 1e-7
    ps = poisson_cross_section(cs)
    assert poisson_residual(ps, m) < 1e-7


def test_grid_rows_columns(rng):
    model = build_model("su2")
    sl = make_slice(model, base_from_angles(model, [0.5]))
    cs = cross_section(canonical_group_space(model), sl, rng=rng)
    rows = grid_rows(cs, rng, 2)
    assert len(rows) == 2
    assert {"eta0", "quasi_poisson", "moment", "orthogonality", "tangency", "ev2"} <= set(rows[0])


def test_cross_section_empty_preimage(rng):
    model = build_model("torus2")
    sl = make_slice(model, base_from_angles(model, [0.3, 0.6]))
    with pytest.raises(DomainError):
        cross_section(double_bold_DG(model), sl, rng=rng)
