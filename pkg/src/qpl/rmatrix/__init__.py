"""Dynamical and slice r-matrices; cross-sections live in :mod:`qpl.rmatrix.cross_section`."""

from qpl.rmatrix.dynamical import (
    T_of, cdybe_residual, exp_pullback_residual, nu_phi_identity_residual, tab_identity_residual,
)
from qpl.rmatrix.slices import (
    Slice, base_from_angles, class_consistency_residual, ev2_residual, make_slice, slice_r,
)
