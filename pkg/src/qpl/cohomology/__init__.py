"""Quasi-Poisson cohomology operators, the BV operator and modular vector fields."""

from qpl.cohomology.modular import (
    InvariantMultivector, VolumeStructure, bv_apply, bv_field, d_P, d_P_squared_residual,
    gauge_residual, generator_residual, invariance_certificate, lie_homology, modular_field,
)
