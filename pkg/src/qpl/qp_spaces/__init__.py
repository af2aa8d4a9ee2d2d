"""Quasi-Poisson spaces: constructions and certificates."""

from qpl.qp_spaces.certify import (
    certify, equivariance_residual, invariance_residual, moment_map_push_residual,
    moment_residual, quasi_poisson_residual,
)
from qpl.qp_spaces.core import (
    QuasiPoissonSpace, bi_action_space, canonical_group_space, conjugacy_class_space,
    double_DG, double_bold_DG, fuse, fusion_product, product, psi_field,
)
