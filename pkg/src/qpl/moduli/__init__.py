"""Reduction, representation varieties and brackets of invariant functions."""

from qpl.moduli.reduction import (
    InvariantFunction, LevelSetPoint, RepVariety, SurfaceData, build_rep_variety, embed_point,
    jacobi_residual, project_to_level_set, reduced_bracket, tangency_and_rank_checks,
)
from qpl.moduli.words import Letter, parse_word
