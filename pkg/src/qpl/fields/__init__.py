"""Multivector and form calculus on products of group and algebra factors."""

from qpl.fields.action import ActionComponent, MomentMap, word_moment
from qpl.fields.calculus import (
    NamedMap, contract, exterior_derivative, pair, pushforward_at, schouten,
)
from qpl.fields.field import (
    DifferentialForm, Family, MultiVectorField, function_field, generate, left_frame,
    left_frame_field, pair_bivector, right_frame, right_frame_field, trace_function,
)
from qpl.fields.space import (
    ConjugacyConstraint, DerivativeEngine, Factor, LevelSet, ModelSpace, SubgroupConstraint,
)
