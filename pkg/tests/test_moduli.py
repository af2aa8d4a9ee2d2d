import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpl import build_model
from qpl.errors import ConvergenceError, InvarianceError, WordParseError
from qpl.moduli import (
    InvariantFunction, Letter, SurfaceData, build_rep_variety, embed_point, jacobi_residual,
    parse_word, project_to_level_set, reduced_bracket, tangency_and_rank_checks,
)
from qpl.moduli.words import format_word, invert

letters = st.builds(Letter, st.sampled_from("abc"), st.integers(1, 12), st.sampled_from([1, -1]))


@given(st.lists(letters, max_size=8))
def test_word_format_parse_round_trip(word):
    assert parse_word(format_word(word)) == tuple(word)
    assert invert(invert(tuple(word))) == tuple(word)


def test_parse_examples():
    assert parse_word("a1 b1'") == (Letter("a", 1), Letter("b", 1, -1))
    assert parse_word("") == ()


@pytest.mark.parametrize("text,offset", [("a1''x", 2), ("x1", 0), ("a", 1), ("a0", 1)])
def test_parse_errors(text, offset):
    with pytest.raises(WordParseError) as err:
        parse_word(text)
    assert err.value.offset == offset


def test_surface_validation():
    with pytest.raises(ValueError):
        SurfaceData(1, 0)
    assert len(SurfaceData(2, 1).relator()) == 9


@pytest.fixture
def genus_one():
    model = build_model("su2")
    surf = SurfaceData(1, 1)
    return model, build_rep_variety(surf, model, "qu"), build_rep_variety(surf, model, "free")


def test_word_differential_matches_fd(genus_one, rng):
    _, qu, _ = genus_one
    F = InvariantFunction.from_text(qu, "a1 b1' c1")
    m = qu.random_point(rng)
    assert np.allclose(F.differential(m), F.fd_differential(m), atol=1e-7)


def test_unknown_generator(genus_one):
    _, qu, _ = genus_one
    with pytest.raises(ValueError):
        InvariantFunction.from_text(qu, "a2")


def test_bracket_properties(genus_one, rng):
    model, qu, free = genus_one
    F1, F2, F3 = (InvariantFunction.from_text(free, w) for w in ("a1", "b1", "a1b1"))
    m = free.random_point(rng)
    b = reduced_bracket(F1, F2, m)
    assert abs(b + reduced_bracket(F2, F1, m)) < 1e-12
    assert abs(reduced_bracket(F1, F1, m)) < 1e-12
    g = model.random_element(rng)
    assert abs(reduced_bracket(F1, F2, free.qp.components[0].act(g, m)) - b) < 1e-9
    G1, G2 = (InvariantFunction.from_text(qu, w) for w in ("a1", "b1"))
    assert abs(reduced_bracket(G1, G2, embed_point(free, m)) - b) < 1e-8
    fns = [(F, F.differential) for F in (F1, F2, F3)]
    assert abs(jacobi_residual(free.qp, fns, m)) < 1e-6
    assert tangency_and_rank_checks(free.qp, F3.differential(m), m)["tangency"] < 1e-9


def test_non_invariant_input_is_rejected(genus_one, rng):
    _, qu, _ = genus_one
    F = InvariantFunction.from_text(qu, "a1")
    m = qu.random_point(rng)

    class Coordinate(InvariantFunction):
        def __call__(self, p):
            return float(np.real(p[0][0, 1]))

    bad = Coordinate(qu, F.letters, "coordinate")
    with pytest.raises(InvarianceError):
        reduced_bracket(bad, F, m)


def test_level_set_projection(genus_one, rng):
    _, qu, _ = genus_one
    lp = project_to_level_set(qu, qu.random_point(rng, 0.5))
    assert lp.distance < 1e-9 and lp.locally_free


def test_level_set_unreachable():
    model = build_model("su2")
    rv = build_rep_variety(SurfaceData(0, 1), model, "free")
    with pytest.raises(ConvergenceError):
        project_to_level_set(rv, (), model.exp(np.array([0.0, 0.0, 1.0])))
