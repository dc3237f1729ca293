import random

import pytest
from hypothesis import given, settings

from nonrigid.errors import EvaluationError
from nonrigid.model import AGENT_SPECIFIC, ModelParams, random_model
from nonrigid.semantics import (
    TruthSet,
    apply_op,
    empty_set,
    equivalent_on,
    first_difference,
    from_points,
    full_set,
    satisfies,
    truth_set,
)
from nonrigid.syntax import (
    SELF_NAME,
    And,
    At,
    DeDicto,
    DeRe,
    Implies,
    Not,
    Or,
    Prop,
    expand,
    parse_formula,
    random_formula,
)
from strategies import model_and_formula, models

P = parse_formula


def pts(m, phi):
    return truth_set(m, P(phi)).points(m)


# ------------------------------------------------------------- satisfies


@pytest.mark.parametrize(
    "fixture_name, point, formula, expected",
    [
        ("m_rd", ("w", "b"), "R[Ann] p", True),
        ("m_rd", ("u", "b"), "R[Ann] p", True),
        ("m_rd", ("w", "a"), "R[Ann] p", False),
        ("m_rd", ("u", "a"), "R[Ann] p", False),
        ("m_dr", ("w", "a"), "D[Ann] p", True),
        ("m_dr", ("u", "b"), "D[Ann] p", True),
        ("m_dr", ("v", "b"), "D[Ann] p", False),
        ("m_dr", ("t", "a"), "D[Ann] p", False),
        ("m_dr", ("t", "b"), "true", True),
        ("m_dr", ("t", "b"), "false", False),
    ],
)
def test_satisfies_fixture_points(request, fixture_name, point, formula, expected):
    m = request.getfixturevalue(fixture_name)
    assert satisfies(m, point, P(formula)) is expected


def test_satisfies_errors(m_rd):
    with pytest.raises(EvaluationError, match="undeclared name"):
        satisfies(m_rd, ("w", "a"), P("R[Bob] p"))
    with pytest.raises(EvaluationError, match="undeclared prop"):
        satisfies(m_rd, ("w", "a"), P("q"))
    with pytest.raises(EvaluationError, match="agent-specific"):
        satisfies(m_rd, ("w", "a"), P("R[se] p"))
    with pytest.raises(EvaluationError, match="not in the model"):
        satisfies(m_rd, ("x", "a"), P("p"))
    with pytest.raises(EvaluationError):
        truth_set(m_rd, P("D[Zoe] p"))


# ------------------------------------------------------------- truth sets


def test_fixture_truth_sets(m_dr, m_rd):
    assert pts(m_dr, "p") == {("w", "a"), ("u", "b"), ("v", "b"), ("t", "a")}
    assert pts(m_dr, "D[Ann] p") == {("w", "a"), ("w", "b"), ("u", "a"), ("u", "b")}
    assert pts(m_rd, "R[Ann] p") == {("w", "b"), ("u", "b")}
    assert pts(m_dr, "false") == set()
    assert truth_set(m_dr, P("true")) == full_set(m_dr)


def test_bit_layout_is_row_major(m_dr):
    assert truth_set(m_dr, P("p")).to_string() == "10010110"
    assert TruthSet.from_string("10010110") == truth_set(m_dr, P("p"))


def test_apply_op_examples(m_dr):
    tp = truth_set(m_dr, P("p"))
    assert apply_op(m_dr, (Not, None), [tp]).points(m_dr) == {("w", "b"), ("u", "a"), ("v", "a"), ("t", "b")}
    assert apply_op(m_dr, (DeRe, "Ann"), [tp]) == empty_set(m_dr)
    assert apply_op(m_dr, (DeRe, "Ann"), [full_set(m_dr)]) == full_set(m_dr)
    assert apply_op(m_dr, (Or, None), [tp, ~tp]) == full_set(m_dr)


def test_apply_op_rejects(m_dr, m_rd):
    tp = truth_set(m_dr, P("p"))
    with pytest.raises(ValueError, match="argument"):
        apply_op(m_dr, (Or, None), [tp])
    with pytest.raises(ValueError, match="argument"):
        apply_op(m_dr, (Not, None), [tp, tp])
    with pytest.raises(ValueError, match="cells"):
        apply_op(m_rd, (Not, None), [tp])
    with pytest.raises(EvaluationError):
        apply_op(m_dr, (At, "Zoe"), [tp])


def test_equivalent_on(m_dr, m_rd):
    assert equivalent_on(m_dr, P("D[Ann] p"), P("R[Ann] @[Ann] p"))
    assert equivalent_on(m_rd, P("p"), P("p | p"))
    assert not equivalent_on(m_rd, P("D[Ann] p"), P("R[Ann] p"))


def test_first_difference_m_rd(m_rd):
    # by hand: D[Ann] p holds at (w,a) (p at (w,a) and (u,b)); R[Ann] p needs p at (u,a)
    assert satisfies(m_rd, ("w", "a"), P("D[Ann] p"))
    assert not satisfies(m_rd, ("w", "a"), P("R[Ann] p"))
    assert first_difference(m_rd, P("D[Ann] p"), P("R[Ann] p")) == ("w", "a")
    assert first_difference(m_rd, P("p"), P("p")) is None


def test_empty_world_model():
    m = random_model(ModelParams(0, 0, 0, 1), 1)
    assert truth_set(m, P("p | !p")) == TruthSet(0, 0)
    assert equivalent_on(m, P("p"), P("!p"))


# -------------------------------------------------------------- properties


@settings(max_examples=300, deadline=None)
@given(model_and_formula())
def test_satisfies_agrees_with_truth_set(mf):
    m, phi = mf
    t = truth_set(m, phi)
    for i, pt in enumerate(m.points):
        assert satisfies(m, pt, phi) == (i in t)


@settings(max_examples=200, deadline=None)
@given(model_and_formula(mode=AGENT_SPECIFIC, with_se=True))
def test_satisfies_agrees_with_truth_set_agent_specific(mf):
    m, phi = mf
    t = truth_set(m, phi)
    for i, pt in enumerate(m.points):
        assert satisfies(m, pt, phi) == (i in t)


@settings(max_examples=200, deadline=None)
@given(model_and_formula(), model_and_formula())
def test_boolean_homomorphism(mf, other):
    m, phi = mf
    psi = other[1] if set(other[0].names) == set(m.names) else phi
    assert truth_set(m, Not(phi)) == ~truth_set(m, phi)
    assert truth_set(m, Or(phi, psi)) == truth_set(m, phi) | truth_set(m, psi)
    assert truth_set(m, And(phi, psi)) == truth_set(m, phi) & truth_set(m, psi)
    assert truth_set(m, And(phi, psi)) == truth_set(m, expand(And(phi, psi)))
    assert truth_set(m, Implies(phi, psi)) == truth_set(m, expand(Implies(phi, psi)))


@settings(max_examples=200, deadline=None)
@given(model_and_formula())
def test_modal_laws(mf):
    m, phi = mf
    t = truth_set(m, phi)
    for n in m.names:
        at = apply_op(m, (At, n), [t])
        assert apply_op(m, (DeRe, n), [t]).issubset(at)
        assert apply_op(m, (DeDicto, n), [t]).issubset(at)
        # @ does not look at the evaluating agent in rigid mode
        for i in range(len(m.worlds)):
            row = [(i * len(m.agents) + j) in at for j in range(len(m.agents))]
            assert len(set(row)) == 1
        assert apply_op(m, (At, n), [at]) == at


@settings(max_examples=200, deadline=None)
@given(model_and_formula(), model_and_formula())
def test_k_and_monotonicity(mf, other):
    m, phi = mf
    psi = other[1] if set(other[0].names) == set(m.names) else Not(phi)
    for n in m.names:
        for kind in (DeRe, DeDicto):
            lhs = truth_set(m, kind(n, Implies(phi, psi))) & truth_set(m, kind(n, phi))
            assert lhs.issubset(truth_set(m, kind(n, psi)))
        bigger = Or(phi, psi)
        for kind in (DeRe, DeDicto, At):
            assert truth_set(m, kind(n, phi)).issubset(truth_set(m, kind(n, bigger)))


@settings(max_examples=300, deadline=None)
@given(model_and_formula())
def test_dedicto_is_dere_of_at(mf):
    m, phi = mf
    for n in m.names:
        for k in m.names:
            assert equivalent_on(m, DeDicto(n, phi), DeRe(k, At(n, phi)))


@settings(max_examples=300, deadline=None)
@given(model_and_formula(mode=AGENT_SPECIFIC, with_se=True))
def test_self_name_restores_definability(mf):
    m, phi = mf
    for n in m.names:
        assert equivalent_on(m, DeDicto(n, phi), DeRe(SELF_NAME, At(n, phi)))


def test_agent_specific_at_is_not_idempotent():
    rng = random.Random(0)
    for seed in range(1000):
        m = random_model(ModelParams(3, 3, 1, 1, AGENT_SPECIFIC), seed)
        phi = random_formula(rng, list(m.props), list(m.names), depth=2)
        n = m.names[0]
        if not equivalent_on(m, At(n, At(n, phi)), At(n, phi)):
            return
    pytest.fail("no agent-specific model separated @[n] @[n] phi from @[n] phi")


def test_agent_specific_breaks_dedicto_via_dere():
    # the uniform definition fails once names depend on the agent
    found = False
    for seed in range(200):
        m = random_model(ModelParams(2, 3, 1, 1, AGENT_SPECIFIC), seed)
        if not equivalent_on(m, P("D[Ann] p"), P("R[Ann] @[Ann] p")):
            found = True
            break
    assert found


@given(models())
def test_from_points_round_trip(m):
    t = truth_set(m, Prop("p"))
    assert from_points(m, t.points(m)) == t
