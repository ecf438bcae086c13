import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slantkit import expr as fe
from slantkit.errors import EvalError, ParseError


def ev(src, point, n=None):
    n = n if n is not None else len(point)
    return fe.evaluate(fe.parse(src, n), np.asarray(point, dtype=float))


class TestParse:
    def test_linear(self):
        assert ev("x1 + 2*x2", [1, 3]) == pytest.approx(7.0)

    def test_norm_coefficient(self):
        # pointwise-fixture style coefficient: parses and evaluates finitely
        e = fe.parse("(norm2 + 1)/sqrt(2*norm2^2 + 2*norm2 + 2)", 4)
        v = fe.evaluate(e, np.array([1.0, 0.0, 0.0, 0.0]))
        assert v == pytest.approx(2 / math.sqrt(6))

    def test_coordinate_out_of_range(self):
        with pytest.raises(ParseError):
            fe.parse("x9", 4)

    def test_precedence(self):
        assert ev("2 + 3*4", [0.0]) == 14.0
        assert ev("2*3^2", [0.0]) == 18.0
        assert ev("-2^2", [0.0]) == -4.0
        assert ev("2^-2", [0.0]) == 0.25
        assert ev("2^3^2", [0.0]) == 512.0
        assert ev("8/4/2", [0.0]) == 1.0
        assert ev("1 - 2 - 3", [0.0]) == -4.0

    def test_offset_reported(self):
        with pytest.raises(ParseError) as err:
            fe.parse("x1 + $", 2)
        assert err.value.offset == 5


class TestEval:
    def test_norm2(self):
        assert ev("norm2", [3, 4]) == 25.0

    def test_sqrt_at_origin(self):
        assert ev("sqrt(norm2^2 + 4)", [0.0, 0.0]) == 2.0

    def test_pointwise_coefficient_vanishes_at_origin(self):
        # gamma = 0, delta = 1, j = 1 coefficient: (norm2+0)/sqrt(norm2^2+1)
        assert ev("(norm2 + 0)/sqrt(norm2^2 + 0*norm2 + 1)", [0.0, 0.0, 0.0]) == 0.0

    def test_division_by_zero(self):
        with pytest.raises(EvalError):
            ev("1/x1", [0.0])

    def test_sqrt_negative(self):
        with pytest.raises(EvalError) as err:
            ev("sqrt(x1)", [-1.0])
        assert err.value.subexpr is not None

    def test_arccos_clamps_roundoff(self):
        assert ev("arccos(x1)", [1.0 + 1e-13]) == pytest.approx(0.0)

    def test_arccos_rejects_far_out(self):
        with pytest.raises(EvalError):
            ev("arccos(x1)", [1.5])

    def test_pi(self):
        assert ev("cos(pi)", [0.0]) == pytest.approx(-1.0)


class TestDirectionalDerivative:
    def test_polynomial(self):
        e = fe.parse("x1^2", 1)
        d = fe.directional_derivative(e, [3.0], [1.0], h=1e-5)
        assert d == pytest.approx(6.0, abs=1e-8)

    def test_norm2(self):
        e = fe.parse("norm2", 2)
        d = fe.directional_derivative(e, [1.0, 2.0], [0.0, 1.0], h=1e-5)
        assert d == pytest.approx(4.0, abs=1e-8)

    def test_constant(self):
        e = fe.parse("7", 2)
        assert abs(fe.directional_derivative(e, [0.3, -2.0], [1.0, 1.0], h=1e-5)) < 1e-12

    def test_quadratic_exactness(self):
        # degree <= 2 polynomials are exact to 1e-9 at unit scale with h = 1e-5
        e = fe.parse("3*x1^2 - 2*x1*x2 + x2 + 5", 2)
        d = fe.directional_derivative(e, [1.0, -1.0], [1.0, 0.0], h=1e-5)
        assert d == pytest.approx(6 * 1.0 - 2 * -1.0, abs=1e-9)


# --- round-trip property: parse(to_source(e)) is structurally equal -----------

def _expr_strategy(n=3, depth=3):
    leaves = st.one_of(
        st.floats(min_value=0.0, max_value=100.0, allow_nan=False).map(fe.Num),
        st.integers(1, n).map(fe.Coord),
        st.just(fe.Pi()),
        st.just(fe.Norm2()),
    )

    def extend(children):
        return st.one_of(
            children.map(fe.Neg),
            st.tuples(st.sampled_from("+-*/^"), children, children).map(
                lambda t: fe.Bin(t[0], t[1], t[2])),
            st.tuples(st.sampled_from(fe.FUNCTIONS), children).map(
                lambda t: fe.Call(t[0], t[1])),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(_expr_strategy())
def test_print_parse_roundtrip(e):
    assert fe.parse(fe.to_source(e), 3) == e


@settings(max_examples=100, deadline=None)
@given(_expr_strategy(), st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_roundtrip_preserves_value(e, coords):
    x = np.asarray(coords)
    try:
        v1 = fe.evaluate(e, x)
    except (EvalError, OverflowError):
        return
    v2 = fe.evaluate(fe.parse(fe.to_source(e), 3), x)
    assert v1 == v2 or (math.isnan(v1) and math.isnan(v2))


def test_vector_field():
    vf = fe.VectorFieldExpr.parse(["x2", "-(x1)", "0"], 3)
    assert np.allclose(vf.at([1.0, 2.0, 5.0]), [2.0, -1.0, 0.0])
    assert vf.is_zero_component(2)
    assert not vf.is_zero_component(0)
    back = fe.VectorFieldExpr.parse(vf.to_sources(), 3)
    assert np.allclose(back.at([0.5, -0.25, 9.0]), vf.at([0.5, -0.25, 9.0]))
