import pytest
from gmpy2 import mpq
from hypothesis import given

from subhankel.errors import ContextError, ParseError
from subhankel.parsing import parse_poly
from subhankel.poly import Context, Poly
from subhankel.space import invariants

from strategies import polys


def test_subhankel_determinant_at_size_two():
    assert parse_poly("y1*y3 - y2^2") == invariants(2).P1


def test_rational_coefficient():
    p = parse_poly("3/2*s + 1")
    assert p.coeffs[(1,)] == mpq(3, 2)
    assert p.coeffs[(0,)] == 1


def test_stray_operator_position():
    with pytest.raises(ParseError) as info:
        parse_poly("y1 +* y2")
    assert (info.value.line, info.value.column) == (1, 5)


def test_position_on_later_line():
    with pytest.raises(ParseError) as info:
        parse_poly("x +\n  y ^ ")
    assert info.value.line == 2


def test_bad_character():
    with pytest.raises(ParseError):
        parse_poly("x $ y")


def test_division_by_zero_literal():
    with pytest.raises(ParseError):
        parse_poly("1/0*x")


def test_unknown_variable_in_context():
    with pytest.raises(ContextError):
        parse_poly("x + q", Context(("x", "y")))


def test_signs_and_powers():
    assert parse_poly("-x^2 + y") == Poly.var(Context(("x", "y")), "y") - parse_poly("x^2")
    with pytest.raises(ParseError):
        parse_poly("x - -y")
    assert parse_poly("2*x*x") == parse_poly("2*x^2")


def test_natural_variable_order():
    assert parse_poly("y10 + y2").ctx.names == ("y2", "y10")


@given(polys())
def test_print_parse_round_trip(p):
    assert parse_poly(str(p)) == p


def test_round_trip_of_invariants():
    inv = invariants(4)
    for _, p in inv.items():
        assert parse_poly(str(p)) == p
