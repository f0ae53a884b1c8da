import pytest
from gmpy2 import mpq

from subhankel.errors import SizeError
from subhankel.orthopoly import (CONSTANT_RATIO, SPECIALIZED_IDENTITIES, EQUAL, FAMILIES,
                                 IDENTITIES, MISMATCH, RECURRENCES, compare, constant_in_n,
                                 family_name, hankel_det, ratio_table, recurrence_closed_form,
                                 subhankel_det, term, verify_identity)
from subhankel.parsing import parse_poly
from subhankel.poly import Context

ST = Context(("s", "t"))
X = Context(("x",))
XY = Context(("x", "y"))


def P(text, ctx):
    return parse_poly(text, ctx)


def test_term_examples():
    assert term("ChebT", 3) == P("4*x^3 - 3*x", X)
    assert term("GLuc", 2) == P("s^2 + 2*t", ST)
    assert term("GFib", 4) == P("s^3 + 2*s*t", ST)


def test_family_names_are_case_insensitive():
    assert family_name("chebt") == "ChebT"
    with pytest.raises(ValueError):
        family_name("legendre")


@pytest.mark.parametrize("family", FAMILIES)
def test_recurrence_holds_to_forty(family):
    rec = RECURRENCES[family]
    for n in range(2, 41):
        assert term(family, n) == rec.p * term(family, n - 1) + rec.q * term(family, n - 2)


def test_ngluc_uses_doubled_t():
    assert term("NGLuc", 2) == P("s^2 + 2*t", ST)


@pytest.mark.parametrize("n", range(0, 8))
def test_specializations(n):
    to_cheb = {"s": P("2*x", X), "t": -1}
    to_one = {"s": P("x", X), "t": 1}
    to_xy = {"s": P("x + y", XY), "t": P("-x*y", XY)}
    assert term("ChebT", n).scale(2) == term("GLuc", n).substitute(to_cheb)
    assert term("ChebU", n) == term("GFib", n + 1).substitute(to_cheb)
    assert term("Fib0", n) == term("GFib", n).substitute(to_one)
    assert term("Luc", n) == term("GLuc", n).substitute(to_one)
    assert term("QuotForm", n) == term("GFib", n).substitute(to_xy)
    assert term("SumForm", n) == term("GLuc", n).substitute(to_xy)


def test_closed_forms_of_two_variable_families():
    x, y = P("x", XY), P("y", XY)
    for n in range(1, 6):
        assert term("QuotForm", n) * (x - y) == x ** n - y ** n
        assert term("SumForm", n) == x ** n + y ** n


def test_determinant_examples():
    assert subhankel_det("GFib", 3, 0) == term("GFib", 4)
    assert subhankel_det("GFib", 2, 1) == P("t", ST)
    for n in range(4):
        assert hankel_det("GFib", 3, n) == 0


def test_sizes_are_checked():
    with pytest.raises(SizeError):
        subhankel_det("GFib", 1, 0)
    with pytest.raises(SizeError):
        hankel_det("GFib", 3, -1)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("r", [2, 3, 4, 5])
def test_subhankel_matches_recurrence_closed_form(family, r):
    for n in range(4):
        assert subhankel_det(family, r, n) == recurrence_closed_form(family, r, n)


@pytest.mark.parametrize("family", FAMILIES)
def test_hankel_vanishes(family):
    for r in (3, 4, 5):
        for n in range(4):
            assert hankel_det(family, r, n).is_zero()


@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("n", range(5))
def test_gfib_identity_is_exact(r, n):
    rep = verify_identity("GFib", r, n)
    assert rep.status == EQUAL and rep.ratio == 1


def test_chebyshev_examples():
    rep = verify_identity("ChebT", 3, 0)
    assert rep.status == EQUAL and rep.lhs == P("1 - x^2", X) * term("ChebT", 4)
    rep = verify_identity("chebt", 2, 0)
    assert rep.status == CONSTANT_RATIO and rep.ratio == -1
    assert rep.lhs == P("x^2 - 1", X)


def test_lucas_identity_misses_power_of_t():
    rep = verify_identity("GLuc", 3, 2)
    assert rep.status == MISMATCH
    assert rep.details["quotient"] == P("t^2", ST)
    assert verify_identity("GLuc", 3, 0).status == EQUAL


def test_normalized_lucas_identity_mismatch():
    rep = verify_identity("NGLuc", 3, 1)
    assert rep.status == MISMATCH and "witness" in rep.details


def test_fibonacci_conventions():
    assert verify_identity("Fib", 3, 1).status == MISMATCH
    rep = verify_identity("Fib0", 3, 1)
    assert rep.status == CONSTANT_RATIO and rep.ratio == -1


def test_sum_form_readings():
    assert verify_identity("SumForm", 4, 2).status == EQUAL
    assert verify_identity("SumForm[literal]", 4, 2).status == MISMATCH
    assert verify_identity("SumForm[literal]", 2, 2).status == EQUAL


def test_compare():
    a = P("x^2 - 1", X)
    assert compare(a, a)[0] == EQUAL
    assert compare(a.scale(mpq(2, 3)), a)[:2] == (CONSTANT_RATIO, mpq(2, 3))
    assert compare(a, P("0", X))[0] == MISMATCH
    status, ratio, details = compare(a * P("x", X), a)
    assert status == MISMATCH and details["quotient"] == P("x", X)


def test_ratio_table_rows_and_order():
    rows = ratio_table(["GFib", "ChebT"], [2, 3], [0, 1])
    assert [(r["family"], r["r"], r["n"]) for r in rows] == [
        ("GFib", 2, 0), ("GFib", 2, 1), ("GFib", 3, 0), ("GFib", 3, 1),
        ("ChebT", 2, 0), ("ChebT", 2, 1), ("ChebT", 3, 0), ("ChebT", 3, 1)]
    assert set(rows[0]) == {"family", "r", "n", "status", "ratio"}
    assert rows[4]["ratio"] == "-1"


def test_parallel_table_matches_serial():
    assert ratio_table(jobs=2) == ratio_table()


def test_specialized_ratios_constant_in_n():
    rows = ratio_table(SPECIALIZED_IDENTITIES)
    constant = constant_in_n(rows)
    for name in ("ChebT", "ChebU", "ChebV", "Fib0", "Luc", "QuotForm", "SumForm"):
        assert all(constant[(name, r)] for r in range(2, 6)), name
    assert not any(constant[("Fib", r)] for r in range(2, 6))


def test_every_identity_has_a_formula():
    for key, ident in IDENTITIES.items():
        assert ident.formula and ident.family in FAMILIES
