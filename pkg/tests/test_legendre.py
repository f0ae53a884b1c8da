import pytest
from gmpy2 import mpq

from subhankel.errors import SingularPointError
from subhankel.legendre import (EXACT_PASS, PASS_UP_TO_SIGN, WeightPair, expected_ml_constant,
                                inv_map, verify_ml_closed_form, verify_ml_pointwise)
from subhankel.report import FAIL
from subhankel.space import SpaceConfig, invariants


def dual_inv_map(us, z, r):
    """Gradient of log(Q1**b * Q2**a) at z, written independently of the module."""
    inv, cfg = invariants(r), SpaceConfig(r)
    q1e, q2e = us.psi_exponents(r)
    point = dict(zip(cfg.z_names, z))
    q1, q2 = inv.Q1.evaluate(point), inv.Q2.evaluate(point)
    return [q1e * inv.Q1.derivative(n).evaluate(point) / q1
            + q2e * inv.Q2.derivative(n).evaluate(point) / q2 for n in cfg.z_names]


def test_weight_exponents():
    us = WeightPair(2, 5)
    assert us.phi_exponents(3) == (2, 1)
    assert us.psi_exponents(3) == (5, -8)
    assert us.bijective and not WeightPair(0, 1).bijective


def test_inv_map_example():
    assert inv_map((2, 5), [1, 0, 0, 1]) == [2, 0, 0, 5]


def test_inv_map_singular_point():
    with pytest.raises(SingularPointError):
        inv_map((1, 2), [1, 0, 0, 0])


@pytest.mark.parametrize("r,us,y", [(3, (1, 2), [1, 2, -1, 3]), (3, (2, -3), [2, 1, 1, -1]),
                                    (4, (-1, 2), [1, -1, 2, 1, 3])])
def test_inv_map_homogeneity_and_euler(r, us, y):
    z = inv_map(us, y, r)
    lam = mpq(3, 7)
    assert inv_map(us, [lam * v for v in y], r) == [v / lam for v in z]
    # <y, grad log phi> is the degree of phi, s1 + s2
    assert sum(a * b for a, b in zip(y, z)) == sum(us)


@pytest.mark.parametrize("r,us,y", [(2, (1, 1), [1, 2, 3]), (3, (1, 2), [1, 2, -1, 3]),
                                    (4, (2, -3), [1, 2, -1, 3, 2])])
def test_dual_gradient_map_inverts_inv_map(r, us, y):
    us = WeightPair(*us)
    assert dual_inv_map(us, inv_map(us, y, r), r) == y


def test_expected_constant():
    assert expected_ml_constant(4) == mpq(1, (2 ** 6 * 3) ** 3)
    assert expected_ml_constant(2) == mpq(1, 4)


@pytest.mark.parametrize("r,constant,status", [
    (2, mpq(-1, 4), PASS_UP_TO_SIGN),
    (3, mpq(-1, 256), PASS_UP_TO_SIGN),
    (4, mpq(-1, 7077888), PASS_UP_TO_SIGN),
])
def test_closed_form_forward(r, constant, status):
    rep = verify_ml_closed_form(r)
    assert (rep.status, rep.constant) == (status, constant)


@pytest.mark.parametrize("r,constant", [(2, mpq(-1, 4)), (3, mpq(-1, 32)), (4, mpq(-1, 1728))])
def test_closed_form_backward_measured_constants(r, constant):
    rep = verify_ml_closed_form(r, "Q-to-P")
    assert rep.constant == constant


@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("direction", ["P-to-Q", "Q-to-P"])
def test_reduced_and_direct_identities_agree(r, direction):
    a = verify_ml_closed_form(r, direction)
    b = verify_ml_closed_form(r, direction, direct=True)
    assert a.constant == b.constant


def test_bad_direction():
    with pytest.raises(ValueError):
        verify_ml_closed_form(3, "sideways")


@pytest.mark.parametrize("r", [3, 4])
def test_pointwise_agrees_with_closed_form(r):
    # us = (1, r-1) makes phi = P1 and psi = Q1**(r-1) * Q2**(2r - r**2)
    point = verify_ml_pointwise(r, (1, r - 1))
    assert point.status == EXACT_PASS
    assert point.constant == verify_ml_closed_form(r).constant


@pytest.mark.parametrize("r,us,constant", [
    (3, (2, -3), mpq(3456)), (3, (-1, 2), mpq(1, 256)),
    (4, (2, -3), mpq(-1769472)), (4, (-1, 2), mpq(1, 16384)),
])
def test_pointwise_constants(r, us, constant):
    rep = verify_ml_pointwise(r, us, samples=12)
    assert rep.status == EXACT_PASS and rep.constant == constant


def test_pointwise_degenerate_weight():
    rep = verify_ml_pointwise(3, (0, 1))
    assert rep.status == FAIL and "degenerate" in rep.details


def test_pointwise_needs_integer_weights():
    with pytest.raises(ValueError):
        verify_ml_pointwise(3, (mpq(1, 2), 1))


def test_pointwise_detects_wrong_pairing(monkeypatch):
    # swapping the roles of Q1 and Q2 must break the constant product
    import subhankel.legendre as legendre
    monkeypatch.setattr(legendre.WeightPair, "psi_exponents",
                        lambda self, r: (self.s1 - (r - 1) * self.s2, self.s2))
    assert verify_ml_pointwise(3, (1, 2)).status == FAIL


def test_report_serializes():
    d = verify_ml_closed_form(3).to_dict()
    assert d["constant"] == "-1/256" and d["expected_constant"] == "1/256"
