from fractions import Fraction

import numpy as np
import pytest

from config.settings import DOMAIN_RETRY_CAP
from tools.expr_dsl import Neg, parse
from tools.fields import (
    ScalarField,
    VectorField3,
    check_zero,
    cross,
    dot,
    gradient,
    jacobian,
    nambu_velocity,
    sample_points,
)
from tools.polynomial import Polynomial

XYZ = ("x", "y", "z")
LXYZ = ("l_x", "l_y", "l_z")


def poly(text, variables=XYZ):
    return ScalarField.parse(text, variables).polynomial()


def test_rotator_gradients(rotator_h, rotator_g, inertia):
    assert gradient(rotator_h).polynomials() == [poly(v, LXYZ) for v in LXYZ]
    assert gradient(rotator_g).polynomials(inertia) == [poly("l_x", LXYZ), poly("l_y/2", LXYZ), poly("l_z/3", LXYZ)]


def test_rotator_velocity_at_unit_point(rotator_h, rotator_g, inertia):
    A = nambu_velocity(rotator_h, rotator_g)
    exact = [p.evaluate({"l_x": 1, "l_y": 1, "l_z": 1}) for p in A.polynomials(inertia)]
    assert exact == [Fraction(-1, 6), Fraction(2, 3), Fraction(-1, 2)]


def test_rotator_velocity_matches_euler_equations(rotator_h, rotator_g):
    A = nambu_velocity(rotator_h, rotator_g)
    rng = np.random.default_rng(1)
    for _ in range(25):
        I = rng.uniform(0.5, 3.0, 3)
        values = {"I_x": Fraction(I[0]), "I_y": Fraction(I[1]), "I_z": Fraction(I[2])}
        lx, ly, lz = rng.uniform(-2, 2, 3)
        expected = (
            ly * lz * (1 / I[2] - 1 / I[1]),
            lz * lx * (1 / I[0] - 1 / I[2]),
            lx * ly * (1 / I[1] - 1 / I[0]),
        )
        got = A.evaluate([lx, ly, lz], values)
        for a, b in zip(got, expected):
            assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_cubic_velocity_is_exact(cubic_h, cubic_g, cubic_A):
    A = nambu_velocity(cubic_h, cubic_g)
    assert A.polynomials() == cubic_A.polynomials()
    assert A.evaluate([1, 2, 3]) == (10, -32, 18)


def test_self_bracket_vanishes(cubic_h):
    A = nambu_velocity(cubic_h, cubic_h)
    assert all(p.is_zero() for p in A.polynomials())


def test_cross_is_antisymmetric():
    a = VectorField3.parse(["sin(x)", "y*z", "exp(z)"], XYZ)
    b = VectorField3.parse(["x^2", "cos(y)", "x - z"], XYZ)
    ab, ba = cross(a, b), cross(b, a)
    for point in sample_points(10, 3).tolist():
        for u, v in zip(ab.evaluate(point), ba.evaluate(point)):
            assert u == pytest.approx(-v, abs=1e-14)


def test_jacobian_entries(cubic_A):
    identity = jacobian(VectorField3.parse(XYZ, XYZ))
    np.testing.assert_array_equal(identity.evaluate([0.3, -0.2, 0.9]), np.eye(3))
    J = jacobian(cubic_A)
    assert ScalarField(J.entries[0][0], XYZ).polynomial() == poly("2*z^2 - 2*y^2")


def test_jacobian_matches_finite_differences():
    A = VectorField3.parse(["sin(x*y)", "x^2*z - y", "exp(z/2)*x"], XYZ)
    J = jacobian(A)
    delta = 1e-6
    for point in sample_points(5, 9):
        numeric = np.zeros((3, 3))
        for j in range(3):
            step = np.zeros(3)
            step[j] = delta
            numeric[:, j] = (np.array(A.evaluate(point + step)) - np.array(A.evaluate(point - step))) / (2 * delta)
        np.testing.assert_allclose(J.evaluate(point), numeric, rtol=1e-6, atol=1e-8)


def test_dot_product():
    a = VectorField3.parse(["x", "y", "z"], XYZ)
    assert dot(a, a).polynomial() == poly("x^2 + y^2 + z^2")
    assert dot(a, VectorField3.zero(XYZ)).polynomial() == Polynomial()


def test_fields_on_different_spaces_do_not_mix(cubic_h, rotator_h):
    with pytest.raises(ValueError):
        nambu_velocity(cubic_h, rotator_h)
    with pytest.raises(ValueError):
        ScalarField.parse("x", ("x", "x", "y"))


def test_with_params_bakes_exact_values(rotator_g, inertia):
    baked = rotator_g.with_params(inertia)
    assert baked.params == frozenset()
    assert baked.polynomial() == poly("l_x^2/2 + l_y^2/4 + l_z^2/6", LXYZ)


def test_check_zero_symbolic():
    x = parse("x", XYZ)
    assert check_zero([[x, Neg(x)]], XYZ).mode == "symbolic"
    result = check_zero([[x]], XYZ)
    assert not result.passed
    assert result.residuals == ("x",)


def test_check_zero_sampled_retries_domain_errors():
    identity = parse("sqrt(x)^2", XYZ)
    result = check_zero([[identity, Neg(parse("x", XYZ))]], XYZ, n_samples=100, seed=4)
    assert result.mode == "sampled"
    assert result.passed
    assert result.samples + len(result.warnings) == 100


def test_check_zero_gives_up_on_samples_outside_the_domain():
    shifted = parse("sqrt(x-2)^2", XYZ)
    result = check_zero([[shifted, Neg(parse("x-2", XYZ))]], XYZ, n_samples=5, retry_cap=3)
    assert not result.passed
    assert result.samples == 0
    assert len(result.warnings) == 5
    assert "on 3 attempts" in result.warnings[0]
    default = check_zero([[shifted]], XYZ, n_samples=1)
    assert f"on {DOMAIN_RETRY_CAP} attempts" in default.warnings[0]


def test_check_zero_sampled_detects_nonzero():
    result = check_zero([[parse("sin(x)", XYZ), Neg(parse("x", XYZ))]], XYZ)
    assert result.mode == "sampled"
    assert not result.passed
    assert result.max_residual > 1e-3


def test_check_zero_rejects_bad_arguments():
    with pytest.raises(ValueError):
        check_zero([[parse("x", XYZ)]], XYZ, tol=0)
