import math
from fractions import Fraction

import numpy as np
import pytest

from tools.errors import DomainError, ExprSyntaxError, NotPolynomial, UndeclaredName
from tools.expr_dsl import (
    Add,
    Call,
    Constant,
    Div,
    IntPow,
    Mul,
    Neg,
    Parameter,
    Sub,
    Variable,
    compile_expr,
    differentiate,
    evaluate,
    evaluate_exact,
    from_polynomial,
    parse,
    simplify,
    substitute,
    to_polynomial,
    to_string,
    try_polynomial,
)
from tools.polynomial import Polynomial

XYZ = ("x", "y", "z")
x, y, z = Variable("x"), Variable("y"), Variable("z")


def random_expr(rng, depth):
    """Random tree over x, y, z without division or sqrt."""
    if depth == 0 or rng.random() < 0.2:
        choice = rng.integers(0, 5)
        if choice < 3:
            return Variable(XYZ[choice])
        return Constant(int(rng.integers(-3, 4)))
    kind = rng.integers(0, 7)
    left = random_expr(rng, depth - 1)
    if kind == 0:
        return Add(left, random_expr(rng, depth - 1))
    if kind == 1:
        return Sub(left, random_expr(rng, depth - 1))
    if kind == 2:
        return Mul(left, random_expr(rng, depth - 1))
    if kind == 3:
        return IntPow(left, int(rng.integers(0, 3)))
    if kind == 4:
        return Neg(left)
    return Call(["sin", "cos"][kind - 5], left)


def test_parse_builds_conventional_tree():
    tree = parse("2*x*(z^2 - y^2)", XYZ)
    assert tree == Mul(Mul(Constant(2), x), Sub(IntPow(z, 2), IntPow(y, 2)))
    assert parse("x", XYZ) == x
    assert parse("x*y*z", XYZ) == Mul(Mul(x, y), z)


def test_parse_precedence_of_unary_minus_and_power():
    assert parse("-x^2", XYZ) == Neg(IntPow(x, 2))
    assert parse("x - -y", XYZ) == Sub(x, Neg(y))
    assert parse("a*x", XYZ, ["a"]) == Mul(Parameter("a"), x)


def test_decimal_constants_are_exact():
    assert parse("0.1", XYZ) == Constant(Fraction(1, 10))


@pytest.mark.parametrize(
    "text",
    ["", "   ", "2x", "x^y", "x^-1", "(x", "x +", "foo(x)", "x/0", "x $ y"],
)
def test_parse_rejects_malformed_text(text):
    with pytest.raises(ExprSyntaxError):
        parse(text, XYZ)


def test_parse_reports_error_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse("x + * y", XYZ)
    assert info.value.position == 4


def test_parse_rejects_undeclared_names():
    with pytest.raises(UndeclaredName) as info:
        parse("x*w", XYZ)
    assert info.value.name == "w"


def test_evaluate_examples():
    binding = {"x": 1, "y": 2, "z": 3}
    assert evaluate(parse("x^2+y^2+z^2", XYZ), binding) == 14
    assert evaluate(parse("x*y*z", XYZ), binding) == 6
    assert evaluate(parse("0*sin(x)", XYZ), {"x": 5}) == 0
    assert parse("x*y*z", XYZ) != parse("x*(y*z)", XYZ)
    rng = np.random.default_rng(0)
    for _ in range(20):
        b = dict(zip(XYZ, rng.uniform(-2, 2, 3)))
        assert evaluate(parse("x*y*z", XYZ), b) == pytest.approx(evaluate(parse("x*(y*z)", XYZ), b), rel=1e-15)


@pytest.mark.parametrize("text, binding", [("sqrt(x)", {"x": -1.0}), ("1/x", {"x": 0.0}), ("exp(x)", {"x": 1e6})])
def test_evaluate_raises_domain_error(text, binding):
    with pytest.raises(DomainError):
        evaluate(parse(text, ["x"]), binding)


def test_compile_with_parameter_values():
    f = compile_expr(parse("a*x", ["x"], ["a"]), ["x"], {"a": Fraction(1, 2)})
    assert f([4.0]) == 2.0
    with pytest.raises(UndeclaredName):
        compile_expr(parse("a*x", ["x"], ["a"]), ["x"])


def test_differentiate_examples():
    assert differentiate(parse("x*y*z", XYZ), "x") == Mul(y, z)
    assert differentiate(parse("c", XYZ, ["c"]), "x") == Constant(0)
    assert to_string(differentiate(parse("x^2+y^2+z^2", XYZ), "x")) == "2*x"


def test_differentiate_elementary_functions():
    d = differentiate(parse("sin(x)*exp(y)", XYZ), "x")
    assert evaluate(d, {"x": 0.3, "y": 0.2}) == pytest.approx(math.cos(0.3) * math.exp(0.2))
    d = differentiate(parse("sqrt(x)", ["x"]), "x")
    assert evaluate(d, {"x": 4.0}) == pytest.approx(0.25)
    d = differentiate(parse("x/(1+y^2)", XYZ), "y")
    assert evaluate(d, {"x": 2.0, "y": 1.0}) == pytest.approx(-1.0)


def test_derivative_matches_central_differences():
    rng = np.random.default_rng(7)
    delta = 1e-6
    for _ in range(60):
        expr = random_expr(rng, 4)
        var = XYZ[int(rng.integers(0, 3))]
        f = compile_expr(expr, XYZ)
        df = compile_expr(differentiate(expr, var), XYZ)
        k = XYZ.index(var)
        for _ in range(10):
            point = rng.uniform(-1, 1, 3).tolist()
            plus, minus = list(point), list(point)
            plus[k] += delta
            minus[k] -= delta
            numeric = (f(plus) - f(minus)) / (2 * delta)
            exact = df(point)
            if abs(exact) > 1e-8:
                assert abs(numeric - exact) <= 1e-5 * abs(exact) + 1e-7 * max(1.0, abs(f(point)))


def test_simplify_examples():
    assert simplify(parse("1*(x+0)", XYZ)) == x
    assert simplify(Mul(IntPow(x, 1), Constant(1))) == x
    assert simplify(parse("2*3*x", XYZ)) == Mul(Constant(6), x)
    assert simplify(IntPow(x, 0)) == Constant(1)
    assert simplify(parse("x*0", XYZ)) == Constant(0)


def test_simplify_quotients():
    c = Parameter("c")
    assert simplify(Div(Constant(0), c)) == Constant(0)
    assert simplify(parse("2*y/2", XYZ)) == y
    assert simplify(parse("x/4", XYZ)) == Mul(Constant(Fraction(1, 4)), x)
    assert simplify(parse("1/2*(2*y/c)", XYZ, ["c"])) == Div(y, c)
    assert simplify(Div(x, Constant(0))) == Div(x, Constant(0))


def test_derivative_of_a_quotient_by_a_parameter():
    assert differentiate(parse("x^2/c", XYZ, ["c"]), "y") == Constant(0)
    assert to_string(differentiate(parse("x^2/c", XYZ, ["c"]), "x")) == "2*x/c"


def test_simplify_preserves_evaluation():
    rng = np.random.default_rng(11)
    for _ in range(100):
        expr = random_expr(rng, 4)
        f, g = compile_expr(expr, XYZ), compile_expr(simplify(expr), XYZ)
        point = rng.uniform(-1, 1, 3).tolist()
        assert abs(f(point) - g(point)) <= 1e-12 * max(1.0, abs(f(point)))


def test_printed_expressions_parse_back():
    rng = np.random.default_rng(3)
    for _ in range(100):
        expr = random_expr(rng, 5)
        again = parse(to_string(expr), XYZ)
        point = rng.uniform(-1, 1, 3).tolist()
        a, b = compile_expr(expr, XYZ)(point), compile_expr(again, XYZ)(point)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_printer_keeps_rationals_exact():
    expr = Mul(Constant(Fraction(-1, 6)), Mul(y, z))
    assert to_string(expr) == "-1/6*(y*z)"
    assert evaluate_exact(parse(to_string(expr), XYZ), {"y": 2, "z": 3}) == -1


def test_to_polynomial_examples():
    assert to_polynomial(parse("(x+y)^2 - x^2 - 2*x*y - y^2", XYZ)).is_zero()
    poly = to_polynomial(parse("2*x*(z^2-y^2)", XYZ))
    assert poly.terms == {(("x", 1), ("z", 2)): 2, (("x", 1), ("y", 2)): -2}
    with pytest.raises(NotPolynomial):
        to_polynomial(parse("sin(x)", XYZ))
    assert try_polynomial(parse("x/y", XYZ)) is None
    assert to_polynomial(parse("x/2", XYZ)) == Polynomial({(("x", 1),): Fraction(1, 2)})


def test_to_polynomial_bakes_parameter_values():
    expr = parse("x^2/I", XYZ, ["I"])
    assert try_polynomial(expr) is None
    assert to_polynomial(expr, {"I": Fraction(2)}) == Polynomial({(("x", 2),): Fraction(1, 2)})
    assert to_polynomial(parse("a*x", XYZ, ["a"])).variables == ["a", "x"]


def test_polynomial_form_decides_exact_equality():
    rng = np.random.default_rng(5)
    pairs = [
        ("(x+y)*(x-y)", "x^2 - y^2", True),
        ("(x+y+z)^2", "x^2+y^2+z^2+2*(x*y+y*z+x*z)", True),
        ("(x+1)^3", "x^3+3*x^2+3*x+1", True),
        ("(x+1)^3", "x^3+3*x^2+3*x", False),
        ("x*y - y*x + z/3", "z*(1/3)", True),
    ]
    for left, right, equal in pairs:
        a, b = parse(left, XYZ), parse(right, XYZ)
        assert (to_polynomial(a) - to_polynomial(b)).is_zero() == equal
        agree = True
        for _ in range(50):
            binding = {name: Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 10))) for name in XYZ}
            agree = agree and evaluate_exact(a, binding) == evaluate_exact(b, binding)
        assert agree == equal


def test_from_polynomial_round_trip():
    poly = to_polynomial(parse("3*x^2*y - 1/2*z + 7", XYZ))
    assert to_polynomial(from_polynomial(poly)) == poly
    assert to_polynomial(from_polynomial(Polynomial())).is_zero()


def test_substitute_composes_expressions():
    f = parse("u1^2 + u2", ["u1", "u2"])
    composed = substitute(f, {"u1": parse("x+y", XYZ), "u2": parse("z", XYZ)})
    assert to_polynomial(composed) == to_polynomial(parse("x^2 + 2*x*y + y^2 + z", XYZ))
