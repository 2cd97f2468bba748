"""Expression language for the fields of a Nambu system.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('-')? atom ('^' uint)?
    atom   := number | ident | ident '(' expr ')' | '(' expr ')'

``^`` only takes non-negative integer literals and numbers are kept as exact
rationals until an expression is compiled for floating point evaluation.
"""
import math
import operator
import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import singledispatch
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from tools.errors import DomainError, ExprSyntaxError, NotPolynomial, UndeclaredName
from tools.polynomial import Polynomial

FUNCTIONS: Dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sqrt": math.sqrt,
}

Binding = Mapping[str, float]


class Expr:
    """Base of the immutable expression tree.

    Python operators build trees without simplifying them, so ``x * 1`` is
    a ``Mul`` node until ``simplify`` runs.
    """

    def __add__(self, other): return Add(self, _coerce(other))
    def __radd__(self, other): return Add(_coerce(other), self)
    def __sub__(self, other): return Sub(self, _coerce(other))
    def __rsub__(self, other): return Sub(_coerce(other), self)
    def __mul__(self, other): return Mul(self, _coerce(other))
    def __rmul__(self, other): return Mul(_coerce(other), self)
    def __truediv__(self, other): return Div(self, _coerce(other))
    def __rtruediv__(self, other): return Div(_coerce(other), self)
    def __neg__(self): return Neg(self)

    def __pow__(self, exponent: int):
        return IntPow(self, exponent)

    def __str__(self) -> str:
        return to_string(self)


def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Constant(value)
    raise TypeError(f"cannot use {type(value).__name__} in an expression")


@dataclass(frozen=True, repr=False)
class Constant(Expr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))

    def __repr__(self) -> str:
        return f"Constant({self.value})"


@dataclass(frozen=True)
class Variable(Expr):
    name: str


@dataclass(frozen=True)
class Parameter(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr

    def __post_init__(self):
        if isinstance(self.right, Constant) and self.right.value == 0:
            raise DomainError("division by the constant 0")


@dataclass(frozen=True)
class IntPow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool) or self.exponent < 0:
            raise ValueError(f"exponent must be a non-negative integer, got {self.exponent!r}")


@dataclass(frozen=True)
class Call(Expr):
    function: str
    argument: Expr

    def __post_init__(self):
        if self.function not in FUNCTIONS:
            raise ValueError(f"unknown function '{self.function}'")


ZERO = Constant(0)
ONE = Constant(1)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"(?P<number>\d+(?:\.\d*)?|\.\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    position = 0
    while position < len(text):
        if text[position].isspace():
            position += 1
            continue
        match = _TOKEN.match(text, position)
        if match is None:
            raise ExprSyntaxError(position, f"unexpected character {text[position]!r}")
        tokens.append((match.lastgroup, match.group(), position))
        position = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: FrozenSet[str], params: FrozenSet[str]):
        self.tokens = _tokenize(text)
        self.index = 0
        self.variables = variables
        self.params = params

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> Tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def accept(self, op: str) -> bool:
        kind, text, _ = self.peek()
        if kind == "op" and text == op:
            self.index += 1
            return True
        return False

    def expect(self, op: str) -> None:
        kind, text, position = self.peek()
        if not self.accept(op):
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(position, f"expected '{op}', found {found}")

    def parse(self) -> Expr:
        tree = self.expr()
        kind, text, position = self.peek()
        if kind != "end":
            raise ExprSyntaxError(position, f"unexpected {text!r}")
        return tree

    def expr(self) -> Expr:
        left = self.term()
        while True:
            if self.accept("+"):
                left = Add(left, self.term())
            elif self.accept("-"):
                left = Sub(left, self.term())
            else:
                return left

    def term(self) -> Expr:
        left = self.factor()
        while True:
            if self.accept("*"):
                left = Mul(left, self.factor())
            elif self.accept("/"):
                position = self.peek()[2]
                right = self.factor()
                try:
                    left = Div(left, right)
                except DomainError:
                    raise ExprSyntaxError(position, "division by the constant 0") from None
            else:
                return left

    def factor(self) -> Expr:
        negate = self.accept("-")
        node = self.atom()
        if self.accept("^"):
            kind, text, position = self.advance()
            if kind != "number" or not text.isdigit():
                raise ExprSyntaxError(position, "'^' needs a non-negative integer literal")
            node = IntPow(node, int(text))
        return Neg(node) if negate else node

    def atom(self) -> Expr:
        kind, text, position = self.advance()
        if kind == "number":
            return Constant(Fraction(Decimal(text)))
        if kind == "ident":
            if text in FUNCTIONS:
                self.expect("(")
                argument = self.expr()
                self.expect(")")
                return Call(text, argument)
            if self.peek()[:2] == ("op", "("):
                raise ExprSyntaxError(position, f"unknown function '{text}'")
            if text in self.params:
                return Parameter(text)
            if text in self.variables:
                return Variable(text)
            raise UndeclaredName(text)
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(position, f"expected a number, name or '(', found {found}")


def parse(text: str, variables: Iterable[str], params: Iterable[str] = ()) -> Expr:
    """Parse ``text`` into an expression tree.

    Args:
        text: Source in the expression grammar.
        variables: Declared space (or auxiliary) variable names.
        params: Declared parameter names.

    Returns:
        The unsimplified tree with conventional precedence.
    """
    if not text or not text.strip():
        raise ExprSyntaxError(0, "empty expression")
    return _Parser(text, frozenset(variables), frozenset(params)).parse()


# ---------------------------------------------------------------- printing

_ATOM = 5


def _precedence(node: Expr) -> int:
    if isinstance(node, Constant):
        if node.value.denominator != 1:
            return 2
        return 3 if node.value < 0 else _ATOM
    if isinstance(node, (Add, Sub)):
        return 1
    if isinstance(node, (Mul, Div)):
        return 2
    if isinstance(node, Neg):
        return 3
    if isinstance(node, IntPow):
        return 4
    return _ATOM


def _wrap(node: Expr, minimum: int) -> str:
    text = to_string(node)
    return f"({text})" if _precedence(node) < minimum else text


_INFIX = {Add: (" + ", 1, 2), Sub: (" - ", 1, 2), Mul: ("*", 2, 3), Div: ("/", 2, 3)}


def to_string(node: Expr) -> str:
    """Render ``node`` in the grammar ``parse`` accepts."""
    if isinstance(node, Constant):
        value = node.value
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(node, (Variable, Parameter)):
        return node.name
    if isinstance(node, Neg):
        return f"-{_wrap(node.operand, 4)}"
    if isinstance(node, IntPow):
        return f"{_wrap(node.base, _ATOM)}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.function}({to_string(node.argument)})"
    symbol, left_min, right_min = _INFIX[type(node)]
    return f"{_wrap(node.left, left_min)}{symbol}{_wrap(node.right, right_min)}"


# ---------------------------------------------------------------- structure

@singledispatch
def _children(node: Expr) -> Tuple[Expr, ...]:
    return ()


@_children.register
def _(node: Neg): return (node.operand,)
@_children.register
def _(node: IntPow): return (node.base,)
@_children.register
def _(node: Call): return (node.argument,)
@_children.register(Add)
@_children.register(Sub)
@_children.register(Mul)
@_children.register(Div)
def _(node): return (node.left, node.right)


def free_names(node: Expr) -> FrozenSet[str]:
    """Names of every Variable and Parameter in ``node``."""
    if isinstance(node, (Variable, Parameter)):
        return frozenset((node.name,))
    names: FrozenSet[str] = frozenset()
    for child in _children(node):
        names |= free_names(child)
    return names


def substitute(node: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace Variables and Parameters named in ``mapping``."""
    if isinstance(node, (Variable, Parameter)):
        return mapping.get(node.name, node)
    if isinstance(node, Constant):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, mapping))
    if isinstance(node, IntPow):
        return IntPow(substitute(node.base, mapping), node.exponent)
    if isinstance(node, Call):
        return Call(node.function, substitute(node.argument, mapping))
    return type(node)(substitute(node.left, mapping), substitute(node.right, mapping))


# ---------------------------------------------------------------- evaluation

@singledispatch
def _compile(node: Expr, index: Mapping[str, int], constants: Mapping[str, float]):
    raise TypeError(f"cannot compile {type(node).__name__}")


@_compile.register
def _(node: Constant, index, constants):
    value = float(node.value)
    return lambda env: value


@_compile.register(Variable)
@_compile.register(Parameter)
def _(node, index, constants):
    if node.name in index:
        return operator.itemgetter(index[node.name])
    if node.name in constants:
        value = constants[node.name]
        return lambda env: value
    raise UndeclaredName(node.name)


@_compile.register
def _(node: Neg, index, constants):
    operand = _compile(node.operand, index, constants)
    return lambda env: -operand(env)


@_compile.register
def _(node: Add, index, constants):
    left, right = _compile(node.left, index, constants), _compile(node.right, index, constants)
    return lambda env: left(env) + right(env)


@_compile.register
def _(node: Sub, index, constants):
    left, right = _compile(node.left, index, constants), _compile(node.right, index, constants)
    return lambda env: left(env) - right(env)


@_compile.register
def _(node: Mul, index, constants):
    left, right = _compile(node.left, index, constants), _compile(node.right, index, constants)
    return lambda env: left(env) * right(env)


@_compile.register
def _(node: Div, index, constants):
    left, right = _compile(node.left, index, constants), _compile(node.right, index, constants)
    return lambda env: left(env) / right(env)


@_compile.register
def _(node: IntPow, index, constants):
    base, exponent = _compile(node.base, index, constants), node.exponent
    return lambda env: base(env) ** exponent


@_compile.register
def _(node: Call, index, constants):
    function, argument = FUNCTIONS[node.function], _compile(node.argument, index, constants)
    return lambda env: function(argument(env))


def compile_expr(
    node: Expr,
    arg_names: Sequence[str],
    param_values: Optional[Mapping[str, float]] = None,
) -> Callable[[Sequence[float]], float]:
    """Compile ``node`` into a float function of positional values.

    Args:
        node: Expression to compile.
        arg_names: Names read from the argument sequence, in order.
        param_values: Values baked into the compiled function.

    Returns:
        ``f(values) -> float``; raises DomainError when the result is not a
        finite real (sqrt of a negative, division by zero, overflow).
    """
    constants = {name: float(value) for name, value in (param_values or {}).items()}
    compiled = _compile(node, {name: i for i, name in enumerate(arg_names)}, constants)

    def evaluator(values: Sequence[float]) -> float:
        try:
            result = compiled(values)
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise DomainError(f"cannot evaluate {to_string(node)}: {exc}") from exc
        if isinstance(result, complex) or not math.isfinite(result):
            raise DomainError(f"{to_string(node)} is not finite at {list(values)}")
        return result

    return evaluator


def evaluate(node: Expr, binding: Binding) -> float:
    """Floating point value of ``node`` at ``binding``."""
    names = sorted(binding)
    values = [float(binding[name]) for name in names]
    if not all(math.isfinite(v) for v in values):
        raise DomainError("binding values must be finite")
    return compile_expr(node, names)(values)


def evaluate_exact(node: Expr, binding: Mapping[str, Fraction]) -> Fraction:
    """Exact rational value of an expression without elementary functions."""
    if isinstance(node, Constant):
        return node.value
    if isinstance(node, (Variable, Parameter)):
        if node.name not in binding:
            raise UndeclaredName(node.name)
        return Fraction(binding[node.name])
    if isinstance(node, Neg):
        return -evaluate_exact(node.operand, binding)
    if isinstance(node, IntPow):
        return evaluate_exact(node.base, binding) ** node.exponent
    if isinstance(node, Call):
        raise NotPolynomial(f"{node.function}() has no exact rational value")
    left, right = evaluate_exact(node.left, binding), evaluate_exact(node.right, binding)
    if isinstance(node, Add):
        return left + right
    if isinstance(node, Sub):
        return left - right
    if isinstance(node, Mul):
        return left * right
    if right == 0:
        raise DomainError(f"division by zero in {to_string(node)}")
    return left / right


# ---------------------------------------------------------------- simplification

def _const(node: Expr) -> Optional[Fraction]:
    return node.value if isinstance(node, Constant) else None


@singledispatch
def simplify(node: Expr) -> Expr:
    """One bottom-up pass of constant folding and 0/1 identities."""
    return node


@simplify.register
def _(node: Neg):
    operand = simplify(node.operand)
    if isinstance(operand, Constant):
        return Constant(-operand.value)
    if isinstance(operand, Neg):
        return operand.operand
    return Neg(operand)


@simplify.register
def _(node: Add):
    left, right = simplify(node.left), simplify(node.right)
    a, b = _const(left), _const(right)
    if a is not None and b is not None:
        return Constant(a + b)
    if a == 0:
        return right
    if b == 0:
        return left
    if isinstance(right, Neg):
        return Sub(left, right.operand)
    return Add(left, right)


@simplify.register
def _(node: Sub):
    left, right = simplify(node.left), simplify(node.right)
    a, b = _const(left), _const(right)
    if a is not None and b is not None:
        return Constant(a - b)
    if b == 0:
        return left
    if a == 0:
        return simplify(Neg(right))
    if isinstance(right, Neg):
        return Add(left, right.operand)
    return Sub(left, right)


@simplify.register
def _(node: Mul):
    left, right = simplify(node.left), simplify(node.right)
    a, b = _const(left), _const(right)
    if a is not None and b is not None:
        return Constant(a * b)
    if a == 0 or b == 0:
        return ZERO
    if a == 1:
        return right
    if b == 1:
        return left
    if a == -1:
        return simplify(Neg(right))
    if b == -1:
        return simplify(Neg(left))
    if b is not None:
        left, right, a = right, left, b
    if a is not None and isinstance(right, Mul) and isinstance(right.left, Constant):
        return simplify(Mul(Constant(a * right.left.value), right.right))
    if a is not None and isinstance(right, Div):
        return Div(simplify(Mul(left, right.left)), right.right)
    return Mul(left, right)


@simplify.register
def _(node: Div):
    left, right = simplify(node.left), simplify(node.right)
    a, b = _const(left), _const(right)
    if b == 0:
        return Div(left, node.right)
    if a is not None and b is not None:
        return Constant(a / b)
    if a == 0:
        return ZERO
    if b is not None:
        return simplify(Mul(Constant(1 / b), left))
    return Div(left, right)


@simplify.register
def _(node: IntPow):
    base = simplify(node.base)
    if node.exponent == 0:
        return ONE
    if node.exponent == 1:
        return base
    if isinstance(base, Constant):
        return Constant(base.value ** node.exponent)
    return IntPow(base, node.exponent)


@simplify.register
def _(node: Call):
    return Call(node.function, simplify(node.argument))


# ---------------------------------------------------------------- differentiation

@singledispatch
def _derive(node: Expr, var: str) -> Expr:
    raise TypeError(f"cannot differentiate {type(node).__name__}")


@_derive.register
def _(node: Constant, var): return ZERO
@_derive.register
def _(node: Parameter, var): return ZERO
@_derive.register
def _(node: Variable, var): return ONE if node.name == var else ZERO
@_derive.register
def _(node: Neg, var): return Neg(_derive(node.operand, var))
@_derive.register
def _(node: Add, var): return Add(_derive(node.left, var), _derive(node.right, var))
@_derive.register
def _(node: Sub, var): return Sub(_derive(node.left, var), _derive(node.right, var))


@_derive.register
def _(node: Mul, var):
    return Add(Mul(_derive(node.left, var), node.right), Mul(node.left, _derive(node.right, var)))


@_derive.register
def _(node: Div, var):
    if var not in free_names(node.right):
        return Div(_derive(node.left, var), node.right)
    numerator = Sub(Mul(_derive(node.left, var), node.right), Mul(node.left, _derive(node.right, var)))
    return Div(numerator, IntPow(node.right, 2))


@_derive.register
def _(node: IntPow, var):
    if node.exponent == 0:
        return ZERO
    return Mul(Mul(Constant(node.exponent), IntPow(node.base, node.exponent - 1)), _derive(node.base, var))


@_derive.register
def _(node: Call, var):
    inner = _derive(node.argument, var)
    if node.function == "sin":
        outer = Call("cos", node.argument)
    elif node.function == "cos":
        outer = Neg(Call("sin", node.argument))
    elif node.function == "exp":
        outer = node
    else:
        outer = Div(ONE, Mul(Constant(2), node))
    return Mul(outer, inner)


def differentiate(node: Expr, var: str) -> Expr:
    """Exact partial derivative of ``node`` with respect to ``var``, simplified."""
    return simplify(_derive(node, var))


# ---------------------------------------------------------------- polynomials

def to_polynomial(node: Expr, param_values: Optional[Mapping[str, Fraction]] = None) -> Polynomial:
    """Canonical polynomial of ``node``.

    Parameters with a value in ``param_values`` become rational constants,
    the others stay indeterminates.

    Raises:
        NotPolynomial: ``node`` holds an elementary function or divides by a
            non-constant.
    """
    values = param_values or {}
    if isinstance(node, Constant):
        return Polynomial.constant(node.value)
    if isinstance(node, Parameter) and node.name in values:
        return Polynomial.constant(Fraction(values[node.name]))
    if isinstance(node, (Variable, Parameter)):
        return Polynomial.variable(node.name)
    if isinstance(node, Neg):
        return -to_polynomial(node.operand, values)
    if isinstance(node, IntPow):
        return to_polynomial(node.base, values) ** node.exponent
    if isinstance(node, Call):
        raise NotPolynomial(f"{node.function}() is not polynomial")
    left, right = to_polynomial(node.left, values), to_polynomial(node.right, values)
    if isinstance(node, Add):
        return left + right
    if isinstance(node, Sub):
        return left - right
    if isinstance(node, Mul):
        return left * right
    if not right.is_constant():
        raise NotPolynomial(f"division by the non-constant {to_string(node.right)}")
    if right.is_zero():
        raise DomainError(f"division by zero in {to_string(node)}")
    return left.scale(1 / right.constant_value())


def try_polynomial(node: Expr, param_values: Optional[Mapping[str, Fraction]] = None) -> Optional[Polynomial]:
    """``to_polynomial`` returning None instead of raising NotPolynomial."""
    try:
        return to_polynomial(node, param_values)
    except NotPolynomial:
        return None


def from_polynomial(poly: Polynomial, params: Iterable[str] = ()) -> Expr:
    """Expression tree of ``poly``; names in ``params`` become Parameters."""
    params = frozenset(params)
    result: Optional[Expr] = None
    for monomial, coefficient in poly.sorted_terms():
        term: Expr = Constant(coefficient)
        for name, exponent in monomial:
            leaf = Parameter(name) if name in params else Variable(name)
            term = Mul(term, IntPow(leaf, exponent))
        term = simplify(term)
        result = term if result is None else Add(result, term)
    return simplify(result) if result is not None else ZERO

