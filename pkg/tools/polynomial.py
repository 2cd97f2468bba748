"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a tuple of ``(name, exponent)`` pairs sorted by name with every
exponent positive, so two polynomials are equal exactly when their term maps
are equal, independent of which variables were declared around them.
"""
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from sympy import Matrix, Rational

Monomial = Tuple[Tuple[str, int], ...]
Number = Union[int, Fraction]

ONE: Monomial = ()


def _multiply_monomials(a: Monomial, b: Monomial) -> Monomial:
    powers = dict(a)
    for name, exponent in b:
        powers[name] = powers.get(name, 0) + exponent
    return tuple(sorted(powers.items()))


def monomial_degree(monomial: Monomial) -> int:
    return sum(exponent for _, exponent in monomial)


def grlex_key(monomial: Monomial, order: Sequence[str]) -> Tuple[int, Tuple[int, ...]]:
    """Graded-lex sort key; ``order`` lists every name, most significant first."""
    powers = dict(monomial)
    return monomial_degree(monomial), tuple(powers.get(name, 0) for name in order)


def monomials_up_to(variables: Sequence[str], degree: int) -> List[Monomial]:
    """All monomials of total degree <= ``degree``, ascending graded-lex order.

    Within one degree the monomial with the larger exponent of
    ``variables[0]`` comes first, so the order reads 1, x, y, z, x^2, x*y, ...
    """
    result: List[Monomial] = []
    for d in range(degree + 1):
        block = []
        for combo in combinations_with_replacement(variables, d):
            powers: Dict[str, int] = {}
            for name in combo:
                powers[name] = powers.get(name, 0) + 1
            block.append(tuple(sorted(powers.items())))
        block.sort(key=lambda m: grlex_key(m, variables)[1], reverse=True)
        result.extend(block)
    return result


def monomial_to_string(monomial: Monomial, variables: Sequence[str] = ()) -> str:
    powers = dict(monomial)
    order = [v for v in variables if v in powers] + sorted(v for v in powers if v not in variables)
    parts = [name if powers[name] == 1 else f"{name}^{powers[name]}" for name in order]
    return "*".join(parts)


def _coefficient_to_string(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class Polynomial:
    """Immutable sparse polynomial ``{monomial: Fraction}``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] = None):
        cleaned: Dict[Monomial, Fraction] = {}
        for monomial, coefficient in (terms or {}).items():
            coefficient = Fraction(coefficient)
            if coefficient != 0:
                cleaned[tuple(sorted(monomial))] = coefficient
        self._terms = cleaned
        self._hash = None

    @classmethod
    def constant(cls, value: Number) -> "Polynomial":
        return cls({ONE: value})

    @classmethod
    def variable(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): 1})

    @classmethod
    def from_monomial(cls, monomial: Monomial, coefficient: Number = 1) -> "Polynomial":
        return cls({monomial: coefficient})

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    @property
    def variables(self) -> List[str]:
        return sorted({name for monomial in self._terms for name, _ in monomial})

    def coefficient(self, monomial: Monomial) -> Fraction:
        return self._terms.get(tuple(sorted(monomial)), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(monomial == ONE for monomial in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get(ONE, Fraction(0))

    def total_degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(monomial_degree(m) for m in self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: "Polynomial") -> "Polynomial":
        terms = dict(self._terms)
        for monomial, coefficient in other._terms.items():
            terms[monomial] = terms.get(monomial, Fraction(0)) + coefficient
        return Polynomial(terms)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                monomial = _multiply_monomials(m1, m2)
                terms[monomial] = terms.get(monomial, Fraction(0)) + c1 * c2
        return Polynomial(terms)

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative exponent")
        result = Polynomial.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor: Number) -> "Polynomial":
        return Polynomial({m: c * factor for m, c in self._terms.items()})

    def derivative(self, name: str) -> "Polynomial":
        terms: Dict[Monomial, Fraction] = {}
        for monomial, coefficient in self._terms.items():
            powers = dict(monomial)
            exponent = powers.get(name, 0)
            if exponent == 0:
                continue
            if exponent == 1:
                del powers[name]
            else:
                powers[name] = exponent - 1
            key = tuple(sorted(powers.items()))
            terms[key] = terms.get(key, Fraction(0)) + coefficient * exponent
        return Polynomial(terms)

    def evaluate(self, binding: Mapping[str, Union[Number, float]]):
        """Evaluate at ``binding``; exact when every value is an int or Fraction."""
        total = Fraction(0)
        for monomial, coefficient in self._terms.items():
            value = coefficient
            for name, exponent in monomial:
                if name not in binding:
                    raise KeyError(name)
                value = value * binding[name] ** exponent
            total = total + value
        return total

    def sorted_terms(self, variables: Sequence[str] = ()) -> List[Tuple[Monomial, Fraction]]:
        """Terms in descending graded-lex order with respect to ``variables``.

        Names outside ``variables`` rank after them in alphabetical order.
        """
        order = list(variables) + [name for name in self.variables if name not in variables]
        return sorted(self._terms.items(), key=lambda item: grlex_key(item[0], order), reverse=True)

    def to_string(self, variables: Sequence[str] = ()) -> str:
        """Render in the expression grammar, leading graded-lex term first."""
        if not self._terms:
            return "0"
        pieces: List[str] = []
        for monomial, coefficient in self.sorted_terms(variables):
            magnitude = abs(coefficient)
            body = monomial_to_string(monomial, variables)
            if not body:
                text = _coefficient_to_string(magnitude)
            elif magnitude == 1:
                text = body
            else:
                text = f"{_coefficient_to_string(magnitude)}*{body}"
            if not pieces:
                pieces.append(f"-{text}" if coefficient < 0 else text)
            else:
                pieces.append(f" - {text}" if coefficient < 0 else f" + {text}")
        return "".join(pieces)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Polynomial({self.to_string()!r})"


def span_contains(basis: Iterable[Polynomial], candidate: Polynomial) -> bool:
    """True when ``candidate`` is an exact rational combination of ``basis``."""
    basis = list(basis)
    monomials = sorted({m for p in basis + [candidate] for m in p.terms}, key=repr)
    if not monomials:
        return True
    columns = [[Rational(p.coefficient(m).numerator, p.coefficient(m).denominator) for m in monomials] for p in basis]
    target = [Rational(candidate.coefficient(m).numerator, candidate.coefficient(m).denominator) for m in monomials]
    if not columns:
        return candidate.is_zero()
    system = Matrix(columns).T
    return system.rank() == system.row_join(Matrix(target)).rank()
