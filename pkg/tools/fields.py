"""Vector calculus on three dimensional configuration space."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from zenml.logger import get_logger

from config.settings import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE, DOMAIN_RETRY_CAP
from tools.errors import DomainError
from tools.expr_dsl import (
    Add,
    Constant,
    Expr,
    Mul,
    Sub,
    ZERO,
    compile_expr,
    differentiate,
    free_names,
    parse,
    simplify,
    substitute,
    to_string,
    try_polynomial,
)

logger = get_logger(__name__)

DEFAULT_SPACE_VARS: Tuple[str, str, str] = ("x1", "x2", "x3")
SAMPLE_LOW, SAMPLE_HIGH = -1.0, 1.0

ParamValues = Optional[Mapping[str, Fraction]]


def _check_space(space_vars: Sequence[str], exprs: Sequence[Expr], params: FrozenSet[str]) -> None:
    if len(space_vars) != 3 or len(set(space_vars)) != 3:
        raise ValueError(f"space needs three distinct variable names, got {tuple(space_vars)}")
    allowed = set(space_vars) | set(params)
    for expr in exprs:
        stray = free_names(expr) - allowed
        if stray:
            raise ValueError(f"{to_string(expr)} uses undeclared names {sorted(stray)}")


def _bake(expr: Expr, values: Mapping[str, Fraction]) -> Expr:
    return simplify(substitute(expr, {name: Constant(Fraction(value)) for name, value in values.items()}))


@dataclass(frozen=True)
class ScalarField:
    expr: Expr
    space_vars: Tuple[str, str, str] = DEFAULT_SPACE_VARS
    params: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "space_vars", tuple(self.space_vars))
        object.__setattr__(self, "params", frozenset(self.params))
        _check_space(self.space_vars, [self.expr], self.params)

    @classmethod
    def parse(cls, text: str, space_vars: Sequence[str] = DEFAULT_SPACE_VARS, params=frozenset()) -> "ScalarField":
        return cls(parse(text, space_vars, params), tuple(space_vars), frozenset(params))

    def compile(self, param_values: ParamValues = None) -> Callable[[Sequence[float]], float]:
        return compile_expr(self.expr, self.space_vars, param_values)

    def evaluate(self, point: Sequence[float], param_values: ParamValues = None) -> float:
        return self.compile(param_values)(point)

    def with_params(self, values: Mapping[str, Fraction]) -> "ScalarField":
        """Bake numeric parameter values in as exact constants."""
        remaining = self.params - set(values)
        return ScalarField(_bake(self.expr, values), self.space_vars, remaining)

    def polynomial(self, param_values: ParamValues = None):
        return try_polynomial(self.expr, param_values)

    def __str__(self) -> str:
        return to_string(self.expr)


@dataclass(frozen=True)
class VectorField3:
    components: Tuple[Expr, Expr, Expr]
    space_vars: Tuple[str, str, str] = DEFAULT_SPACE_VARS
    params: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "space_vars", tuple(self.space_vars))
        object.__setattr__(self, "params", frozenset(self.params))
        if len(self.components) != 3:
            raise ValueError("a vector field needs exactly three components")
        _check_space(self.space_vars, self.components, self.params)

    @classmethod
    def parse(cls, texts: Sequence[str], space_vars: Sequence[str] = DEFAULT_SPACE_VARS, params=frozenset()) -> "VectorField3":
        components = tuple(parse(text, space_vars, params) for text in texts)
        return cls(components, tuple(space_vars), frozenset(params))

    @classmethod
    def zero(cls, space_vars: Sequence[str] = DEFAULT_SPACE_VARS) -> "VectorField3":
        return cls((ZERO, ZERO, ZERO), tuple(space_vars))

    def component(self, i: int) -> ScalarField:
        return ScalarField(self.components[i], self.space_vars, self.params)

    def compile(self, param_values: ParamValues = None) -> Callable[[Sequence[float]], Tuple[float, float, float]]:
        f1, f2, f3 = (compile_expr(c, self.space_vars, param_values) for c in self.components)
        return lambda point: (f1(point), f2(point), f3(point))

    def evaluate(self, point: Sequence[float], param_values: ParamValues = None) -> Tuple[float, float, float]:
        return self.compile(param_values)(point)

    def with_params(self, values: Mapping[str, Fraction]) -> "VectorField3":
        remaining = self.params - set(values)
        return VectorField3(tuple(_bake(c, values) for c in self.components), self.space_vars, remaining)

    def scaled(self, factor) -> "VectorField3":
        factor = Constant(Fraction(factor))
        return VectorField3(tuple(simplify(Mul(factor, c)) for c in self.components), self.space_vars, self.params)

    def __add__(self, other: "VectorField3") -> "VectorField3":
        _same_space(self, other)
        comps = tuple(simplify(Add(a, b)) for a, b in zip(self.components, other.components))
        return VectorField3(comps, self.space_vars, self.params | other.params)

    def __sub__(self, other: "VectorField3") -> "VectorField3":
        _same_space(self, other)
        comps = tuple(simplify(Sub(a, b)) for a, b in zip(self.components, other.components))
        return VectorField3(comps, self.space_vars, self.params | other.params)

    def polynomials(self, param_values: ParamValues = None):
        """Canonical polynomial per component, or None if any is not polynomial."""
        polys = [try_polynomial(c, param_values) for c in self.components]
        return None if any(p is None for p in polys) else polys

    def __str__(self) -> str:
        return "(" + ", ".join(to_string(c) for c in self.components) + ")"


@dataclass(frozen=True)
class Matrix3Expr:
    """Entry ``(i, j)`` holds ``dA_i/dx_j``."""

    entries: Tuple[Tuple[Expr, Expr, Expr], ...]
    space_vars: Tuple[str, str, str] = DEFAULT_SPACE_VARS
    params: FrozenSet[str] = frozenset()

    def compile(self, param_values: ParamValues = None) -> Callable[[Sequence[float]], np.ndarray]:
        compiled = [[compile_expr(e, self.space_vars, param_values) for e in row] for row in self.entries]

        def evaluator(point: Sequence[float]) -> np.ndarray:
            return np.array([[f(point) for f in row] for row in compiled])

        return evaluator

    def evaluate(self, point: Sequence[float], param_values: ParamValues = None) -> np.ndarray:
        return self.compile(param_values)(point)


def _same_space(a, b) -> None:
    if a.space_vars != b.space_vars:
        raise ValueError(f"fields live on different spaces: {a.space_vars} vs {b.space_vars}")


def gradient(f: ScalarField) -> VectorField3:
    comps = tuple(differentiate(f.expr, var) for var in f.space_vars)
    return VectorField3(comps, f.space_vars, f.params)


def cross(a: VectorField3, b: VectorField3) -> VectorField3:
    """Right-handed cross product ``a x b``."""
    _same_space(a, b)
    a1, a2, a3 = a.components
    b1, b2, b3 = b.components
    comps = (
        simplify(Sub(Mul(a2, b3), Mul(a3, b2))),
        simplify(Sub(Mul(a3, b1), Mul(a1, b3))),
        simplify(Sub(Mul(a1, b2), Mul(a2, b1))),
    )
    return VectorField3(comps, a.space_vars, a.params | b.params)


def nambu_velocity(h: ScalarField, g: ScalarField) -> VectorField3:
    """The Nambu flow ``grad h x grad g``."""
    _same_space(h, g)
    return cross(gradient(h), gradient(g))


def jacobian(A: VectorField3) -> Matrix3Expr:
    entries = tuple(tuple(differentiate(c, var) for var in A.space_vars) for c in A.components)
    return Matrix3Expr(entries, A.space_vars, A.params)


def dot_terms(a: VectorField3, b: VectorField3) -> List[Expr]:
    _same_space(a, b)
    return [simplify(Mul(x, y)) for x, y in zip(a.components, b.components)]


def dot(a: VectorField3, b: VectorField3) -> ScalarField:
    t1, t2, t3 = dot_terms(a, b)
    return ScalarField(simplify(Add(Add(t1, t2), t3)), a.space_vars, a.params | b.params)


# ---------------------------------------------------------------- zero tests

@dataclass(frozen=True)
class ZeroCheck:
    """Outcome of testing that a list of residuals vanishes identically."""

    mode: str
    passed: bool
    residuals: Tuple[str, ...]
    max_residual: Optional[float]
    scale: float
    samples: int
    seed: Optional[int]
    tolerance: float
    warnings: Tuple[str, ...] = field(default_factory=tuple)


def sample_points(n_samples: int, seed: int) -> np.ndarray:
    """``n_samples`` seeded uniform points of ``[-1, 1]^3``."""
    return np.random.default_rng(seed).uniform(SAMPLE_LOW, SAMPLE_HIGH, size=(n_samples, 3))


def check_zero(
    terms: Sequence[Sequence[Expr]],
    space_vars: Sequence[str],
    param_values: ParamValues = None,
    tol: float = DEFAULT_TOLERANCE,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    retry_cap: int = DOMAIN_RETRY_CAP,
) -> ZeroCheck:
    """Decide whether every residual ``sum(terms[k])`` is identically zero.

    The check is exact on canonical polynomials when all terms are
    polynomial. Otherwise the residuals are sampled on ``[-1, 1]^3`` and
    pass when ``max |residual| <= tol * (1 + max sum |term|)``.

    Args:
        terms: One list of additive terms per residual.
        space_vars: Names bound to the sample coordinates.
        param_values: Values of any parameters left in the terms.
        tol: Relative tolerance of the sampled mode.
        n_samples: Number of sample points.
        seed: Seed of the sampler.
        retry_cap: Attempts per sample when evaluation hits a DomainError.

    Returns:
        ZeroCheck describing mode, verdict and residuals.
    """
    if tol <= 0 or n_samples < 1:
        raise ValueError("tol must be positive and n_samples at least 1")
    polys = []
    for group in terms:
        parts = [try_polynomial(t, param_values) for t in group]
        if any(p is None for p in parts):
            polys = None
            break
        total = parts[0] if parts else None
        for p in parts[1:]:
            total = total + p
        polys.append(total)
    if polys is not None:
        strings = tuple("0" if p is None else p.to_string(space_vars) for p in polys)
        passed = all(p is None or p.is_zero() for p in polys)
        logger.debug(f"symbolic zero check over {len(polys)} residual(s): {'pass' if passed else 'fail'}")
        return ZeroCheck("symbolic", passed, strings, 0.0 if passed else None, 0.0, 0, None, tol)

    compiled = [[compile_expr(t, space_vars, param_values) for t in group] for group in terms]
    residual_strings = tuple(to_string(simplify(_sum(group))) for group in terms)
    rng = np.random.default_rng(seed)
    max_residual, scale, used = 0.0, 0.0, 0
    warnings: List[str] = []
    for k in range(n_samples):
        for attempt in range(retry_cap):
            point = rng.uniform(SAMPLE_LOW, SAMPLE_HIGH, size=3).tolist()
            try:
                values = [[f(point) for f in group] for group in compiled]
            except DomainError:
                continue
            for group in values:
                max_residual = max(max_residual, abs(sum(group)))
                scale = max(scale, sum(abs(v) for v in group))
            used += 1
            break
        else:
            warnings.append(f"sample {k}: domain error on {retry_cap} attempts, skipped")
    for message in warnings:
        logger.warning(message)
    passed = used > 0 and max_residual <= tol * (1.0 + scale)
    return ZeroCheck("sampled", passed, residual_strings, max_residual, scale, used, seed, tol, tuple(warnings))


def _sum(group: Sequence[Expr]) -> Expr:
    if not group:
        return ZERO
    total = group[0]
    for term in group[1:]:
        total = Add(total, term)
    return total
