"""First integrals of a flow on three-space and the Nambu form built from them.

A scalar u is conserved by ``dr/dt = A(r)`` when ``A . grad u`` vanishes
identically. Two independent conserved quantities u1, u2 reproduce the
flow up to a Jacobian bracket: ``A = [F1, F2]_{u1,u2} (grad u1 x grad u2)``.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix, Rational
from zenml.logger import get_logger

from config.settings import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE
from models.models import InvariantReport
from tools.errors import DomainError, NotPolynomial
from tools.expr_dsl import ONE, Expr, Mul, Neg, Sub, differentiate, free_names, parse, simplify, substitute
from tools.fields import (
    ParamValues,
    ScalarField,
    VectorField3,
    ZeroCheck,
    check_zero,
    cross,
    dot,
    dot_terms,
    gradient,
    sample_points,
)
from tools.polynomial import Polynomial, grlex_key, monomials_up_to

logger = get_logger(__name__)

DEFAULT_U_NAMES: Tuple[str, str] = ("u1", "u2")


@dataclass(frozen=True)
class InvariantCandidate:
    u: ScalarField
    label: str


@dataclass(frozen=True)
class FunctionalPair:
    """Two functions ``F1(u1, u2)``, ``F2(u1, u2)`` of the intermediary integrals."""

    F1: Expr
    F2: Expr
    u_names: Tuple[str, str] = DEFAULT_U_NAMES
    params: FrozenSet[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "u_names", tuple(self.u_names))
        object.__setattr__(self, "params", frozenset(self.params))
        allowed = set(self.u_names) | self.params
        for expr in (self.F1, self.F2):
            stray = free_names(expr) - allowed
            if stray:
                raise ValueError(f"F uses names outside {sorted(allowed)}: {sorted(stray)}")

    @classmethod
    def parse(cls, f1: str, f2: str, u_names: Sequence[str] = DEFAULT_U_NAMES, params=frozenset()) -> "FunctionalPair":
        return cls(parse(f1, u_names, params), parse(f2, u_names, params), tuple(u_names), frozenset(params))

    def swapped(self) -> "FunctionalPair":
        return FunctionalPair(self.F2, self.F1, self.u_names, self.params)


@dataclass(frozen=True)
class Reconstruction:
    """Outcome of ``reconstruct_nambu``; ``residual`` is ``A - grad u1 x grad u2`` on failure."""

    success: bool
    h: Optional[ScalarField]
    g: Optional[ScalarField]
    residual: Optional[VectorField3]
    report: InvariantReport
    warnings: Tuple[str, ...] = field(default_factory=tuple)


def _to_report(label: str, check: ZeroCheck, warnings: Sequence[str] = ()) -> InvariantReport:
    if check.mode == "symbolic":
        residual = check.residuals[0] if len(check.residuals) == 1 else "(" + ", ".join(check.residuals) + ")"
    else:
        residual = check.max_residual
    return InvariantReport(
        label=label,
        mode=check.mode,
        verdict="pass" if check.passed else "fail",
        residual=residual,
        tolerance=check.tolerance,
        samples=check.samples,
        seed=check.seed,
        warnings=list(check.warnings) + list(warnings),
    )


def invariant_residual(A: VectorField3, u: ScalarField) -> ScalarField:
    """``A . grad u``, the rate of change of u along the flow."""
    return dot(A, gradient(u))


def verify_invariant(
    A: VectorField3,
    candidate: InvariantCandidate,
    tol: float = DEFAULT_TOLERANCE,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    param_values: ParamValues = None,
) -> InvariantReport:
    """Check that ``candidate`` is a first integral of ``A``.

    Args:
        A: The velocity field.
        candidate: Labelled scalar field to test.
        tol: Relative tolerance of the sampled mode.
        n_samples: Sample count when the residual is not polynomial.
        seed: Sampler seed.
        param_values: Parameter values of A and the candidate.

    Returns:
        InvariantReport with the residual as a polynomial string (symbolic
        mode) or the largest sampled absolute residual.
    """
    terms = dot_terms(A, gradient(candidate.u))
    check = check_zero([terms], A.space_vars, param_values, tol, n_samples, seed)
    logger.debug(f"invariant {candidate.label}: {check.mode} {'pass' if check.passed else 'fail'}")
    return _to_report(candidate.label, check)


def find_polynomial_invariants(
    A: VectorField3, max_degree: int, param_values: ParamValues = None
) -> List[Polynomial]:
    """Basis of the polynomial first integrals of ``A`` up to ``max_degree``.

    The linear map ``u -> A . grad u`` is assembled on the monomial basis in
    graded-lex order and its nullspace is taken in exact rational arithmetic.
    Each basis polynomial is scaled so its leading coefficient is 1.

    Raises:
        NotPolynomial: a component of A is not polynomial once the parameter
            values are substituted.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be non-negative")
    polys = A.polynomials(param_values)
    if polys is None:
        raise NotPolynomial("the velocity field is not polynomial")
    space = list(A.space_vars)
    for poly in polys:
        leftover = set(poly.variables) - set(space)
        if leftover:
            raise NotPolynomial(f"coefficients depend on unvalued parameters {sorted(leftover)}")

    columns = monomials_up_to(space, max_degree)
    images = []
    for monomial in columns:
        u = Polynomial.from_monomial(monomial)
        image = Polynomial()
        for name, component in zip(space, polys):
            image = image + component * u.derivative(name)
        images.append(image)
    rows = sorted({m for image in images for m in image.terms}, key=lambda m: grlex_key(m, space))
    logger.debug(f"invariant search: {len(rows)} x {len(columns)} system at degree {max_degree}")

    if rows:
        matrix = Matrix(len(rows), len(columns), lambda i, j: _rational(images[j].coefficient(rows[i])))
        vectors = [[Fraction(int(v.p), int(v.q)) for v in vector] for vector in matrix.nullspace()]
    else:
        vectors = [[Fraction(int(i == j)) for j in range(len(columns))] for i in range(len(columns))]

    basis = []
    for vector in vectors:
        poly = Polynomial({m: c for m, c in zip(columns, vector)})
        leading = poly.sorted_terms(space)[0][1]
        basis.append(poly.scale(1 / leading))
    return basis


def _rational(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


def jacobian_bracket(F: FunctionalPair) -> Expr:
    """``dF1/du1 * dF2/du2 - dF1/du2 * dF2/du1``."""
    a, b = F.u_names
    return simplify(
        Sub(
            Mul(differentiate(F.F1, a), differentiate(F.F2, b)),
            Mul(differentiate(F.F1, b), differentiate(F.F2, a)),
        )
    )


def _nambu_terms(A: VectorField3, bracket: Expr, u1: ScalarField, u2: ScalarField) -> List[List[Expr]]:
    c = cross(gradient(u1), gradient(u2))
    return [[a, simplify(Neg(Mul(bracket, ci)))] for a, ci in zip(A.components, c.components)]


def functional_combination_check(
    A: VectorField3,
    u1: ScalarField,
    u2: ScalarField,
    F: FunctionalPair,
    tol: float = DEFAULT_TOLERANCE,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    param_values: ParamValues = None,
    label: str = "[F1,F2]",
) -> InvariantReport:
    """Check ``A == [F1,F2](u1, u2) * (grad u1 x grad u2)``.

    The report carries a warning when u1 and u2 look functionally dependent.
    """
    composed = simplify(substitute(jacobian_bracket(F), {F.u_names[0]: u1.expr, F.u_names[1]: u2.expr}))
    check = check_zero(_nambu_terms(A, composed, u1, u2), A.space_vars, param_values, tol, n_samples, seed)
    message = independence_warning(u1, u2, n_samples, seed, param_values)
    return _to_report(label, check, [message] if message else [])


def reconstruct_nambu(
    A: VectorField3,
    u1: ScalarField,
    u2: ScalarField,
    tol: float = DEFAULT_TOLERANCE,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    param_values: ParamValues = None,
) -> Reconstruction:
    """Identify ``(h, g)`` among the two orientations of ``(u1, u2)``.

    Returns ``(u1, u2)`` when ``A = grad u1 x grad u2``, ``(u2, u1)`` when
    ``A = grad u2 x grad u1`` and a failure carrying ``A - grad u1 x grad u2``
    otherwise; the caller then has to supply F1, F2.
    """
    warnings = []
    message = independence_warning(u1, u2, n_samples, seed, param_values)
    if message:
        warnings.append(message)
    first = None
    for h, g in ((u1, u2), (u2, u1)):
        check = check_zero(_nambu_terms(A, ONE, h, g), A.space_vars, param_values, tol, n_samples, seed)
        if first is None:
            first = check
        if check.passed:
            report = _to_report("reconstruction", check, warnings)
            return Reconstruction(True, h, g, None, report, tuple(warnings))
    residual = A - cross(gradient(u1), gradient(u2))
    logger.debug(f"reconstruction failed, residual {residual}")
    return Reconstruction(False, None, None, residual, _to_report("reconstruction", first, warnings), tuple(warnings))


def independence_warning(
    u1: ScalarField,
    u2: ScalarField,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    param_values: ParamValues = None,
) -> Optional[str]:
    """Warning text when ``[grad u1; grad u2]`` has rank below 2 at every sample."""
    g1 = gradient(u1).compile(param_values)
    g2 = gradient(u2).compile(param_values)
    best = 0
    for point in sample_points(n_samples, seed).tolist():
        try:
            rank = np.linalg.matrix_rank(np.array([g1(point), g2(point)]))
        except DomainError:
            continue
        best = max(best, int(rank))
        if best == 2:
            return None
    message = f"{u1} and {u2} look functionally dependent (gradient rank {best} at every sample)"
    logger.warning(message)
    return message
