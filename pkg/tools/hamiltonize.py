"""Direct Hamiltonization of a first order flow.

``H = p . A(r) + V(r)`` on the doubled phase space. H is linear in the
momenta, so ``dr/dt = dH/dp = A`` never depends on p and the momentum
Hessian vanishes identically.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
from zenml.logger import get_logger

from config.settings import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE
from tools.expr_dsl import Add, Expr, Mul, Neg, Variable, ZERO, differentiate, free_names, simplify
from tools.fields import (
    ParamValues,
    ScalarField,
    VectorField3,
    ZeroCheck,
    check_zero,
    gradient,
    jacobian,
    nambu_velocity,
)

logger = get_logger(__name__)

DEFAULT_MOMENTA: Tuple[str, str, str] = ("p1", "p2", "p3")

Triple = Tuple[float, float, float]


@dataclass(frozen=True)
class SingularHamiltonian:
    A: VectorField3
    V: ScalarField
    momentum_names: Tuple[str, str, str] = DEFAULT_MOMENTA

    def __post_init__(self):
        object.__setattr__(self, "momentum_names", tuple(self.momentum_names))
        if self.V.space_vars != self.A.space_vars:
            raise ValueError("V and A must share space variables")
        clash = set(self.momentum_names) & (set(self.A.space_vars) | self.params)
        if len(set(self.momentum_names)) != 3 or clash:
            raise ValueError(f"momentum names {self.momentum_names} must be three fresh names")

    @property
    def space_vars(self) -> Tuple[str, str, str]:
        return self.A.space_vars

    @property
    def params(self):
        return self.A.params | self.V.params

    def with_params(self, values: Mapping[str, Fraction]) -> "SingularHamiltonian":
        return SingularHamiltonian(self.A.with_params(values), self.V.with_params(values), self.momentum_names)

    def compile(self, param_values: ParamValues = None) -> "CompiledHamiltonian":
        return CompiledHamiltonian(self, param_values)


@dataclass(frozen=True)
class PhaseState:
    r: Triple
    p: Triple = (0.0, 0.0, 0.0)
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if len(self.r) != 3 or len(self.p) != 3:
            raise ValueError("phase states are three dimensional")
        if not all(math.isfinite(v) for v in self.r + self.p + (self.t,)):
            raise ValueError(f"phase state entries must be finite: {self}")


class CompiledHamiltonian:
    """Float callables for A, its Jacobian and grad V at fixed parameters."""

    def __init__(self, H: SingularHamiltonian, param_values: ParamValues = None):
        self.hamiltonian = H
        self.velocity = H.A.compile(param_values)
        self.jacobian = jacobian(H.A).compile(param_values)
        self.potential = H.V.compile(param_values)
        self.force = gradient(H.V).compile(param_values)

    def energy(self, r: Sequence[float], p: Sequence[float]) -> float:
        a = self.velocity(r)
        return p[0] * a[0] + p[1] * a[1] + p[2] * a[2] + self.potential(r)

    def rhs(self, r: Sequence[float], p: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        rdot = np.array(self.velocity(r))
        pdot = -(self.jacobian(r).T @ np.asarray(p, dtype=float)) - np.array(self.force(r))
        return rdot, pdot


@lru_cache(maxsize=64)
def _compiled(H: SingularHamiltonian, frozen_params: Tuple[Tuple[str, Fraction], ...]) -> CompiledHamiltonian:
    return H.compile(dict(frozen_params))


def _freeze(param_values: ParamValues) -> Tuple[Tuple[str, Fraction], ...]:
    return tuple(sorted((param_values or {}).items()))


def build_hamiltonian(h: ScalarField, g: ScalarField, V: Optional[ScalarField] = None) -> SingularHamiltonian:
    """``H = p . (grad h x grad g) + V``; V defaults to the zero field."""
    A = nambu_velocity(h, g)
    return from_vector_field(A, V)


def from_vector_field(A: VectorField3, V: Optional[ScalarField] = None) -> SingularHamiltonian:
    """Hamiltonize ``dr/dt = A(r)`` directly, without knowing h and g."""
    if V is None:
        V = ScalarField(ZERO, A.space_vars)
    return SingularHamiltonian(A, V)


def hamiltonian_expr(H: SingularHamiltonian) -> Expr:
    """H as a single expression over space and momentum variables."""
    total: Expr = H.V.expr
    for name, component in reversed(list(zip(H.momentum_names, H.A.components))):
        total = Add(Mul(Variable(name), component), total)
    return simplify(total)


def momentum_velocity(H: SingularHamiltonian) -> VectorField3:
    """``dH/dp`` differentiated symbolically from ``hamiltonian_expr``."""
    expr = hamiltonian_expr(H)
    comps = tuple(differentiate(expr, name) for name in H.momentum_names)
    for comp in comps:
        leftover = free_names(comp) & set(H.momentum_names)
        if leftover:
            raise ValueError(f"H is not linear in the momenta: dH/dp still depends on {sorted(leftover)}")
    return VectorField3(comps, H.space_vars, H.params)


def canonical_equations(H: SingularHamiltonian) -> Tuple[Tuple[Expr, ...], Tuple[Expr, ...]]:
    """Symbolic right-hand sides ``(dr/dt, dp/dt)`` with ``dp/dt = -dH/dr``."""
    J = jacobian(H.A).entries
    dV = gradient(H.V).components
    momenta = [Variable(name) for name in H.momentum_names]
    pdot = []
    for j in range(3):
        total: Expr = dV[j]
        for i in reversed(range(3)):
            total = Add(Mul(momenta[i], J[i][j]), total)
        pdot.append(simplify(Neg(simplify(total))))
    return tuple(H.A.components), tuple(pdot)


def eval_H(H: SingularHamiltonian, s: PhaseState, param_values: ParamValues = None) -> float:
    return _compiled(H, _freeze(param_values)).energy(s.r, s.p)


def canonical_rhs(H: SingularHamiltonian, s: PhaseState, param_values: ParamValues = None) -> Tuple[Triple, Triple]:
    """Hamilton's equations at ``s``.

    ``rdot_i = A_i(r)`` and ``pdot_j = -sum_i p_i dA_i/dx_j - dV/dx_j``.
    """
    rdot, pdot = _compiled(H, _freeze(param_values)).rhs(s.r, s.p)
    return tuple(rdot.tolist()), tuple(pdot.tolist())


def recovery_check(
    H: SingularHamiltonian,
    h: ScalarField,
    g: ScalarField,
    tol: float = DEFAULT_TOLERANCE,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    param_values: ParamValues = None,
) -> ZeroCheck:
    """Zero check of ``dH/dp - grad h x grad g``."""
    dHdp = momentum_velocity(H)
    target = nambu_velocity(h, g)
    terms = [[a, simplify(Neg(b))] for a, b in zip(dHdp.components, target.components)]
    return check_zero(terms, H.space_vars, param_values, tol, n_samples, seed)


def verify_recovers_nambu(
    H: SingularHamiltonian,
    h: ScalarField,
    g: ScalarField,
    tol: float = DEFAULT_TOLERANCE,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    param_values: ParamValues = None,
) -> bool:
    """True when the position half of Hamilton's equations is the Nambu flow of (h, g)."""
    check = recovery_check(H, h, g, tol, n_samples, seed, param_values)
    logger.debug(f"recovery check ({check.mode}): {'pass' if check.passed else 'fail'}")
    return check.passed
