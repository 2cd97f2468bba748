"""In-memory systems built from validated spec documents."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from zenml.logger import get_logger

from models.models import SystemSpec
from tools.errors import ExprSyntaxError, SpecError, UndeclaredName
from tools.expr_dsl import FUNCTIONS, Constant, parse, simplify, substitute
from tools.fields import ScalarField, VectorField3, nambu_velocity
from tools.hamiltonize import DEFAULT_MOMENTA, SingularHamiltonian
from tools.invariants import DEFAULT_U_NAMES, FunctionalPair, InvariantCandidate

logger = get_logger(__name__)


@dataclass(frozen=True)
class NambuSystem:
    name: str
    space_vars: Tuple[str, str, str]
    params: Dict[str, Fraction]
    A: VectorField3
    h: Optional[ScalarField] = None
    g: Optional[ScalarField] = None
    V: Optional[ScalarField] = None
    candidates: Tuple[InvariantCandidate, ...] = ()
    functional: Optional[FunctionalPair] = None
    r0: Optional[Tuple[float, float, float]] = None
    p0: Optional[Tuple[float, float, float]] = None
    source: str = field(default="<spec>", compare=False)

    @property
    def momentum_names(self) -> Tuple[str, str, str]:
        if set(DEFAULT_MOMENTA) & (set(self.space_vars) | set(self.params)):
            return tuple(f"p_{name}" for name in self.space_vars)
        return DEFAULT_MOMENTA

    def hamiltonian(self) -> SingularHamiltonian:
        V = self.V if self.V is not None else ScalarField.parse("0", self.space_vars)
        return SingularHamiltonian(self.A, V, self.momentum_names)

    def quantities(self) -> Dict[str, ScalarField]:
        """h and g when present, then every candidate invariant by label."""
        result: Dict[str, ScalarField] = {}
        if self.h is not None:
            result["h"] = self.h
            result["g"] = self.g
        for candidate in self.candidates:
            result.setdefault(candidate.label, candidate.u)
        return result

    def numeric(self) -> "NambuSystem":
        """The same system with every parameter value baked in as a constant."""
        values = self.params

        def bake(f):
            return None if f is None else f.with_params(values)

        functional = None
        if self.functional is not None:
            constants = {name: Constant(value) for name, value in values.items()}
            F1, F2 = (simplify(substitute(e, constants)) for e in (self.functional.F1, self.functional.F2))
            functional = FunctionalPair(F1, F2, self.functional.u_names)
        return NambuSystem(
            name=self.name,
            space_vars=self.space_vars,
            params={},
            A=self.A.with_params(values),
            h=bake(self.h),
            g=bake(self.g),
            V=bake(self.V),
            candidates=tuple(InvariantCandidate(c.u.with_params(values), c.label) for c in self.candidates),
            functional=functional,
            r0=self.r0,
            p0=self.p0,
            source=self.source,
        )


def _parse_at(source: str, key: str, text: str, variables, params):
    try:
        return parse(text, variables, params)
    except ExprSyntaxError as e:
        raise SpecError(source, f"key {key}, position {e.position}", e.message) from e
    except UndeclaredName as e:
        raise SpecError(source, f"key {key}", f"undeclared name '{e.name}'") from e


def build_system(spec: SystemSpec, source: str = "<spec>") -> NambuSystem:
    """Parse every expression of ``spec`` against its declared names.

    Raises:
        SpecError: a name clash or an expression that fails to parse; the
            location names the key and the character position.
    """
    variables = tuple(spec.variables)
    params = spec.param_values()
    names = frozenset(params)
    for name in variables + tuple(params):
        if name in FUNCTIONS:
            raise SpecError(source, "key variables", f"'{name}' is a reserved function name")
    clash = set(variables) & names
    if clash:
        raise SpecError(source, "key params", f"{sorted(clash)} declared both as variable and parameter")

    def field_at(key: str, text: str) -> ScalarField:
        return ScalarField(_parse_at(source, key, text, variables, names), variables, names)

    h = g = None
    if spec.h is not None:
        h, g = field_at("h", spec.h), field_at("g", spec.g)
        A = nambu_velocity(h, g)
    else:
        comps = tuple(_parse_at(source, f"A.{i}", text, variables, names) for i, text in enumerate(spec.A))
        A = VectorField3(comps, variables, names)
    V = field_at("V", spec.V) if spec.V is not None else None
    candidates = tuple(
        InvariantCandidate(field_at(f"invariants.{label}", text), label) for label, text in spec.invariants.items()
    )
    functional = None
    if spec.F1 is not None:
        if set(DEFAULT_U_NAMES) & (set(variables) | names):
            raise SpecError(source, "key F1", f"{list(DEFAULT_U_NAMES)} are reserved for F1 and F2")
        functional = FunctionalPair(
            _parse_at(source, "F1", spec.F1, DEFAULT_U_NAMES, names),
            _parse_at(source, "F2", spec.F2, DEFAULT_U_NAMES, names),
            DEFAULT_U_NAMES,
            names,
        )
    logger.debug(f"built system {spec.name}: A = {A}")
    return NambuSystem(
        name=spec.name,
        space_vars=variables,
        params=params,
        A=A,
        h=h,
        g=g,
        V=V,
        candidates=candidates,
        functional=functional,
        r0=tuple(spec.r0) if spec.r0 is not None else None,
        p0=tuple(spec.p0) if spec.p0 is not None else None,
        source=source,
    )
