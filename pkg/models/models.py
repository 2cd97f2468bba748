import math
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator

Number = Union[int, float, str]


def to_fraction(value: Number) -> Fraction:
    """Exact rational from a JSON number or a ``"p/q"`` / decimal string."""
    if isinstance(value, bool):
        raise ValueError("booleans are not parameter values")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"parameter value {value} is not finite")
        return Fraction(repr(value))
    return Fraction(str(value).strip())


class SystemSpec(BaseModel):
    """A dynamical system on three-space as written in a spec file."""
    name: str = Field(..., description="Human readable system name")
    variables: Tuple[str, str, str] = Field(..., description="The three configuration variable names")
    params: Dict[str, Number] = Field(default_factory=dict, description="Parameter values, numbers or 'p/q' strings")
    h: Optional[str] = Field(None, description="First Nambu Hamiltonian")
    g: Optional[str] = Field(None, description="Second Nambu Hamiltonian")
    A: Optional[Tuple[str, str, str]] = Field(None, description="Velocity field, when h and g are not given")
    V: Optional[str] = Field(None, description="Additive potential of the canonical Hamiltonian")
    invariants: Dict[str, str] = Field(default_factory=dict, description="Labelled candidate first integrals")
    F1: Optional[str] = Field(None, description="First function of (u1, u2) for the bracket check")
    F2: Optional[str] = Field(None, description="Second function of (u1, u2) for the bracket check")
    r0: Optional[Tuple[float, float, float]] = Field(None, description="Initial configuration")
    p0: Optional[Tuple[float, float, float]] = Field(None, description="Initial momentum; selects a canonical run")

    model_config = {"extra": "forbid"}

    @field_validator("variables")
    @classmethod
    def _distinct_variables(cls, value):
        if len(set(value)) != 3:
            raise ValueError(f"variables must be three distinct names, got {list(value)}")
        return value

    @field_validator("params")
    @classmethod
    def _finite_params(cls, value):
        for name, raw in value.items():
            try:
                to_fraction(raw)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"parameter {name}: {exc}") from exc
        return value

    @model_validator(mode="after")
    def _one_flow(self):
        has_pair = self.h is not None or self.g is not None
        if has_pair and (self.h is None or self.g is None):
            raise ValueError("h and g must be given together")
        if has_pair == (self.A is not None):
            raise ValueError("give exactly one of {h and g} or A")
        if (self.F1 is None) != (self.F2 is None):
            raise ValueError("F1 and F2 must be given together")
        for vector in (self.r0, self.p0):
            if vector is not None and not all(math.isfinite(v) for v in vector):
                raise ValueError("initial values must be finite")
        return self

    def param_values(self) -> Dict[str, Fraction]:
        return {name: to_fraction(raw) for name, raw in self.params.items()}


class RunConfig(BaseModel):
    """Integration settings of one simulation."""
    t_end: float = Field(10.0, gt=0, description="Final time")
    dt: float = Field(1e-3, gt=0, description="Fixed step size")
    method: Literal["rk4", "midpoint"] = Field("rk4", description="Integrator")
    store_every: int = Field(1, ge=1, description="Keep every k-th state")
    r0: Optional[Tuple[float, float, float]] = Field(None, description="Initial configuration override")
    p0: Optional[Tuple[float, float, float]] = Field(None, description="Initial momentum override")
    out_csv: Optional[str] = Field(None, description="Trajectory CSV path")
    out_json: Optional[str] = Field(None, description="Conservation report path")
    seed: int = Field(42, description="Seed for sampled checks")
    tolerance: float = Field(1e-9, gt=0, description="Tolerance of sampled checks")

    @field_validator("t_end", "dt")
    @classmethod
    def _finite(cls, value):
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value


class InvariantReport(BaseModel):
    """Outcome of one first-integral or identity check."""
    label: str = Field(..., description="Candidate label")
    mode: Literal["symbolic", "sampled"] = Field(..., description="How the residual was decided")
    verdict: Literal["pass", "fail"] = Field(..., description="Check verdict")
    residual: Union[str, float, None] = Field(None, description="Residual expression, or max sampled |residual|")
    tolerance: float = Field(..., description="Relative tolerance of sampled mode")
    samples: int = Field(0, description="Number of points sampled")
    seed: Optional[int] = Field(None, description="Sampler seed")
    basis: List[str] = Field(default_factory=list, description="Invariant basis, for polynomial searches")
    warnings: List[str] = Field(default_factory=list, description="Diagnostics attached to the check")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


class ReconstructionSummary(BaseModel):
    """Result of matching A against the cross product of two invariants."""
    success: bool
    h: Optional[str] = Field(None, description="Reconstructed first Nambu Hamiltonian")
    g: Optional[str] = Field(None, description="Reconstructed second Nambu Hamiltonian")
    residual: List[str] = Field(default_factory=list, description="A - grad u1 x grad u2 when both orientations fail")
    report: Optional[InvariantReport] = None


class VerificationSummary(BaseModel):
    """Everything `verify` writes for one spec."""
    system: str
    reports: List[InvariantReport] = Field(default_factory=list)
    functional: Optional[InvariantReport] = Field(None, description="Bracket check with the user's F1, F2")
    reconstruction: Optional[ReconstructionSummary] = None
    warnings: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        checks = list(self.reports)
        if self.functional is not None:
            checks.append(self.functional)
        elif self.reconstruction is not None and not self.reconstruction.success:
            return False
        return all(report.passed for report in checks)


class QuantityDrift(BaseModel):
    name: str
    initial: float
    max_drift: float = Field(..., ge=0)
    time_of_max_drift: float


class ConservationReport(BaseModel):
    """Drift of conserved quantities along a stored trajectory."""
    system: str = ""
    method: str
    dt: float
    t_end: float
    canonical: bool = False
    system_hash: str = ""
    stored_states: int
    quantities: List[QuantityDrift] = Field(default_factory=list)

    def drift(self, name: str) -> QuantityDrift:
        for quantity in self.quantities:
            if quantity.name == name:
                return quantity
        raise KeyError(name)


class HamiltonianSummary(BaseModel):
    """Printable form of the singular Hamiltonian and its canonical equations."""
    system: str
    space_vars: List[str]
    momentum_names: List[str]
    H: str
    rdot: List[str]
    pdot: List[str]
    params: Dict[str, str] = Field(default_factory=dict)
