from fractions import Fraction
from typing import Sequence

from typing_extensions import Annotated
from zenml import step
from zenml.logger import get_logger

from models.models import HamiltonianSummary, SystemSpec
from steps.system_loading import system_from_spec
from tools.expr_dsl import Expr, to_string, try_polynomial
from tools.hamiltonize import canonical_equations, hamiltonian_expr
from tools.systems import NambuSystem

logger = get_logger(__name__)


def _format_value(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _render(expr: Expr, order: Sequence[str]) -> str:
    """Canonical polynomial form when there is one, otherwise the expression tree."""
    poly = try_polynomial(expr)
    return to_string(expr) if poly is None else poly.to_string(order)


def summarize_hamiltonian(system: NambuSystem, numeric: bool = False) -> HamiltonianSummary:
    """
    Builds ``H = p . A + V`` and its canonical equations in printable form.

    Polynomial components print as collected terms, momenta leading, so the
    numeric rotator reads ``-1/6*p1*l_y*l_z + 2/3*p2*l_x*l_z - 1/2*p3*l_x*l_y``.

    Args:
        system: The system to Hamiltonize.
        numeric: Substitute parameter values instead of keeping them symbolic.

    Returns:
        HamiltonianSummary with H and the six right-hand sides.
    """
    if numeric:
        system = system.numeric()
    H = system.hamiltonian()
    order = list(H.momentum_names) + list(H.space_vars)
    rdot, pdot = canonical_equations(H)
    return HamiltonianSummary(
        system=system.name,
        space_vars=list(H.space_vars),
        momentum_names=list(H.momentum_names),
        H=_render(hamiltonian_expr(H), order),
        rdot=[_render(e, order) for e in rdot],
        pdot=[_render(e, order) for e in pdot],
        params={name: _format_value(value) for name, value in system.params.items()},
    )


@step
def hamiltonize_system(spec: SystemSpec, numeric: bool = False) -> Annotated[HamiltonianSummary, "hamiltonian_summary"]:
    """
    Hamiltonizes the system of a spec.

    Args:
        spec: Validated spec document.
        numeric: Substitute parameter values.

    Returns:
        The printable Hamiltonian and canonical equations.
    """
    summary = summarize_hamiltonian(system_from_spec(spec), numeric=numeric)
    logger.info(f"H = {summary.H}")
    return summary
