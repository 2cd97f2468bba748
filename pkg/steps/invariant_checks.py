from typing_extensions import Annotated
from zenml import step
from zenml.logger import get_logger

from config.settings import DEFAULT_MAX_DEGREE, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE
from models.models import InvariantReport, ReconstructionSummary, SystemSpec, VerificationSummary
from steps.system_loading import system_from_spec
from tools.expr_dsl import to_string
from tools.invariants import (
    find_polynomial_invariants,
    functional_combination_check,
    reconstruct_nambu,
    verify_invariant,
)
from tools.systems import NambuSystem

logger = get_logger(__name__)


def run_verification(
    system: NambuSystem,
    tol: float = DEFAULT_TOLERANCE,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> VerificationSummary:
    """
    Checks every candidate invariant and, given two of them, the Nambu form of A.

    Args:
        system: System with candidate invariants.
        tol: Relative tolerance of sampled checks.
        n_samples: Sample count of sampled checks.
        seed: Sampler seed.

    Returns:
        VerificationSummary with one report per candidate, the bracket check
        when F1, F2 are given, and the (h, g) reconstruction.
    """
    values = system.params
    reports = [verify_invariant(system.A, c, tol, n_samples, seed, values) for c in system.candidates]
    summary = VerificationSummary(system=system.name, reports=reports)
    if len(system.candidates) != 2:
        return summary

    u1, u2 = (c.u for c in system.candidates)
    if system.functional is not None:
        summary.functional = functional_combination_check(
            system.A, u1, u2, system.functional, tol, n_samples, seed, values
        )
    result = reconstruct_nambu(system.A, u1, u2, tol, n_samples, seed, values)
    summary.reconstruction = ReconstructionSummary(
        success=result.success,
        h=str(result.h) if result.success else None,
        g=str(result.g) if result.success else None,
        residual=[] if result.success else [to_string(c) for c in result.residual.components],
        report=result.report,
    )
    summary.warnings.extend(result.warnings)
    return summary


def run_invariant_search(system: NambuSystem, max_degree: int = DEFAULT_MAX_DEGREE) -> InvariantReport:
    """
    Exact polynomial first-integral search, reported like any other check.

    The verdict is ``pass`` when the basis holds a non-constant invariant.
    """
    basis = find_polynomial_invariants(system.A, max_degree, system.params)
    found = any(not p.is_constant() for p in basis)
    return InvariantReport(
        label=f"polynomial invariants up to degree {max_degree}",
        mode="symbolic",
        verdict="pass" if found else "fail",
        residual="0",
        tolerance=0.0,
        basis=[p.to_string(system.space_vars) for p in basis],
    )


@step
def verify_system(
    spec: SystemSpec,
    tol: float = DEFAULT_TOLERANCE,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> Annotated[VerificationSummary, "verification_summary"]:
    """
    Verifies the candidate invariants of a spec.
    """
    summary = run_verification(system_from_spec(spec), tol, n_samples, seed)
    logger.info(f"Verification of '{spec.name}': {'pass' if summary.passed else 'fail'}")
    return summary


@step
def search_invariants(spec: SystemSpec, max_degree: int = DEFAULT_MAX_DEGREE) -> Annotated[InvariantReport, "invariant_basis"]:
    """
    Searches polynomial first integrals of a spec's velocity field.
    """
    report = run_invariant_search(system_from_spec(spec), max_degree)
    logger.info(f"Found {len(report.basis)} basis invariants up to degree {max_degree}")
    return report
