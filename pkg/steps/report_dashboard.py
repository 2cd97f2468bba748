from zenml import step
from zenml.logger import get_logger
from zenml.types import HTMLString

from models.models import ConservationReport, HamiltonianSummary, InvariantReport, SystemSpec, VerificationSummary
from utils import (
    generate_basis_html,
    generate_conservation_html,
    generate_hamiltonian_html,
    generate_verification_html,
)

logger = get_logger(__name__)


def render_dashboard(
    spec: SystemSpec,
    hamiltonian: HamiltonianSummary,
    verification: VerificationSummary,
    invariants: InvariantReport,
    conservation: ConservationReport,
) -> str:
    return f"""
    <html>
    <head>
        <title>{spec.name} - Nambu analysis</title>
        <style>
            body {{ font-family: Arial, sans-serif; margin: 20px; padding: 20px; background-color: #f4f4f4; }}
            .container {{ max-width: 900px; margin: auto; background: white; padding: 20px; border-radius: 5px; box-shadow: 0px 0px 10px rgba(0, 0, 0, 0.1); }}
            h1 {{ color: #333; text-align: center; }}
            h2 {{ color: #007BFF; }}
            p, li, td {{ font-size: 14px; line-height: 1.6; color: #555; }}
            table {{ border-collapse: collapse; width: 100%; }}
            td, th {{ border-bottom: 1px solid #ddd; padding: 6px; text-align: left; }}
            .metric-box {{ background: #e3f2fd; padding: 10px; border-radius: 5px; margin-bottom: 10px; }}
            .warning {{ color: #e65100; }}
        </style>
    </head>
    <body>
        <div class="container">
            <h1>{spec.name}</h1>

            <h2>Singular Hamiltonian</h2>
            {generate_hamiltonian_html(hamiltonian)}

            <h2>Candidate invariants</h2>
            {generate_verification_html(verification)}

            <h2>Polynomial first integrals</h2>
            {generate_basis_html(invariants)}

            <h2>Conservation along the trajectory</h2>
            {generate_conservation_html(conservation)}
        </div>
    </body>
    </html>
    """


@step
def nambu_dashboard(
    spec: SystemSpec,
    hamiltonian: HamiltonianSummary,
    verification: VerificationSummary,
    invariants: InvariantReport,
    conservation: ConservationReport,
) -> HTMLString:
    """
    Generates an HTML dashboard artifact summarizing the analysis of one system.

    Args:
        spec: The analysed spec.
        hamiltonian: Printable Hamiltonian and canonical equations.
        verification: Candidate invariant reports.
        invariants: Polynomial invariant basis.
        conservation: Drift report of the simulation.

    Returns:
        The dashboard as an HTML visualization.
    """
    html_content = render_dashboard(spec, hamiltonian, verification, invariants, conservation)
    logger.info("Generated Nambu analysis dashboard HTML.")
    return HTMLString(html_content)
