from typing import Any, Dict

from zenml import pipeline

from config.settings import DEFAULT_MAX_DEGREE, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE
from models.models import RunConfig
from steps.hamiltonization import hamiltonize_system
from steps.invariant_checks import search_invariants, verify_system
from steps.report_dashboard import nambu_dashboard
from steps.simulation import simulate_system
from steps.system_loading import load_system_spec


@pipeline
def nambu_analysis_pipeline(
    spec_path: str,
    run_config: Dict[str, Any],
    max_degree: int = DEFAULT_MAX_DEGREE,
    numeric: bool = False,
    tolerance: float = DEFAULT_TOLERANCE,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
):
    """
    ZenML pipeline that Hamiltonizes one system, checks its invariants,
    simulates it and renders the results as a dashboard.
    """
    spec = load_system_spec(spec_path)
    hamiltonian = hamiltonize_system(spec, numeric=numeric)
    verification = verify_system(spec, tol=tolerance, n_samples=n_samples, seed=seed)
    invariants = search_invariants(spec, max_degree=max_degree)
    _, conservation = simulate_system(spec, RunConfig(**run_config))
    nambu_dashboard(spec, hamiltonian, verification, invariants, conservation)
