from typing import Any, Dict, List

from zenml import pipeline

from models.models import RunConfig
from steps.simulation import simulate_system, sweep_cell_config
from steps.system_loading import load_system_spec, override_parameter


@pipeline
def parameter_sweep_pipeline(
    spec_path: str,
    param: str,
    values: List[str],
    run_config: Dict[str, Any],
    stem: str,
    output_dir: str,
):
    """
    ZenML pipeline with one independent simulation per parameter value; each
    cell writes its own trajectory and conservation files.
    """
    spec = load_system_spec(spec_path)
    base = RunConfig(**run_config)
    for k, value in enumerate(values):
        cell_spec = override_parameter(spec, param, value, id=f"override_parameter_{k}")
        simulate_system(cell_spec, sweep_cell_config(base, stem, param, value, output_dir), id=f"simulate_system_{k}")
