import os
from typing import List, Tuple

import pandas as pd
from typing_extensions import Annotated
from zenml import step
from zenml.logger import get_logger

from data.utils import write_report, write_trajectory_csv
from models.models import ConservationReport, RunConfig, SystemSpec
from steps.system_loading import system_from_spec, with_parameter
from tools.errors import SpecError
from tools.integrate import Trajectory, conservation_report, integrate_canonical, integrate_flow
from tools.systems import NambuSystem

logger = get_logger(__name__)


def run_simulation(system: NambuSystem, config: RunConfig) -> Tuple[Trajectory, ConservationReport]:
    """
    Integrates a system and measures the drift of its conserved quantities.

    The run is canonical when an initial momentum is given, by the config or
    by the spec. Output files are written only after the run succeeded.

    Args:
        system: The system to integrate.
        config: Integration settings and output paths.

    Returns:
        The stored trajectory and its conservation report.
    """
    r0 = config.r0 or system.r0
    if r0 is None:
        raise SpecError(system.source, "key r0", "no initial configuration in the spec or on the command line")
    p0 = config.p0 or system.p0
    values = system.params
    if p0 is not None:
        H = system.hamiltonian()
        traj = integrate_canonical(H, r0, p0, config.t_end, config.dt, config.method, config.store_every, values)
        report = conservation_report(traj, system.quantities(), values, hamiltonian=H, system=system.name)
    else:
        traj = integrate_flow(system.A, r0, config.t_end, config.dt, config.method, config.store_every, values)
        report = conservation_report(traj, system.quantities(), values, system=system.name)

    if config.out_csv:
        write_trajectory_csv(traj, config.out_csv)
    if config.out_json:
        write_report(report, config.out_json)
    return traj, report


@step
def simulate_system(
    spec: SystemSpec, config: RunConfig
) -> Tuple[Annotated[pd.DataFrame, "trajectory"], Annotated[ConservationReport, "conservation_report"]]:
    """
    Integrates the system of a spec.

    Args:
        spec: Validated spec document.
        config: Integration settings.

    Returns:
        The trajectory table and the conservation report.
    """
    traj, report = run_simulation(system_from_spec(spec), config)
    logger.info(f"Simulated '{spec.name}' with {config.method} to t={traj.t_end}: {len(traj)} stored states")
    if config.out_csv:
        logger.info(f"Trajectory written to {config.out_csv}")
    return traj.to_frame(), report


def sweep_cell_config(config: RunConfig, stem: str, param: str, value: str, output_dir: str) -> RunConfig:
    """Copy of ``config`` writing to ``<stem>_<param>=<value>_trajectory.csv`` and ``_conservation.json``."""
    tag = f"{stem}_{param}={value.replace('/', 'over')}"
    return config.model_copy(
        update={
            "out_csv": os.path.join(output_dir, f"{tag}_trajectory.csv"),
            "out_json": os.path.join(output_dir, f"{tag}_conservation.json"),
        }
    )


def run_sweep(
    spec: SystemSpec, param: str, values: List[str], config: RunConfig, stem: str, output_dir: str
) -> List[ConservationReport]:
    """Run every sweep cell in turn without an orchestrator."""
    reports = []
    for value in values:
        cell = with_parameter(spec, param, value)
        _, report = run_simulation(system_from_spec(cell), sweep_cell_config(config, stem, param, value, output_dir))
        reports.append(report)
    return reports
