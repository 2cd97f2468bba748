import functools
import os
import sys
from typing import List

import click
from dotenv import load_dotenv
from pydantic import ValidationError
from zenml.logger import get_logger

from config.settings import (
    DEFAULT_DT,
    DEFAULT_MAX_DEGREE,
    DEFAULT_METHOD,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_STORE_EVERY,
    DEFAULT_T_END,
    DEFAULT_TOLERANCE,
    EXIT_DIVERGENCE,
    EXIT_OK,
    EXIT_SPEC_ERROR,
    EXIT_VERIFICATION_FAILED,
    SEED_ENV_VAR,
)
from config.systems import BUILTIN_SPECS
from data.utils import load_spec, write_report, write_spec
from models.models import RunConfig
from steps.hamiltonization import summarize_hamiltonian
from steps.invariant_checks import run_invariant_search, run_verification
from steps.simulation import run_simulation, run_sweep
from steps.system_loading import load_system
from tools.errors import IntegrationError, NambuError

load_dotenv()
logger = get_logger(__name__)


class NambuCLI(click.Group):
    """Command group whose commands return their exit code.

    Usage errors exit with the spec-error code instead of click's default 2,
    which is reserved for numerical divergence.
    """

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_SPEC_ERROR)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_SPEC_ERROR)
        sys.exit(result if isinstance(result, int) else EXIT_OK)


def _validation_message(e: ValidationError) -> str:
    first = e.errors()[0]
    where = ".".join(str(part) for part in first["loc"])
    return f"{where}: {first['msg']}" if where else first["msg"]


def exit_codes(func):
    """Map toolkit exceptions to exit codes with a diagnostic on stderr."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            result = func(*args, **kwargs)
        except IntegrationError as e:
            click.echo(f"error: integration failed: {e}", err=True)
            return EXIT_DIVERGENCE
        except ValidationError as e:
            click.echo(f"error: {_validation_message(e)}", err=True)
            return EXIT_SPEC_ERROR
        except (NambuError, ValueError) as e:
            click.echo(f"error: {e}", err=True)
            return EXIT_SPEC_ERROR
        return EXIT_OK if result is None else result

    return wrapper


def _stem(spec_path: str) -> str:
    return os.path.splitext(os.path.basename(spec_path))[0]


def run_options(func):
    """Integration options shared by simulate, analyze and sweep."""
    options = [
        click.option("--t-end", type=float, default=DEFAULT_T_END, show_default=True, help="Final time."),
        click.option("--dt", type=float, default=DEFAULT_DT, show_default=True, help="Step size."),
        click.option(
            "--method",
            type=click.Choice(["rk4", "midpoint"]),
            default=DEFAULT_METHOD,
            show_default=True,
            help="Fixed-step integrator.",
        ),
        click.option("--store-every", type=int, default=DEFAULT_STORE_EVERY, show_default=True, help="Keep every k-th state."),
        click.option("--r0", type=float, nargs=3, default=None, help="Initial configuration, overrides the spec."),
        click.option("--p0", type=float, nargs=3, default=None, help="Initial momentum; selects a canonical run."),
        click.option("--output-dir", type=str, default=".", show_default=True, help="Directory for output files."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def check_options(func):
    """Options of the sampled zero checks."""
    options = [
        click.option("--tol", type=float, default=DEFAULT_TOLERANCE, show_default=True, help="Relative tolerance of sampled checks."),
        click.option("--samples", type=int, default=DEFAULT_SAMPLES, show_default=True, help="Sample points of sampled checks."),
        click.option(
            "--seed",
            type=int,
            default=DEFAULT_SEED,
            envvar=SEED_ENV_VAR,
            show_default=True,
            show_envvar=True,
            help="Seed of the sampler.",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _run_config(t_end, dt, method, store_every, r0, p0, seed, tol, out_csv=None, out_json=None) -> RunConfig:
    return RunConfig(
        t_end=t_end,
        dt=dt,
        method=method,
        store_every=store_every,
        r0=r0 or None,
        p0=p0 or None,
        out_csv=out_csv,
        out_json=out_json,
        seed=seed,
        tolerance=tol,
    )


@click.group(
    cls=NambuCLI,
    help="""
Nambu systems: simulate, Hamiltonize and verify first integrals.

Examples:

  \b
  # Write the built-in specs and simulate the free rigid body
    python run.py examples
    python run.py simulate rotator.json --t-end 10 --dt 1e-3

  \b
  # Print the singular Hamiltonian and search polynomial invariants
    python run.py hamiltonize cubic.json --numeric
    python run.py find-invariants cubic.json --max-degree 3
""",
)
def cli():
    """Main entry point of the command line."""


@cli.command(help="Integrate a system and write its trajectory and conservation report.")
@click.argument("spec_path", type=str)
@run_options
@check_options
@click.option("--out-csv", type=str, default=None, help="Trajectory CSV path (default <stem>_trajectory.csv).")
@click.option("--out-json", type=str, default=None, help="Conservation report path (default <stem>_conservation.json).")
@exit_codes
def simulate(spec_path, t_end, dt, method, store_every, r0, p0, output_dir, tol, samples, seed, out_csv, out_json):
    stem = _stem(spec_path)
    config = _run_config(
        t_end, dt, method, store_every, r0, p0, seed, tol,
        out_csv or os.path.join(output_dir, f"{stem}_trajectory.csv"),
        out_json or os.path.join(output_dir, f"{stem}_conservation.json"),
    )
    system = load_system(spec_path)
    logger.info(f"Simulating '{system.name}' with {config.method}, dt={config.dt}, t_end={config.t_end}")
    traj, report = run_simulation(system, config)
    click.echo(f"{system.name}: {len(traj)} stored states, t_end = {traj.t_end}")
    for q in report.quantities:
        click.echo(f"  {q.name}: initial {q.initial!r}, max drift {q.max_drift:.3e} at t = {q.time_of_max_drift:g}")
    logger.info(f"Wrote {config.out_csv} and {config.out_json}")


@cli.command(help="Print the singular Hamiltonian H = p.A + V and Hamilton's equations.")
@click.argument("spec_path", type=str)
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable JSON.")
@click.option("--numeric", is_flag=True, help="Substitute parameter values.")
@exit_codes
def hamiltonize(spec_path, as_json, numeric):
    summary = summarize_hamiltonian(load_system(spec_path), numeric=numeric)
    if as_json:
        click.echo(summary.model_dump_json(indent=2))
        return
    click.echo(f"H = {summary.H}")
    for name, expr in zip(summary.space_vars, summary.rdot):
        click.echo(f"d{name}/dt = {expr}")
    for name, expr in zip(summary.momentum_names, summary.pdot):
        click.echo(f"d{name}/dt = {expr}")


@cli.command(help="Verify the candidate invariants of a spec and reconstruct its Nambu form.")
@click.argument("spec_path", type=str)
@check_options
@click.option("--json", "as_json", is_flag=True, help="Print the reports as JSON.")
@click.option("--out-json", type=str, default=None, help="Also write the reports to this file.")
@exit_codes
def verify(spec_path, tol, samples, seed, as_json, out_json):
    system = load_system(spec_path)
    summary = run_verification(system, tol=tol, n_samples=samples, seed=seed)
    if out_json:
        write_report(summary, out_json)
    if as_json:
        click.echo(summary.model_dump_json(indent=2))
    else:
        for report in summary.reports:
            click.echo(f"{report.label}: {report.verdict} ({report.mode}, residual {report.residual})")
        if summary.functional is not None:
            click.echo(f"[F1,F2] check: {summary.functional.verdict}")
        rec = summary.reconstruction
        if rec is not None and rec.success:
            click.echo(f"Nambu form: h = {rec.h}, g = {rec.g}")
        elif rec is not None:
            click.echo(f"no unit-bracket Nambu form, residual ({', '.join(rec.residual)})")
        for warning in summary.warnings:
            click.echo(f"warning: {warning}", err=True)
    return EXIT_OK if summary.passed else EXIT_VERIFICATION_FAILED


@cli.command("find-invariants", help="Exact basis of the polynomial first integrals up to a degree.")
@click.argument("spec_path", type=str)
@click.option("--max-degree", type=int, default=DEFAULT_MAX_DEGREE, show_default=True, help="Highest total degree.")
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
@exit_codes
def find_invariants(spec_path, max_degree, as_json):
    if max_degree < 0:
        raise click.BadParameter("must be non-negative", param_hint="--max-degree")
    report = run_invariant_search(load_system(spec_path), max_degree)
    if as_json:
        click.echo(report.model_dump_json(indent=2))
        return
    click.echo(f"{len(report.basis)} invariant(s) of degree <= {max_degree}:")
    for poly in report.basis:
        click.echo(f"  {poly}")


@cli.command(help="Write the built-in example specs (rotator, cubic).")
@click.argument("name", required=False)
@click.option("--output-dir", type=str, default=".", show_default=True, help="Directory for the spec files.")
@exit_codes
def examples(name, output_dir):
    if name is not None and name not in BUILTIN_SPECS:
        click.echo(f"error: unknown example '{name}', expected one of {sorted(BUILTIN_SPECS)}", err=True)
        return EXIT_SPEC_ERROR
    names: List[str] = [name] if name else sorted(BUILTIN_SPECS)
    for key in names:
        path = write_spec(BUILTIN_SPECS[key], os.path.join(output_dir, f"{key}.json"))
        click.echo(path)


@cli.command(help="Run the full analysis pipeline and render an HTML dashboard.")
@click.argument("spec_path", type=str)
@run_options
@check_options
@click.option("--max-degree", type=int, default=DEFAULT_MAX_DEGREE, show_default=True, help="Degree of the invariant search.")
@click.option("--numeric", is_flag=True, help="Substitute parameter values in the printed Hamiltonian.")
@exit_codes
def analyze(spec_path, t_end, dt, method, store_every, r0, p0, output_dir, tol, samples, seed, max_degree, numeric):
    from pipelines.nambu_analysis_pipeline import nambu_analysis_pipeline

    stem = _stem(spec_path)
    load_spec(spec_path)
    config = _run_config(
        t_end, dt, method, store_every, r0, p0, seed, tol,
        os.path.join(output_dir, f"{stem}_trajectory.csv"),
        os.path.join(output_dir, f"{stem}_conservation.json"),
    )
    logger.info(f"Running analysis pipeline for {spec_path}")
    nambu_analysis_pipeline(
        spec_path=spec_path,
        run_config=config.model_dump(),
        max_degree=max_degree,
        numeric=numeric,
        tolerance=tol,
        n_samples=samples,
        seed=seed,
    )


def _split_values(values: str) -> List[str]:
    items = [v.strip() for v in values.split(",") if v.strip()]
    if not items:
        raise click.BadParameter("give at least one value", param_hint="--values")
    return items


@cli.command(help="Simulate one cell per value of a parameter.")
@click.argument("spec_path", type=str)
@click.option("--param", "param", type=str, required=True, help="Parameter to sweep.")
@click.option("--values", "values", type=str, required=True, help="Comma separated values, e.g. 1,2,5/2.")
@run_options
@check_options
@click.option("--local", is_flag=True, help="Run the cells in this process instead of a ZenML pipeline.")
@exit_codes
def sweep(spec_path, param, values, t_end, dt, method, store_every, r0, p0, output_dir, tol, samples, seed, local):
    cells = _split_values(values)
    spec = load_spec(spec_path)
    config = _run_config(t_end, dt, method, store_every, r0, p0, seed, tol)
    stem = _stem(spec_path)
    if local:
        reports = run_sweep(spec, param, cells, config, stem, output_dir)
        for value, report in zip(cells, reports):
            drifts = ", ".join(f"{q.name} {q.max_drift:.3e}" for q in report.quantities)
            click.echo(f"{param}={value}: {drifts}")
        return
    from pipelines.parameter_sweep_pipeline import parameter_sweep_pipeline

    if param not in spec.params:
        raise click.BadParameter(f"'{spec.name}' has no parameter '{param}'", param_hint="--param")
    logger.info(f"Sweeping {param} over {cells}")
    parameter_sweep_pipeline(
        spec_path=spec_path,
        param=param,
        values=cells,
        run_config=config.model_dump(),
        stem=stem,
        output_dir=output_dir,
    )


if __name__ == "__main__":
    cli()
