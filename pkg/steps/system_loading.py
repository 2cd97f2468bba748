from typing import Optional

from typing_extensions import Annotated
from zenml import step
from zenml.logger import get_logger

from data.utils import load_spec, spec_from_dict
from models.models import SystemSpec
from tools.errors import SpecError
from tools.systems import NambuSystem, build_system

logger = get_logger(__name__)


def load_system(spec_path: str) -> NambuSystem:
    """Read, validate and parse a spec file into a system."""
    return build_system(load_spec(spec_path), source=spec_path)


def system_from_spec(spec: SystemSpec, source: Optional[str] = None) -> NambuSystem:
    return build_system(spec, source=source or spec.name)


@step
def load_system_spec(spec_path: str) -> Annotated[SystemSpec, "system_spec"]:
    """
    Loads a JSON spec file and checks that every expression parses.

    Args:
        spec_path: Path of the spec file.

    Returns:
        The validated spec document.
    """
    spec = load_spec(spec_path)
    build_system(spec, source=spec_path)
    logger.info(f"Loaded system '{spec.name}' from {spec_path}")
    return spec


def with_parameter(spec: SystemSpec, name: str, value: str) -> SystemSpec:
    """Copy of ``spec`` with the value of parameter ``name`` replaced."""
    if name not in spec.params:
        raise SpecError(spec.name, "key params", f"no parameter '{name}' to sweep")
    document = spec.model_dump()
    document["params"][name] = value
    return spec_from_dict(document, source=f"{spec.name}[{name}={value}]")


@step
def override_parameter(spec: SystemSpec, name: str, value: str) -> Annotated[SystemSpec, "sweep_spec"]:
    """
    Returns a copy of the spec with one parameter value replaced.
    """
    return with_parameter(spec, name, value)
