import json
import os
from typing import Any, Dict

import pandas as pd
from pydantic import BaseModel, ValidationError

from models.models import SystemSpec
from tools.errors import SpecError
from tools.integrate import Trajectory


def load_spec(path: str) -> SystemSpec:
    """Read and validate a JSON spec file.

    Raises:
        SpecError: unreadable file, malformed JSON (with its line number) or
            a document that fails validation (with the offending key path).
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise SpecError(path, None, f"cannot read spec file: {e.strerror}") from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(path, f"line {e.lineno}", e.msg) from e
    return spec_from_dict(document, source=path)


def spec_from_dict(document: Any, source: str = "<spec>") -> SystemSpec:
    try:
        return SystemSpec.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        location = "key " + ".".join(str(part) for part in first["loc"]) if first["loc"] else None
        raise SpecError(source, location, first["msg"]) from e


def write_spec(document: Dict[str, Any], path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2)
        f.write("\n")
    return path


def write_trajectory_csv(traj: Trajectory, path: str) -> str:
    """Write ``t,x1,x2,x3[,p1,p2,p3]`` rows with 17 significant digits."""
    _ensure_parent(path)
    traj.to_frame().to_csv(path, index=False, float_format="%.17g")
    return path


def read_trajectory_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def write_report(report: BaseModel, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(report.model_dump_json(indent=2))
        f.write("\n")
    return path


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
