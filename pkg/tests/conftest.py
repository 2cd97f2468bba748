import json
from fractions import Fraction

import pytest

from config.systems import CUBIC_SPEC, ROTATOR_SPEC
from tools.fields import ScalarField, VectorField3

XYZ = ("x", "y", "z")
LXYZ = ("l_x", "l_y", "l_z")
INERTIA = {"I_x": Fraction(1), "I_y": Fraction(2), "I_z": Fraction(3)}


@pytest.fixture
def cubic_h():
    return ScalarField.parse("x*y*z", XYZ)


@pytest.fixture
def cubic_g():
    return ScalarField.parse("x^2+y^2+z^2", XYZ)


@pytest.fixture
def cubic_A():
    return VectorField3.parse(["2*x*(z^2-y^2)", "2*y*(x^2-z^2)", "2*z*(y^2-x^2)"], XYZ)


@pytest.fixture
def rotator_h():
    return ScalarField.parse("(l_x^2 + l_y^2 + l_z^2)/2", LXYZ, INERTIA)


@pytest.fixture
def rotator_g():
    return ScalarField.parse("(l_x^2/I_x + l_y^2/I_y + l_z^2/I_z)/2", LXYZ, INERTIA)


@pytest.fixture
def inertia():
    return dict(INERTIA)


@pytest.fixture
def spec_dir(tmp_path):
    """Directory holding rotator.json and cubic.json."""
    for name, document in (("rotator", ROTATOR_SPEC), ("cubic", CUBIC_SPEC)):
        (tmp_path / f"{name}.json").write_text(json.dumps(document, indent=2))
    return tmp_path


@pytest.fixture
def make_spec(tmp_path):
    """Write a spec document to tmp_path and return its path."""

    def write(name, document):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(document, indent=2))
        return str(path)

    return write
