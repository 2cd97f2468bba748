"""Built-in spec documents written by ``run.py examples``."""

ROTATOR_SPEC = {
    "name": "rotator",
    "variables": ["l_x", "l_y", "l_z"],
    "params": {"I_x": 1, "I_y": 2, "I_z": 3},
    "h": "(l_x^2 + l_y^2 + l_z^2)/2",
    "g": "(l_x^2/I_x + l_y^2/I_y + l_z^2/I_z)/2",
    "invariants": {
        "h": "(l_x^2 + l_y^2 + l_z^2)/2",
        "g": "(l_x^2/I_x + l_y^2/I_y + l_z^2/I_z)/2",
    },
    "r0": [1, 1, 1],
}

CUBIC_SPEC = {
    "name": "cubic",
    "variables": ["x", "y", "z"],
    "params": {},
    "A": ["2*x*(z^2-y^2)", "2*y*(x^2-z^2)", "2*z*(y^2-x^2)"],
    "invariants": {"u1": "x^2+y^2+z^2", "u2": "x*y*z"},
    "F1": "u2",
    "F2": "u1",
    "r0": [1, 2, 3],
}

BUILTIN_SPECS = {"rotator": ROTATOR_SPEC, "cubic": CUBIC_SPEC}
