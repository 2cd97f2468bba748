"""Fixed-step integration of the Nambu flow and of its canonical lift."""
import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from zenml.logger import get_logger

from models.models import ConservationReport, QuantityDrift
from tools.errors import DomainError, MidpointNoConvergence, StepDivergence
from tools.fields import ParamValues, ScalarField, VectorField3
from tools.hamiltonize import PhaseState, SingularHamiltonian

logger = get_logger(__name__)

METHODS = ("rk4", "midpoint")
MIDPOINT_MAX_ITERATIONS = 50
MIDPOINT_RTOL = 1e-13

Rhs = Callable[[np.ndarray], np.ndarray]


@dataclass
class Trajectory:
    """Stored states of one run; ``states`` has 3 columns, or 6 for canonical runs."""

    times: np.ndarray
    states: np.ndarray
    method: str
    dt: float
    system_hash: str
    canonical: bool = False

    def __len__(self) -> int:
        return len(self.times)

    @property
    def positions(self) -> np.ndarray:
        return self.states[:, :3]

    @property
    def momenta(self) -> Optional[np.ndarray]:
        return self.states[:, 3:] if self.canonical else None

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def phase_state(self, k: int) -> PhaseState:
        row = self.states[k]
        p = row[3:] if self.canonical else (0.0, 0.0, 0.0)
        return PhaseState(tuple(row[:3]), tuple(p), float(self.times[k]))

    def phase_states(self) -> List[PhaseState]:
        return [self.phase_state(k) for k in range(len(self))]

    def to_frame(self) -> pd.DataFrame:
        """Table with header ``t,x1,x2,x3[,p1,p2,p3]``."""
        columns = ["x1", "x2", "x3"] + (["p1", "p2", "p3"] if self.canonical else [])
        frame = pd.DataFrame(self.states, columns=columns)
        frame.insert(0, "t", self.times)
        return frame


def system_hash(*parts: object) -> str:
    """Short stable digest of the printed system and its parameter values."""
    text = "|".join(str(part) for part in parts)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _step_count(t_end: float, dt: float) -> int:
    ratio = t_end / dt
    nearest = round(ratio)
    if nearest >= 1 and abs(ratio - nearest) <= 1e-9 * ratio:
        return int(nearest)
    return int(math.ceil(ratio))


def _rk4_step(rhs: Rhs, y: np.ndarray, h: float, t: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _midpoint_step(rhs: Rhs, y: np.ndarray, h: float, t: float) -> np.ndarray:
    current = y + h * rhs(y)
    for _ in range(MIDPOINT_MAX_ITERATIONS):
        update = y + h * rhs(0.5 * (y + current))
        if not np.all(np.isfinite(update)):
            return update
        if np.max(np.abs(update - current)) <= MIDPOINT_RTOL * max(1.0, float(np.max(np.abs(update)))):
            return update
        current = update
    raise MidpointNoConvergence(t, MIDPOINT_MAX_ITERATIONS)


_STEPPERS = {"rk4": _rk4_step, "midpoint": _midpoint_step}


def _run(
    rhs: Rhs,
    y0: Sequence[float],
    t_end: float,
    dt: float,
    method: str,
    store_every: int,
) -> Tuple[np.ndarray, np.ndarray]:
    if not (dt > 0 and t_end > 0 and math.isfinite(dt) and math.isfinite(t_end)):
        raise ValueError(f"t_end and dt must be positive and finite, got t_end={t_end}, dt={dt}")
    if method not in _STEPPERS:
        raise ValueError(f"unknown method '{method}', expected one of {METHODS}")
    if store_every < 1:
        raise ValueError("store_every must be at least 1")
    stepper = _STEPPERS[method]
    n_steps = _step_count(t_end, dt)
    y = np.asarray(y0, dtype=float)
    times, states = [0.0], [y.copy()]
    t = 0.0
    for k in range(1, n_steps + 1):
        t_next = t_end if k == n_steps else k * dt
        try:
            y_next = stepper(rhs, y, t_next - t, t)
        except DomainError as exc:
            raise StepDivergence(t) from exc
        if not np.all(np.isfinite(y_next)):
            raise StepDivergence(t)
        y, t = y_next, t_next
        if k % store_every == 0 or k == n_steps:
            times.append(t)
            states.append(y.copy())
    logger.debug(f"{method}: {n_steps} steps of {dt}, {len(times)} stored states")
    return np.array(times), np.array(states)


def integrate_flow(
    A: VectorField3,
    r0: Sequence[float],
    t_end: float,
    dt: float,
    method: str = "rk4",
    store_every: int = 1,
    param_values: ParamValues = None,
) -> Trajectory:
    """Integrate ``dr/dt = A(r)`` from ``r0`` on ``[0, t_end]``.

    Args:
        A: Velocity field.
        r0: Initial configuration.
        t_end: Final time; the last step is shortened to land on it.
        dt: Step size.
        method: ``rk4`` or ``midpoint``.
        store_every: Keep every k-th state; the final state is always kept.
        param_values: Values of the parameters in A.

    Returns:
        Trajectory with three state columns.

    Raises:
        StepDivergence: a state stopped being finite.
        MidpointNoConvergence: the implicit midpoint iteration stalled.
    """
    velocity = A.compile(param_values)

    def rhs(y: np.ndarray) -> np.ndarray:
        return np.array(velocity(y.tolist()))

    times, states = _run(rhs, r0, t_end, dt, method, store_every)
    return Trajectory(times, states, method, dt, system_hash(A, sorted((param_values or {}).items())))


def integrate_canonical(
    H: SingularHamiltonian,
    r0: Sequence[float],
    p0: Sequence[float],
    t_end: float,
    dt: float,
    method: str = "rk4",
    store_every: int = 1,
    param_values: ParamValues = None,
) -> Trajectory:
    """Integrate Hamilton's equations of ``H`` on the six dimensional phase space."""
    compiled = H.compile(param_values)

    def rhs(y: np.ndarray) -> np.ndarray:
        rdot, pdot = compiled.rhs(y[:3].tolist(), y[3:])
        return np.concatenate([rdot, pdot])

    y0 = list(r0) + list(p0)
    times, states = _run(rhs, y0, t_end, dt, method, store_every)
    digest = system_hash(H.A, H.V, sorted((param_values or {}).items()))
    return Trajectory(times, states, method, dt, digest, canonical=True)


def conservation_report(
    traj: Trajectory,
    quantities: Dict[str, ScalarField],
    param_values: ParamValues = None,
    hamiltonian: Optional[SingularHamiltonian] = None,
    system: str = "",
) -> ConservationReport:
    """Drift ``max |q(t) - q(0)|`` of each quantity over the stored states.

    ``hamiltonian`` adds an ``H`` entry and needs a canonical trajectory.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    evaluators = {name: q.compile(param_values) for name, q in quantities.items()}
    if hamiltonian is not None:
        if not traj.canonical:
            raise ValueError("H needs a canonical trajectory")
        compiled = hamiltonian.compile(param_values)
        evaluators["H"] = lambda r, p: compiled.energy(r, p)
    positions = traj.positions.tolist()
    momenta = traj.momenta.tolist() if traj.canonical else None
    drifts = []
    for name, f in evaluators.items():
        if name == "H":
            values = np.array([f(r, p) for r, p in zip(positions, momenta)])
        else:
            values = np.array([f(r) for r in positions])
        deviation = np.abs(values - values[0])
        k = int(np.argmax(deviation))
        drifts.append(
            QuantityDrift(
                name=name,
                initial=float(values[0]),
                max_drift=float(deviation[k]),
                time_of_max_drift=float(traj.times[k]),
            )
        )
    return ConservationReport(
        system=system,
        method=traj.method,
        dt=traj.dt,
        t_end=traj.t_end,
        canonical=traj.canonical,
        system_hash=traj.system_hash,
        stored_states=len(traj),
        quantities=drifts,
    )

