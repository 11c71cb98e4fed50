"""Gradient semiflow x' = -grad W_pq on the configuration space."""
import csv
import enum
from dataclasses import dataclass

import numpy as np
from scipy.integrate import RK45

from .action import action_eval, eigen_sym, grad_array, hess_array
from .configspace import DEFAULT_TOL, Configuration, OrderRelation, compare
from .model import GeneratingModel
from .stationary import newton_polish


class StepFailure(RuntimeError):
    pass


class NotMinimax(ValueError):
    pass


class NonConvergence(RuntimeError):
    pass


@dataclass
class StepControl:
    """Integrator settings.

    Near a stiff equilibrium the explicit pair runs at its stability limit and
    max|grad W| stalls at a few times ``abs_tol``, sometimes above
    ``stationary_tol``. Below ``capture_tol`` a Newton polish is tried
    instead; it is accepted when it lands within ``capture_tol`` of the state
    and does not raise the action (a flow limit never can).
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    min_step: float = 1e-14
    stationary_tol: float = 1e-11
    max_time: float = 1e4
    polish: bool = True
    capture_tol: float = 1e-8


class FlowStatus(enum.Enum):
    REACHED_TIME = "REACHED_TIME"
    CONVERGED = "CONVERGED"
    STEP_FAILURE = "STEP_FAILURE"


@dataclass(eq=False)
class FlowPath:
    p: int
    q: int
    times: np.ndarray
    states: np.ndarray          # (n_samples, q)
    status: FlowStatus
    limit: Configuration = None

    def __len__(self):
        return len(self.times)

    def config(self, k) -> Configuration:
        return Configuration(self.p, self.q, self.states[k])

    @property
    def final(self) -> Configuration:
        return self.config(-1)

    def actions(self, m: GeneratingModel):
        return np.array([action_eval(m, self.config(k)) for k in range(len(self))])

    def to_csv(self, path, m: GeneratingModel, header_lines=()):
        W = self.actions(m)
        with open(path, "w", newline="") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t"] + [f"x{k}" for k in range(self.q)] + ["W"])
            for t, x, a in zip(self.times, self.states, W):
                w.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in x] + [f"{a:.17g}"])


def evolve(m: GeneratingModel, c: Configuration, T: float, ctrl: StepControl = None,
           stop_at_stationary=True) -> FlowPath:
    """Integrate the flow from ``c`` for time ``T`` with an adaptive RK4(5) pair.

    With ``stop_at_stationary`` the integration ends early once
    max|grad W| < ctrl.stationary_tol; the limit is then Newton-polished.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    ctrl = ctrl or StepControl()
    p, q = c.p, c.q
    x0 = np.array(c.coords)

    captured = []

    def converged(x):
        if not stop_at_stationary:
            return False
        g = np.max(np.abs(grad_array(m, p, x)))
        if g < ctrl.stationary_tol:
            return True
        if g < ctrl.capture_tol:
            y, _, ok = newton_polish(m, p, x)
            if (ok and np.max(np.abs(y - x)) < ctrl.capture_tol
                    and action_eval(m, Configuration(p, q, y)) <= action_eval(m, Configuration(p, q, x)) + 1e-15):
                captured.append(y)
                return True
        return False

    def finish(times, states, status):
        limit = None
        if status is FlowStatus.CONVERGED:
            x = states[-1]
            if captured:
                x = captured[-1]
            elif ctrl.polish:
                y, _, ok = newton_polish(m, p, x)
                x = y if ok else x
            limit = Configuration(p, q, x)
        return FlowPath(p, q, np.array(times), np.array(states), status, limit)

    times, states = [0.0], [x0]
    if converged(x0):
        return finish(times, states, FlowStatus.CONVERGED)
    solver = RK45(lambda t, x: -grad_array(m, p, x), 0.0, x0, T,
                  rtol=ctrl.rel_tol, atol=ctrl.abs_tol)
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            return finish(times, states, FlowStatus.STEP_FAILURE)
        times.append(solver.t)
        states.append(solver.y.copy())
        if converged(solver.y):
            return finish(times, states, FlowStatus.CONVERGED)
        if solver.status == "running" and solver.step_size < ctrl.min_step:
            return finish(times, states, FlowStatus.STEP_FAILURE)
    return finish(times, states, FlowStatus.REACHED_TIME)


def monotone_check(m: GeneratingModel, x: Configuration, y: Configuration, T: float,
                   ctrl: StepControl = None, tol=DEFAULT_TOL) -> bool:
    """For x < y (weakly), whether the flow has made them strictly ordered at T."""
    rel = compare(x, y, tol)
    if rel not in (OrderRelation.LESS_WEAK, OrderRelation.LESS_STRICT):
        raise ValueError(f"need x < y, got {rel.name}")
    ends = []
    for c in (x, y):
        path = evolve(m, c, T, ctrl, stop_at_stationary=False)
        if path.status is FlowStatus.STEP_FAILURE:
            raise StepFailure(f"step size underflow from {c!r}")
        ends.append(path.final)
    return compare(ends[0], ends[1], tol) is OrderRelation.LESS_STRICT


def is_ordered_chain(path: FlowPath, tol=0.0):
    """+1 if samples increase strictly, -1 if they decrease strictly, else 0."""
    d = np.diff(path.states, axis=0)
    if (d > tol).all():
        return 1
    if (d < -tol).all():
        return -1
    return 0


def trace_unstable(m: GeneratingModel, y: Configuration, delta=1e-6, ctrl: StepControl = None):
    """Follow both branches of the unstable manifold of an index-1 state.

    Returns (lower, upper): the paths started at y - delta v and y + delta v,
    where v is the positive unit eigenvector of the negative Hessian
    eigenvalue.
    """
    ctrl = ctrl or StepControl(abs_tol=1e-12, rel_tol=1e-12)
    w, V = eigen_sym(hess_array(m, np.array(y.coords)))
    neg = int(np.sum(w < -1e-9))
    if neg != 1 or np.any(np.abs(w) <= 1e-9):
        raise NotMinimax(f"expected a non-degenerate index-1 state, got eigenvalues {w}")
    v = V[:, 0]
    v = v if v.sum() > 0 else -v
    paths = []
    for sign in (-1.0, 1.0):
        start = y.with_coords(y.coords + sign * delta * v)
        path = evolve(m, start, ctrl.max_time, ctrl)
        if path.status is not FlowStatus.CONVERGED:
            raise NonConvergence(f"branch {sign:+.0f} ended with {path.status.name}")
        paths.append(path)
    return tuple(paths)
