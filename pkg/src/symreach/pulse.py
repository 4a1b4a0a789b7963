"""Piecewise-constant pulse optimisation on Sp(2, R) (GRAPE).

The control ``u(t)`` takes a constant value ``u_k`` on each of ``Q``
equal slices of ``[0, T]``, so

    S(T) = S_Q ... S_2 S_1,   S_k = exp((A + u_k B) dt).

The objective is the fidelity error ``eps = |S(T) - S_target|_F^2 / 8``.
Exact gradients come from the block-triangular augmented matrix

    exp([[G dt, B dt], [0, G dt]]) = [[S_k, dS_k/du_k], [0, S_k]],

chained through cached forward and backward partial products, and the
pulse is refined with bounded L-BFGS from several random starts. By default
the search runs on ``log(eps)``, which has the same minimisers.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .normal_form import ControlSystem
from .sp2 import as_mat, expm_batch

log = logging.getLogger(__name__)

FIDELITY_LAMBDA = 1.0 / 8.0


class Status(str, enum.Enum):
    REACHED = "Reached"
    LOCAL_MINIMUM = "LocalMinimum"
    TIME_LIMIT = "TimeLimit"


@dataclass(frozen=True)
class Pulse:
    values: np.ndarray
    T: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size < 1:
            raise ValueError("a pulse needs at least one slice")
        if not self.T > 0:
            raise ValueError(f"total time must be positive, got {self.T}")
        object.__setattr__(self, "values", values)

    @property
    def Q(self) -> int:
        return self.values.size

    @property
    def dt(self) -> float:
        return self.T / self.Q

    @classmethod
    def constant(cls, u: float, T: float, Q: int = 10) -> "Pulse":
        return cls(np.full(Q, float(u)), T)


@dataclass(frozen=True)
class PulseProblem:
    system: ControlSystem
    target: np.ndarray
    T: float
    Q: int = 10
    u_bounds: tuple[float, float] = (-20.0, 20.0)
    tol: float = 1e-3
    restarts: int = 5
    seed: int = 0
    wall_limit: float = 10.0
    max_iter: int = 500
    memory: int = 10
    gtol: float = 1e-8
    log_objective: bool = True

    def __post_init__(self):
        object.__setattr__(self, "target", as_mat(self.target))
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.Q < 1:
            raise ValueError("Q must be at least 1")
        if not self.u_bounds[0] < self.u_bounds[1]:
            raise ValueError("u_bounds must satisfy u_min < u_max")
        if not self.T > 0:
            raise ValueError("T must be positive")
        if self.restarts < 1:
            raise ValueError("need at least one start")


@dataclass
class OptimResult:
    status: Status
    epsilon: float
    pulse: Pulse
    iterations: int
    grad_norm: float
    starts: int = 1
    history: list[float] = field(default_factory=list)

    @property
    def reached(self) -> bool:
        return self.status is Status.REACHED


def _generators(system: ControlSystem, values: np.ndarray) -> np.ndarray:
    return system.A[None, :, :] + values[:, None, None] * system.B[None, :, :]


def propagate(system: ControlSystem, pulse: Pulse, return_slices: bool = False):
    """Evolve under the piecewise-constant pulse.

    Returns ``S(T)``, or ``(S(T), slices)`` where ``slices[k]`` is the
    propagator of slice ``k`` when ``return_slices`` is set.
    """
    slices = expm_batch(_generators(system, pulse.values), pulse.dt)
    S = np.eye(2)
    for Sk in slices:
        S = Sk @ S
    if return_slices:
        return S, slices
    return S


def fidelity_error(S, target) -> float:
    D = as_mat(S) - as_mat(target)
    return FIDELITY_LAMBDA * float(np.sum(D * D))


def _augmented_derivatives(system: ControlSystem, values: np.ndarray, dt: float):
    q = values.size
    aug = np.zeros((q, 4, 4))
    G = _generators(system, values) * dt
    aug[:, :2, :2] = G
    aug[:, 2:, 2:] = G
    aug[:, :2, 2:] = system.B * dt
    E = scipy.linalg.expm(aug)
    return E[:, :2, :2], E[:, :2, 2:]


def _cost_and_grad(system: ControlSystem, target: np.ndarray, values: np.ndarray, dt: float):
    slices, dslices = _augmented_derivatives(system, values, dt)
    q = values.size
    # forward[k] = S_k ... S_1 (forward[0] = I); backward[k] = S_Q ... S_{k+1}
    forward = np.empty((q + 1, 2, 2))
    forward[0] = np.eye(2)
    for k in range(q):
        forward[k + 1] = slices[k] @ forward[k]
    backward = np.empty((q + 1, 2, 2))
    backward[q] = np.eye(2)
    for k in range(q - 1, -1, -1):
        backward[k] = backward[k + 1] @ slices[k]
    D = forward[q] - target
    eps = FIDELITY_LAMBDA * float(np.sum(D * D))
    # dS(T)/du_k = backward[k+1] dS_k forward[k]
    dS = backward[1:] @ dslices @ forward[:-1]
    grad = 2.0 * FIDELITY_LAMBDA * np.einsum("ij,kij->k", D, dS)
    return eps, grad


def gradient(problem: PulseProblem, pulse: Pulse) -> np.ndarray:
    """Exact derivative of the fidelity error with respect to each slice amplitude."""
    _, grad = _cost_and_grad(problem.system, problem.target, pulse.values, pulse.dt)
    return grad


def objective(problem: PulseProblem, pulse: Pulse) -> float:
    return fidelity_error(propagate(problem.system, pulse), problem.target)


def run_start(problem: PulseProblem, start: int = 0, u0=None) -> OptimResult:
    """One bounded L-BFGS descent from restart ``start`` (or from ``u0``)."""
    u0 = initial_pulse(problem, start) if u0 is None else np.asarray(u0, dtype=float)
    dt = problem.T / problem.Q
    lo, hi = problem.u_bounds
    history: list[float] = []
    state = {"timed_out": False, "best": (np.inf, u0.copy())}
    started = time.perf_counter()

    def fun(u):
        eps, grad = _cost_and_grad(problem.system, problem.target, u, dt)
        if not np.isfinite(eps) or not np.all(np.isfinite(grad)):
            return (700.0 if problem.log_objective else 1e300), np.zeros_like(u)
        if eps < state["best"][0]:
            state["best"] = (eps, u.copy())
        if problem.log_objective:
            # same minimisers, far better scaled on the exponential landscape
            eps = max(eps, 1e-300)
            return math.log(eps), grad / eps
        return eps, grad

    def callback(intermediate_result):
        value = float(intermediate_result.fun)
        eps = math.exp(value) if problem.log_objective else value
        history.append(eps)
        if eps < problem.tol:
            raise StopIteration
        if time.perf_counter() - started > problem.wall_limit:
            state["timed_out"] = True
            raise StopIteration

    res = scipy.optimize.minimize(
        fun,
        u0,
        jac=True,
        method="L-BFGS-B",
        bounds=[(lo, hi)] * problem.Q,
        callback=callback,
        options={
            "maxcor": problem.memory,
            "maxiter": problem.max_iter,
            "gtol": problem.gtol,
            "ftol": 1e-12,
        },
    )
    u = np.asarray(res.x, dtype=float)
    eps = objective(problem, Pulse(u, problem.T))
    if state["best"][0] < eps:
        eps, u = state["best"]
    grad = gradient(problem, Pulse(u, problem.T))
    # projected gradient: components pushing against an active bound do not count
    proj = np.where((u <= lo) & (grad > 0) | (u >= hi) & (grad < 0), 0.0, grad)
    if eps < problem.tol:
        status = Status.REACHED
    elif state["timed_out"]:
        status = Status.TIME_LIMIT
    else:
        status = Status.LOCAL_MINIMUM
    return OptimResult(
        status=status,
        epsilon=eps,
        pulse=Pulse(u, problem.T),
        iterations=int(res.nit),
        grad_norm=float(np.linalg.norm(proj)),
        history=history,
    )


def initial_pulse(problem: PulseProblem, start: int) -> np.ndarray:
    """Deterministic initial amplitudes for restart ``start``, uniform in [-1, 1]."""
    rng = np.random.default_rng([problem.seed, start])
    lo, hi = problem.u_bounds
    return np.clip(rng.uniform(-1.0, 1.0, problem.Q), lo, hi)


def optimize(problem: PulseProblem) -> OptimResult:
    """Multi-start bounded quasi-Newton search for a pulse reaching ``problem.target``.

    Starts are tried in order and the search stops at the first one that
    reaches the target. The best start (lowest fidelity error) is returned;
    its status is ``Reached`` iff its error is below ``problem.tol``.
    """
    best = None
    for start in range(problem.restarts):
        result = run_start(problem, start)
        log.debug("start %d: %s eps=%.3e nit=%d", start, result.status.value, result.epsilon, result.iterations)
        if best is None or result.epsilon < best.epsilon:
            best = result
        if result.reached:
            break
    best.starts = start + 1
    return best
