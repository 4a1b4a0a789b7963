"""Grid mapping of the reachable set in Euler coordinates (theta, z, phi).

Every grid point is turned into a target ``R(theta) Z(z) R(phi)`` and
handed to the pulse optimiser at a fixed evolution time ``T``. A point is
recorded as unreachable when every restart fails; the optimiser cannot
prove unreachability, so this is an operational label only.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInputError, NoBracketError
from .euler import DEFAULT_OFFSETS, EulerTriple, RangeOffsets, compose
from .normal_form import example_system
from .pulse import PulseProblem, Status, optimize

CSV_COLUMNS = ["c", "T", "theta", "z", "phi", "status", "epsilon", "seed", "wall_time"]

FULL_C_VALUES = [0.0, 0.5, -0.5, 0.9, -0.9, 0.99, -0.99, 1.01, -1.01, 1.1, -1.1, 1.5, -1.5]
FULL_T_VALUES = [0.1, 0.5, 1, 2, 3, 4, 5, 7, 10, 20, 50, 100]


@dataclass(frozen=True)
class GridSpec:
    """Discretisation of (theta, z, phi).

    The default is the desk-scale grid (pi/6 steps, 5 z-levels up to 10);
    :meth:`full` gives pi/12 steps with 10 z-levels up to 100. The z-levels
    are log-spaced and include both 1 and ``z_max``. On the ``z = 1``
    plane only ``phi = phi0`` is used, since there the two angles describe
    one rotation.
    """

    angular_step: float = math.pi / 6
    z_levels: int = 5
    z_max: float = 10.0
    offsets: RangeOffsets = DEFAULT_OFFSETS

    def __post_init__(self):
        n = math.pi / self.angular_step
        if self.angular_step <= 0 or abs(n - round(n)) > 1e-9:
            raise ValueError("angular_step must divide pi into whole cells")
        if not self.z_max > 1:
            raise ValueError("z_max must exceed 1")
        if self.z_levels < 1:
            raise ValueError("need at least one z level")

    @classmethod
    def full(cls, offsets: RangeOffsets = DEFAULT_OFFSETS) -> "GridSpec":
        return cls(math.pi / 12, 10, 100.0, offsets)

    def thetas(self) -> np.ndarray:
        n = round(2 * math.pi / self.angular_step)
        return self.offsets.theta0 - math.pi + self.angular_step * np.arange(n)

    def phis(self) -> np.ndarray:
        n = round(math.pi / self.angular_step)
        return self.offsets.phi0 - math.pi / 2 + self.angular_step * np.arange(n)

    def zs(self) -> np.ndarray:
        if self.z_levels == 1:
            return np.array([1.0])
        return np.logspace(0.0, math.log10(self.z_max), self.z_levels)

    def points(self) -> list[EulerTriple]:
        out = []
        for z in self.zs():
            phis = [self.offsets.phi0] if z == 1.0 else self.phis()
            for theta in self.thetas():
                for phi in phis:
                    out.append(EulerTriple(float(theta), float(z), float(phi)))
        return out

    @property
    def size(self) -> int:
        return len(self.points())


@dataclass(frozen=True)
class ProblemDefaults:
    Q: int = 10
    u_max: float = 20.0
    tol: float = 1e-3
    restarts: int = 5
    wall_limit: float = 10.0


@dataclass(frozen=True)
class SweepSpec:
    c_values: Sequence[float]
    T_values: Sequence[float]
    grid: GridSpec = field(default_factory=GridSpec)
    problem: ProblemDefaults = field(default_factory=ProblemDefaults)
    seed: int = 0

    def __post_init__(self):
        if not self.c_values or not self.T_values:
            raise ValueError("c and T lists must be non-empty")

    @classmethod
    def from_dict(cls, cfg: dict) -> "SweepSpec":
        offsets = RangeOffsets(cfg.get("theta0", 0.0), cfg.get("phi0", math.pi / 2))
        g = cfg.get("grid", {})
        grid = GridSpec(
            g.get("angular_step", math.pi / 6), g.get("z_levels", 5), g.get("z_max", 10.0), offsets
        )
        problem = ProblemDefaults(**cfg.get("problem", {}))
        return cls(list(cfg["c"]), list(cfg["T"]), grid, problem, int(cfg.get("seed", 0)))


@dataclass
class ReachRecord:
    c: float
    T: float
    theta: float
    z: float
    phi: float
    status: str
    epsilon: float
    seed: int
    wall_time: float
    pulse: list[float] | None = None

    @property
    def reached(self) -> bool:
        return self.status == Status.REACHED.value

    @property
    def triple(self) -> EulerTriple:
        return EulerTriple(self.theta, self.z, self.phi)


def point_seed(global_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([global_seed, index]).generate_state(1)[0])


def make_problem(c: float, T: float, target: EulerTriple, defaults: ProblemDefaults, seed: int) -> PulseProblem:
    return PulseProblem(
        system=example_system(c),
        target=compose(target),
        T=T,
        Q=defaults.Q,
        u_bounds=(-defaults.u_max, defaults.u_max),
        tol=defaults.tol,
        restarts=defaults.restarts,
        seed=seed,
        wall_limit=defaults.wall_limit,
    )


def evaluate_point(c: float, T: float, target: EulerTriple, defaults: ProblemDefaults, seed: int,
                   keep_pulse: bool = False) -> ReachRecord:
    started = time.perf_counter()
    try:
        result = optimize(make_problem(c, T, target, defaults, seed))
        status, eps = result.status.value, result.epsilon
        pulse = result.pulse.values.tolist() if keep_pulse else None
    except (ArithmeticError, ValueError) as exc:
        # a failing point must not abort the sweep
        status, eps, pulse = f"Error: {exc}", math.nan, None
    return ReachRecord(c, T, target.theta, target.z, target.phi, status, eps, seed,
                       time.perf_counter() - started, pulse)


def _evaluate_task(args) -> ReachRecord:
    return evaluate_point(*args)


def sweep_tasks(sweep: SweepSpec) -> list[tuple]:
    points = sweep.grid.points()
    tasks = []
    index = 0
    for c in sweep.c_values:
        for T in sweep.T_values:
            for p in points:
                tasks.append((float(c), float(T), p, sweep.problem, point_seed(sweep.seed, index)))
                index += 1
    return tasks


def run_grid(sweep: SweepSpec, jobs: int = 1, keep_pulse: bool = False) -> list[ReachRecord]:
    """One record per (c, T, grid point), in grid order regardless of ``jobs``."""
    tasks = [t + (keep_pulse,) for t in sweep_tasks(sweep)]
    if jobs <= 1:
        return [_evaluate_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate_task, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))


@dataclass
class BoundaryPoint:
    fixed: dict[str, float]
    axis: str
    lower: float
    upper: float
    lower_reached: bool
    probes: int

    @property
    def midpoint(self) -> float:
        if self.axis == "z":
            return math.sqrt(self.lower * self.upper)
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower


AXES = ("theta", "z", "phi")


def bisect_boundary(fixed: dict[str, float], axis: str, bracket: tuple[float, float], c: float, T: float,
                    defaults: ProblemDefaults = ProblemDefaults(), seed: int = 0,
                    tol: float | None = None, max_probes: int = 60) -> BoundaryPoint:
    """Bisect the reach status along ``axis`` with the other two coordinates fixed.

    The z axis is bisected geometrically and its tolerance is relative
    (default 1e-2); angular tolerances are absolute (default 1e-2 rad).

    Raises
    ------
    NoBracketError
        If both bracket endpoints have the same reach status.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    if set(fixed) != set(AXES) - {axis}:
        raise ValueError(f"fixed must give exactly the coordinates {sorted(set(AXES) - {axis})}")
    if tol is None:
        tol = 1e-2

    def probe(value: float) -> bool:
        coords = dict(fixed, **{axis: value})
        target = EulerTriple(coords["theta"], coords["z"], coords["phi"])
        return optimize(make_problem(c, T, target, defaults, seed)).reached

    lo, hi = float(bracket[0]), float(bracket[1])
    lo_reached, hi_reached = probe(lo), probe(hi)
    probes = 2
    if lo_reached == hi_reached:
        raise NoBracketError(f"both endpoints are {'reached' if lo_reached else 'unreached'}")

    def too_wide() -> bool:
        return (hi - lo) > (tol * lo if axis == "z" else tol)

    while too_wide() and probes < max_probes:
        mid = math.sqrt(lo * hi) if axis == "z" else 0.5 * (lo + hi)
        if probe(mid) == lo_reached:
            lo = mid
        else:
            hi = mid
        probes += 1
    return BoundaryPoint(dict(fixed), axis, lo, hi, lo_reached, probes)


def export(records: Iterable[ReachRecord], path, fmt: str = "json") -> Path:
    path = Path(path)
    records = list(records)
    try:
        if fmt == "json":
            with open(path, "w") as fh:
                json.dump([dataclasses.asdict(r) for r in records], fh, indent=1)
        elif fmt == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_COLUMNS)
                for r in records:
                    writer.writerow([getattr(r, col) for col in CSV_COLUMNS])
        else:
            raise ValueError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def load_records(path) -> list[ReachRecord]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    if path.suffix == ".csv":
        rows = list(csv.DictReader(text.splitlines()))
        return [
            ReachRecord(float(r["c"]), float(r["T"]), float(r["theta"]), float(r["z"]), float(r["phi"]),
                        r["status"], float(r["epsilon"]), int(r["seed"]), float(r["wall_time"]))
            for r in rows
        ]
    return [ReachRecord(**d) for d in json.loads(text)]


PROJECTIONS = {
    "theta-phi": ("theta", "phi"),
    "z-theta": ("z", "theta"),
    "z-phi": ("z", "phi"),
}


def render_scatter(records: Sequence[ReachRecord], projection: str, path) -> Path:
    """Write a 2-D SVG scatter of reached (filled) and unreached (hollow) points."""
    if not records:
        raise EmptyInputError("no records to plot")
    if projection not in PROJECTIONS:
        raise ValueError(f"projection must be one of {sorted(PROJECTIONS)}")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xname, yname = PROJECTIONS[projection]
    reached = [r for r in records if r.reached]
    missed = [r for r in records if not r.reached]
    fig, ax = plt.subplots(figsize=(5, 4))
    if missed:
        ax.scatter([getattr(r, xname) for r in missed], [getattr(r, yname) for r in missed],
                   facecolors="none", edgecolors="0.6", s=18, label="not reached", gid="unreached")
    if reached:
        ax.scatter([getattr(r, xname) for r in reached], [getattr(r, yname) for r in reached],
                   color="tab:blue", s=22, label="reached", gid="reached")
    labels = {"theta": r"$\theta$", "phi": r"$\phi$", "z": "$z$"}
    ax.set_xlabel(labels[xname])
    ax.set_ylabel(labels[yname])
    if xname == "z":
        ax.set_xscale("log")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    path = Path(path)
    try:
        fig.savefig(path, format="svg")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path


def default_jobs() -> int:
    return os.cpu_count() or 1
