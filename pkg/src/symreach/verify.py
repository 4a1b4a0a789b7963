"""Randomised property checks across all modules, runnable from the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import certificate, euler, normal_form, pulse, sp2


@dataclass
class CheckResult:
    name: str
    passed: bool
    samples: int
    worst: float
    limit: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name:<34} n={self.samples:<7d} worst={self.worst:.3e} limit={self.limit:.1e}"


def random_algebra(rng: np.random.Generator, scale: float = 10.0) -> np.ndarray:
    return sp2.from_basis_coords(*rng.uniform(-scale, scale, 3))


def random_hyperbolic(rng: np.random.Generator, scale: float = 10.0) -> np.ndarray:
    while True:
        M = random_algebra(rng, scale)
        if sp2.trace_sq(M) > 1e-3:
            return M


def random_symplectic(rng: np.random.Generator, factors: int = 3) -> np.ndarray:
    S = np.eye(2)
    for _ in range(factors):
        S = euler.rotation(rng.uniform(-math.pi, math.pi)) @ euler.squeezer(math.exp(rng.uniform(-1.5, 1.5))) @ S
    return S


def random_triple(rng: np.random.Generator, offsets=euler.DEFAULT_OFFSETS, z_max: float = 100.0) -> euler.EulerTriple:
    tlo, thi = euler.theta_range(offsets)
    plo, phi_hi = euler.phi_range(offsets)
    return euler.EulerTriple(
        rng.uniform(tlo, thi), math.exp(rng.uniform(0.0, math.log(z_max))), rng.uniform(plo, phi_hi)
    )


def _expm_group(rng, n):
    worst = 0.0
    for _ in range(n):
        M = random_algebra(rng, 1.0)
        t1, t2 = rng.uniform(-2, 2, 2)
        lhs = sp2.expm(M, t1) @ sp2.expm(M, t2)
        rhs = sp2.expm(M, t1 + t2)
        worst = max(worst, np.linalg.norm(lhs - rhs) / (1 + np.linalg.norm(rhs)))
    return worst


def _expm_det(rng, n):
    worst = 0.0
    for _ in range(n):
        S = sp2.expm(random_algebra(rng, 1.0), rng.uniform(-10, 10))
        worst = max(worst, abs(sp2.det2(S) - 1.0) / max(1.0, float(np.sum(S * S))))
    return worst


def _classify_invariance(rng, n):
    bad = 0
    for _ in range(n):
        M = random_algebra(rng, 5.0)
        P = random_symplectic(rng)
        if sp2.classify(P @ M @ sp2.inv2(P)) != sp2.classify(M):
            bad += 1
    return float(bad)


def _trace_identity(rng, n):
    worst = 0.0
    for _ in range(n):
        M = sp2.from_basis_coords(*rng.uniform(-5, 5, 3))
        N = sp2.from_basis_coords(*rng.uniform(-5, 5, 3))
        scale = max(np.abs(M).max(), np.abs(N).max())
        worst = max(worst, abs(sp2.trace_identity_residual(M, N)) / (1 + scale**4))
    return worst


def _euler_round_trip(rng, n):
    worst = 0.0
    for _ in range(n):
        e = random_triple(rng)
        if e.z <= 1 + 1e-6:
            continue
        d = euler.decompose(euler.compose(e))
        worst = max(worst, abs(d.theta - e.theta), abs(d.phi - e.phi), abs(d.z - e.z) / e.z)
    return worst


def _euler_reconstruction(rng, n):
    worst = 0.0
    for _ in range(n):
        S = random_symplectic(rng)
        R = euler.compose(euler.decompose(S))
        worst = max(worst, np.linalg.norm(R - S) / np.linalg.norm(S))
    return worst


def _euler_ranges(rng, n):
    bad = 0
    for k in range(8):
        offsets = euler.RangeOffsets(*rng.uniform(-math.pi, math.pi, 2))
        for _ in range(n // 8):
            if not euler.in_ranges(euler.decompose(random_symplectic(rng), offsets), offsets):
                bad += 1
    return float(bad)


def _coordinate_change(rng, n):
    worst = 0.0
    for _ in range(n):
        e = random_triple(rng)
        worst = max(worst, abs(certificate.f_of_matrix(euler.compose(e)) - certificate.fz_of_triple(e)))
    return worst


def _monotonicity(rng, n):
    worst = 0.0
    for _ in range(n):
        b = rng.uniform(-1, 1)
        p = pulse.Pulse(rng.uniform(-5, 5, 10), rng.uniform(0.1, 2.0))
        f = certificate.f_along_trajectory(b, p)
        worst = max(worst, float(np.max(-np.diff(f))), 0.0)
    return worst


def _z_bound(rng, n):
    worst = 0.0
    for d in (1.0, 2.0, 3.0, 7.0):
        bound = certificate.min_z_for_f(d)
        for _ in range(n // 4):
            e = random_triple(rng, z_max=10.0)
            if certificate.fz_of_triple(e) > d:
                worst = max(worst, bound - e.z)
    return max(worst, 0.0)


def _hyperbolic_conversion(rng, n):
    worst = 0.0
    for _ in range(n):
        M = random_hyperbolic(rng)
        P, scale = normal_form.hyperbolic_to_ky(M)
        err = np.linalg.norm(P @ M @ sp2.inv2(P) - math.sqrt(2 * sp2.trace_sq(M)) * sp2.KY)
        worst = max(worst, err / (1 + np.linalg.norm(M)))
    return worst


def _normal_form_soundness(rng, n):
    worst = 0.0
    done = 0
    while done < n:
        system = normal_form.ControlSystem(random_algebra(rng, 3.0), random_algebra(rng, 3.0))
        if not (normal_form.is_unstable(system) and sp2.rank_criterion(system.A, system.B)):
            continue
        rec = normal_form.normalize(system).reconstruct()
        for X, Y in ((rec.A, system.A), (rec.B, system.B)):
            worst = max(worst, float(np.max(np.abs(np.subtract(sp2.to_basis_coords(X), sp2.to_basis_coords(Y))))))
        done += 1
    return worst


def _gradient(rng, n):
    worst = 0.0
    h = 1e-6
    for _ in range(n):
        sys = normal_form.example_system(rng.uniform(-0.99, 0.99))
        T = rng.uniform(0.2, 2.0)
        prob = pulse.PulseProblem(sys, random_symplectic(rng), T)
        u = rng.uniform(-1, 1, prob.Q)
        g = pulse.gradient(prob, pulse.Pulse(u, T))
        for k in range(prob.Q):
            e = np.zeros(prob.Q)
            e[k] = h
            fd = (pulse.objective(prob, pulse.Pulse(u + e, T)) - pulse.objective(prob, pulse.Pulse(u - e, T))) / (2 * h)
            worst = max(worst, abs(g[k] - fd) / (1 + abs(fd)))
    return worst


CHECKS: list[tuple[str, Callable, int, float]] = [
    ("expm one-parameter group", _expm_group, 1000, 1e-10),
    ("expm determinant", _expm_det, 1000, 1e-10),
    ("classify conjugation invariance", _classify_invariance, 1000, 0.5),
    ("trace identity", _trace_identity, 10000, 1e-9),
    ("euler round trip", _euler_round_trip, 10000, 1e-9),
    ("euler reconstruction", _euler_reconstruction, 10000, 1e-10),
    ("euler range containment", _euler_ranges, 8000, 0.5),
    ("certificate coordinate change", _coordinate_change, 10000, 1e-10),
    ("certificate monotonicity", _monotonicity, 100, 1e-9),
    ("z lower bound from f", _z_bound, 20000, 1e-9),
    ("hyperbolic to K_y conjugation", _hyperbolic_conversion, 2000, 1e-10),
    ("normal form reconstruction", _normal_form_soundness, 500, 1e-9),
    ("gradient vs finite differences", _gradient, 20, 1e-6),
]


def verify_suite(seed: int = 0, scale: float = 1.0, echo: Callable[[str], None] | None = print) -> list[CheckResult]:
    """Run every property check; ``scale`` multiplies the sample counts."""
    report = []
    for k, (name, fn, n, limit) in enumerate(CHECKS):
        rng = np.random.default_rng([seed, k])
        samples = max(1, int(n * scale))
        worst = float(fn(rng, samples))
        res = CheckResult(name, worst <= limit, samples, worst, limit)
        report.append(res)
        if echo is not None:
            echo(res.line())
    return report
