"""Reachability certificate for the unstable normal form.

Write a real 2x2 matrix as

    X = [[x1 + x3, x2 + x4], [x4 - x2, x1 - x3]]

and let ``f = (x1 - x4)^2 - (x2 - x3)^2``. Along any trajectory of
``dS/dt = (-K_x + b K_z + u(t) K_y) S`` with ``|b| < 1``, ``f`` starts at
1 and never decreases, so every reachable matrix has ``f >= 1``. In Euler
coordinates the same function reads

    f_z = cos(2 theta) cos(2 phi) - g(z, phi) sin(2 theta).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .euler import EulerTriple
from .sp2 import KX, KY, KZ, as_mat, expm_batch


class XCoords(NamedTuple):
    x1: float
    x2: float
    x3: float
    x4: float

    def matrix(self) -> np.ndarray:
        x1, x2, x3, x4 = self
        return np.array([[x1 + x3, x2 + x4], [x4 - x2, x1 - x3]])


def x_coords(X) -> XCoords:
    X = as_mat(X)
    return XCoords(
        float(0.5 * (X[0, 0] + X[1, 1])),
        float(0.5 * (X[0, 1] - X[1, 0])),
        float(0.5 * (X[0, 0] - X[1, 1])),
        float(0.5 * (X[0, 1] + X[1, 0])),
    )


def _pq(X: np.ndarray) -> tuple[float, float]:
    # p = x1 - x4, q = x2 - x3
    p = 0.5 * (X[0, 0] + X[1, 1] - X[0, 1] - X[1, 0])
    q = 0.5 * (X[0, 1] - X[1, 0] - X[0, 0] + X[1, 1])
    return p, q


def f_of_matrix(X) -> float:
    p, q = _pq(as_mat(X))
    return float(p * p - q * q)


def f_rate(X, b: float) -> float:
    """Time derivative of ``f`` at ``X`` under the normal form with parameter ``b``.

    Equals ``2 b p q + p^2 + q^2`` and does not depend on the control.
    """
    p, q = _pq(as_mat(X))
    return float(2.0 * b * p * q + p * p + q * q)


def g_factor(z: float, phi: float) -> float:
    if z < 1.0:
        raise DomainError(f"g(z, phi) requires z >= 1, got {z}")
    z2 = z * z
    return 0.5 * (z2 + 1.0 / z2) * math.sin(2 * phi) - 0.5 * (z2 - 1.0 / z2)


def fz_of_triple(e: EulerTriple) -> float:
    theta, z, phi = e
    return math.cos(2 * theta) * math.cos(2 * phi) - g_factor(z, phi) * math.sin(2 * theta)


def delta(z: float, phi: float) -> float:
    """``g(z, phi) - sin(2 phi)``; strictly negative for z > 1."""
    return g_factor(z, phi) - math.sin(2 * phi)


def fz_compact(e: EulerTriple) -> float:
    # f_1 = cos 2(theta + phi), so f_z = f_1 - delta sin 2 theta
    theta, z, phi = e
    return math.cos(2 * (theta + phi)) - delta(z, phi) * math.sin(2 * theta)


def min_z_for_f(d: float) -> float:
    """Strict lower bound on ``z`` for any symplectic matrix with ``f_z > d``."""
    if d < 1.0:
        raise DomainError(f"bound holds for d >= 1, got {d}")
    return math.sqrt(0.5 * (d + 1.0))


def f_lower_bound(b: float, tau: float) -> float:
    """Lower bound on ``f`` after normal-form time ``tau``, for any control.

    Since ``2bpq + p^2 + q^2 >= (1 - |b|)(p^2 + q^2) >= (1 - |b|) f``,
    Gronwall gives ``f(tau) >= exp((1 - |b|) tau)``.
    """
    if not abs(b) < 1.0:
        raise DomainError(f"normal form requires |b| < 1, got {b}")
    if tau < 0:
        raise DomainError(f"tau must be non-negative, got {tau}")
    return math.exp((1.0 - abs(b)) * tau)


def sin2theta_sign_check(e: EulerTriple) -> bool:
    """Check that ``f_z > f_1`` only happens when ``z > 1`` and ``sin 2 theta > 0``."""
    fz = fz_of_triple(e)
    f1 = fz_of_triple(EulerTriple(e.theta, 1.0, e.phi))
    if not fz > f1:
        return True
    return e.z > 1.0 and math.sin(2 * e.theta) > 0


def normal_form_generator(b: float, u: float) -> np.ndarray:
    return -KX + b * KZ + u * KY


def trajectory_samples(
    b: float, values, T: float, samples_per_slice: int = 50
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the normal-form trajectory for a piecewise-constant control.

    Returns ``(times, mats)`` with ``mats[k]`` the evolved matrix at
    ``times[k]``; the first sample is the identity at ``t = 0``.
    """
    values = np.asarray(values, dtype=float)
    q = len(values)
    dt = T / q
    h = dt / samples_per_slice
    gens = np.array([normal_form_generator(b, u) for u in values])
    steps = expm_batch(gens, h)
    times = [0.0]
    mats = [np.eye(2)]
    S = np.eye(2)
    for k in range(q):
        for j in range(1, samples_per_slice + 1):
            S = steps[k] @ S
            times.append(k * dt + j * h)
            mats.append(S)
    return np.array(times), np.array(mats)


def f_along_trajectory(b: float, pulse, samples_per_slice: int = 50) -> np.ndarray:
    """Values of ``f`` along the normal-form trajectory driven by ``pulse``.

    ``pulse`` is a :class:`symreach.pulse.Pulse`. The first entry is the
    value at the identity (exactly 1).
    """
    if not abs(b) < 1.0:
        raise DomainError(f"normal form requires |b| < 1, got {b}")
    _, mats = trajectory_samples(b, pulse.values, pulse.T, samples_per_slice)
    p = 0.5 * (mats[:, 0, 0] + mats[:, 1, 1] - mats[:, 0, 1] - mats[:, 1, 0])
    q = 0.5 * (mats[:, 0, 1] - mats[:, 1, 0] - mats[:, 0, 0] + mats[:, 1, 1])
    return p * p - q * q
