"""Unique singular value (Euler / Bloch-Messiah) decomposition on Sp(2, R).

Every ``S`` with unit determinant factors as ``S = R(theta) Z(z) R(phi)``
with ``R`` a rotation and ``Z(z) = diag(1/z, z)``, ``z >= 1``. The factors
are made unique by restricting

    theta in [theta0 - pi, theta0 + pi),   phi in [phi0 - pi/2, phi0 + pi/2)

and, for ``z == 1`` (``S`` itself a rotation), by fixing ``phi = phi0``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .sp2 import as_mat, check_symplectic

# z - 1 at or below this is treated as the degenerate rotation case
DEGENERATE_Z_TOL = 1e-9
# angles this close below an excluded range endpoint are moved to the included one
EDGE_SNAP = 1e-12


class RangeOffsets(NamedTuple):
    theta0: float = 0.0
    phi0: float = math.pi / 2


DEFAULT_OFFSETS = RangeOffsets()


class EulerTriple(NamedTuple):
    theta: float
    z: float
    phi: float


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def squeezer(z: float) -> np.ndarray:
    return np.array([[1.0 / z, 0.0], [0.0, z]])


def wrap_angle(angle: float, lower: float, width: float) -> float:
    """Map ``angle`` into the half-open interval ``[lower, lower + width)``."""
    out = lower + math.fmod(angle - lower, width)
    if out < lower:
        out += width
    if out >= lower + width - EDGE_SNAP:
        # rounding noise just below the excluded endpoint belongs to the included one
        out = lower
    return out


def theta_range(offsets: RangeOffsets = DEFAULT_OFFSETS) -> tuple[float, float]:
    return offsets.theta0 - math.pi, offsets.theta0 + math.pi


def phi_range(offsets: RangeOffsets = DEFAULT_OFFSETS) -> tuple[float, float]:
    return offsets.phi0 - math.pi / 2, offsets.phi0 + math.pi / 2


def in_ranges(e: EulerTriple, offsets: RangeOffsets = DEFAULT_OFFSETS) -> bool:
    tlo, thi = theta_range(offsets)
    plo, phi_hi = phi_range(offsets)
    return tlo <= e.theta < thi and plo <= e.phi < phi_hi and e.z >= 1.0


def decompose(S, offsets: RangeOffsets = DEFAULT_OFFSETS) -> EulerTriple:
    """Return the unique ``(theta, z, phi)`` with ``S = R(theta) Z(z) R(phi)``.

    ``S`` is split into its conformal part ``r1 R(theta + phi)`` and its
    anti-conformal part ``r2 [[-cos g, sin g], [sin g, cos g]]`` with
    ``g = phi - theta``. Then ``r1 = (z + 1/z)/2`` and ``r2 = (z - 1/z)/2``,
    so ``z = r1 + r2`` is always the larger singular value.

    Raises
    ------
    NotSymplecticError
        If ``det S`` is not 1 within tolerance.
    """
    S = check_symplectic(S)
    tlo, _ = theta_range(offsets)
    plo, _ = phi_range(offsets)

    e = 0.5 * (S[0, 0] + S[1, 1])
    f = 0.5 * (S[1, 0] - S[0, 1])
    h = 0.5 * (S[0, 0] - S[1, 1])
    g = 0.5 * (S[0, 1] + S[1, 0])
    r1 = math.hypot(e, f)
    r2 = math.hypot(h, g)
    z = r1 + r2
    total = math.atan2(f, e)

    if z - 1.0 <= DEGENERATE_Z_TOL:
        phi = offsets.phi0
        theta = wrap_angle(total - phi, tlo, 2 * math.pi)
        return EulerTriple(theta, 1.0, phi)

    diff = math.atan2(g, -h)
    theta = 0.5 * (total - diff)
    phi = 0.5 * (total + diff)
    # solutions are (theta + n pi, phi + m pi) with n, m of equal parity
    m = math.floor((phi - plo) / math.pi)
    # rounding can leave phi - m pi just outside [plo, plo + pi)
    if phi - m * math.pi >= plo + math.pi - EDGE_SNAP:
        m += 1
    elif phi - m * math.pi < plo:
        m -= 1
    phi = max(phi - m * math.pi, plo)
    theta = wrap_angle(theta - m * math.pi, tlo, 2 * math.pi)
    return EulerTriple(theta, z, phi)


def compose(e: EulerTriple) -> np.ndarray:
    theta, z, phi = e
    if z < 1.0:
        raise ValueError(f"z must be >= 1, got {z}")
    return rotation(theta) @ squeezer(z) @ rotation(phi)


def identity_limit_triple() -> EulerTriple:
    """Decomposition of the identity singled out as the t -> 0 limit of
    ``exp([[0, -1], [-1, 0]] t)``.

    This differs from ``decompose(I)``, which applies the generic
    ``phi = phi0`` convention.
    """
    return EulerTriple(-3 * math.pi / 4, 1.0, 3 * math.pi / 4)


def singular_values(S) -> tuple[float, float]:
    """Singular values of a 2x2 matrix from the eigenvalues of S^T S."""
    S = as_mat(S)
    G = S.T @ S
    tr = G[0, 0] + G[1, 1]
    det = G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]
    disc = math.sqrt(max(0.25 * tr * tr - det, 0.0))
    big = 0.5 * tr + disc
    small = det / big if big > 0 else 0.0
    return math.sqrt(big), math.sqrt(max(small, 0.0))
