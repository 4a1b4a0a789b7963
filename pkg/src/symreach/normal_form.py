"""Reduction of an unstable single-mode control system to its normal form.

A system ``dS/dt = (A + u B) S`` whose accessible generators ``A + v B``
are all hyperbolic is symplectically similar to

    dS/dtau = (-K_x + b K_z + v(tau) K_y) S,   |b| < 1.

The reduction conjugates ``B`` onto ``K_y``, absorbs the ``K_y`` part of
the drift into the control, rescales time so the ``K_x`` coefficient has
modulus one and, when that coefficient is ``+1``, conjugates by ``Omega``.
Conjugation by ``Omega`` is a rotation by a quarter turn: it negates
``K_x`` and ``K_y`` and fixes ``K_z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotHyperbolicError, NotUnstableError, RankCriterionError
from .sp2 import (
    KX,
    KY,
    KZ,
    OMEGA,
    StabilityClass,
    check_traceless,
    classify,
    expm,
    inv2,
    rank_criterion,
    to_basis_coords,
    trace_sq,
)

HYPERBOLIC_GUARD = 1e-9


@dataclass(frozen=True)
class ControlSystem:
    """Drift ``A`` and control ``B`` of ``dS/dt = (A + u(t) B) S``."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", check_traceless(self.A))
        object.__setattr__(self, "B", check_traceless(self.B))

    def generator(self, u: float) -> np.ndarray:
        return self.A + u * self.B


def example_system(c: float) -> ControlSystem:
    """Drift and control built from the squeezing Hamiltonians

    ``H_A = diag(1 - c, -1 - c)`` and ``H_B = [[0, -1], [-1, 0]]``.

    The drift is hyperbolic for ``|c| < 1``, parabolic at ``|c| = 1`` and
    elliptic beyond.
    """
    H_A = np.array([[1.0 - c, 0.0], [0.0, -c - 1.0]])
    H_B = np.array([[0.0, -1.0], [-1.0, 0.0]])
    return ControlSystem(OMEGA @ H_A, OMEGA @ H_B)


@dataclass(frozen=True)
class NormalForm:
    """Result of :func:`normalize`.

    With ``sign = -1`` when the Omega conjugation was applied and ``+1``
    otherwise, the original and normal-form systems are related by

        tau = time_scale * t
        v   = sign * (u_offset + u_scale * u) / time_scale
        P S(t) P^-1 = S_nf(tau)
    """

    b: float
    P: np.ndarray
    time_scale: float
    u_offset: float
    u_scale: float
    time_reversed: bool

    @property
    def sign(self) -> float:
        return -1.0 if self.time_reversed else 1.0

    def to_normal_control(self, u):
        return self.sign * (self.u_offset + self.u_scale * np.asarray(u, dtype=float)) / self.time_scale

    def from_normal_control(self, v):
        return (self.sign * self.time_scale * np.asarray(v, dtype=float) - self.u_offset) / self.u_scale

    def to_normal_time(self, t):
        return self.time_scale * t

    def conjugate(self, S) -> np.ndarray:
        """Map a matrix of the original system into the normal-form frame."""
        return self.P @ np.asarray(S) @ inv2(self.P)

    def reconstruct(self) -> ControlSystem:
        """Recover ``(A, B)`` from the recorded transformation."""
        Pinv = inv2(self.P)
        A_nf = self.time_scale * (-KX + self.b * KZ) + self.sign * self.u_offset * KY
        B_nf = self.sign * self.u_scale * KY
        return ControlSystem(Pinv @ A_nf @ self.P, Pinv @ B_nf @ self.P)


def is_unstable(sys: ControlSystem) -> bool:
    """True iff ``Tr[(A + vB)^2] > 0`` for every real ``v``.

    The quadratic ``Tr[B^2] v^2 + 2 Tr[AB] v + Tr[A^2]`` must have positive
    leading and constant terms and a negative discriminant.
    """
    ta = trace_sq(sys.A)
    tb = trace_sq(sys.B)
    tab = float(np.trace(sys.A @ sys.B))
    return ta > 0 and tb > 0 and tab * tab - ta * tb < 0


def hyperbolic_to_ky(M) -> tuple[np.ndarray, float]:
    """Find symplectic ``P`` with ``P M P^-1 = sqrt(2 Tr[M^2]) K_y``.

    ``P = exp(beta K_x) exp(alpha K_z)`` where, for ``M = x K_x + y K_y + z K_z``,
    ``(sin alpha, cos alpha) = (x, y) / sqrt(x^2 + y^2)`` and
    ``(sinh beta, cosh beta) = (z, sqrt(x^2 + y^2)) / sqrt(x^2 + y^2 - z^2)``.
    """
    M = check_traceless(M)
    x, y, z = to_basis_coords(M)
    kappa_sq = x * x + y * y - z * z
    norm = float(np.linalg.norm(M))
    if classify(M) is not StabilityClass.HYPERBOLIC or kappa_sq <= 0:
        raise NotHyperbolicError("generator is not hyperbolic")
    kappa = math.sqrt(kappa_sq)
    if kappa < HYPERBOLIC_GUARD * norm:
        raise NotHyperbolicError("generator too close to parabolic for a stable conjugation")
    alpha = math.atan2(x, y)
    beta = math.asinh(z / kappa)
    P = expm(KX, beta) @ expm(KZ, alpha)
    return P, kappa


def normalize(sys: ControlSystem) -> NormalForm:
    if not rank_criterion(sys.A, sys.B):
        raise RankCriterionError("A, B and [A, B] do not generate sp(2,R)")
    if not is_unstable(sys):
        raise NotUnstableError("an accessible generator A + vB is not hyperbolic")

    P, scale_b = hyperbolic_to_ky(sys.B)
    Pinv = inv2(P)
    bx, by, bz = to_basis_coords(P @ sys.A @ Pinv)
    time_scale = abs(bx)
    b = bz / time_scale
    reversed_ = bx > 0
    if reversed_:
        P = OMEGA @ P
    return NormalForm(
        b=b,
        P=P,
        time_scale=time_scale,
        u_offset=by,
        u_scale=scale_b,
        time_reversed=reversed_,
    )
