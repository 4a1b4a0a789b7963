"""Closed-form arithmetic on sp(2, R) and Sp(2, R).

Algebra elements and group elements are plain ``(2, 2)`` float arrays.
Everything here is 2x2 closed form; no general-dimension linear algebra
is used.

The basis of sp(2, R) is

    K_x = 1/2 [[0, 1], [1, 0]]
    K_y = 1/2 [[-1, 0], [0, 1]]
    K_z = 1/2 [[0, -1], [1, 0]]

with ``[K_x, K_y] = -K_z``, ``[K_y, K_z] = K_x`` and ``[K_z, K_x] = K_y``.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from .errors import NonTracelessError, NotSymplecticError

KX = 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]])
KY = 0.5 * np.array([[-1.0, 0.0], [0.0, 1.0]])
KZ = 0.5 * np.array([[0.0, -1.0], [1.0, 0.0]])
OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])
IDENTITY = np.eye(2)

TRACE_TOL = 1e-12
DET_RTOL = 1e-10
PARABOLIC_TOL = 1e-12
# below this value of |det M| t^2 the sin/sinh ratio is evaluated by series
SERIES_THRESHOLD = 1e-8


class StabilityClass(str, enum.Enum):
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"


class BasisCoords(NamedTuple):
    """Coefficients of ``x K_x + y K_y + z K_z``."""

    x: float
    y: float
    z: float

    def matrix(self) -> np.ndarray:
        return from_basis_coords(self.x, self.y, self.z)


def as_mat(m) -> np.ndarray:
    """Coerce ``m`` to a finite float ``(2, 2)`` array.

    Accepts anything ``np.asarray`` understands, including a flat sequence
    of four entries in row-major order.
    """
    arr = np.asarray(m, dtype=float)
    if arr.shape == (4,):
        arr = arr.reshape(2, 2)
    if arr.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def check_traceless(M, tol: float = TRACE_TOL) -> np.ndarray:
    M = as_mat(M)
    tr = M[0, 0] + M[1, 1]
    if abs(tr) > tol * (1.0 + np.linalg.norm(M)):
        raise NonTracelessError(f"trace {tr:.3e} is not zero; not an element of sp(2,R)")
    return M


def check_symplectic(S, rtol: float = DET_RTOL) -> np.ndarray:
    S = as_mat(S)
    det = S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]
    # det is quadratic in the entries, so its rounding error scales with |S|^2
    if abs(det - 1.0) > rtol * max(1.0, float(np.sum(S * S))):
        raise NotSymplecticError(f"determinant {float(det):.12g} differs from 1")
    return S


def det2(M: np.ndarray) -> float:
    return float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])


def to_basis_coords(M) -> BasisCoords:
    M = check_traceless(M)
    x = M[1, 0] + M[0, 1]
    z = M[1, 0] - M[0, 1]
    # average the two diagonal readings of y so tiny trace noise cancels
    y = M[1, 1] - M[0, 0]
    return BasisCoords(float(x), float(y), float(z))


def from_basis_coords(x: float, y: float, z: float) -> np.ndarray:
    return np.array([[-0.5 * y, 0.5 * (x - z)], [0.5 * (x + z), 0.5 * y]])


def trace_sq(M) -> float:
    """Tr[M^2], equal to (x^2 + y^2 - z^2) / 2 in basis coordinates."""
    M = as_mat(M)
    return float(np.sum(M * M.T))


def classify(M) -> StabilityClass:
    """Classify an algebra element by the sign of Tr[M^2].

    The parabolic band is scale aware: ``|Tr[M^2]| <= 1e-12 (1 + |M|_F^2)``.
    """
    M = check_traceless(M)
    tsq = trace_sq(M)
    if abs(tsq) <= PARABOLIC_TOL * (1.0 + float(np.sum(M * M))):
        return StabilityClass.PARABOLIC
    return StabilityClass.HYPERBOLIC if tsq > 0 else StabilityClass.ELLIPTIC


def _ratio_series(s: float, t: float) -> tuple[float, float]:
    # cosh(sqrt(s)) and t * sinh(sqrt(s)) / sqrt(s) for small |s|, any sign
    c = 0.0
    r = 0.0
    term_c = 1.0
    term_r = 1.0
    for k in range(6):
        c += term_c
        r += term_r
        term_c *= s / ((2 * k + 1) * (2 * k + 2))
        term_r *= s / ((2 * k + 2) * (2 * k + 3))
    return c, t * r


def expm(M, t: float = 1.0) -> np.ndarray:
    """exp(M t) for traceless 2x2 ``M`` via Cayley-Hamilton.

    Uses ``M^2 = -det(M) I``, which gives

    * elliptic:   cos(w t) I + sin(w t)/w M,    w = sqrt(det M)
    * hyperbolic: cosh(k t) I + sinh(k t)/k M,  k = sqrt(-det M)
    * parabolic:  I + M t
    """
    M = check_traceless(M)
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    d = det2(M)
    if abs(d) * t * t < SERIES_THRESHOLD:
        c, s = _ratio_series(-d * t * t, t)
    elif d > 0:
        w = math.sqrt(d)
        c, s = math.cos(w * t), math.sin(w * t) / w
    else:
        k = math.sqrt(-d)
        c, s = math.cosh(k * t), math.sinh(k * t) / k
    return c * IDENTITY + s * M


def commutator(M, N) -> np.ndarray:
    M = check_traceless(M)
    N = check_traceless(N)
    return M @ N - N @ M


def trace_identity_residual(M, N) -> float:
    """Tr[[M,N]^2] - 2 (Tr[MN]^2 - Tr[M^2] Tr[N^2]); zero on sp(2, R).

    Expanding both sides in matrix entries gives the same polynomial.
    """
    M = check_traceless(M)
    N = check_traceless(N)
    C = M @ N - N @ M
    lhs = trace_sq(C)
    tr_mn = float(np.trace(M @ N))
    rhs = 2.0 * (tr_mn**2 - trace_sq(N) * trace_sq(M))
    return lhs - rhs


def rank_criterion(A, B, rtol: float = 1e-10) -> bool:
    """True iff A, B and [A, B] are linearly independent (so span sp(2, R))."""
    a = np.array(to_basis_coords(A))
    b = np.array(to_basis_coords(B))
    c = np.array(to_basis_coords(commutator(A, B)))
    det = float(np.dot(a, np.cross(b, c)))
    scale = (np.linalg.norm(a) * np.linalg.norm(b)) ** 2
    return scale > 0 and abs(det) > rtol * scale


def expm_batch(Ms: np.ndarray, t) -> np.ndarray:
    """Vectorised :func:`expm` over a stack of traceless ``(n, 2, 2)`` generators.

    ``t`` is a scalar or a length-``n`` array of times. Tracelessness is not
    re-checked; callers build the stack from validated generators.
    """
    Ms = np.asarray(Ms, dtype=float)
    t = np.broadcast_to(np.asarray(t, dtype=float), Ms.shape[:-2])
    d = Ms[..., 0, 0] * Ms[..., 1, 1] - Ms[..., 0, 1] * Ms[..., 1, 0]
    arg = d * t * t
    small = np.abs(arg) < SERIES_THRESHOLD
    ell = (d > 0) & ~small
    hyp = (d < 0) & ~small

    c = np.empty_like(d)
    s = np.empty_like(d)
    w = np.sqrt(np.where(ell, d, 1.0))
    k = np.sqrt(np.where(hyp, -d, 1.0))
    c[ell] = np.cos(w[ell] * t[ell])
    s[ell] = np.sin(w[ell] * t[ell]) / w[ell]
    c[hyp] = np.cosh(k[hyp] * t[hyp])
    s[hyp] = np.sinh(k[hyp] * t[hyp]) / k[hyp]
    if np.any(small):
        x = -arg[small]
        ts = t[small]
        cs = np.zeros_like(x)
        rs = np.zeros_like(x)
        tc = np.ones_like(x)
        tr = np.ones_like(x)
        for j in range(6):
            cs += tc
            rs += tr
            tc = tc * x / ((2 * j + 1) * (2 * j + 2))
            tr = tr * x / ((2 * j + 2) * (2 * j + 3))
        c[small] = cs
        s[small] = ts * rs
    out = s[..., None, None] * Ms
    out[..., 0, 0] += c
    out[..., 1, 1] += c
    return out


def inv2(M) -> np.ndarray:
    M = as_mat(M)
    d = det2(M)
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / d
