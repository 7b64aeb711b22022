"""Two-mode Gaussian states, Gaussian channels, and entanglement measures.

Conventions used throughout the package:

* hbar = 1, so the vacuum quadrature variance is 1/2 and V_vac = I/2.
* Quadratures are ordered (x1, p1, x2, p2); two-mode covariance matrices
  therefore split into 2x2 blocks per mode.
* Squeezing in dB is 10*log10(e**(2r)), loss in dB is -10*log10(tau).

All functions are pure and operate on immutable values, so they are safe
to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "OMEGA",
    "Z2",
    "VACUUM_VARIANCE",
    "CovMat2",
    "BalancedForm",
    "TwoModeChannel",
    "OneModeChannel",
    "SqueezeParam",
    "make_tms",
    "apply_two_mode",
    "apply_one_mode",
    "loss_channel",
    "min_sympl_eig_pt",
    "log_negativity",
    "physicality_check",
    "balanced_physicality_check",
    "squeeze_db_to_r",
    "squeeze_r_to_db",
]

VACUUM_VARIANCE = 0.5

#: Pauli-z block used in the off-diagonal of balanced-correlated states.
Z2 = np.diag([1.0, -1.0])

#: Two-mode symplectic form for the (x1, p1, x2, p2) ordering.
OMEGA = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)

_SYMMETRY_TOL = 1e-12
_PHYSICALITY_TOL = 1e-10


def squeeze_db_to_r(db: float) -> float:
    """Convert squeezing in dB to the dimensionless squeezing parameter."""
    return db * math.log(10.0) / 20.0


def squeeze_r_to_db(r: float) -> float:
    """Convert the dimensionless squeezing parameter to dB."""
    return 20.0 * r / math.log(10.0)


@dataclass(frozen=True)
class SqueezeParam:
    """Dimensionless two-mode squeezing parameter, r >= 0."""

    r: float

    def __post_init__(self):
        if not (self.r >= 0.0):
            raise ValueError(f"squeezing parameter must be >= 0, got {self.r}")

    @classmethod
    def from_db(cls, db: float) -> "SqueezeParam":
        return cls(squeeze_db_to_r(db))

    @property
    def db(self) -> float:
        return squeeze_r_to_db(self.r)


def _as_r(r) -> float:
    """Accept either a SqueezeParam or a bare float."""
    value = r.r if isinstance(r, SqueezeParam) else float(r)
    if not (value >= 0.0):
        raise ValueError(f"squeezing parameter must be >= 0, got {value}")
    return value


class CovMat2:
    """4x4 real symmetric covariance matrix of a two-mode Gaussian state.

    Construction only enforces symmetry; physicality (the uncertainty
    relation) is a separate check because unphysical matrices are useful
    as negative test inputs.
    """

    __slots__ = ("m",)

    def __init__(self, m):
        m = np.asarray(m, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"covariance matrix must be 4x4, got {m.shape}")
        if np.max(np.abs(m - m.T)) > _SYMMETRY_TOL:
            raise ValueError("covariance matrix is not symmetric within 1e-12")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    def __setattr__(self, name, value):
        raise AttributeError("CovMat2 is immutable")

    def __repr__(self):
        return f"CovMat2({self.m!r})"

    def block(self, i: int, j: int) -> np.ndarray:
        """Return the 2x2 block for modes (i, j) with i, j in {1, 2}."""
        return self.m[2 * (i - 1) : 2 * i, 2 * (j - 1) : 2 * j]


class BalancedForm(NamedTuple):
    """(a, b, c) triple of a balanced-correlated two-mode state.

    The covariance matrix is a*I2 and b*I2 on the diagonal blocks and
    c*Z2 on the off-diagonal block.  Mode 1 carries variance ``a``.
    """

    a: float
    b: float
    c: float

    def to_cov(self) -> CovMat2:
        m = np.zeros((4, 4))
        m[0, 0] = m[1, 1] = self.a
        m[2, 2] = m[3, 3] = self.b
        m[0, 2] = m[2, 0] = self.c
        m[1, 3] = m[3, 1] = -self.c
        return CovMat2(m)

    @classmethod
    def from_cov(cls, v: CovMat2, tol: float = 1e-10) -> "BalancedForm":
        """Extract (a, b, c), requiring the matrix to be in balanced form.

        The returned fields are read directly from the matrix entries so a
        to_cov/from_cov round trip is exact.
        """
        m = v.m
        a, b, c = m[0, 0], m[2, 2], m[0, 2]
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[1, 1] = a
        expected[2, 2] = expected[3, 3] = b
        expected[0, 2] = expected[2, 0] = c
        expected[1, 3] = expected[3, 1] = -c
        scale = max(1.0, abs(a), abs(b), abs(c))
        if np.max(np.abs(m - expected)) > tol * scale:
            raise ValueError("covariance matrix is not balanced-correlated")
        return cls(a, b, c)


@dataclass(frozen=True)
class TwoModeChannel:
    """Gaussian channel acting on covariance matrices as V -> T V T^t + N."""

    T: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.T, dtype=float)
        N = np.asarray(self.N, dtype=float)
        if T.shape != (4, 4) or N.shape != (4, 4):
            raise ValueError("two-mode channel matrices must be 4x4")
        if np.max(np.abs(N - N.T)) > _SYMMETRY_TOL:
            raise ValueError("channel noise matrix must be symmetric")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "N", N)


@dataclass(frozen=True)
class OneModeChannel:
    """Single-mode Gaussian channel, same convention at 2x2."""

    T: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.T, dtype=float)
        N = np.asarray(self.N, dtype=float)
        if T.shape != (2, 2) or N.shape != (2, 2):
            raise ValueError("one-mode channel matrices must be 2x2")
        if np.max(np.abs(N - N.T)) > _SYMMETRY_TOL:
            raise ValueError("channel noise matrix must be symmetric")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "N", N)


def make_tms(r) -> CovMat2:
    """Covariance matrix of a two-mode squeezed vacuum state.

    Diagonal blocks are cosh(2r)/2 * I2, off-diagonal sinh(2r)/2 * Z2.
    r = 0 gives the vacuum, I/2.
    """
    rv = _as_r(r)
    ch = math.cosh(2.0 * rv) / 2.0
    sh = math.sinh(2.0 * rv) / 2.0
    return BalancedForm(ch, ch, sh).to_cov()


def apply_two_mode(ch: TwoModeChannel, v: CovMat2) -> CovMat2:
    """Apply a two-mode channel: T V T^t + N, re-symmetrized.

    The average with the transpose removes round-off asymmetry so long
    channel compositions stay exactly symmetric.
    """
    out = ch.T @ v.m @ ch.T.T + ch.N
    return CovMat2((out + out.T) / 2.0)


def apply_one_mode(ch: OneModeChannel, v: CovMat2, mode: int) -> CovMat2:
    """Apply a one-mode channel to mode 1 or 2 of a two-mode state.

    The channel is embedded as a direct sum with the identity on the
    untouched mode (and zero added noise there).
    """
    if mode not in (1, 2):
        raise ValueError(f"mode index must be 1 or 2, got {mode}")
    T = np.eye(4)
    N = np.zeros((4, 4))
    s = slice(0, 2) if mode == 1 else slice(2, 4)
    T[s, s] = ch.T
    N[s, s] = ch.N
    return apply_two_mode(TwoModeChannel(T, N), v)


def loss_channel(tau: float) -> OneModeChannel:
    """Pure-loss channel with transmissivity tau in [0, 1]."""
    if not (0.0 <= tau <= 1.0):
        raise ValueError(f"transmissivity must be in [0, 1], got {tau}")
    t = math.sqrt(tau)
    return OneModeChannel(t * np.eye(2), ((1.0 - tau) / 2.0) * np.eye(2))


def min_sympl_eig_pt(s: BalancedForm) -> float:
    """Minimum symplectic eigenvalue of the partially transposed state.

    For balanced-correlated states this is
    (a + b - sqrt((a - b)**2 + 4 c**2)) / 2; the state is entangled
    if and only if the result is below 1/2.
    """
    a, b, c = s
    return (a + b - math.sqrt((a - b) ** 2 + 4.0 * c * c)) / 2.0


def log_negativity(s: BalancedForm) -> float:
    """Logarithmic negativity max{0, -log2(2 nu)} of a balanced state."""
    nu = min_sympl_eig_pt(s)
    if nu >= 0.5:
        return 0.0
    if nu <= 0.0:
        raise ValueError(
            f"nonpositive partial-transpose eigenvalue {nu}: state {s} is unphysical"
        )
    return -math.log2(2.0 * nu)


def physicality_check(v: CovMat2, tol: float = _PHYSICALITY_TOL) -> bool:
    """Whether v satisfies the bosonic uncertainty relation.

    Checks that all eigenvalues of the Hermitian matrix v + (i/2) Omega
    are >= -tol.
    """
    h = v.m + 0.5j * OMEGA
    return bool(np.linalg.eigvalsh(h).min() >= -tol)


def balanced_physicality_check(s: BalancedForm, tol: float = _PHYSICALITY_TOL) -> bool:
    """Closed-form physicality test for balanced-correlated states.

    Equivalent to physicality_check on the expanded covariance matrix:
    both marginals at or above vacuum, positive definiteness, and the
    minimum symplectic eigenvalue at or above 1/2.
    """
    a, b, c = s
    if a < 0.5 - tol or b < 0.5 - tol:
        return False
    x = a * b - c * c
    if x <= 0.0:
        return False
    # nu_minus >= 1/2 with Delta = a^2 + b^2 - 2c^2 and det V = x^2 requires
    # Delta - 1/2 >= sqrt(Delta^2 - 4 x^2), i.e. both conditions below
    delta = a * a + b * b - 2.0 * c * c
    if delta < 0.5 - tol:
        return False
    return 4.0 * x * x + 0.25 >= delta - tol
