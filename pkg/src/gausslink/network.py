"""Microwave-microwave entanglement distribution networks.

A network uses two transducers to entangle two remote microwave modes
over an optical link, either by downconverting the optical side(s) of a
microwave-optical resource state or by an EPR measurement (balanced
beamsplitter plus opposite-quadrature homodynes) on two optical modes.
The measurement is modeled purely as the Gaussian conditional update of
the covariance matrix; measurement outcomes and the conditional
displacements they steer only shift first moments, which never enter
covariance matrices.

Topology count: 4 downconversion + 4 symmetric swapping + 6 asymmetric
swapping = 14.  External optical loss tau_e can be distributed over a
topology's optical modes; the available slots are

* down(EO): the two arms feeding the downconverters,
* other downconversion: the single flying optical mode,
* swapping: the two measured optical modes, plus, for asymmetric
  swapping involving an EO state, that state's pre-downconversion mode.

Slot shares multiply to tau_e.  Defaults put the loss where it hurts
least: split equally for down(EO), all on one measured arm for
swapping, and all on the EO pre-downconversion mode when that slot
exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import BalancedForm, OneModeChannel, SqueezeParam, _as_r, log_negativity
from .sources import MoKind, _mo_excess
from .transducer import (
    DeviceCaps,
    STRICT_MARGIN,
    UnstableOperatingPointError,
    _blue_cap,
    _conversion_t_mu,
)

__all__ = [
    "Topology",
    "NetworkConfig",
    "DOWN_TOPOLOGIES",
    "SYMMETRIC_SWAP_TOPOLOGIES",
    "ASYMMETRIC_SWAP_TOPOLOGIES",
    "SYMMETRIC_TOPOLOGIES",
    "ALL_TOPOLOGIES",
    "downconvert_mm",
    "swap",
    "mm_state",
    "mm_log_negativity",
    "loss_slot_count",
    "default_loss_split",
]

_KIND_ORDER = {MoKind.EO: 0, MoKind.EM: 1, MoKind.IO: 2, MoKind.IM: 3}


@dataclass(frozen=True)
class Topology:
    """A network topology: scheme plus the MO resource kind(s).

    Downconversion topologies carry one kind; swapping topologies carry
    the (unordered) pair of kinds feeding the measurement.
    """

    scheme: str
    kinds: tuple[MoKind, ...]

    def __post_init__(self):
        if self.scheme not in ("down", "swap"):
            raise ValueError(f"scheme must be 'down' or 'swap', got {self.scheme!r}")
        n = len(self.kinds)
        if self.scheme == "down" and n != 1:
            raise ValueError("downconversion topologies take exactly one kind")
        if self.scheme == "swap":
            if n != 2:
                raise ValueError("swapping topologies take exactly two kinds")
            ordered = tuple(sorted(self.kinds, key=_KIND_ORDER.get))
            object.__setattr__(self, "kinds", ordered)

    @classmethod
    def down(cls, kind: MoKind) -> "Topology":
        return cls("down", (kind,))

    @classmethod
    def swap_sym(cls, kind: MoKind) -> "Topology":
        return cls("swap", (kind, kind))

    @classmethod
    def swap_asym(cls, kind1: MoKind, kind2: MoKind) -> "Topology":
        if kind1 == kind2:
            raise ValueError("asymmetric swapping needs two distinct kinds")
        return cls("swap", (kind1, kind2))

    @property
    def is_symmetric(self) -> bool:
        return self.scheme == "down" or self.kinds[0] == self.kinds[1]

    @property
    def label(self) -> str:
        if self.scheme == "down":
            return f"{self.kinds[0].name}-down"
        if self.is_symmetric:
            return f"{self.kinds[0].name}-swap"
        return f"{self.kinds[0].name}+{self.kinds[1].name}-swap"


DOWN_TOPOLOGIES = tuple(Topology.down(k) for k in MoKind)
SYMMETRIC_SWAP_TOPOLOGIES = tuple(Topology.swap_sym(k) for k in MoKind)
ASYMMETRIC_SWAP_TOPOLOGIES = tuple(
    Topology.swap_asym(k1, k2)
    for i, k1 in enumerate(MoKind)
    for k2 in list(MoKind)[i + 1 :]
)
SYMMETRIC_TOPOLOGIES = DOWN_TOPOLOGIES + SYMMETRIC_SWAP_TOPOLOGIES
ALL_TOPOLOGIES = SYMMETRIC_TOPOLOGIES + ASYMMETRIC_SWAP_TOPOLOGIES


def loss_slot_count(t: Topology) -> int:
    """Number of optical modes over which tau_e may be distributed."""
    if t.scheme == "down":
        return 2 if t.kinds[0] is MoKind.EO else 1
    return 2 + sum(1 for k in t.kinds if k is MoKind.EO and not t.is_symmetric)


def default_loss_split(t: Topology, tau_e: float) -> tuple[float, ...]:
    """Loss placement used when a config does not specify one."""
    n = loss_slot_count(t)
    if t.scheme == "down":
        if n == 2:
            s = math.sqrt(tau_e)
            return (s, s)
        return (tau_e,)
    if n == 3:
        return (1.0, 1.0, tau_e)
    return (tau_e, 1.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Operating point of a two-transducer network.

    Cooperativities are per transducer; transducer 1 owns the first MO
    state (or, for down(EO), the first arm) and transducer 2 the second
    MO state or the downconverter.  loss_split is one share per optical
    slot of the topology (see default_loss_split); None picks the
    default placement.
    """

    caps: DeviceCaps
    c_a1: float
    c_b1: float
    c_a2: float
    c_b2: float
    r: SqueezeParam | float = 0.0
    tau_e: float = 1.0
    loss_split: tuple[float, ...] | None = None


def downconvert_mm(mo: BalancedForm, conv: OneModeChannel) -> BalancedForm:
    """Downconvert the optical mode (mode 1) of an MO state.

    The channel must be isotropic (T = t I, N = n I), which holds for
    every conversion and loss channel in this package.
    """
    T, N = conv.T, conv.N
    t, n = T[0, 0], N[0, 0]
    if (
        abs(T[0, 1]) > 1e-14
        or abs(T[1, 0]) > 1e-14
        or abs(T[1, 1] - t) > 1e-14
        or abs(N[0, 1]) > 1e-14
        or abs(N[1, 1] - n) > 1e-14
    ):
        raise ValueError("downconvert_mm requires an isotropic one-mode channel")
    return BalancedForm(t * t * mo.a + n, mo.b, t * mo.c)


def swap(mo1: BalancedForm, mo2: BalancedForm) -> BalancedForm:
    """EPR measurement on the optical modes (mode 1) of two MO states.

    Returns the conditional microwave-microwave state; for identical
    inputs this reduces to (b - c^2/2a, b - c^2/2a, -c^2/2a).
    """
    asum = mo1.a + mo2.a
    return BalancedForm(
        mo1.b - mo1.c * mo1.c / asum,
        mo2.b - mo2.c * mo2.c / asum,
        -mo1.c * mo2.c / asum,
    )


def _stable_intrinsic(kind: MoKind, c_a, c_b, caps: DeviceCaps) -> bool:
    rt = caps.rates
    if kind is MoKind.IO:
        return c_a < _blue_cap(c_b, rt.kappa_a, rt.kappa_b, rt.gamma_m) - STRICT_MARGIN
    if kind is MoKind.IM:
        return c_b < _blue_cap(c_a, rt.kappa_b, rt.kappa_a, rt.gamma_m) - STRICT_MARGIN
    return True


def _mm_excess(
    t: Topology,
    caps: DeviceCaps,
    n_th: float,
    r: float,
    cs: tuple[float, float, float, float],
    split: tuple[float, ...],
):
    """Final MM state as (A, B, c, P), or None for an unstable source.

    A and B are variances in excess of vacuum and P = A*B - c*c is
    tracked through every stage in a cancellation-free form (its sign
    decides entanglement).  No cap validation: this is the hot path
    shared by the public API and the optimizers.

    Exact update rules: loss tau on the measured mode scales (A, c**2, P)
    by tau; an isotropic conversion (t, mu) on mode 1 maps A -> t**2 A + mu
    and P -> t**2 P + mu B; the EPR measurement maps P1, P2 to
    (B1 B2 + P1 B2 + P2 B1) / (1 + A1 + A2).
    """
    c_a1, c_b1, c_a2, c_b2 = cs
    tau_a, tau_b = caps.tau_a, caps.tau_b

    if t.scheme == "down":
        kind = t.kinds[0]
        if kind is MoKind.EO:
            t1, m1 = _conversion_t_mu("down", c_a1, c_b1, tau_a * split[0], tau_b, n_th)
            t2, m2 = _conversion_t_mu("down", c_a2, c_b2, tau_a * split[1], tau_b, n_th)
            sh2 = math.sinh(r) ** 2
            sh = math.sinh(2.0 * r) / 2.0
            # squeezed pair: A0 = B0 = sinh(r)^2, c0 = sinh(2r)/2, P0 = -sinh(r)^2
            A = t1 * t1 * sh2 + m1
            P = t1 * t1 * (-sh2) + m1 * sh2
            B = t2 * t2 * sh2 + m2
            P = t2 * t2 * P + m2 * A
            return (A, B, t1 * t2 * sh, P)
        if not _stable_intrinsic(kind, c_a1, c_b1, caps):
            return None
        A0, B0, c0, P0 = _mo_excess(kind, c_a1, c_b1, tau_a, tau_b, n_th, r)
        td, md = _conversion_t_mu("down", c_a2, c_b2, tau_a * split[0], tau_b, n_th)
        return (td * td * A0 + md, B0, td * c0, td * td * P0 + md * B0)

    k1, k2 = t.kinds
    eo_share = split[2] if len(split) == 3 else 1.0
    states = []
    for kind, c_a, c_b, tau_m in ((k1, c_a1, c_b1, split[0]), (k2, c_a2, c_b2, split[1])):
        if not _stable_intrinsic(kind, c_a, c_b, caps):
            return None
        ta = tau_a * eo_share if kind is MoKind.EO and len(split) == 3 else tau_a
        A, B, c, P = _mo_excess(kind, c_a, c_b, ta, tau_b, n_th, r)
        states.append((tau_m * A, B, math.sqrt(tau_m) * c, tau_m * P))
    (A1, B1, c1, P1), (A2, B2, c2, P2) = states
    den = 1.0 + A1 + A2
    return (
        B1 - c1 * c1 / den,
        B2 - c2 * c2 / den,
        -c1 * c2 / den,
        (B1 * B2 + P1 * B2 + P2 * B1) / den,
    )


def _resolve_split(t: Topology, tau_e: float, split) -> tuple[float, ...]:
    if not (0.0 < tau_e <= 1.0):
        raise ValueError(f"external transmissivity must be in (0, 1], got {tau_e}")
    n = loss_slot_count(t)
    if split is None:
        return default_loss_split(t, tau_e)
    split = tuple(float(f) for f in split)
    if len(split) != n:
        raise ValueError(f"{t.label} has {n} loss slot(s), got split of length {len(split)}")
    prod = math.prod(split)
    if abs(prod - tau_e) > 1e-12 * max(1.0, tau_e):
        raise ValueError(f"loss split {split} multiplies to {prod}, expected tau_e={tau_e}")
    for f in split:
        if f < tau_e - 1e-12 or f > 1.0 + 1e-12:
            raise ValueError(f"loss share {f} outside [tau_e={tau_e}, 1]")
    return split


def _validate_cooperativities(t: Topology, cfg: NetworkConfig) -> None:
    caps = cfg.caps
    for name, value, cap in (
        ("C_a,1", cfg.c_a1, caps.d_a),
        ("C_b,1", cfg.c_b1, caps.d_b),
        ("C_a,2", cfg.c_a2, caps.d_a),
        ("C_b,2", cfg.c_b2, caps.d_b),
    ):
        if value < 0.0:
            raise ValueError(f"{name} = {value} violates {name} >= 0")
        if value > cap * (1.0 + 1e-12) + 1e-15:
            raise ValueError(f"{name} = {value} violates {name} <= {cap}")
    pairs = ((t.kinds[0], cfg.c_a1, cfg.c_b1),) if t.scheme == "down" else (
        (t.kinds[0], cfg.c_a1, cfg.c_b1),
        (t.kinds[1], cfg.c_a2, cfg.c_b2),
    )
    for kind, c_a, c_b in pairs:
        if kind in (MoKind.IO, MoKind.IM) and not _stable_intrinsic(kind, c_a, c_b, caps):
            rt = caps.rates
            if kind is MoKind.IO:
                cap = _blue_cap(c_b, rt.kappa_a, rt.kappa_b, rt.gamma_m)
                raise UnstableOperatingPointError(
                    f"IO source unstable: C_a = {c_a} violates C_a < {cap}"
                )
            cap = _blue_cap(c_a, rt.kappa_b, rt.kappa_a, rt.gamma_m)
            raise UnstableOperatingPointError(
                f"IM source unstable: C_b = {c_b} violates C_b < {cap}"
            )


def mm_state(t: Topology, cfg: NetworkConfig) -> BalancedForm:
    """Final microwave-microwave state of a topology at a configuration.

    Builds the MO resource state(s), applies the external-loss split,
    and performs the downconversion or the swapping measurement.  Both
    output modes are microwave; mode i belongs to node i.
    """
    split = _resolve_split(t, cfg.tau_e, cfg.loss_split)
    _validate_cooperativities(t, cfg)
    rv = _as_r(cfg.r)
    out = _mm_excess(
        t, cfg.caps, cfg.caps.n_th, rv, (cfg.c_a1, cfg.c_b1, cfg.c_a2, cfg.c_b2), split
    )
    if out is None:  # pragma: no cover - _validate_cooperativities raises first
        raise UnstableOperatingPointError(f"unstable configuration for {t.label}")
    A, B, c, _ = out
    return BalancedForm(0.5 + A, 0.5 + B, c)


def mm_log_negativity(t: Topology, cfg: NetworkConfig) -> float:
    """Logarithmic negativity of the final MM state."""
    return log_negativity(mm_state(t, cfg))
