"""Entanglement thresholds and constrained maximization.

Each symmetric topology admits a sharp upper bound on the mediating
mode's thermal occupancy n_th below which (and only below which) the
final microwave-microwave state is entangled, assuming cooperativities
are tuned optimally within their caps and stability limits.

analytic_threshold evaluates the closed-form bounds; numeric_threshold
recovers the same boundary independently by bisecting n_th on the sign
of the cooperativity-maximized entanglement, which is the cross-check
used throughout the test suite.  Every bound is at most tau_a * d_a, so
n_th < tau_a * d_a is a global necessary condition and a valid
bisection bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import SqueezeParam, _as_r
from .network import (
    Topology,
    _mm_excess,
    default_loss_split,
    loss_slot_count,
)
from .optimize import golden_max_1d, maximize_box
from .sources import MoKind
from .transducer import (
    DeviceCaps,
    _blue_cap,
    stability_ok,
)

__all__ = [
    "ThresholdResult",
    "analytic_threshold",
    "numeric_threshold",
    "optimize_cooperativities",
    "optimize_loss_split",
    "max_stable_ca",
]


@dataclass(frozen=True)
class ThresholdResult:
    """Upper bound on n_th for entanglement, with the achieving settings.

    can_entangle is False when the topology cannot entangle at these
    caps for any n_th >= 0 (the bound is then reported as 0).
    """

    n_th_max: float
    method: str
    argmax: tuple[float, float, float, float]
    can_entangle: bool = True


def max_stable_ca(caps: DeviceCaps, c_b: float) -> float:
    """Largest stable optical cooperativity for a blue optical pump.

    Bisects the (monotone) stability predicate at fixed c_b down to an
    absolute tolerance of 1e-10; the cap d_a binds when stability does
    not.
    """
    if not (0.0 <= c_b <= caps.d_b * (1.0 + 1e-12) + 1e-15):
        raise ValueError(f"c_b = {c_b} outside [0, d_b = {caps.d_b}]")

    def stable(c_a: float) -> bool:
        return stability_ok(caps.params(c_a, c_b, sigma_a=1), caps.rates)

    if stable(caps.d_a):
        return caps.d_a
    lo, hi = 0.0, caps.d_a
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _numeric_gap(c_minus: float) -> float:
    """Minimum distance to the squeezing-interaction singularity.

    State components grow like 1/(1 + C_- - C_+)**2, so points closer to
    the boundary than this lose the entanglement margin to float
    cancellation.  Keeping the search this far out shifts optimized
    quantities by at most ~1e-8 relative, well inside every tolerance
    used here.
    """
    return 1e-8 * (1.0 + c_minus)


def _max_stable_cb(caps: DeviceCaps, c_a: float) -> float:
    """Largest numerically safe C_b for a blue microwave pump."""
    rt = caps.rates
    cap = _blue_cap(c_a, rt.kappa_b, rt.kappa_a, rt.gamma_m) - _numeric_gap(c_a)
    return min(caps.d_b, max(cap, 0.0))


def _stable_ca_bound(caps: DeviceCaps, c_b: float) -> float:
    rt = caps.rates
    cap = _blue_cap(c_b, rt.kappa_a, rt.kappa_b, rt.gamma_m) - _numeric_gap(c_b)
    return min(caps.d_a, max(cap, 0.0))


def _numeric_ok(kind: MoKind, c_a: float, c_b: float) -> bool:
    if kind is MoKind.IO:
        return 1.0 + c_b - c_a >= _numeric_gap(c_b)
    if kind is MoKind.IM:
        return 1.0 + c_a - c_b >= _numeric_gap(c_a)
    return True


def _em_down_cell(c_a, c_b, tau_a, tau_b, d_a) -> float:
    s2 = (1.0 + c_a + c_b) ** 2
    return 4.0 * tau_a**2 * tau_b * c_a * c_b * d_a / (s2 + 4.0 * tau_a**2 * c_a * d_a)


def _em_swap_cell(c_a, c_b, tau_a, tau_b) -> float:
    if c_a <= 0.0:
        return -math.inf
    return tau_b * c_b - (1.0 + c_a + c_b) ** 2 / (8.0 * tau_a * c_a)


def _maximize_em_cell(t: Topology, caps: DeviceCaps) -> tuple[float, float, float]:
    """Maximize the extrinsic-microwave bound over both cooperativities."""
    if t.scheme == "down":
        cell = lambda x: _em_down_cell(x[0], x[1], caps.tau_a, caps.tau_b, caps.d_a)
    else:
        cell = lambda x: _em_swap_cell(x[0], x[1], caps.tau_a, caps.tau_b)
    # the optimum in c_a sits near 1 + c_b; give the search that ridge
    ridge = [
        [min(caps.d_a, 1.0 + caps.d_b), caps.d_b],
        [caps.d_a, caps.d_b],
        [min(caps.d_a, 1.0), min(caps.d_b, 1.0)],
    ]
    x, val = maximize_box(
        cell,
        [0.0, 0.0],
        [caps.d_a, caps.d_b],
        n_starts=12,
        nm_max_iter=200,
        extra_starts=ridge,
    )
    return x[0], x[1], val


def analytic_threshold(
    t: Topology,
    caps: DeviceCaps,
    r: SqueezeParam | float = 0.0,
    c_a: float | None = None,
    c_b: float | None = None,
) -> ThresholdResult:
    """Closed-form n_th bound for one of the eight symmetric topologies.

    Extrinsic-microwave rows only have a closed form at given source
    cooperativities; pass c_a and c_b to evaluate there, or leave both
    None to maximize the bound over the caps numerically.  Intrinsic-
    optical rows use the largest stable optical cooperativity at
    c_b = d_b (or at the supplied c_b).  Asymmetric swapping topologies
    have no closed form and are rejected.
    """
    if not t.is_symmetric:
        raise ValueError("no closed-form threshold for asymmetric swapping topologies")
    rv = _as_r(r)
    kind = t.kinds[0]
    down = t.scheme == "down"
    da, db, ta, tb = caps.d_a, caps.d_b, caps.tau_a, caps.tau_b

    if kind is MoKind.EO:
        value = (
            ta * da * (1.0 - math.exp(-2.0 * rv)) / 2.0
            if down
            else ta * da * math.sinh(rv) ** 2 / math.cosh(2.0 * rv)
        )
        arg = (da, db, da, db)
    elif kind is MoKind.EM:
        if (c_a is None) != (c_b is None):
            raise ValueError("supply both c_a and c_b for extrinsic-microwave rows")
        if c_a is None:
            c_a, c_b, value = _maximize_em_cell(t, caps)
        else:
            value = (
                _em_down_cell(c_a, c_b, ta, tb, da)
                if down
                else _em_swap_cell(c_a, c_b, ta, tb)
            )
        arg = (c_a, c_b, da if down else c_a, db if down else c_b)
    elif kind is MoKind.IO:
        ca_bar = max_stable_ca(caps, db if c_b is None else c_b)
        value = (
            (math.sqrt(ca_bar * (ca_bar + 4.0 * ta**2 * da)) - ca_bar) / 2.0
            if down
            else (2.0 * ta - 1.0) * ca_bar
        )
        arg = (ca_bar, db if c_b is None else c_b, da if down else ca_bar, db)
    else:
        value = (
            (math.sqrt((1.0 + da) ** 2 + 4.0 * ta**2 * da**2) - da - 1.0) / 2.0
            if down
            else (2.0 * ta - 1.0) * da - 1.0
        )
        cb_star = min(db, _max_stable_cb(caps, da))
        arg = (da, cb_star, da if down else da, db if down else cb_star)

    if value <= 0.0 or not math.isfinite(value):
        return ThresholdResult(0.0, "analytic", arg, can_entangle=False)
    return ThresholdResult(value, "analytic", arg, can_entangle=True)


def _margin_of_excess(out) -> float:
    """Entanglement margin 1/2 - nu from the excess representation.

    Uses the identity 1/2 - nu = -2P / (A + B + sqrt((A+B)^2 - 4P)),
    which is free of the catastrophic cancellation that the direct
    symplectic-eigenvalue formula suffers for amplified states; in
    particular the sign is exactly the sign of -P.
    """
    if out is None:
        return -math.inf
    A, B, c, P = out
    s = A + B
    q = s + math.sqrt(max(s * s - 4.0 * P, 0.0))
    if q <= 0.0:
        return 0.0  # both modes exactly at vacuum
    return -2.0 * P / q


def _margin_fn(t, caps, n_th, r, split, guard: bool = False):
    """Entanglement margin (1/2 - nu) over mirrored (c_a, c_b)."""
    kind = t.kinds[0]

    def margin(x):
        if guard and not _numeric_ok(kind, x[0], x[1]):
            return -math.inf
        cs = (x[0], x[1], x[0], x[1])
        return _margin_of_excess(_mm_excess(t, caps, n_th, r, cs, split))

    return margin


def _margin_fn_down(t, caps, n_th, r, split, guard: bool = False):
    """Margin over the source (c_a, c_b) with the downconverter pinned.

    For downconversion of an EM/IO/IM resource the sign of the margin
    depends on the second transducer only through n_th / (tau_a C_a2),
    which is minimized at C_a2 = d_a for any C_b2 > 0, so pinning the
    downconverter at its caps is sign-dominant.
    """
    kind = t.kinds[0]
    pin = (caps.d_a, caps.d_b)

    def margin(x):
        if guard and not _numeric_ok(kind, x[0], x[1]):
            return -math.inf
        cs = (x[0], x[1], pin[0], pin[1])
        return _margin_of_excess(_mm_excess(t, caps, n_th, r, cs, split))

    return margin


def _margin_fn4(t, caps, n_th, r, split, guard: bool = False):
    k1 = t.kinds[0]
    k2 = t.kinds[1] if t.scheme == "swap" else None

    def margin(x):
        if guard:
            if not _numeric_ok(k1, x[0], x[1]):
                return -math.inf
            if k2 is not None and not _numeric_ok(k2, x[2], x[3]):
                return -math.inf
        return _margin_of_excess(_mm_excess(t, caps, n_th, r, tuple(x), split))

    return margin


def _clamp_pair(kind: MoKind, caps: DeviceCaps, c_a: float, c_b: float):
    if kind is MoKind.IO:
        c_a = min(c_a, _stable_ca_bound(caps, c_b))
    elif kind is MoKind.IM:
        c_b = min(c_b, _max_stable_cb(caps, c_a))
    return c_a, c_b


def _corner_candidates(kind: MoKind, caps: DeviceCaps) -> list[tuple[float, float]]:
    da, db = caps.d_a, caps.d_b
    raw = [
        (da, db),
        (min(da, 1.0 + db), db),
        (da, 0.5 * db),
        (0.5 * da, db),
        (min(da, 0.5 * (1.0 + db)), 0.5 * db),
    ]
    out: list[tuple[float, float]] = []
    for ca, cb in raw:
        pt = _clamp_pair(kind, caps, ca, cb)
        if pt not in out:
            out.append(pt)
    return out


def _entangled_at(t, caps, n_th, r, split, candidates, search_budget):
    """Positivity witness for max-over-cooperativities entanglement.

    Returns the witnessing source (c_a, c_b) pair or None.  Corner
    candidates decide quickly on the entangled side; a bounded
    multi-start search settles the separable side.  The entanglement
    sign is exact here (it is the sign of the tracked product defect),
    so any returned witness is a true positive.
    """
    if t.scheme == "down" and t.kinds[0] is not MoKind.EO:
        margin = _margin_fn_down(t, caps, n_th, r, split)
    else:
        margin = _margin_fn(t, caps, n_th, r, split)
    for cand in candidates:
        if margin(cand) > 0.0:
            return cand
    x, best = maximize_box(
        margin,
        [0.0, 0.0],
        [caps.d_a, caps.d_b],
        n_starts=search_budget[0],
        nm_max_iter=search_budget[1],
        polish=False,
        extra_starts=[list(c) for c in candidates],
    )
    if best > 0.0:
        return (x[0], x[1])
    return None


def numeric_threshold(
    t: Topology,
    caps: DeviceCaps,
    r: SqueezeParam | float = 0.0,
    *,
    search_budget: tuple[int, int] = (6, 80),
) -> ThresholdResult:
    """Threshold by bisecting n_th on the optimized entanglement sign.

    The bracket is [0, tau_a * d_a]; cooperativities are re-maximized at
    every n_th evaluation.  The interval is narrowed to a relative width
    of 1e-7 (with an absolute floor of 1e-12 times the bracket), tighter
    than the 1e-6 agreement required of the analytic forms.  If the
    topology cannot entangle even at n_th = 0 the result carries
    can_entangle=False and a bound of 0.
    """
    if not t.is_symmetric:
        raise ValueError("numeric thresholds are defined for the symmetric topologies")
    rv = _as_r(r)
    split = (1.0,) * loss_slot_count(t)
    hi0 = caps.tau_a * caps.d_a
    kind = t.kinds[0]
    candidates = _corner_candidates(kind, caps)

    def full(pair):
        if t.scheme == "down" and kind is not MoKind.EO:
            return (pair[0], pair[1], caps.d_a, caps.d_b)
        return (pair[0], pair[1], pair[0], pair[1])

    witness = _entangled_at(t, caps, 0.0, rv, split, candidates, search_budget)
    if hi0 <= 0.0 or witness is None:
        return ThresholdResult(0.0, "bisection", full(candidates[0]), False)

    lo, hi = 0.0, hi0
    while hi - lo > max(1e-12 * hi0, 1e-7 * lo):
        mid = 0.5 * (lo + hi)
        w = _entangled_at(t, caps, mid, rv, split, candidates, search_budget)
        if w is not None:
            lo, witness = mid, w
        else:
            hi = mid
    n_star = 0.5 * (lo + hi)
    return ThresholdResult(n_star, "bisection", full(witness), True)


def optimize_cooperativities(
    t: Topology,
    caps: DeviceCaps,
    n_th: float,
    r: SqueezeParam | float = 0.0,
    *,
    tau_e: float = 1.0,
    loss_split: tuple[float, ...] | None = None,
    n_starts: int = 16,
    nm_max_iter: int = 250,
) -> tuple[tuple[float, float, float, float], float]:
    """Maximize the MM logarithmic negativity over the cooperativities.

    Symmetric topologies are searched over one transducer's (c_a, c_b)
    and mirrored; asymmetric swapping searches all four.  The search is
    multi-start Nelder-Mead with golden-section polish, seeded with the
    box corners (clamped into the stability region), so the result never
    falls below the best corner.  Returns the full cooperativity
    4-tuple and the achieved logarithmic negativity.
    """
    rv = _as_r(r)
    split = (
        default_loss_split(t, tau_e)
        if loss_split is None
        else tuple(float(f) for f in loss_split)
    )
    uniform_split = all(f == split[0] for f in split)
    mirrored = uniform_split and (
        (t.scheme == "swap" and t.is_symmetric)
        or (t.scheme == "down" and t.kinds[0] is MoKind.EO)
    )
    if mirrored:
        margin = _margin_fn(t, caps, n_th, rv, split, guard=True)
        corners = _corner_candidates(t.kinds[0], caps)
        x, m = maximize_box(
            margin,
            [0.0, 0.0],
            [caps.d_a, caps.d_b],
            n_starts=n_starts,
            nm_max_iter=nm_max_iter,
            extra_starts=[list(c) for c in corners],
        )
        cs = (x[0], x[1], x[0], x[1])
    else:
        margin = _margin_fn4(t, caps, n_th, rv, split, guard=True)
        k1 = t.kinds[0]
        k2 = t.kinds[1] if t.scheme == "swap" else None
        cands1 = _corner_candidates(k1, caps)[:3]
        cands2 = _corner_candidates(k2, caps)[:3] if k2 else [(caps.d_a, caps.d_b)]
        corners = [list(p1) + list(p2) for p1 in cands1 for p2 in cands2]
        x, m = maximize_box(
            margin,
            [0.0, 0.0, 0.0, 0.0],
            [caps.d_a, caps.d_b, caps.d_a, caps.d_b],
            n_starts=n_starts,
            nm_max_iter=2 * nm_max_iter,
            extra_starts=corners,
        )
        cs = tuple(x)
    e = -math.log1p(-2.0 * m) / math.log(2.0) if (m > 0.0 and math.isfinite(m)) else 0.0
    return cs, e


def _best_e_at_split(t, caps, n_th, r, tau_e, split, budget):
    _, e = optimize_cooperativities(
        t,
        caps,
        n_th,
        r,
        tau_e=tau_e,
        loss_split=split,
        n_starts=budget[0],
        nm_max_iter=budget[1],
    )
    return e


def optimize_loss_split(
    t: Topology,
    caps: DeviceCaps,
    n_th: float,
    r: SqueezeParam | float = 0.0,
    tau_e: float = 1.0,
    *,
    budget: tuple[int, int] = (8, 120),
) -> tuple[tuple[float, ...], float]:
    """Best distribution of external optical loss over a topology's slots.

    Closed-form placements are used where the optimum is known (equal
    shares for EO downconversion, everything on one measured arm for
    symmetric swapping); asymmetric swapping is searched numerically
    over the slot simplex, since its optimum may be interior.
    Cooperativities are re-optimized at every candidate split.
    """
    if not (0.0 < tau_e <= 1.0):
        raise ValueError(f"external transmissivity must be in (0, 1], got {tau_e}")
    n = loss_slot_count(t)
    if t.scheme == "down" or t.is_symmetric:
        split = default_loss_split(t, tau_e)
        return split, _best_e_at_split(t, caps, n_th, r, tau_e, split, budget)

    if n == 2:
        # one free share t1 in [tau_e, 1]; endpoints are the known extremes
        def e_of(t1: float) -> float:
            return _best_e_at_split(t, caps, n_th, r, tau_e, (t1, tau_e / t1), budget)

        cands = [(tau_e, 1.0), (1.0, tau_e)]
        best_split = max(cands, key=lambda s: _best_e_at_split(t, caps, n_th, r, tau_e, s, budget))
        best_e = _best_e_at_split(t, caps, n_th, r, tau_e, best_split, budget)
        t1, e1 = golden_max_1d(e_of, tau_e, 1.0, iters=24)
        if e1 > best_e:
            best_split, best_e = (t1, tau_e / t1), e1
        return best_split, best_e

    # three slots: shares (t1, t2) free with t3 = tau_e / (t1 t2)
    def e_of_pair(x) -> float:
        t1, t2 = x
        t3 = tau_e / (t1 * t2)
        if t3 < tau_e - 1e-12 or t3 > 1.0 + 1e-12:
            return -math.inf
        return _best_e_at_split(t, caps, n_th, r, tau_e, (t1, t2, min(t3, 1.0)), budget)

    extremes = [
        [1.0, 1.0],
        [tau_e, 1.0],
        [1.0, tau_e],
        [tau_e ** (1.0 / 3.0), tau_e ** (1.0 / 3.0)],
    ]
    x, e = maximize_box(
        e_of_pair,
        [tau_e, tau_e],
        [1.0, 1.0],
        n_starts=6,
        nm_max_iter=40,
        polish=False,
        extra_starts=extremes,
    )
    t1, t2 = x
    t3 = min(max(tau_e / (t1 * t2), tau_e), 1.0)
    return (t1, t2, t3), e
