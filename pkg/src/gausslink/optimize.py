"""Deterministic derivative-free maximization over a box.

Multi-start Nelder-Mead with projection onto the box, followed by a
coordinate-wise golden-section polish.  Starts come from a fixed
low-discrepancy sequence, so results are reproducible without any RNG
state.  Objectives signal infeasible points (e.g. unstable operating
points) by returning -inf, which the simplex treats as a rejection.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

__all__ = ["maximize_box", "golden_max_1d"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _plastic_alphas(dim: int) -> list[float]:
    # generalized-golden-ratio constants of the R_d low-discrepancy sequence
    phi = 2.0
    for _ in range(40):
        phi = (1.0 + phi) ** (1.0 / (dim + 1.0))
    return [(1.0 / phi) ** (i + 1) for i in range(dim)]


def low_discrepancy_points(dim: int, n: int) -> list[list[float]]:
    """First n points of the R_d sequence in the unit cube."""
    alphas = _plastic_alphas(dim)
    return [[(0.5 + (k + 1) * a) % 1.0 for a in alphas] for k in range(n)]


def golden_max_1d(
    f: Callable[[float], float], lo: float, hi: float, *, iters: int = 60
) -> tuple[float, float]:
    """Golden-section maximization of f on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if b - a <= 1e-14 * max(1.0, abs(a), abs(b)):
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _nelder_mead(f, x0, lo, hi, max_iter, f_tol):
    """Projected Nelder-Mead maximization; returns (x_best, f_best)."""
    dim = len(x0)

    def clip(x):
        return [min(max(x[i], lo[i]), hi[i]) for i in range(dim)]

    # initial simplex: x0 plus 5% of the box span along each axis
    simplex = [clip(list(x0))]
    for i in range(dim):
        step = 0.05 * (hi[i] - lo[i])
        x = list(simplex[0])
        x[i] = x[i] + step if x[i] + step <= hi[i] else x[i] - step
        simplex.append(clip(x))
    values = [f(x) for x in simplex]

    for _ in range(max_iter):
        order = sorted(range(dim + 1), key=lambda i: values[i], reverse=True)
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        best, worst = values[0], values[-1]
        if math.isfinite(best) and math.isfinite(worst):
            if best - worst <= f_tol * max(1.0, abs(best)):
                break
        centroid = [
            sum(simplex[i][j] for i in range(dim)) / dim for j in range(dim)
        ]
        refl = clip([2.0 * centroid[j] - simplex[-1][j] for j in range(dim)])
        f_refl = f(refl)
        if f_refl > best:
            exp = clip([3.0 * centroid[j] - 2.0 * simplex[-1][j] for j in range(dim)])
            f_exp = f(exp)
            if f_exp > f_refl:
                simplex[-1], values[-1] = exp, f_exp
            else:
                simplex[-1], values[-1] = refl, f_refl
        elif f_refl > values[-2]:
            simplex[-1], values[-1] = refl, f_refl
        else:
            contr = clip([0.5 * (centroid[j] + simplex[-1][j]) for j in range(dim)])
            f_contr = f(contr)
            if f_contr > worst:
                simplex[-1], values[-1] = contr, f_contr
            else:
                for i in range(1, dim + 1):
                    simplex[i] = [
                        0.5 * (simplex[0][j] + simplex[i][j]) for j in range(dim)
                    ]
                    values[i] = f(simplex[i])
    i_best = max(range(dim + 1), key=lambda i: values[i])
    return simplex[i_best], values[i_best]


def maximize_box(
    f: Callable[[Sequence[float]], float],
    lo: Sequence[float],
    hi: Sequence[float],
    *,
    n_starts: int = 16,
    nm_max_iter: int = 200,
    f_tol: float = 1e-10,
    polish: bool = True,
    extra_starts: Sequence[Sequence[float]] = (),
) -> tuple[list[float], float]:
    """Maximize f over the box [lo, hi].

    extra_starts are tried verbatim (after projection) in addition to the
    low-discrepancy starts; the returned value is never below the best
    evaluated start, so corner candidates passed here give a hard floor.
    """
    lo = [float(v) for v in lo]
    hi = [float(v) for v in hi]
    dim = len(lo)
    starts = [list(s) for s in extra_starts]
    for u in low_discrepancy_points(dim, n_starts):
        starts.append([lo[i] + u[i] * (hi[i] - lo[i]) for i in range(dim)])

    best_x, best_f = None, -math.inf
    for s in starts:
        x = [min(max(s[i], lo[i]), hi[i]) for i in range(dim)]
        fx = f(x)
        if fx > best_f:
            best_x, best_f = x, fx
        xo, fo = _nelder_mead(f, x, lo, hi, nm_max_iter, f_tol)
        if fo > best_f:
            best_x, best_f = xo, fo
    if best_x is None:
        best_x = [0.5 * (lo[i] + hi[i]) for i in range(dim)]

    if polish and math.isfinite(best_f):
        for _ in range(2):
            for i in range(dim):
                if hi[i] - lo[i] <= 0.0:
                    continue
                base = list(best_x)

                def fi(v, i=i, base=base):
                    probe = list(base)
                    probe[i] = v
                    return f(probe)

                xi, fxi = golden_max_1d(fi, lo[i], hi[i])
                if fxi > best_f:
                    best_x = list(base)
                    best_x[i] = xi
                    best_f = fxi
    return best_x, best_f
