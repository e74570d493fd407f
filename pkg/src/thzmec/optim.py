"""Small solver kit: assignment, fractional programming, 1-D/2-D concave search."""

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from thzmec.errors import DomainError, InfeasibleError, NonConvergenceError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def _square_cost(cost):
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise DomainError(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise DomainError("cost matrix must be finite")
    return cost


def hungarian(cost):
    """Minimum-cost perfect matching of a square cost matrix.

    Shortest augmenting path with row/column potentials, O(n^3).

    Returns ``(cols, value)`` where ``cols[r]`` is the column assigned to row r.
    """
    cost = _square_cost(cost)
    n = cost.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int), 0.0
    # 1-based arrays; index 0 is the virtual source column
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=int)  # p[col] = row matched to col
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    cols = np.empty(n, dtype=int)
    for j in range(1, n + 1):
        cols[p[j] - 1] = j - 1
    return cols, float(cost[np.arange(n), cols].sum())


def brute_force_assignment(cost):
    """Exhaustive O(n!) assignment, used as a test oracle for small n."""
    cost = _square_cost(cost)
    n = cost.shape[0]
    best, best_perm = math.inf, None
    rows = np.arange(n)
    for perm in itertools.permutations(range(n)):
        value = cost[rows, perm].sum()
        if value < best:
            best, best_perm = value, perm
    return np.array(best_perm if best_perm is not None else (), dtype=int), float(best if n else 0.0)


def golden_section_max(f, lo, hi, tol=1e-10):
    """Maximize a unimodal ``f`` on ``[lo, hi]``.

    ``tol`` is relative to the bracket width. The endpoints are compared with
    the final interior point so monotone functions return the exact endpoint.
    """
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise DomainError(f"invalid bracket [{lo}, {hi}]")
    if hi == lo:
        return lo
    a, b = lo, hi
    width = b - a
    n_steps = max(1, int(math.ceil(math.log(tol) / math.log(INV_PHI))))
    c = a + INV_PHI2 * width
    d = a + INV_PHI * width
    fc, fd = f(c), f(d)
    for _ in range(n_steps):
        if fc >= fd:
            b, d, fd = d, c, fc
            width = b - a
            c = a + INV_PHI2 * width
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            width = b - a
            d = a + INV_PHI * width
            fd = f(d)
    x, fx = (c, fc) if fc >= fd else (d, fd)
    for end in (lo, hi):
        fe = f(end)
        if fe > fx:
            x, fx = end, fe
    return x


def concave_max_box(f, lower, upper, tol=1e-10, inner_argmax=None):
    """Maximize a jointly concave ``f(x, y)`` over ``[lower, upper]`` (2-D box).

    Nested golden section: the outer search runs over ``y`` on
    ``g(y) = max_x f(x, y)``, which stays concave. ``inner_argmax(y)`` may
    supply the inner maximizer in closed form; otherwise it is searched too.

    Returns ``(x, y)``.
    """
    (xl, yl), (xu, yu) = lower, upper
    for lo, hi, name in ((xl, xu, "x"), (yl, yu, "y")):
        if lo > hi:
            raise InfeasibleError(
                f"empty feasible set: {name} lower bound {lo:.6g} exceeds upper bound {hi:.6g}",
                constraint=f"{name}_bounds",
                deficit=lo - hi,
            )

    if inner_argmax is None:
        def inner_argmax(y):
            return golden_section_max(lambda x: f(x, y), xl, xu, tol)

    def outer(y):
        return f(inner_argmax(y), y)

    y = golden_section_max(outer, yl, yu, tol)
    return inner_argmax(y), y


@dataclass
class FractionalProgram:
    """max N(x)/D(x) with D > 0 on the feasible set.

    ``maximize(lam)`` must return an argmax of ``N(x) - lam * D(x)`` over the
    feasible set.
    """

    numerator: Callable
    denominator: Callable
    maximize: Callable


@dataclass
class DinkelbachResult:
    x: object
    ratio: float
    iterations: int
    trace: list = field(default_factory=list)  # (lambda_n, F(lambda_n))


def dinkelbach(program, lambda0=0.01, eps=1e-5, max_iters=50):
    """Dinkelbach's parametric method for fractional programs.

    Stops once the parametric value ``|F(lambda_n)| < eps``. A start above the
    optimal ratio gives ``F < 0``; the next ratio then restarts from below.
    """
    lam = float(lambda0)
    trace = []
    for it in range(1, max_iters + 1):
        x = program.maximize(lam)
        num, den = program.numerator(x), program.denominator(x)
        if not den > 0:
            raise DomainError(f"denominator must be positive on the feasible set, got {den}")
        F = num - lam * den
        trace.append((lam, F))
        if abs(F) < eps:
            return DinkelbachResult(x, num / den, it, trace)
        lam = num / den
    raise NonConvergenceError(f"Dinkelbach did not converge in {max_iters} iterations", trace)
