"""Forward orbits, attracting cycles and their multipliers.

An orbit either lands on a pole (and then on infinity), settles on an
attracting cycle, or stays unresolved within the iteration budget.
"""

from __future__ import annotations

import cmath
import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .errors import NonConvergence
from .mapcore import (
    INFINITY,
    ParamLike,
    as_parameter,
    derivative,
    evaluate,
    pole_index,
    singular_values,
)

CYCLE_TOL = 1e-10
# a detected p-cycle whose points repeat at lag d | p within this is a d-cycle
PERIOD_MERGE_TOL = 1e-6
MAX_PERIOD = 64
SUPER_TOL = 1e-8
IND_TOL = 1e-6
ROOT_TOL = 1e-6
Q_MAX = 32
TANGENCY_TOL = 1e-8
PRINCIPAL_MARGIN = 1e-6
SCAN_SAMPLES = 100_000
REFINE_TOL = 1e-12
REFINE_MAX_STEPS = 50
# a fixed point this close to lam + i or lam - i marks the Cantor regime
CANTOR_RADIUS = 0.5


class OrbitStatus(enum.Enum):
    CONVERGED = "converged"
    HIT_POLE = "hit-pole"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class CycleInfo:
    period: int
    points: tuple[complex, ...]
    multiplier: complex

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(complex(p) for p in self.points))
        if self.period < 1 or len(self.points) != self.period:
            raise ValueError("a cycle needs exactly `period` points")


@dataclass
class OrbitResult:
    status: OrbitStatus
    steps_used: int
    period: Optional[int] = None
    pole_index: Optional[int] = None
    cycle: Optional[CycleInfo] = None
    trajectory: Optional[list] = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.status is OrbitStatus.CONVERGED


def cycle_multiplier(param: ParamLike, points: Sequence[complex]) -> complex:
    m = 1 + 0j
    for z in points:
        m *= derivative(param, z)
    return m


def minimal_period(points: Sequence[complex], tol: float = PERIOD_MERGE_TOL) -> int:
    """Smallest divisor d of len(points) with points[i] ~ points[i + d] for all i.

    A slowly converging cycle with a near -1 multiplier closes at lag 2p
    before it closes at lag p; this undoes that doubling.
    """
    p = len(points)
    for d in range(1, p):
        if p % d == 0 and all(abs(points[i] - points[(i + d) % p]) < tol for i in range(p)):
            return d
    return p


def iterate_orbit(
    param: ParamLike,
    z0: complex,
    max_iter: int = 500,
    *,
    cycle_tol: float = CYCLE_TOL,
    max_period: int = MAX_PERIOD,
    keep_trajectory: bool = False,
) -> OrbitResult:
    """Iterate f from ``z0`` and report how the orbit ends.

    Recurrence is tested against the last ``max_period`` iterates (the seed
    itself is excluded, which keeps results exactly even in ``z0``).  The
    smallest period p with ``|z_n - z_{n-p}| < cycle_tol`` is taken; the cycle
    is accepted once its multiplier has modulus < 1, otherwise iteration goes
    on, and is then cut to its :func:`minimal_period`.  ``HitPole.steps`` is the index of the iterate that is a pole.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    p = as_parameter(param)
    z = complex(z0)
    traj = [z] if keep_trajectory else None
    history: deque[complex] = deque(maxlen=max_period)
    for n in range(max_iter):
        w = evaluate(p, z)
        if w is INFINITY:
            if traj is not None:
                traj.append(INFINITY)
            return OrbitResult(OrbitStatus.HIT_POLE, n, pole_index=pole_index(z), trajectory=traj)
        z = w
        if traj is not None:
            traj.append(z)
        for period, prev in enumerate(reversed(history), start=1):
            if abs(z - prev) < cycle_tol:
                pts = list(history)[-period:]
                mult = cycle_multiplier(p, pts)
                if abs(mult) < 1.0:
                    period = minimal_period(pts)
                    pts = pts[:period]
                    info = CycleInfo(period, tuple(pts), cycle_multiplier(p, pts))
                    return OrbitResult(OrbitStatus.CONVERGED, n + 1, period=period, cycle=info,
                                       trajectory=traj)
                break
        history.append(z)
    return OrbitResult(OrbitStatus.UNRESOLVED, max_iter, trajectory=traj)


def _orbit_with_derivative(p, z: complex, period: int) -> tuple[complex, complex, list[complex]]:
    pts = []
    d = 1 + 0j
    for _ in range(period):
        pts.append(z)
        d *= derivative(p, z)
        z = evaluate(p, z)
        if z is INFINITY:
            raise NonConvergence("cycle refinement ran into a pole")
    return z, d, pts


def refine_cycle(
    param: ParamLike,
    approx: CycleInfo,
    *,
    tol: float = REFINE_TOL,
    max_steps: int = REFINE_MAX_STEPS,
    precheck: float = 1e-3,
) -> CycleInfo:
    """Newton-polish a cycle as a root of f^p(z) - z.

    Attraction is not required; a repelling cycle refines just as well.
    """
    p = as_parameter(param)
    period = approx.period
    for i, z in enumerate(approx.points):
        target = approx.points[(i + 1) % period]
        fz = evaluate(p, z)
        if fz is INFINITY or abs(fz - target) > precheck:
            raise ValueError(f"approximate cycle is not cyclic within {precheck}")
    z = approx.points[0]
    for _ in range(max_steps + 1):
        try:
            end, d, pts = _orbit_with_derivative(p, z, period)
        except (ArithmeticError, ValueError) as exc:
            raise NonConvergence(str(exc)) from exc
        residual = end - z
        if abs(residual) < tol:
            return CycleInfo(period, tuple(pts), cycle_multiplier(p, pts))
        slope = d - 1.0
        if slope == 0:
            break
        z = z - residual / slope
        if not cmath.isfinite(z):
            break
    raise NonConvergence(f"Newton did not reach residual {tol} in {max_steps} steps")


class CycleKind(enum.Enum):
    SUPERATTRACTING = "superattracting"
    ATTRACTING = "attracting"
    PARABOLIC_LIKE = "parabolic-like"
    INDIFFERENT_IRRATIONAL = "indifferent-irrational"
    REPELLING = "repelling"


@dataclass(frozen=True)
class CycleClass:
    kind: CycleKind
    p: Optional[int] = None
    q: Optional[int] = None


def classify_multiplier(
    multiplier: complex,
    *,
    super_tol: float = SUPER_TOL,
    ind_tol: float = IND_TOL,
    root_tol: float = ROOT_TOL,
    q_max: int = Q_MAX,
) -> CycleClass:
    r = abs(multiplier)
    if r < super_tol:
        return CycleClass(CycleKind.SUPERATTRACTING)
    if r < 1.0 - ind_tol:
        return CycleClass(CycleKind.ATTRACTING)
    if r > 1.0 + ind_tol:
        return CycleClass(CycleKind.REPELLING)
    for q in range(1, q_max + 1):
        for num in range(q):
            if math.gcd(num, q) != 1:
                continue
            if abs(multiplier - cmath.exp(2j * math.pi * num / q)) < root_tol:
                return CycleClass(CycleKind.PARABOLIC_LIKE, num, q)
    # numerical verdict only: no rotation-domain certificate is attempted
    return CycleClass(CycleKind.INDIFFERENT_IRRATIONAL)


def classify_cycle(info: CycleInfo, **tols) -> CycleClass:
    return classify_multiplier(info.multiplier, **tols)


# ---------------------------------------------------------------------------
# Real parameters: fixed points on the principal interval [0, sqrt(pi/2))
# ---------------------------------------------------------------------------

def _principal_gap(lam: float, x: np.ndarray) -> np.ndarray:
    return lam + np.tan(x * x) - x


def real_fixed_points_principal(
    lambda_real: float,
    *,
    samples: int = SCAN_SAMPLES,
    margin: float = PRINCIPAL_MARGIN,
    tangency_tol: float = TANGENCY_TOL,
) -> list[float]:
    """Approximate locations of the roots of lam + tan(x^2) - x on [0, sqrt(pi/2) - margin).

    Found by a sign-change scan on ``samples`` equispaced points; a local
    minimum of |g| below ``tangency_tol`` without a sign change counts as one
    (double) root.
    """
    lam = float(lambda_real)
    x = np.linspace(0.0, math.sqrt(math.pi / 2) - margin, samples, endpoint=False)
    g = _principal_gap(lam, x)
    s = np.sign(g)
    roots: list[float] = [float(v) for v in x[s == 0]]
    change = s[:-1] * s[1:] < 0
    for j in np.flatnonzero(change):
        # linear interpolation inside the bracketing cell
        x0, x1, g0, g1 = x[j], x[j + 1], g[j], g[j + 1]
        roots.append(float(x0 - g0 * (x1 - x0) / (g1 - g0)))
    a = np.abs(g)
    interior = slice(1, samples - 1)
    same_sign = (s[:-2] == s[1:-1]) & (s[1:-1] == s[2:]) & (s[1:-1] != 0)
    local_min = (a[interior] <= a[:-2]) & (a[interior] <= a[2:]) & (a[interior] < tangency_tol)
    for j in np.flatnonzero(same_sign & local_min):
        roots.append(float(x[j + 1]))
    return sorted(roots)


def count_real_fixed_points_principal(lambda_real: float, **kwargs) -> int:
    return len(real_fixed_points_principal(lambda_real, **kwargs))


def tangency_point() -> tuple[float, float]:
    """Return (lam*, x*) where the two principal real fixed points merge.

    x* solves 2x sec^2(x^2) = 1, whose left side increases on
    [0, sqrt(pi/2)); lam* = x* - tan(x*^2).
    """
    def slope_gap(x: float) -> float:
        return 2.0 * x / math.cos(x * x) ** 2 - 1.0

    hi = math.sqrt(math.pi / 2) - PRINCIPAL_MARGIN
    x_star = optimize.bisect(slope_gap, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                             maxiter=200)
    return x_star - math.tan(x_star * x_star), x_star


def tangency_parameter() -> float:
    return tangency_point()[0]


# ---------------------------------------------------------------------------
# Singular orbits
# ---------------------------------------------------------------------------

def is_prepole(param: ParamLike, v: complex, depth: int) -> Optional[int]:
    """Smallest j <= depth such that f^j(v) is a pole (so f^{j+1}(v) = inf)."""
    p = as_parameter(param)
    z = complex(v)
    for j in range(depth + 1):
        w = evaluate(p, z)
        if w is INFINITY:
            return j
        z = w
    return None


@dataclass
class SingularFate:
    param: complex
    orbits: list[OrbitResult]
    hyperbolic: bool

    @property
    def cantor_signature(self) -> bool:
        """Hyperbolic, every singular orbit on a fixed point near lam + i or lam - i."""
        if not self.hyperbolic:
            return False
        lam = self.param
        for orb in self.orbits:
            if orb.period != 1:
                return False
            z = orb.cycle.points[0]
            if min(abs(z - (lam + 1j)), abs(z - (lam - 1j))) >= CANTOR_RADIUS:
                return False
        return True

    @property
    def attracting_point(self) -> Optional[complex]:
        if not self.hyperbolic or self.orbits[0].period != 1:
            return None
        return self.orbits[0].cycle.points[0]


def singular_orbit_fate(param: ParamLike, max_iter: int = 100, **opts) -> SingularFate:
    p = as_parameter(param)
    orbits = [iterate_orbit(p, v, max_iter, **opts) for v in singular_values(p)]
    hyperbolic = all(o.converged for o in orbits)
    return SingularFate(p.lam, orbits, hyperbolic)
