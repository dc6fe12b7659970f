"""Itineraries, the one-sided shift and cylinder sets for Cantor-regime parameters.

A point z of the Julia set is coded by the labels of the poles its orbit
visits: symbol ``s_i`` is the label of the pole nearest to ``f^(i-1)(z)``.
Pre-poles have finite codes that end with the pole they land on; such words
carry ``terminated=True`` (serialised with a trailing ``inf``).

Orbits near the Julia set expand by a factor of 50-500 per step, so a
double-precision start loses every digit within eight steps.  Orbits and
branch compositions here therefore run in mpmath at ``dps`` decimal digits
(default 50); long words still round-trip exactly.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import mpmath
import numpy as np

from .errors import BranchUndefined, NotCantorParameter, OrbitEnteredFatouNeighborhood
from .inverse import ASYMPTOTIC_TOLERANCE, arctan_principal
from .mapcore import (
    INFINITY,
    POLE_TOLERANCE,
    SATURATION_CUTOFF,
    ParamLike,
    as_parameter,
    nearest_pole_index,
    pole_point,
)
from .orbit import refine_cycle, singular_orbit_fate

DEFAULT_DPS = 50
TRAP_RADIUS = 0.5
BASE_RADIUS = 0.25
BOUNDARY_SAMPLES = 16
TERMINATOR = "inf"


@dataclass(frozen=True)
class ItineraryWord:
    symbols: tuple[int, ...] = ()
    terminated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        parts = [str(s) for s in self.symbols]
        if self.terminated:
            parts.append(TERMINATOR)
        return ",".join(parts)

    @classmethod
    def parse(cls, text: str) -> "ItineraryWord":
        """Parse ``"0,2,-1,inf"``; ``inf`` may only appear last."""
        items = [t.strip() for t in text.split(",")] if text.strip() else []
        terminated = bool(items) and items[-1].lower() == TERMINATOR
        if terminated:
            items = items[:-1]
        try:
            symbols = tuple(int(t) for t in items)
        except ValueError:
            raise ValueError(f"malformed itinerary word: {text!r}") from None
        return cls(symbols, terminated)

    def prefix(self, n: int) -> "ItineraryWord":
        if n >= len(self.symbols):
            return self
        return ItineraryWord(self.symbols[:n], False)


def shift(word: ItineraryWord) -> ItineraryWord:
    """Drop the leading symbol; the terminator is kept."""
    if not word.symbols:
        raise ValueError("cannot shift an empty word")
    return ItineraryWord(word.symbols[1:], word.terminated)


def common_prefix_length(x: ItineraryWord, y: ItineraryWord) -> int:
    k = 0
    for a, b in zip(x.symbols, y.symbols):
        if a != b:
            break
        k += 1
    return k


def sequence_distance(x: ItineraryWord, y: ItineraryWord) -> float:
    """2**-k with k the common-prefix length; 0 only for identical words.

    Words that agree on the shorter one but differ in length or terminator
    count as distinct at the end of the shorter word, which keeps the
    ultrametric inequality valid across lengths.
    """
    if x == y:
        return 0.0
    return 2.0 ** -common_prefix_length(x, y)


# ---------------------------------------------------------------------------
# High-precision map and branches
# ---------------------------------------------------------------------------

def _mp_pole(n: int):
    n = int(n)
    if n % 2 == 0:
        m = n // 2
        r = mpmath.sqrt(abs(m + mpmath.mpf(0.5)) * mpmath.pi)
        return mpmath.mpc(r if m >= 0 else -r, 0)
    q = (abs(n) + 1) // 2
    r = mpmath.sqrt((q - mpmath.mpf(0.5)) * mpmath.pi)
    return mpmath.mpc(0, r if n > 0 else -r)


def mp_evaluate(lam, z):
    """``lam + tan(z**2)`` in the current mpmath precision (``INFINITY`` at poles)."""
    lam = mpmath.mpc(lam)
    z = mpmath.mpc(z)
    w = z * z
    if w.imag > SATURATION_CUTOFF:
        return lam + 1j
    if w.imag < -SATURATION_CUTOFF:
        return lam - 1j
    k = mpmath.floor(w.real / mpmath.pi)
    if abs(w - (k + mpmath.mpf(0.5)) * mpmath.pi) < POLE_TOLERANCE:
        return INFINITY
    return lam + mpmath.tan(w)


def _mp_arctan(u):
    return mpmath.log((1 + 1j * u) / (1 - 1j * u)) / 2j


def _select_k(lam: complex, w: complex, symbol: int) -> int:
    """Offset k putting arctan(w - lam) + k*pi next to the square of pole ``symbol``."""
    u = w - lam
    if abs(u - 1j) < ASYMPTOTIC_TOLERANCE or abs(u + 1j) < ASYMPTOTIC_TOLERANCE:
        raise BranchUndefined(f"{w!r} is an asymptotic value; no inverse branch is defined")
    target = pole_point(symbol)
    return round(((target * target).real - arctan_principal(u).real) / math.pi)


def _nearer_root(r, target: complex):
    # the sign is picked on the root actually computed, so double and mpmath agree
    rc = complex(r)
    return r if abs(rc - target) <= abs(-rc - target) else -r


def mp_branch_toward(lam, w, symbol: int):
    """Preimage of ``w`` in the component of the pole ``symbol`` (mpmath)."""
    k = _select_k(complex(lam), complex(w), symbol)
    r = mpmath.sqrt(_mp_arctan(mpmath.mpc(w) - mpmath.mpc(lam)) + k * mpmath.pi)
    return _nearer_root(r, pole_point(symbol))


def branch_toward(lam: complex, w: complex, symbol: int) -> complex:
    """Double-precision twin of :func:`mp_branch_toward`."""
    k = _select_k(lam, w, symbol)
    r = cmath.sqrt(arctan_principal(w - lam) + k * math.pi)
    return _nearer_root(r, pole_point(symbol))


# ---------------------------------------------------------------------------
# Cantor-regime gate
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=256)
def attracting_fixed_point(lam: complex) -> complex:
    """Refined attracting fixed point near lam +/- i; raises if there is none."""
    fate = singular_orbit_fate(lam, max_iter=200)
    if not fate.cantor_signature:
        raise NotCantorParameter(f"lam = {lam!r} is not in the Cantor regime")
    cyc = fate.orbits[0].cycle
    return refine_cycle(lam, cyc).points[0]


def _to_mp(z):
    if isinstance(z, mpmath.mpc):
        return z
    return mpmath.mpc(complex(z))


def itinerary(param: ParamLike, z, length: int, *, dps: int = DEFAULT_DPS) -> ItineraryWord:
    """Pole labels visited by the first ``length`` points of the orbit of ``z``.

    ``z`` may be a complex, an ``mpmath.mpc`` or ``INFINITY`` (empty,
    terminated word).  The word is terminated when the last recorded point
    is a pole.
    """
    if z is INFINITY:
        return ItineraryWord((), True)
    lam = as_parameter(param).lam
    z_star = attracting_fixed_point(lam)
    symbols = []
    with mpmath.workdps(dps):
        zm = _to_mp(z)
        for step in range(length):
            zc = complex(zm)
            if abs(zc - z_star) < TRAP_RADIUS:
                raise OrbitEnteredFatouNeighborhood(
                    f"orbit point {zc!r} at step {step} lies in the basin of {z_star!r}")
            symbols.append(nearest_pole_index(zc))
            nxt = mp_evaluate(lam, zm)
            if nxt is INFINITY:
                return ItineraryWord(symbols, True)
            zm = nxt
    return ItineraryWord(symbols, False)


@dataclass(frozen=True)
class CylinderSet:
    word: ItineraryWord
    representative: complex
    diameter_estimate: float
    representative_hp: object = field(default=None, compare=False, repr=False)


def cylinder_point(
    param: ParamLike,
    word: ItineraryWord,
    *,
    dps: int = DEFAULT_DPS,
    base_radius: float = BASE_RADIUS,
    samples: int = BOUNDARY_SAMPLES,
) -> CylinderSet:
    """Representative and size of the cylinder B_word.

    The inverse branches named by ``word[:-1]`` are composed right to left
    onto the pole of the last symbol, giving the pre-pole whose code is
    ``word`` followed by termination.  The diameter estimate is the spread of
    ``samples`` points of the circle of radius ``base_radius`` about that
    pole, pushed through the same composition.
    """
    if not word.symbols:
        raise ValueError("cylinder of the empty word is undefined")
    lam = as_parameter(param).lam
    attracting_fixed_point(lam)
    *head, last = word.symbols
    with mpmath.workdps(dps):
        rep = _mp_pole(last)
        for s in reversed(head):
            rep = mp_branch_toward(lam, rep, s)
        rep_c = complex(rep)
    base = pole_point(last)
    theta = 2 * np.pi * np.arange(samples) / samples
    pts = [base + base_radius * complex(np.cos(t), np.sin(t)) for t in theta]
    for s in reversed(head):
        pts = [branch_toward(lam, p, s) for p in pts]
    arr = np.array(pts)
    diam = float(np.max(np.abs(arr[:, None] - arr[None, :])))
    return CylinderSet(word, rep_c, diam, representative_hp=rep)


def verify_conjugacy(param: ParamLike, z, n: int, *, dps: int = DEFAULT_DPS) -> bool:
    """Check itinerary(f(z), n) == shift(itinerary(z, n + 1))."""
    lam = as_parameter(param).lam
    if z is INFINITY:
        return True
    with mpmath.workdps(dps):
        fz = mp_evaluate(lam, _to_mp(z))
    rhs = shift(itinerary(lam, z, n + 1, dps=dps))
    lhs = itinerary(lam, fz, n, dps=dps)
    return lhs == rhs


# ---------------------------------------------------------------------------
# Word generators used by the verification suites
# ---------------------------------------------------------------------------

def random_word(rng: np.random.Generator, length: int, max_symbol: int,
                terminated: bool = True) -> ItineraryWord:
    syms = rng.integers(-max_symbol, max_symbol + 1, size=length)
    return ItineraryWord(tuple(int(s) for s in syms), terminated)


def words_of_length(length: int, alphabet: Sequence[int],
                    terminated: bool = True) -> Iterable[ItineraryWord]:
    for syms in itertools.product(alphabet, repeat=length):
        yield ItineraryWord(syms, terminated)


def extension_chain(word: ItineraryWord) -> list[ItineraryWord]:
    """Prefixes of ``word`` of length 1, 2, ..., len(word)."""
    return [ItineraryWord(word.symbols[:j], False) for j in range(1, len(word) + 1)]


def observed_contraction(diameters: Sequence[float]) -> Optional[float]:
    """Geometric-mean ratio between consecutive diameters of an extension chain."""
    if len(diameters) < 2 or diameters[0] <= 0:
        return None
    return (diameters[-1] / diameters[0]) ** (1.0 / (len(diameters) - 1))
