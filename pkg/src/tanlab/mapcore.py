"""The family f(z) = lam + tan(z**2): evaluation, derivative, zeros, poles.

``tan`` is evaluated through the exponential form

    tan(w) = -i (e^{2iw} - 1) / (e^{2iw} + 1)

using whichever of ``e^{2iw}`` / ``e^{-2iw}`` has modulus <= 1, so nothing
overflows in the asymptotic tracts and tan(w) tends smoothly to +i / -i as
Im(w) -> +inf / -inf.

Zero/pole labelling.  Even labels live on the real axis and follow the usual
scheme (``p_{2m} = sqrt(m pi)``, ``s_{2m} = sqrt((m + 1/2) pi)`` for m >= 0,
negated magnitudes for m < 0).  Odd labels live on the imaginary axis:
positive odd labels on the positive imaginary axis, so ``p_1 = i sqrt(pi)``,
``s_1 = i sqrt(pi/2)``, ``p_{-1} = -i sqrt(pi)``, ``s_{-1} = -i sqrt(pi/2)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, PoleProximityError

POLE_TOLERANCE = 1e-12
SATURATION_CUTOFF = 700.0
MAX_POLE_INDEX = 64
# reported in place of a pole label whose magnitude exceeds MAX_POLE_INDEX
POLE_INDEX_SENTINEL = MAX_POLE_INDEX + 1


class _Infinity:
    """The point at infinity of the Riemann sphere (singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITY"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

SpherePoint = Union[complex, _Infinity]


def is_infinity(z) -> bool:
    return z is INFINITY


@dataclass(frozen=True)
class MapParameter:
    """Parameter ``lam`` of the family together with its singular data."""

    lam: complex

    def __post_init__(self):
        lam = complex(self.lam)
        if not cmath.isfinite(lam):
            raise DomainError(f"parameter must be finite, got {lam!r}")
        object.__setattr__(self, "lam", lam)

    @property
    def critical_point(self) -> complex:
        return 0j

    @property
    def critical_value(self) -> complex:
        return self.lam

    @property
    def asymptotic_value_plus(self) -> complex:
        return self.lam + 1j

    @property
    def asymptotic_value_minus(self) -> complex:
        return self.lam - 1j

    def conjugate(self) -> "MapParameter":
        return MapParameter(self.lam.conjugate())


ParamLike = Union[MapParameter, complex, float, int]


def as_parameter(param: ParamLike) -> MapParameter:
    if isinstance(param, MapParameter):
        return param
    return MapParameter(complex(param))


def pole_distance(w: complex) -> float:
    """Distance from ``w`` to the nearest pole (k + 1/2) pi of tan."""
    k = math.floor(w.real / math.pi)
    return abs(w - (k + 0.5) * math.pi)


def near_tan_pole(w: complex) -> bool:
    return pole_distance(w) < POLE_TOLERANCE


def _square(z: complex) -> complex:
    w = z * z
    if cmath.isfinite(w):
        return w
    # Overflow: keep the sign information of Im(z^2) = 2xy for saturation.
    im = 2.0 * z.real * z.imag
    if math.isinf(im) or abs(im) > SATURATION_CUTOFF:
        return complex(0.0, math.copysign(math.inf, im))
    return complex(math.inf, im)


def _tan_sec2(w: complex) -> tuple[complex, complex]:
    """Return (tan w, sec^2 w) for w away from the poles of tan."""
    if w.imag > SATURATION_CUTOFF:
        return 1j, 0j
    if w.imag < -SATURATION_CUTOFF:
        return -1j, 0j
    if w.imag == 0.0:
        # keeps real orbits real
        c = math.cos(w.real)
        return complex(math.tan(w.real)), complex(1.0 / (c * c))
    if w.imag > 0.0:
        e = cmath.exp(2j * w)
        return -1j * (e - 1.0) / (e + 1.0), 4.0 * e / ((1.0 + e) * (1.0 + e))
    e = cmath.exp(-2j * w)
    return 1j * (e - 1.0) / (e + 1.0), 4.0 * e / ((1.0 + e) * (1.0 + e))


def _check_finite(z) -> complex:
    if z is INFINITY:
        raise DomainError("f has an essential singularity at infinity")
    z = complex(z)
    if not cmath.isfinite(z):
        raise DomainError(f"argument must be finite, got {z!r}")
    return z


def evaluate(param: ParamLike, z) -> SpherePoint:
    """Return ``lam + tan(z**2)``, or ``INFINITY`` at (numerical) poles."""
    lam = as_parameter(param).lam
    z = _check_finite(z)
    w = _square(z)
    if math.isinf(w.imag):
        return lam + (1j if w.imag > 0 else -1j)
    if math.isinf(w.real):
        return INFINITY
    if near_tan_pole(w):
        return INFINITY
    t, _ = _tan_sec2(w)
    return lam + t


def derivative(param: ParamLike, z) -> complex:
    """Return ``f'(z) = 2 z sec^2(z**2)``; the parameter does not enter."""
    as_parameter(param)
    z = _check_finite(z)
    w = _square(z)
    if math.isinf(w.imag):
        return 0j
    if math.isinf(w.real) or near_tan_pole(w):
        raise PoleProximityError(f"z**2 = {w!r} is within {POLE_TOLERANCE} of a pole of tan")
    _, s = _tan_sec2(w)
    return 2.0 * z * s


def singular_values(param: ParamLike) -> list[complex]:
    """Critical value first, then the asymptotic values lam + i and lam - i."""
    p = as_parameter(param)
    return [p.critical_value, p.asymptotic_value_plus, p.asymptotic_value_minus]


def zero_point(n: int) -> complex:
    n = int(n)
    if n % 2 == 0:
        m = n // 2
        return complex(math.copysign(math.sqrt(abs(m) * math.pi), m)) if m else 0j
    q = (abs(n) + 1) // 2
    return complex(0.0, math.copysign(math.sqrt(q * math.pi), n))


def pole_point(n: int) -> complex:
    n = int(n)
    if n % 2 == 0:
        m = n // 2
        r = math.sqrt(abs(m + 0.5) * math.pi)
        return complex(r if m >= 0 else -r)
    q = (abs(n) + 1) // 2
    return complex(0.0, math.copysign(math.sqrt((q - 0.5) * math.pi), n))


def pole_index(z: complex) -> int:
    """Label of the pole whose square is the tan-pole nearest to ``z**2``.

    Labels beyond ``MAX_POLE_INDEX`` saturate to +/- ``POLE_INDEX_SENTINEL``.
    """
    z = complex(z)
    w = z * z
    j = math.floor(w.real / math.pi)  # nearest tan-pole is (j + 1/2) pi
    if j >= 0:
        n = 2 * j if z.real >= 0 else -2 * j - 2
    else:
        q = -j
        n = 2 * q - 1 if z.imag >= 0 else -(2 * q - 1)
    if abs(n) > MAX_POLE_INDEX:
        return int(math.copysign(POLE_INDEX_SENTINEL, n))
    return n


POLE_LABELS = np.arange(-MAX_POLE_INDEX, MAX_POLE_INDEX + 1)
POLE_TABLE = np.array([pole_point(int(n)) for n in POLE_LABELS])


def nearest_pole_index(z) -> int:
    """Label of the Euclidean-nearest pole among labels |n| <= MAX_POLE_INDEX."""
    z = complex(z)
    return int(POLE_LABELS[np.argmin(np.abs(POLE_TABLE - z))])


# ---------------------------------------------------------------------------
# Array versions (used by the raster kernels); same semantics as above.
# ---------------------------------------------------------------------------

def tan_sec2_array(w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised (tan, sec^2, pole_mask) for complex array ``w``.

    Entries flagged in ``pole_mask`` carry 0 in the other two outputs.
    """
    w = np.asarray(w, dtype=np.complex128)
    re, im = w.real, w.imag
    finite_re = np.isfinite(re)
    pole = np.zeros(w.shape, dtype=bool)
    sat_hi = im > SATURATION_CUTOFF
    sat_lo = im < -SATURATION_CUTOFF
    with np.errstate(invalid="ignore", over="ignore"):
        k = np.floor(np.where(finite_re, re, 0.0) / math.pi)
        pole[finite_re] = np.abs(w - (k + 0.5) * math.pi)[finite_re] < POLE_TOLERANCE
        pole |= ~finite_re & ~(sat_hi | sat_lo)
        mid = ~(sat_hi | sat_lo | pole)
        upper = im >= 0.0
        # exponent 2iw or -2iw, always with non-positive real part
        safe = np.where(mid, w, 0.0)
        e = np.exp(np.where(upper, 2j * safe, -2j * safe))
        ratio = (e - 1.0) / (e + 1.0)
        tan = np.where(upper, -1j * ratio, 1j * ratio)
        sec2 = 4.0 * e / ((1.0 + e) * (1.0 + e))
        real = mid & (im == 0.0)
        if real.any():
            r = re[real]
            tan[real] = np.tan(r)
            sec2[real] = 1.0 / np.cos(r) ** 2
    tan = np.where(sat_hi, 1j, np.where(sat_lo, -1j, tan))
    sec2 = np.where(mid, sec2, 0.0)
    tan = np.where(pole, 0.0, tan)
    return tan, sec2, pole


def square_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        w = z * z
        bad = ~np.isfinite(w)
        if bad.any():
            im = 2.0 * z.real[bad] * z.imag[bad]
            sat = ~np.isfinite(im) | (np.abs(im) > SATURATION_CUTOFF)
            fixed = np.empty(im.shape, dtype=np.complex128)
            fixed.real = np.where(sat, 0.0, np.inf)
            fixed.imag = np.where(sat, np.copysign(np.inf, im), im)
            w[bad] = fixed
    return w


def evaluate_array(lam, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`evaluate`; returns (values, pole_mask)."""
    z = np.asarray(z, dtype=np.complex128)
    w = square_array(z)
    tan, _, pole = tan_sec2_array(w)
    return lam + tan, pole


def derivative_array(z: np.ndarray) -> np.ndarray:
    """Vectorised :func:`derivative`; pole entries come back as ``inf``."""
    z = np.asarray(z, dtype=np.complex128)
    _, sec2, pole = tan_sec2_array(square_array(z))
    d = 2.0 * z * sec2
    return np.where(pole, np.inf, d)
