"""Inverse branches of f and the fundamental regions L_k.

Every finite w other than lam +/- i has the preimages

    sign * sqrt(arctan(w - lam) + k*pi),   k in Z, sign in {+1, -1},

with ``arctan(u) = Log((1 + iu) / (1 - iu)) / (2i)`` on the principal
logarithm, so Re(arctan u) lies in (-pi/2, pi/2].  Consequently the square of
branch ``k`` lies in the strip (k - 1/2) pi < Re <= (k + 1/2) pi, which
contains the zero k*pi and straddles L_k and L_{k+1}; region_index of a
branch-k point is ``k + 1`` when Re(arctan(w - lam)) > 0 and ``k`` when it is
negative.  For k >= 0, branch (k, +1) maps lam to the zero sqrt(k*pi), i.e.
to zero_point(2k).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import AsymptoticValueNoPreimage, RegionBoundaryError
from .mapcore import ParamLike, as_parameter, pole_point

ASYMPTOTIC_TOLERANCE = 1e-14
BOUNDARY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BranchIndex:
    k: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")
        object.__setattr__(self, "k", int(self.k))

    def pole_label(self) -> int:
        """Label n of the pole sign*sqrt((k + 1/2) pi)."""
        k = self.k
        if k >= 0:
            return 2 * k if self.sign > 0 else -2 * k - 2
        q = -k
        return 2 * q - 1 if self.sign > 0 else -(2 * q - 1)


def arctan_principal(u: complex) -> complex:
    u = complex(u)
    return cmath.log((1 + 1j * u) / (1 - 1j * u)) / 2j


def _checked_offset(lam: complex, w: complex) -> complex:
    u = complex(w) - lam
    if abs(u - 1j) < ASYMPTOTIC_TOLERANCE or abs(u + 1j) < ASYMPTOTIC_TOLERANCE:
        raise AsymptoticValueNoPreimage(f"{w!r} is an asymptotic value of f; it has no preimage")
    return u


def principal_inverse(param: ParamLike, w: complex) -> complex:
    lam = as_parameter(param).lam
    return cmath.sqrt(arctan_principal(_checked_offset(lam, w)))


def branch_inverse(param: ParamLike, w: complex, branch: BranchIndex) -> complex:
    lam = as_parameter(param).lam
    r = cmath.sqrt(arctan_principal(_checked_offset(lam, w)) + branch.k * math.pi)
    return r if branch.sign > 0 else -r


def pole_preimage(param: ParamLike, branch: BranchIndex) -> complex:
    """The pole sign*sqrt((k + 1/2) pi): the branch-(k, sign) preimage of infinity."""
    as_parameter(param)
    return pole_point(branch.pole_label())


def region_index(z: complex) -> int:
    """Return k with pi (k-1) < Re(z**2) < pi k."""
    x = (complex(z) ** 2).real
    k = math.ceil(x / math.pi)
    if abs(x - k * math.pi) < BOUNDARY_TOLERANCE or abs(x - (k - 1) * math.pi) < BOUNDARY_TOLERANCE:
        raise RegionBoundaryError(f"Re(z**2) = {x!r} lies on a boundary of the regions L_k")
    return k
