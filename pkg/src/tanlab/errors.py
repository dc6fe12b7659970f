"""Exception hierarchy shared by all modules."""


class TanlabError(Exception):
    """Base class for errors raised by tanlab."""


class DomainError(TanlabError, ValueError):
    """Argument outside the domain of the operation (e.g. z = infinity)."""


class PoleProximityError(TanlabError, ValueError):
    """z**2 lies within the pole tolerance of a pole of tan."""


class AsymptoticValueNoPreimage(TanlabError, ValueError):
    """lam + i and lam - i are omitted values: they have no finite preimage."""


class RegionBoundaryError(TanlabError, ValueError):
    """Point lies on a boundary curve Re(z**2) = k*pi between regions."""


class NonConvergence(TanlabError, ArithmeticError):
    """Newton refinement of a cycle did not converge."""


class OrbitEnteredFatouNeighborhood(TanlabError):
    """Orbit fell into the trap disk around the attracting fixed point."""


class BranchUndefined(TanlabError, ValueError):
    """A required inverse branch hit an asymptotic value."""


class NotCantorParameter(TanlabError, ValueError):
    """Parameter does not have an attracting fixed point near lam +/- i."""
