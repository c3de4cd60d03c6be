"""Exception hierarchy shared by all modules."""


class SerreHomError(Exception):
    """Base class for library errors."""


class NotSublattice(SerreHomError):
    pass


class RankMismatch(SerreHomError):
    pass


class DimensionMismatch(SerreHomError):
    pass


class ZeroIdeal(SerreHomError):
    pass


class GroupMismatch(SerreHomError):
    pass


class RingMismatch(SerreHomError):
    pass


class Unsupported(SerreHomError):
    pass


class UnsupportedGroup(Unsupported):
    pass


class NotSurjective(SerreHomError):
    pass


class NotSection(SerreHomError):
    pass


class NotLatticeMap(SerreHomError):
    pass


class NotIsogeny(SerreHomError):
    pass


class NotExactInput(SerreHomError):
    pass


class BadDiscriminant(SerreHomError, ValueError):
    pass


class NotUpperHalfPlane(SerreHomError, ValueError):
    pass


class PrecisionError(SerreHomError):
    """Base for numerical precision failures (CLI exit code 3)."""


class PrecisionUnachievable(PrecisionError):
    pass


class PrecisionExhausted(PrecisionError):
    pass


class Cancelled(SerreHomError):
    pass


class ParseError(SerreHomError, ValueError):
    pass
