"""Exception types shared across the package."""


class OpchError(Exception):
    pass


class MixedWeight(OpchError, ValueError):
    pass


class ZeroExpr(OpchError, ValueError):
    pass


class WrongWeight(OpchError, ValueError):
    pass


class InvalidWeight(OpchError, ValueError):
    pass


class DerivationOverflow(OpchError, ValueError):
    pass


class TermSyntaxError(OpchError, ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class DimensionMismatch(OpchError, ValueError):
    pass


class NotInImage(OpchError, ValueError):
    pass


class UnknownVariety(OpchError, KeyError):
    def __str__(self):
        return f"unknown variety {self.args[0]!r}"


class ArityMismatch(OpchError, ValueError):
    pass


class VariableClash(OpchError, ValueError):
    pass


class ArityTooLarge(OpchError, ValueError):
    pass


class PairMismatch(OpchError, ValueError):
    pass


class NoDerivation(OpchError, ValueError):
    pass
