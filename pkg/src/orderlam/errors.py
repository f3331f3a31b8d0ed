"""Exception types shared by the pipeline modules."""


class OrderlamError(Exception):
    """Base class for every error raised by this package."""


class UnknownGenerator(OrderlamError):
    pass


class SpecMismatch(OrderlamError):
    pass


class UndecidedOrder(OrderlamError):
    pass


class InvalidComplex(OrderlamError):
    pass


class AlreadyTrivalent(OrderlamError):
    pass


class PreconditionEdgesNotTrivalent(OrderlamError):
    pass


class VertexAlreadyGood(OrderlamError):
    pass


class WrongDimension(OrderlamError):
    pass


class MemberNotFound(OrderlamError):
    pass


class PairingOutsideBall(OrderlamError):
    pass


class BadLocalModel(OrderlamError):
    pass


class GapTypeMismatch(OrderlamError):
    pass


class InconsistentMu(OrderlamError):
    pass


class ParseError(OrderlamError):
    pass


class StageFailure(OrderlamError):
    def __init__(self, section, message=""):
        super().__init__(f"{section}: {message}" if message else section)
        self.section = section
