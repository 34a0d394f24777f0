"""Exception hierarchy shared by every module."""


class CausalError(Exception):
    """Base class for all errors raised by hpcause."""


class InputError(CausalError):
    """Malformed or inconsistent user input (CLI exit code 3)."""


class ParseError(InputError):
    pass


class UndefinedVariable(InputError):
    pass


class DuplicateVariable(InputError):
    pass


class CyclicModel(InputError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cyclic dependency: " + " -> ".join(self.cycle))


class SelfReference(CyclicModel):
    def __init__(self, name):
        super().__init__([name, name])


class UnboundVariable(CausalError):
    pass


class InvalidContext(InputError):
    pass


class InvalidQuery(InputError):
    pass


class CauseEffectOverlap(InvalidQuery):
    pass


class AC1Violation(InvalidQuery):
    pass


class NoCandidateVariables(InvalidQuery):
    pass


class EffectNotActual(InvalidQuery):
    pass


class EffectNeverHolds(InvalidQuery):
    pass


class NotACause(CausalError):
    pass


class CapExceeded(CausalError):
    """A brute-force routine was asked to run above its size cap."""


class ModelTooLargeForExactDr(CapExceeded):
    pass


class EnumerationLimitExceeded(CausalError):
    pass


class UnregisteredIndex(CausalError):
    pass


class SolverTimeout(CausalError):
    pass
