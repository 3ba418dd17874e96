"""Exception hierarchy shared by the library and the CLI."""


class HyperfibreError(Exception):
    """Base class; ``code`` is the CLI exit status for this failure."""

    code = 2


class InputError(HyperfibreError, ValueError):
    code = 2


class EmptyInput(InputError):
    pass


class MalformedLine(InputError):
    def __init__(self, lineno: int, line: str, reason: str = "unexpected content"):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class EmptyHyperedge(InputError):
    pass


class InvalidCounts(InputError):
    pass


class UnbalancedPartition(InputError):
    pass


class Disconnected(InputError):
    pass


class NonFiniteState(HyperfibreError, ArithmeticError):
    code = 4

    def __init__(self, step: int, time: float):
        self.step = step
        self.time = time
        super().__init__(f"non-finite phase at step {step} (t={time:g})")
