"""Exception hierarchy and the CLI exit-code map."""

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_OVERFLOW = 3
EXIT_CAP = 4


class PermlabError(Exception):
    """Base class for all permlab errors."""

    exit_code = EXIT_CHECK_FAILED


class ContractError(PermlabError):
    """A precondition on an operation was violated (bad shape, bad range)."""

    exit_code = EXIT_PARSE


class ParseError(PermlabError):
    """Malformed matrix, distribution, or CLI input."""

    exit_code = EXIT_PARSE


class AccumulatorOverflowError(PermlabError):
    """Input exceeds the certified 128-bit accumulator bound of a kernel.

    Kernels never wrap: inputs whose worst-case intermediate magnitude
    cannot be certified to fit a signed 128-bit accumulator are rejected
    up front, with the offending bound attached.
    """

    exit_code = EXIT_OVERFLOW

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class CapExceededError(PermlabError):
    """An enumeration or atom-count cap would be exceeded."""

    exit_code = EXIT_CAP
