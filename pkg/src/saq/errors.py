"""Exception hierarchy shared by the library and the CLI.

The CLI maps each class onto an exit code: parse errors exit 1,
precondition violations exit 2, exhausted resource caps exit 3.
"""


class SaqError(Exception):
    exit_code = 2


class ParseError(SaqError, ValueError):
    exit_code = 1


class PreconditionError(SaqError, ValueError):
    exit_code = 2


class ResourceLimitError(SaqError, RuntimeError):
    exit_code = 3
