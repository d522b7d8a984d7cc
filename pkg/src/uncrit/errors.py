"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: ``ConfigError`` -> 2, ``InputError`` -> 3,
``NumericalError`` -> 4.
"""


class UncritError(Exception):
    exit_code = 1


class ConfigError(UncritError, ValueError):
    exit_code = 2


class InputError(UncritError, ValueError):
    exit_code = 3


class NumericalError(UncritError, ArithmeticError):
    exit_code = 4


class MeshError(InputError):
    pass


class DegenerateFamilyError(NumericalError):
    """The family carries no parametric dependence where one is needed."""
