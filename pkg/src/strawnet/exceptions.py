"""Exception hierarchy shared across strawnet."""


class NetworkError(ValueError):
    """Base class for malformed networks, findings and queries."""


class StructuralError(NetworkError):
    """The parent graph is not a DAG or references unknown variables."""


class EvidenceError(NetworkError):
    """Findings name an unknown variable or state, or repeat a variable."""


class ImpossibleEvidenceError(NetworkError):
    """A conditional query was made on findings with probability zero."""


class RoleError(NetworkError):
    """A variable has the wrong role (Target/Evidence/Other) for the operation."""


class CapExceededError(NetworkError):
    """A state-space or configuration-count cap would be exceeded."""


class ParseError(NetworkError):
    """A network or findings document could not be parsed.

    Parameters
    ----------
    message : str
        Human-readable description.
    line : int, optional
        1-based line number in the document, when known.
    variable : str, optional
        Name of the offending variable, when known.
    """

    def __init__(self, message, line=None, variable=None):
        self.line = line
        self.variable = variable
        where = []
        if line is not None:
            where.append(f"line {line}")
        if variable is not None:
            where.append(f"variable {variable!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
