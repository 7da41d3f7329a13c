"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: parse and input problems
exit 2, unsupported fragments exit 3, exhausted budgets exit 4.
"""


class TeamLTLError(Exception):
    """Base class for all library errors."""


class ParseError(TeamLTLError):
    """Syntax error in a formula, team file, Kripke file or QBF file."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class UnsupportedFragment(TeamLTLError):
    """The formula uses connectives outside the fragment an operation accepts."""


class UnsupportedOpenProblem(UnsupportedFragment):
    """Synchronous model checking with splitjunctions has no known algorithm."""


class NameCollision(TeamLTLError):
    """A generated proposition name already occurs in the input formula."""


class UnknownAtom(TeamLTLError):
    """A generalised atom name is not present in the registry."""


class DuplicateName(TeamLTLError):
    """A generalised atom name is already registered."""


class ArityMismatch(TeamLTLError):
    """A generalised atom occurrence disagrees with its registered arity."""


class BoundExceeded(TeamLTLError):
    """A configured evaluation budget (lcm cap, team cap, prefix cap) ran out."""


class VectorSpaceExceeded(BoundExceeded):
    """The asynchronous shift-combination space is larger than the budget."""


class MalformedStructure(TeamLTLError):
    """A structured input (Kripke structure, QBF instance, hyper sentence)
    violates a well-formedness requirement."""


class NonPropositional(TeamLTLError):
    """A reduction expected a temporal-free formula."""


class NotForallFragment(TeamLTLError):
    """A HyperLTL sentence is outside the single-universal fragment."""
