"""
Exceptions raised by the definable-geometry engine
"""
import humanize


class DefGeoError(Exception):
    """Base class for every error the engine raises on bad input or exhausted limits"""


class GrammarError(DefGeoError):
    """
    Source text does not conform to the structure, formula or spec grammar.

    Carries the 1-based line and column of the offending position and, when known,
    an excerpt of the grammar rule that was expected there.
    """

    def __init__(self, message, line=None, column=None, rule=None):
        self.message = message
        self.line = line
        self.column = column
        self.rule = rule
        super().__init__(message, line, column, rule)

    def __str__(self):
        text = self.message
        if self.line is not None:
            text = f"line {self.line}, column {self.column}: {self.message}"
        if self.rule:
            text = f"{text}\n  expected: {self.rule}"
        return text


class SymbolError(DefGeoError):
    """Unknown or duplicate operation/relation symbol"""


class ArityError(DefGeoError):
    """Arity of a table, tuple, relation or map does not match its use"""


class ElementRangeError(DefGeoError):
    """An element value lies outside the universe 0..k-1"""


class UniverseMismatch(DefGeoError):
    """Two objects that must share a universe size do not"""


class ModeMismatch(DefGeoError):
    """Two formula classes that must share a closure mode do not"""


class SubstitutionError(DefGeoError):
    """A formula has a free variable outside the domain of a substitution or assignment"""


class GuardExceeded(DefGeoError):
    """
    A resource guard refused the computation.

    The message names the guard so users know which environment variable to raise.
    The constructor arguments stay in args, so the error crosses process boundaries intact.
    """

    def __init__(self, guard, limit, requested=None, hint=None):
        self.guard = guard
        self.limit = limit
        self.requested = requested
        self.hint = hint
        super().__init__(guard, limit, requested, hint)

    def __str__(self):
        text = f"{self.guard} exceeded: limit {humanize.intcomma(self.limit)}"
        if self.requested is not None:
            text = (f"{self.guard} exceeded: requested {humanize.intcomma(self.requested)}, "
                    f"limit {humanize.intcomma(self.limit)}")
        if self.hint:
            text = f"{text} ({self.hint})"
        return text
