"""Exception hierarchy shared by every stage of the pipeline."""


class BDRError(Exception):
    """Base class for all errors raised by :mod:`bdr`."""


class ParseError(BDRError, ValueError):
    """Malformed expression text.

    ``offset`` is the byte offset of the offending token and ``expected``
    the set of token kinds that would have been accepted there.
    """

    def __init__(self, message, offset=0, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = message
        if self.expected:
            detail += " (expected one of: %s)" % ", ".join(sorted(self.expected))
        super().__init__("%s at offset %d" % (detail, offset))


class UnknownIdentifier(ParseError):
    """A name outside the expression vocabulary."""

    def __init__(self, name, offset=0):
        self.name = name
        super().__init__("unknown identifier %r" % name, offset)


class DomainError(BDRError, ArithmeticError):
    """Evaluation left the real domain (log/sqrt of negatives, division by zero)."""


class DegenerateInput(BDRError, ValueError):
    """Linearly dependent vectors handed to Gram-Schmidt."""


class DefinitionError(BDRError, ValueError):
    """Structurally invalid surface-definition document."""


class BadDomain(DefinitionError):
    """Parameter ranges or grid counts are unusable."""


class NotUnitSpeed(DefinitionError):
    """The s-parameter curves are not parametrized by arc length."""

    def __init__(self, s, t, residual):
        self.s, self.t, self.residual = s, t, residual
        super().__init__(
            "not unit speed: |<psi_s, psi_s> - 1| = %.3e at (s, t) = (%.6g, %.6g)"
            % (residual, s, t)
        )


class DegenerateNormalSpace(BDRError, ValueError):
    """No initial normal frame can be oriented (psi_ss and psi_t both vanish)."""


class DriftExceeded(BDRError, RuntimeError):
    """Re-orthonormalization had to correct the transported frame too much."""


class DegeneratePoint(BDRError, ValueError):
    """Q or W vanishes at a cell, so the normal frame N1, N2 is undefined."""
