"""Exception types shared across the solver engine."""


class BidsolveError(Exception):
    """Base class for all domain errors raised by this package."""


# -- graph construction / validation ----------------------------------------

class GraphError(BidsolveError):
    pass


class CyclicGraph(GraphError):
    pass


class DanglingTerminalEdge(GraphError):
    pass


class DeadEndVertex(GraphError):
    pass


class UnreachableTerminal(GraphError):
    pass


class InvalidParameter(BidsolveError):
    pass


class TerminalVertex(BidsolveError):
    """An operation that needs a non-terminal vertex was given a terminal."""


# -- payoff matrices ----------------------------------------------------------

class MissingValue(BidsolveError):
    """The value lookup has no entry for a required successor state."""


class InvalidLength(BidsolveError):
    pass


class DimensionMismatch(BidsolveError):
    pass


# -- linear solves ------------------------------------------------------------

class Singular(BidsolveError):
    """The system is rank-deficient at tolerance, even for the dense solver."""


# -- equilibrium --------------------------------------------------------------

class DegenerateChips(BidsolveError):
    """A bid-space side is trivial (a = 0 or b = 0); the single-turn solver
    does not apply and callers must use the degenerate short-circuit."""


class NegativeStrategyEntry(BidsolveError):
    """The strategy formula produced an entry below the clamping band,
    which indicates the restricted length was wrong."""


# -- value tables -------------------------------------------------------------

class GraphTooLarge(BidsolveError):
    pass


class FormatMismatch(BidsolveError):
    pass


class GraphHashMismatch(BidsolveError):
    pass


# -- oracle -------------------------------------------------------------------

class TooLarge(BidsolveError):
    """Matrix exceeds the exact oracle's cost guard."""
