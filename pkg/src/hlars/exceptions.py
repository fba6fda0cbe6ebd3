"""Exception types raised by hlars."""


class HlarsError(ValueError):
    """Base class for all hlars errors."""


class ConstantColumnError(HlarsError):
    """A column has zero spread and cannot be standardized."""

    def __init__(self, column, name=None):
        self.column = column
        self.name = name
        label = name if name is not None else f"column {column}"
        super().__init__(f"{label} is constant; cannot standardize")


class RankDeficientError(HlarsError):
    """The active-set design matrix is not of full column rank.

    ``column`` is the index (into the matrix handed to the solver, or into
    the full design when raised from a fit) of the first dependent column.
    """

    def __init__(self, column, name=None):
        self.column = column
        self.name = name
        label = name if name is not None else f"column {column}"
        super().__init__(f"{label} is linearly dependent on earlier columns")


class UnknownTermError(HlarsError):
    """A dependency refers to a term that is not in the design."""


class TermNeverEnteredError(HlarsError):
    """A path stopped before every term became active."""

    def __init__(self, terms):
        self.terms = list(terms)
        super().__init__(f"terms never entered the model: {', '.join(self.terms)}")
