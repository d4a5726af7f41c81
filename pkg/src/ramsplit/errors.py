"""Exception types shared across the package.

The CLI maps these onto its exit-code convention: invalid payloads and
violated type invariants are ``InputError`` (exit 3), blown search budgets
and factoring bounds are ``BudgetExceededError`` (exit 4).  Mathematical
"no" answers are ordinary return values, never exceptions; the one
exception is ``NotPirutkaError``, the defensive signal raised when a
certificate system turns out to be insoluble.
"""


class RamsplitError(Exception):
    """Base class for all package-specific errors."""


class InputError(RamsplitError):
    """Malformed payload or violated precondition/type invariant."""


class BudgetExceededError(RamsplitError):
    """A configured search budget or factoring bound would be exceeded."""


class NotPirutkaError(RamsplitError):
    """The certificate system for a submatrix pair (I, J) is insoluble."""

    def __init__(self, rows, cols):
        self.rows = tuple(rows)
        self.cols = tuple(cols)
        super().__init__(
            f"submatrix with rows {self.rows} and columns {self.cols} "
            "is rank deficient: matrix is not Pirutka for this prime"
        )
