"""Exception types shared across the library."""


class MatroidError(Exception):
    """Base class for all library errors."""


class DomainError(MatroidError):
    """An element id was used outside the view it belongs to."""

    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class ContractError(MatroidError):
    """Attempt to contract a set that is dependent given prior contractions."""


class BudgetError(MatroidError):
    """The per-round query budget was exceeded.

    Carries the round counter at the time of the violation and the batch
    size the submission would have reached.
    """

    def __init__(self, rounds, attempted_batch, budget):
        super().__init__(
            f"query budget exceeded in round {rounds}: "
            f"batch would reach {attempted_batch} > budget {budget}"
        )
        self.rounds = rounds
        self.attempted_batch = attempted_batch
        self.budget = budget


class SequencingError(MatroidError):
    """A ticket was redeemed before the flush that answers it."""


class PreconditionError(MatroidError):
    """An operation was invoked outside its stated precondition."""


class RoundBudgetError(MatroidError):
    """A solver exceeded its configured round cap."""
