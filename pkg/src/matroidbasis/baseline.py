"""The square-root-round grouped prefix solver.

Each round splits the alive elements (in index order) into groups of
ceil(sqrt(alive)) consecutive ids and queries every prefix of every group
in one batch.  Either some group is entirely independent, in which case
the first such group is contracted, or every group has a first
prefix-breaking element, all of which are redundant and deleted together.
Both cases shed about sqrt(alive) elements, so the loop finishes within
2*ceil(sqrt(n)) + 2 rounds.

Used standalone and as the inner solver for bucketed explicit solving,
where several runs on disjoint restrictions share each round's batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elements import ElementSet
from .session import QuerySession, QueryTicket
from .views import MatroidView


@dataclass(frozen=True)
class RoundOutcome:
    """Exactly one of the two fields is set."""

    contracted: ElementSet | None = None
    deleted: ElementSet | None = None


class KuwRunner:
    """Stepwise runner so several instances can share flushes."""

    def __init__(self, view: MatroidView):
        self.view = view
        self.gained = ElementSet(0)
        self.removed = ElementSet(0)
        self._groups: list[np.ndarray] | None = None
        self._ticket: QueryTicket | None = None

    @property
    def done(self) -> bool:
        return not self.view.alive

    def submit(self, session: QuerySession) -> None:
        alive = self.view.alive_idx
        g = int(np.ceil(np.sqrt(len(alive))))
        self._groups = [alive[i : i + g] for i in range(0, len(alive), g)]
        self._ticket = session.submit_chains(self.view, self._groups)

    def collect(self) -> RoundOutcome:
        t_arr = self._ticket.result()
        groups = self._groups
        self._groups = None
        self._ticket = None
        free = np.nonzero(t_arr == 0)[0]
        if len(free):
            chosen = ElementSet.from_array(groups[int(free[0])])
            self.view = self.view.contract(chosen)
            self.gained = self.gained | chosen
            return RoundOutcome(contracted=chosen)
        breakers = ElementSet.from_array(
            np.array([groups[i][t - 1] for i, t in enumerate(t_arr)], dtype=np.int32)
        )
        self.view = self.view.delete(breakers)
        self.removed = self.removed | breakers
        return RoundOutcome(deleted=breakers)


def kuw_round(view: MatroidView, session: QuerySession) -> RoundOutcome:
    """One grouped-prefix round; uses exactly one ledger round."""
    runner = KuwRunner(view)
    runner.submit(session)
    session.flush()
    return runner.collect()


def kuw_find_basis(view: MatroidView, session: QuerySession) -> ElementSet:
    """Basis of the view; consumes at most ~2*sqrt(n) ledger rounds."""
    runner = KuwRunner(view)
    while not runner.done:
        runner.submit(session)
        session.flush()
        runner.collect()
    return runner.gained
