"""Deletion/contraction lenses over matroid instances.

A view never mutates its instance: it records a contracted set (committed
to the solution) and a deleted set.  Independence of ``T`` within a view
is independence of ``T`` together with the contracted set in the base
instance, so oracle queries against a view simply append the contraction.

Views are immutable; ``contract``/``delete``/``restrict`` return new ones.
Ids are stable: the alive set filters, it never re-indexes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .elements import ElementSet
from .errors import ContractError, DomainError
from .matroids import MatroidInstance


@dataclass(frozen=True, eq=False)
class MatroidView:
    base: MatroidInstance
    contracted: ElementSet
    deleted: ElementSet
    alive: ElementSet = field(init=False)

    def __post_init__(self):
        if not self.contracted.isdisjoint(self.deleted):
            raise DomainError("contracted and deleted sets overlap")
        alive = ElementSet.full(self.base.n) - self.contracted - self.deleted
        object.__setattr__(self, "alive", alive)

    @classmethod
    def full(cls, instance: MatroidInstance) -> "MatroidView":
        return cls(instance, ElementSet(0), ElementSet(0))

    # cached arrays for kernel calls -----------------------------------

    @property
    def contracted_idx(self) -> np.ndarray:
        cached = self.__dict__.get("_cidx")
        if cached is None:
            cached = self.contracted.indices()
            self.__dict__["_cidx"] = cached
        return cached

    @property
    def alive_idx(self) -> np.ndarray:
        cached = self.__dict__.get("_aidx")
        if cached is None:
            cached = self.alive.indices()
            self.__dict__["_aidx"] = cached
        return cached

    def require_alive(self, s: ElementSet) -> None:
        if not s.issubset(self.alive):
            bad = next(iter(s - self.alive))
            raise DomainError(f"element {bad} is not alive in this view", element=bad)

    # structural operations --------------------------------------------

    def contract(self, c: ElementSet) -> "MatroidView":
        self.require_alive(c)
        merged = self.contracted | c
        if not _independent_in_base(self.base, merged):
            raise ContractError(
                "contraction set is dependent given prior contractions"
            )
        return MatroidView(self.base, merged, self.deleted)

    def delete(self, d: ElementSet) -> "MatroidView":
        self.require_alive(d)
        return MatroidView(self.base, self.contracted, self.deleted | d)

    def restrict(self, keep: ElementSet) -> "MatroidView":
        """View whose alive set is ``alive & keep`` (everything else deleted)."""
        return self.delete(self.alive - keep)

    def __repr__(self):
        return (
            f"MatroidView({self.base!r}, alive={len(self.alive)}, "
            f"contracted={len(self.contracted)}, deleted={len(self.deleted)})"
        )


def _independent_in_base(instance: MatroidInstance, s: ElementSet) -> bool:
    idx = s.indices()
    off = np.array([0, len(idx)], dtype=np.int64)
    empty = np.empty(0, dtype=np.int32)
    return bool(kernels.set_eval(instance.compiled(), empty, idx, off)[0])


def is_independent_immediate(view: MatroidView, s: ElementSet) -> bool:
    """Ledger-free independence check (test/debug path)."""
    view.require_alive(s)
    idx = s.indices()
    off = np.array([0, len(idx)], dtype=np.int64)
    return bool(
        kernels.set_eval(view.base.compiled(), view.contracted_idx, idx, off)[0]
    )


def rank_greedy(view: MatroidView) -> int:
    """Rank of the view via a sequential greedy scan in index order.

    Ledger-free; used as the validation oracle for redundancy checks.
    """
    kept = kernels.greedy_scan(view.base.compiled(), view.contracted_idx, view.alive_idx)
    return len(kept)


def greedy_basis(view: MatroidView) -> ElementSet:
    kept = kernels.greedy_scan(view.base.compiled(), view.contracted_idx, view.alive_idx)
    return ElementSet.from_array(kept)


def is_basis(view: MatroidView, b: ElementSet) -> bool:
    """True iff ``b`` is independent and maximal within the view."""
    view.require_alive(b)
    if not is_independent_immediate(view, b):
        return False
    rest = (view.alive - b).indices()
    if len(rest) == 0:
        return True
    base_idx = b.indices()
    boff = np.array([0, len(base_idx)], dtype=np.int64)
    coff = np.array([0, len(rest)], dtype=np.int64)
    ans = kernels.one_added_multi(
        view.base.compiled(), view.contracted_idx, base_idx, boff, rest, coff
    )
    return not ans.any()


def view_contract(view: MatroidView, c: ElementSet) -> MatroidView:
    return view.contract(c)


def view_delete(view: MatroidView, d: ElementSet) -> MatroidView:
    return view.delete(d)
