"""Higher-order store: alloc/read/write/dealloc plus the generic atomic effect.

The heap maps locations to *delayed trees*, so stored computations are not
evaluated at write time.  Freshness is a monotonic counter: a location index
is never reused, even after dealloc.

The atomic effect takes a location and a delayed function
``tree -> (result, new_stored)`` and performs the whole read-modify-write in
one reification step; XCHG, CAS and FAA are thin derivations over it.  CAS
compares only ground heads (naturals, unit, locations); comparing anything
else produces a runtime-error result and leaves the cell unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

from ..core import (
    RUNTIME_ERR,
    Err,
    GITree,
    Ground,
    Later,
    Loc,
    Nat,
    OpId,
    Ret,
    UNIT,
    Unit,
    Vis,
    nat_add,
    natop_lift,
)
from ..engine import OpSpec, Reifier

ALLOC = OpId("store", "alloc")
READ = OpId("store", "read")
WRITE = OpId("store", "write")
DEALLOC = OpId("store", "dealloc")
ATOMIC = OpId("store", "atomic")


@dataclass(frozen=True)
class Heap:
    cells: tuple  # ((index, Later[tree]), ...) insertion-ordered
    next_fresh: int = 0

    def lookup(self, loc: Loc) -> Optional[Later]:
        for idx, stored in self.cells:
            if idx == loc.index:
                return stored
        return None

    def store(self, loc: Loc, value: Later) -> "Heap":
        if self.lookup(loc) is None:
            return Heap(self.cells + ((loc.index, value),), self.next_fresh)
        return Heap(
            tuple((i, value if i == loc.index else old) for i, old in self.cells),
            self.next_fresh,
        )

    def remove(self, loc: Loc) -> "Heap":
        return Heap(
            tuple((i, old) for i, old in self.cells if i != loc.index), self.next_fresh
        )

    def alloc(self, value: Later) -> tuple:
        loc = Loc(self.next_fresh)
        heap = Heap(self.cells + ((loc.index, value),), self.next_fresh + 1)
        return loc, heap

    def as_dict(self) -> Dict[int, Later]:
        return dict(self.cells)


EMPTY_HEAP = Heap(())


def heap_of(**bindings) -> Heap:
    """Test helper: heap_of(l0=tree, l3=tree) with explicit indices."""
    cells = []
    top = 0
    for name, tree in bindings.items():
        idx = int(name[1:])
        cells.append((idx, Later.now(tree)))
        top = max(top, idx + 1)
    return Heap(tuple(cells), top)


# --- wrappers -----------------------------------------------------------------


def alloc(value: GITree, k) -> GITree:
    """ALLOC: carries the delayed value; the continuation receives the location."""
    return Vis(ALLOC, Later.now(value), lambda loc: Later.now(k(loc)))


def read(loc: Loc) -> GITree:
    """READ: the output *is* the stored delayed tree; identity continuation."""
    return Vis(READ, loc, lambda stored: stored)


def write(loc: Loc, value: GITree) -> GITree:
    """WRITE: stores the delayed value; returns unit regardless of the output."""
    return Vis(WRITE, (loc, Later.now(value)), lambda _y: Later.now(Ret(UNIT)))


def dealloc(loc: Loc) -> GITree:
    """DEALLOC: removes the cell; returns unit (mirrors WRITE)."""
    return Vis(DEALLOC, loc, lambda _y: Later.now(Ret(UNIT)))


def atomic(loc: Loc, fn) -> GITree:
    """Generic atomic modification: fn maps the stored tree to (result, new stored)."""
    return Vis(ATOMIC, (loc, Later.now(fn)), lambda out: out)


def xchg(loc: Loc, new: GITree) -> GITree:
    """Atomically store `new`, returning the old contents."""
    return atomic(loc, lambda old: (old, new))


GROUND_COMPARABLE = (Nat, Unit, Loc)


def cas(loc: Loc, expected: Ground, new: GITree) -> GITree:
    """Compare-and-swap on ground heads; true/false encoded as Ret 1 / Ret 0."""

    def modify(old: GITree):
        if isinstance(old, Ret) and isinstance(old.ground, GROUND_COMPARABLE):
            if old.ground == expected:
                return Ret(1), new
            return Ret(0), old
        return Err(RUNTIME_ERR), old

    return atomic(loc, modify)


def faa(loc: Loc, n: int) -> GITree:
    """Fetch-and-add: returns the old value, stores old + n (left lazy)."""
    return atomic(loc, lambda old: (old, natop_lift(nat_add, old, Ret(n))))


# --- reifier -------------------------------------------------------------------


def _step(op: OpId, value, heap: Heap, cont):
    if op == READ:
        stored = heap.lookup(value)
        if stored is None:
            return None
        return cont(stored), heap, []
    if op == WRITE:
        loc, later_v = value
        if heap.lookup(loc) is None:
            return None
        return cont(UNIT), heap.store(loc, later_v), []
    if op == ALLOC:
        loc, heap2 = heap.alloc(value)
        return cont(loc), heap2, []
    if op == DEALLOC:
        if heap.lookup(value) is None:
            return None
        return cont(UNIT), heap.remove(value), []
    if op == ATOMIC:
        loc, later_fn = value
        stored = heap.lookup(loc)
        if stored is None:
            return None
        pair = Later(lambda: later_fn.force()(stored.force()))
        result = pair.map(lambda p: p[0])
        new_stored = pair.map(lambda p: p[1])
        return cont(result), heap.store(loc, new_stored), []
    raise AssertionError(op)


def _render(op: OpId, value):
    if op in (READ, DEALLOC):
        return {"loc": value.index}
    if op == WRITE:
        return {"loc": value[0].index, "value": "<later>"}
    if op == ALLOC:
        return {"value": "<later>"}
    if op == ATOMIC:
        return {"loc": value[0].index, "fn": "<fn>"}
    return None


def store_reifier(heap: Heap = EMPTY_HEAP) -> Reifier:
    return Reifier(
        family="store",
        ops=[
            OpSpec(ALLOC, "later-tree", "loc"),
            OpSpec(READ, "loc", "later-tree"),
            OpSpec(WRITE, "loc * later-tree", "unit"),
            OpSpec(DEALLOC, "loc", "unit"),
            OpSpec(ATOMIC, "loc * later-fn", "later-tree"),
        ],
        state0=heap,
        step=_step,
        render_input=_render,
        render_state=lambda h: {str(i): "<later>" for i, _ in h.cells},
    )


def force_cell(heap: Heap, loc: Loc) -> Optional[GITree]:
    """Force a stored cell to its (pure) tree; None if the cell is absent."""
    stored = heap.lookup(loc)
    return None if stored is None else stored.force()


def cell_nat(heap: Heap, loc: Loc) -> Optional[int]:
    """Test helper: the stored tree evaluated as a literal natural, if it is one."""
    t = force_cell(heap, loc)
    # stored trees produced by the atomic combinators are natop chains over
    # literals, which collapse to Ret at construction time
    if isinstance(t, Ret) and isinstance(t.ground, Nat):
        return t.ground.value
    return None
