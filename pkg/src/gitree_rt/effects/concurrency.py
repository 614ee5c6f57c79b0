"""The fork effect: spawn a tree as a new pool thread, return unit.

The reifier leaves its (unit) state alone, resumes the continuation with
unit, and hands the engine one spawned thread.  Scheduling policies live in
the engine; this module only contributes the effect family.
"""

from __future__ import annotations

from ..core import GITree, Later, OpId, Ret, UNIT, Vis, get_val
from ..engine import OpSpec, Reifier

FORK = OpId("fork", "fork")


def fork_op(child: GITree) -> GITree:
    """FORK: input is the delayed child; the continuation returns the unit output."""
    return Vis(FORK, Later.now(child), lambda x: Later.now(Ret(x)))


def fork_then(child: GITree, rest: GITree) -> GITree:
    """Spawn child, then continue as rest."""
    return get_val(fork_op(child), lambda _u: rest)


def _fork_step(op: OpId, value, state, cont):
    return cont(UNIT), state, [value]


def fork_reifier() -> Reifier:
    return Reifier(
        family="fork",
        ops=[OpSpec(FORK, "later-tree", "unit")],
        state0=(),
        step=_fork_step,
        render_input=lambda op, v: "<later>",
    )
