"""Context-dependent effect families: call/cc + throw, exceptions, shift/reset.

All three consult or replace the current continuation, which the engine
hands to every reifier.

call/cc family ("cc"), state unit:
    r_callcc(f, (), k) = Some(k (f k), ())   -- body sees k, and k resumes
    r_throw((e, f), (), k) = Some(f e, ())   -- jump: k is dropped

exception family ("exc"), state = handler stack, innermost first:
    r_register pushes (name, handler, current k);
    r_throw splits the stack at the *nearest* matching handler, applies the
    handler to the payload under the saved continuation, and drops
    everything inner; None when no handler matches (uncaught).
    r_pop requires the head to match and resumes the current k inside the
    saved one; None on an empty or mismatched stack (ill-bracketed pop).

delimited-control family ("delim"), state = continuation stack:
    r_reset saves the current k;  r_shift hands k to the body and does not
    resume it;  r_pop restores the top of the stack (or passes the value
    through when the stack is empty);  r_appcont applies a captured
    continuation and saves the current one.

The reifiers are exactly the equational presentation.  The *wrappers*
``reset_op`` and ``shift_op`` additionally wrap the computation that will
run inside the delimiter in ``pop_wrap`` -- the unwind discipline that
makes every delimiter's completion restore the saved continuation.
(Without it, a captured continuation used outside the surface-language
interpreters would finish with a dangling stack.)  ``pop_wrap`` is the
POP'-style member of the HomCtx algebra.

Exception-side and delim-side "pop" are distinct ops (exc/pop vs
delim/pop); they share a name only informally.
"""

from __future__ import annotations

from typing import Callable, Tuple

from ..core import (
    GITree,
    Later,
    OpId,
    Ret,
    SeqValue,
    UNIT,
    Vis,
    bottom_cont,
    get_val,
    identity_cont,
    later_apply,
)
from ..engine import OpSpec, Reifier

# --- call/cc -------------------------------------------------------------------

CALLCC = OpId("cc", "callcc")
CC_THROW = OpId("cc", "throw")


def callcc_op(f: Callable[[Callable[[Later], Later]], Later]) -> GITree:
    """Effect node whose input is the body, a callback on the continuation."""
    return Vis(CALLCC, f, identity_cont)


def throw_op(payload: Later, target: Later) -> GITree:
    """Jump: payload is a delayed tree, target a delayed tree->tree; never returns."""
    return Vis(CC_THROW, (payload, target), bottom_cont)


def _cc_step(op: OpId, value, state, cont):
    if op == CALLCC:
        return cont(value(cont)), state, []
    if op == CC_THROW:
        payload, target = value
        return later_apply(target, payload), state, []
    raise AssertionError(op)


def callcc_reifier() -> Reifier:
    return Reifier(
        family="cc",
        ops=[
            OpSpec(CALLCC, "cont-callback", "later-tree"),
            OpSpec(CC_THROW, "later-tree * later-fn", "empty"),
        ],
        state0=(),
        step=_cc_step,
        render_input=lambda op, v: "<fn>",
    )


# --- exceptions ------------------------------------------------------------------

EXC_REGISTER = OpId("exc", "register")
EXC_THROW = OpId("exc", "throw")
EXC_POP = OpId("exc", "pop")

# stack entry: (name, handler, saved continuation); both maps on delayed trees
HandlerStack = Tuple[Tuple[str, Callable[[Later], Later], Callable[[Later], Later]], ...]


def register_op(name: str, handler, body: Later) -> GITree:
    return Vis(EXC_REGISTER, (name, handler, body), identity_cont)


def exc_pop_op(name: str) -> GITree:
    return Vis(EXC_POP, name, lambda _y: Later.now(Ret(UNIT)))


def exc_throw_op(name: str, payload: GITree) -> GITree:
    """Evaluate the payload to a value first, then raise."""
    return get_val(
        payload, lambda r: Vis(EXC_THROW, (name, Later.now(r)), bottom_cont)
    )


def catch_op(name: str, handler, body: GITree) -> GITree:
    """register, run the body, pop on normal exit; a throw skips the pop."""
    return register_op(
        name,
        handler,
        Later.now(get_val(body, lambda r: get_val(exc_pop_op(name), lambda _u: r))),
    )


def _exc_step(op: OpId, value, stack: HandlerStack, cont):
    if op == EXC_REGISTER:
        name, handler, body = value
        return body, ((name, handler, cont),) + stack, []
    if op == EXC_THROW:
        name, payload = value
        for i, (ename, handler, saved) in enumerate(stack):
            if ename == name:
                return saved(handler(payload)), stack[i + 1 :], []
        return None
    if op == EXC_POP:
        if not stack:
            return None
        ename, _handler, saved = stack[0]
        if ename != value:
            return None
        return saved(cont(UNIT)), stack[1:], []
    raise AssertionError(op)


def exc_reifier(stack: HandlerStack = ()) -> Reifier:
    return Reifier(
        family="exc",
        ops=[
            OpSpec(EXC_REGISTER, "name * handler * later-tree", "later-tree"),
            OpSpec(EXC_THROW, "name * later-tree", "empty"),
            OpSpec(EXC_POP, "name", "unit"),
        ],
        state0=stack,
        step=_exc_step,
        render_input=lambda op, v: {"exc": v[0]} if isinstance(v, tuple) else {"exc": v},
        render_state=lambda s: {"depth": len(s), "names": [e[0] for e in s]},
    )


# --- delimited control -------------------------------------------------------------

RESET = OpId("delim", "reset")
SHIFT = OpId("delim", "shift")
DC_POP = OpId("delim", "pop")
APPCONT = OpId("delim", "appcont")

ContStack = Tuple[Callable[[Later], Later], ...]


def dc_pop_op(value: GITree) -> GITree:
    """Unwind one delimiter with an already-computed value; never returns."""
    return Vis(DC_POP, Later.now(value), bottom_cont)


pop_wrap = SeqValue(dc_pop_op, "pop")
"""POP' as a homomorphism: compute to a value, then unwind one delimiter."""


def reset_op(body: Later) -> GITree:
    """Delimit: the computation run inside the delimiter ends in a pop."""
    return Vis(RESET, body.map(pop_wrap.apply), identity_cont)


def shift_op(f: Callable[[Callable[[Later], Later]], Later]) -> GITree:
    """Grab the delimited continuation; the body also ends in a pop."""
    return Vis(SHIFT, lambda k: f(k).map(pop_wrap.apply), identity_cont)


def appcont_op(arg: Later, target: Later) -> GITree:
    """Apply a captured continuation (delayed tree->tree) to a delayed tree."""
    return Vis(APPCONT, (arg, target), identity_cont)


def _delim_step(op: OpId, value, stack: ContStack, cont):
    if op == RESET:
        return value, (cont,) + stack, []
    if op == SHIFT:
        return value(cont), stack, []
    if op == DC_POP:
        if not stack:
            return value, stack, []
        return stack[0](value), stack[1:], []
    if op == APPCONT:
        arg, target = value
        return later_apply(target, arg), (cont,) + stack, []
    raise AssertionError(op)


def delim_reifier(stack: ContStack = ()) -> Reifier:
    return Reifier(
        family="delim",
        ops=[
            OpSpec(RESET, "later-tree", "later-tree"),
            OpSpec(SHIFT, "cont-callback", "later-tree"),
            OpSpec(DC_POP, "later-tree", "empty"),
            OpSpec(APPCONT, "later-tree * later-fn", "later-tree"),
        ],
        state0=stack,
        step=_delim_step,
        render_input=lambda op, v: "<later>",
        render_state=lambda s: {"depth": len(s)},
    )
