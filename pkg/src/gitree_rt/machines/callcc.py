"""Small-step oracle for the call/cc language.

Works by on-the-fly unique decomposition: each step splits the program into
an evaluation context and a redex, reduces the redex, and plugs back.
Continuation values carry the syntactic context (a tuple of frames,
innermost first).

Evaluation order, matching the context grammar: application and natural
operations evaluate the right operand first; throw evaluates the payload
first, then the continuation expression; if evaluates the condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from ..langs import ast as A
from ..langs.ast import ContVal, Expr, is_value_expr, subst


class Frame:
    __slots__ = ()

    def plug(self, e: Expr) -> Expr:
        raise NotImplementedError

    def subst(self, name, value):
        raise NotImplementedError

    def free_vars(self) -> set:
        raise NotImplementedError


@dataclass(frozen=True)
class FAppArg(Frame):
    """app(fn, []) -- the argument is being evaluated."""

    fn: Expr

    def plug(self, e):
        return A.App(self.fn, e)

    def subst(self, name, value):
        return FAppArg(subst(self.fn, name, value))

    def free_vars(self):
        return A.free_vars(self.fn)


@dataclass(frozen=True)
class FAppFun(Frame):
    """app([], v) -- the function is being evaluated, argument already a value."""

    arg: Expr

    def plug(self, e):
        return A.App(e, self.arg)

    def subst(self, name, value):
        return FAppFun(subst(self.arg, name, value))

    def free_vars(self):
        return A.free_vars(self.arg)


@dataclass(frozen=True)
class FNatopR(Frame):
    """natop(left, []) -- right operand first."""

    op: str
    left: Expr

    def plug(self, e):
        return A.Natop(self.op, self.left, e)

    def subst(self, name, value):
        return FNatopR(self.op, subst(self.left, name, value))

    def free_vars(self):
        return A.free_vars(self.left)


@dataclass(frozen=True)
class FNatopL(Frame):
    """natop([], v)."""

    op: str
    right: Expr

    def plug(self, e):
        return A.Natop(self.op, e, self.right)

    def subst(self, name, value):
        return FNatopL(self.op, subst(self.right, name, value))

    def free_vars(self):
        return A.free_vars(self.right)


@dataclass(frozen=True)
class FIf(Frame):
    then: Expr
    els: Expr

    def plug(self, e):
        return A.If(e, self.then, self.els)

    def subst(self, name, value):
        return FIf(subst(self.then, name, value), subst(self.els, name, value))

    def free_vars(self):
        return A.free_vars(self.then) | A.free_vars(self.els)


@dataclass(frozen=True)
class FLet(Frame):
    name: str
    body: Expr

    def plug(self, e):
        return A.Let(self.name, e, self.body)

    def subst(self, name, value):
        if name == self.name:
            return self
        return FLet(self.name, subst(self.body, name, value))

    def free_vars(self):
        return A.free_vars(self.body) - {self.name}


@dataclass(frozen=True)
class FThrowPayload(Frame):
    """throw([], target) -- payload first."""

    target: Expr

    def plug(self, e):
        return A.Throw(e, self.target)

    def subst(self, name, value):
        return FThrowPayload(subst(self.target, name, value))

    def free_vars(self):
        return A.free_vars(self.target)


@dataclass(frozen=True)
class FThrowTarget(Frame):
    payload: Expr

    def plug(self, e):
        return A.Throw(self.payload, e)

    def subst(self, name, value):
        return FThrowTarget(subst(self.payload, name, value))

    def free_vars(self):
        return A.free_vars(self.payload)


def plug(frames: Tuple[Frame, ...], e: Expr) -> Expr:
    for f in frames:
        e = f.plug(e)
    return e


def decompose(e: Expr):
    """Split into (frames innermost-first, redex); values and stuck forms short-circuit."""
    frames: List[Frame] = []  # collected outermost-first while descending

    def done(redex):
        return tuple(reversed(frames)), redex

    while True:
        if is_value_expr(e):
            if frames:
                raise AssertionError("descended into a value")
            return None  # whole program is a value
        if isinstance(e, A.App):
            if not is_value_expr(e.arg):
                frames.append(FAppArg(e.fn))
                e = e.arg
                continue
            if not is_value_expr(e.fn):
                frames.append(FAppFun(e.arg))
                e = e.fn
                continue
            return done(e)
        if isinstance(e, A.Natop):
            if not is_value_expr(e.right):
                frames.append(FNatopR(e.op, e.left))
                e = e.right
                continue
            if not is_value_expr(e.left):
                frames.append(FNatopL(e.op, e.right))
                e = e.left
                continue
            return done(e)
        if isinstance(e, A.If):
            if not is_value_expr(e.cond):
                frames.append(FIf(e.then, e.els))
                e = e.cond
                continue
            return done(e)
        if isinstance(e, A.Let):
            if not is_value_expr(e.bound):
                frames.append(FLet(e.name, e.body))
                e = e.bound
                continue
            return done(e)
        if isinstance(e, A.Callcc):
            return done(e)
        if isinstance(e, A.Throw):
            if not is_value_expr(e.payload):
                frames.append(FThrowPayload(e.target))
                e = e.payload
                continue
            if not is_value_expr(e.target):
                frames.append(FThrowTarget(e.payload))
                e = e.target
                continue
            return done(e)
        return ("stuck", e, tuple(reversed(frames)))


def step(e: Expr):
    """One reduction: ('done', v) | ('next', e') | ('stuck', msg)."""
    d = decompose(e)
    if d is None:
        return ("done", e)
    if isinstance(d, tuple) and len(d) == 3 and d[0] == "stuck":
        return ("stuck", f"no rule for {type(d[1]).__name__}")
    frames, r = d
    if isinstance(r, A.App):
        f, v = r.fn, r.arg
        if isinstance(f, A.Rec):
            body = subst(subst(f.body, f.param, v), f.fname, f)
            return ("next", plug(frames, body))
        if isinstance(f, A.Fun):
            return ("next", plug(frames, subst(f.body, f.param, v)))
        return ("stuck", "application of a non-function value")
    if isinstance(r, A.Natop):
        if isinstance(r.left, A.Lit) and isinstance(r.right, A.Lit):
            if r.op == "+":
                return ("next", plug(frames, A.Lit(r.left.value + r.right.value)))
            return ("next", plug(frames, A.Lit(max(0, r.left.value - r.right.value))))
        return ("stuck", "natop on non-numbers")
    if isinstance(r, A.If):
        if isinstance(r.cond, A.Lit):
            return ("next", plug(frames, r.then if r.cond.value != 0 else r.els))
        return ("stuck", "if on a non-number")
    if isinstance(r, A.Let):
        return ("next", plug(frames, subst(r.body, r.name, r.bound)))
    if isinstance(r, A.Callcc):
        # callcc x. e captures the whole current context
        return ("next", plug(frames, subst(r.body, r.name, ContVal(frames))))
    if isinstance(r, A.Throw):
        if isinstance(r.target, ContVal):
            # K[throw v to cont K'] steps to K'[v]: the current context is dropped
            return ("next", plug(r.target.frames, r.payload))
        return ("stuck", "throw to a non-continuation value")
    return ("stuck", f"no rule for {type(r).__name__}")


def machine_run(e: Expr, max_steps: int = 10_000, want_trace: bool = False):
    """Iterate the step function; returns (result, trace of configurations)."""
    trace = [e] if want_trace else []
    for _ in range(max_steps):
        res = step(e)
        if res[0] == "done":
            return ("value", res[1]), trace
        if res[0] == "stuck":
            return ("stuck", res[1]), trace
        e = res[1]
        if want_trace:
            trace.append(e)
    return ("timeout", None), trace
