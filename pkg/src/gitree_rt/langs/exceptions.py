"""Frontend for the exception language.

The surface language has no type system of its own; the checker here is the
simply-typed discipline the fuzzer generates against: exceptions carry nat
payloads, a handler returns the type of its try block, and a raise can sit
at any type.

The interpreter maps try/catch to the register/run/pop pattern and raise to
payload evaluation followed by the throw effect.  Context and configuration
denotations mirror the machine: the catch frame splits into a
"finish and pop" homomorphism plus a handler-stack entry carrying the
interpreted handler and the saved outer continuation.
"""

from __future__ import annotations

from typing import Dict, Optional, Tuple

from ..core import (
    Fun,
    GITree,
    HomCtx,
    Identity,
    Later,
    NATOPS,
    Ret,
    SeqValue,
    app,
    fix,
    get_val,
    if_zero,
    natop_lift,
)
from ..effects.control import HandlerStack, catch_op, exc_pop_op, exc_throw_op
from ..machines import exceptions as M
from . import ast as A
from .types import NAT, TArrow, Type, TypeErr, Unifier


# --- typing (invented fuzzing discipline, not a displayed system) -------------------


def infer(u: Unifier, env: Dict[str, Type], e: A.Expr) -> Type:
    if isinstance(e, A.Lit):
        return NAT
    if isinstance(e, A.Var):
        if e.name not in env:
            raise TypeErr("var", f"unbound {e.name}")
        return env[e.name]
    if isinstance(e, A.Fun):
        a = u.fresh()
        return TArrow(a, infer(u, {**env, e.param: a}, e.body))
    if isinstance(e, A.Rec):
        a, r = u.fresh(), u.fresh()
        ft = TArrow(a, r)
        u.unify(infer(u, {**env, e.fname: ft, e.param: a}, e.body), r, "rec")
        return ft
    if isinstance(e, A.App):
        tf = infer(u, env, e.fn)
        ta = infer(u, env, e.arg)
        r = u.fresh()
        u.unify(tf, TArrow(ta, r), "app")
        return r
    if isinstance(e, A.Natop):
        u.unify(infer(u, env, e.left), NAT, "natop")
        u.unify(infer(u, env, e.right), NAT, "natop")
        return NAT
    if isinstance(e, A.If):
        u.unify(infer(u, env, e.cond), NAT, "if")
        t = infer(u, env, e.then)
        u.unify(infer(u, env, e.els), t, "if")
        return t
    if isinstance(e, A.Let):
        tb = infer(u, env, e.bound)
        return infer(u, {**env, e.name: tb}, e.body)
    if isinstance(e, A.Raise):
        u.unify(infer(u, env, e.payload), NAT, "raise")
        return u.fresh()
    if isinstance(e, A.TryCatch):
        tb = infer(u, env, e.body)
        th = infer(u, {**env, e.hname: NAT}, e.handler)
        u.unify(th, tb, "catch")
        return tb
    raise TypeErr("syntax", f"{type(e).__name__} is not an exc expression")


def typecheck(e: A.Expr, env: Optional[Dict[str, Type]] = None) -> Type:
    u = Unifier()
    return u.resolve(infer(u, env or {}, e))


# --- denotation -----------------------------------------------------------------------


def _handler_fn(hname: str, handler: A.Expr, env):
    """(name |-> payload) interpretation of the handler, lifted to delayed trees."""
    return lambda payload: payload.map(
        lambda v: interp(handler, {**env, hname: v})
    )


def interp(e: A.Expr, env: Dict[str, GITree]) -> GITree:
    if isinstance(e, A.Lit):
        return Ret(e.value)
    if isinstance(e, A.Var):
        return env[e.name]
    if isinstance(e, A.Fun):
        return Fun(Later.now(lambda v: interp(e.body, {**env, e.param: v})))
    if isinstance(e, A.Rec):
        return fix(
            lambda self_later: Fun(
                Later.now(
                    lambda v: interp(
                        e.body, {**env, e.fname: self_later.force(), e.param: v}
                    )
                )
            )
        )
    if isinstance(e, A.App):
        return app(interp(e.fn, env), interp(e.arg, env))
    if isinstance(e, A.Natop):
        return natop_lift(NATOPS[e.op], interp(e.left, env), interp(e.right, env))
    if isinstance(e, A.If):
        return if_zero(
            interp(e.cond, env),
            lambda: interp(e.then, env),
            lambda: interp(e.els, env),
        )
    if isinstance(e, A.Let):
        return get_val(
            interp(e.bound, env), lambda v: interp(e.body, {**env, e.name: v})
        )
    if isinstance(e, A.Raise):
        return exc_throw_op(e.exc, interp(e.payload, env))
    if isinstance(e, A.TryCatch):
        return catch_op(e.exc, _handler_fn(e.hname, e.handler, env), interp(e.body, env))
    raise TypeError(f"{type(e).__name__} is not an exc expression")


# --- context and configuration denotations --------------------------------------------


def ctx_denot(k: Tuple, env) -> Tuple[HomCtx, HandlerStack]:
    """Denote a machine continuation as (homomorphism, initial handler stack).

    Built outermost-in: a catch frame does not extend the homomorphism with
    the context outside it; it resets the hom to "finish, pop" and conses
    (exc, handler, saved outer hom) onto the stack front, exactly the state
    the register reifier would have produced.
    """
    hom: HomCtx = Identity()
    stack: tuple = ()
    for f in reversed(k):
        if isinstance(f, M.FCatch):
            entry = (
                f.exc,
                _handler_fn(f.hname, f.handler, env),
                lambda p, h=hom: p.map(h.apply),
            )
            stack = (entry,) + stack
            hom = SeqValue(
                lambda v, exc=f.exc: get_val(exc_pop_op(exc), lambda _u: v),
                f"catch-exit {f.exc}",
            )
        else:
            hom = _frame_hom(f, env).then(hom)
    return hom, stack


def _frame_hom(f, env) -> HomCtx:
    if isinstance(f, M.FAppArg):
        fn_tree = interp(f.fn, env)
        return SeqValue(lambda v: app(fn_tree, v), "app-arg")
    if isinstance(f, M.FAppFun):
        arg_tree = interp(f.arg, env)
        return SeqValue(lambda v: app(v, arg_tree), "app-fun")
    if isinstance(f, M.FNatopR):
        return SeqValue(
            lambda v: natop_lift(NATOPS[f.op], interp(f.left, env), v), f"natop-r[{f.op}]"
        )
    if isinstance(f, M.FNatopL):
        return SeqValue(
            lambda v: natop_lift(NATOPS[f.op], v, interp(f.right, env)),
            f"natop-l[{f.op}]",
        )
    if isinstance(f, M.FIf):
        return SeqValue(
            lambda v: if_zero(
                v, lambda: interp(f.then, env), lambda: interp(f.els, env)
            ),
            "if",
        )
    if isinstance(f, M.FLet):
        return SeqValue(lambda v: interp(f.body, {**env, f.name: v}), f"let {f.name}")
    if isinstance(f, M.FRaise):
        return SeqValue(lambda v: exc_throw_op(f.exc, v), f"raise {f.exc}")
    raise TypeError(f"unknown frame {f!r}")


def config_denot(c, env=None) -> Tuple[GITree, HandlerStack]:
    """Map a machine configuration to (tree, handler stack)."""
    env = env or {}
    if isinstance(c, M.CTerm):
        return interp(c.e, env), ()
    if isinstance(c, M.CRet):
        return interp(c.v, env), ()
    if isinstance(c, M.CEval):
        hom, stack = ctx_denot(c.k, env)
        return hom.apply(interp(c.e, env)), stack
    if isinstance(c, M.CCont):
        hom, stack = ctx_denot(c.k, env)
        return hom.apply(interp(c.v, env)), stack
    raise TypeError(c)
