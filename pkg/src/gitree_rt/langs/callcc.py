"""Frontend for the call/cc language: type checker, denotational interpreter,
and the denotation of syntactic evaluation contexts as homomorphisms.

The checker implements the two continuation rules (callcc binds x : cont t
at result type t; throw e1 to e2 needs e2 : cont (type of e1) and produces
any type) over the standard nat/arrow/if/rec fragment, via unification.

The interpreter targets the "cc" effect family.  A continuation bound by
callcc becomes a function value that tick-wraps the reifier-passed
continuation; throw evaluates its payload, then its target, then jumps.
"""

from __future__ import annotations

from typing import Dict, Optional

from ..core import (
    Fun,
    GITree,
    HomCtx,
    Identity,
    Later,
    NATOPS,
    Ret,
    SeqRet,
    SeqValue,
    Tau,
    app,
    fix,
    get_fun,
    get_val,
    if_zero,
    natop_lift,
)
from ..effects.control import callcc_op, throw_op
from ..machines import callcc as M
from . import ast as A
from .types import NAT, TArrow, TContCc, Type, TypeErr, Unifier


# --- typing -----------------------------------------------------------------------


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
    if isinstance(e, A.Callcc):
        t = u.fresh()
        tb = infer(u, {**env, e.name: TContCc(t)}, e.body)
        u.unify(tb, t, "callcc")
        return t
    if isinstance(e, A.Throw):
        tp = infer(u, env, e.payload)
        tt = infer(u, env, e.target)
        u.unify(tt, TContCc(tp), "throw")
        return u.fresh()  # throw has any result type
    raise TypeErr("syntax", f"{type(e).__name__} is not a cc expression")


def typecheck(e: A.Expr, env: Optional[Dict[str, Type]] = None) -> Type:
    u = Unifier()
    return u.resolve(infer(u, env or {}, e))


# --- denotation ---------------------------------------------------------------------


def cont_value(k) -> GITree:
    """Wrap a reifier-passed continuation (Later -> Later) as a function value.

    The adapter inserts one silent step: Fun(now(\\y. Tau(k(now y)))).
    """
    return Fun(Later.now(lambda y: Tau(k(Later.now(y)))))


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
    if isinstance(e, A.Callcc):
        return callcc_op(
            lambda k: Later.now(interp(e.body, {**env, e.name: cont_value(k)}))
        )
    if isinstance(e, A.Throw):
        return get_val(
            interp(e.payload, env),
            lambda x: get_fun(
                interp(e.target, env), lambda f: throw_op(Later.now(x), f)
            ),
        )
    if isinstance(e, A.ContVal):
        return hom_wrapped_cont(e.frames, env)
    raise TypeError(f"{type(e).__name__} is not a cc expression")


def ctx_hom(frames, env: Dict[str, GITree]) -> HomCtx:
    """Denote a machine context (innermost-first frames) as a homomorphism."""
    hom: HomCtx = Identity()
    for f in frames:
        hom = hom.then(_frame_hom(f, env))
    return hom


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
            lambda v: natop_lift(NATOPS[f.op], v, interp(f.right, env)), f"natop-l[{f.op}]"
        )
    if isinstance(f, M.FIf):
        return SeqRet(
            lambda g: _if_ground(g, f, env),
            "if",
        )
    if isinstance(f, M.FLet):
        return SeqValue(lambda v: interp(f.body, {**env, f.name: v}), f"let {f.name}")
    if isinstance(f, M.FThrowPayload):
        return SeqValue(
            lambda v: get_fun(
                interp(f.target, env), lambda g: throw_op(Later.now(v), g)
            ),
            "throw-payload",
        )
    if isinstance(f, M.FThrowTarget):
        payload_tree = interp(f.payload, env)
        return SeqValue(
            lambda v: get_val(
                payload_tree, lambda y: get_fun(v, lambda g: throw_op(Later.now(y), g))
            ),
            "throw-target",
        )
    raise TypeError(f"unknown frame {f!r}")


def _if_ground(g, f, env):
    from ..core import Err, Nat, RUNTIME_ERR

    if isinstance(g, Nat):
        return interp(f.then, env) if g.value != 0 else interp(f.els, env)
    return Err(RUNTIME_ERR)


def hom_wrapped_cont(frames, env) -> GITree:
    """Continuation value for a materialized context: Fun(now(\\x. Tick(hom x)))."""
    from ..core import tick

    hom = ctx_hom(frames, env)
    return Fun(Later.now(lambda x: tick(hom.apply(x))))
