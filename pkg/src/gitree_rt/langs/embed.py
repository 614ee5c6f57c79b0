"""Frontend for the store language with embedded shift/reset programs.

Typing is standard nat/unit/arrow/ref; the one interesting rule is
``embed { e }``: accepted iff the embedded expression is *pure* at nat in
the delimited-control system (it must not depend on outer delimiters or pin
its answer type).  The embedded body is checked -- and elaborated -- by the
delim checker.

The interpretation runs over the combined delim + store families.  An
embed node wraps the delim interpretation of its body in RESET: the glue
that keeps captured continuations from escaping into the host program.
"""

from __future__ import annotations

from typing import Dict, Optional, Tuple

from ..core import (
    Err,
    Fun,
    GITree,
    Later,
    Loc,
    NATOPS,
    RUNTIME_ERR,
    Ret,
    app,
    fix,
    get_ret,
    get_val,
    if_zero,
    natop_lift,
)
from ..effects import store
from ..effects.control import delim_reifier, reset_op
from ..engine import Runtime, combine
from . import ast as A
from . import delim as D
from .types import NAT, TArrow, TRef, Type, TypeErr, UNIT_T, Unifier


def infer(u: Unifier, env: Dict[str, Type], e: A.Expr) -> Tuple[Type, A.Expr]:
    if isinstance(e, A.Lit):
        return NAT, e
    if isinstance(e, A.UnitLit):
        return UNIT_T, e
    if isinstance(e, A.Var):
        if e.name not in env:
            raise TypeErr("var", f"unbound {e.name}")
        return env[e.name], e
    if isinstance(e, A.Fun):
        a = u.fresh()
        tb, body = infer(u, {**env, e.param: a}, e.body)
        return TArrow(a, tb), A.Fun(e.param, body)
    if isinstance(e, A.Rec):
        a, r = u.fresh(), u.fresh()
        ft = TArrow(a, r)
        tb, body = infer(u, {**env, e.fname: ft, e.param: a}, e.body)
        u.unify(tb, r, "rec")
        return ft, A.Rec(e.fname, e.param, body)
    if isinstance(e, A.App):
        tf, fn = infer(u, env, e.fn)
        ta, arg = infer(u, env, e.arg)
        r = u.fresh()
        u.unify(tf, TArrow(ta, r), "app")
        return r, A.App(fn, arg)
    if isinstance(e, A.Natop):
        tl, l = infer(u, env, e.left)
        tr, r = infer(u, env, e.right)
        u.unify(tl, NAT, "natop")
        u.unify(tr, NAT, "natop")
        return NAT, A.Natop(e.op, l, r)
    if isinstance(e, A.If):
        tc, c = infer(u, env, e.cond)
        u.unify(tc, NAT, "if")
        tt, th = infer(u, env, e.then)
        te, el = infer(u, env, e.els)
        u.unify(tt, te, "if")
        return tt, A.If(c, th, el)
    if isinstance(e, A.Let):
        tb, bound = infer(u, env, e.bound)
        t2, body = infer(u, {**env, e.name: tb}, e.body)
        return t2, A.Let(e.name, bound, body)
    if isinstance(e, A.Alloc):
        t, init = infer(u, env, e.init)
        return TRef(t), A.Alloc(init)
    if isinstance(e, A.Deref):
        t, ref = infer(u, env, e.ref)
        a = u.fresh()
        u.unify(t, TRef(a), "deref")
        return a, A.Deref(ref)
    if isinstance(e, A.Assign):
        tr_, ref = infer(u, env, e.ref)
        tv, val = infer(u, env, e.value)
        u.unify(tr_, TRef(tv), "assign")
        return UNIT_T, A.Assign(ref, val)
    if isinstance(e, A.Embed):
        body = D.check_pure(e.body, NAT)  # also elaborates
        return NAT, A.Embed(body)
    raise TypeErr("syntax", f"{type(e).__name__} is not an embed expression")


def typecheck(e: A.Expr, env: Optional[Dict[str, Type]] = None):
    u = Unifier()
    t, e2 = infer(u, env or {}, e)
    return u.resolve(t), e2


# --- denotation -----------------------------------------------------------------------


def interp(e: A.Expr, env: Dict[str, GITree]) -> GITree:
    if isinstance(e, A.Lit):
        return Ret(e.value)
    if isinstance(e, A.UnitLit):
        from ..core import UNIT

        return Ret(UNIT)
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
    if isinstance(e, A.Alloc):
        return get_val(
            interp(e.init, env), lambda x: store.alloc(x, lambda l: Ret(l))
        )
    if isinstance(e, A.Deref):
        return get_ret(
            interp(e.ref, env),
            lambda g: store.read(g) if isinstance(g, Loc) else Err(RUNTIME_ERR),
        )
    if isinstance(e, A.Assign):
        return get_val(
            interp(e.value, env),
            lambda x: get_ret(
                interp(e.ref, env),
                lambda g: store.write(g, x) if isinstance(g, Loc) else Err(RUNTIME_ERR),
            ),
        )
    if isinstance(e, A.Embed):
        # the delimiter along the embedding boundary; the embedded program is
        # closed, so it starts from the empty environment
        return reset_op(Later.now(D.interp(e.body, {})))
    raise TypeError(f"{type(e).__name__} is not an embed expression")


def runtime() -> Runtime:
    return combine([delim_reifier(), store.store_reifier()])
