"""Frontend for the shift/reset language.

Typing implements the answer-type discipline: the judgment for an
expression is a triple (value type, incoming answer, outgoing answer);
pure expressions are answer-polymorphic (their two answer slots are one
still-flexible variable).  The eleven rules thread answers through
application (function first), natop and @ (argument first), if, reset,
shift and the pure coercion, via the shared unifier.  ``isprime`` is a
built-in pure primitive nat/b -> nat/b, kept so answer-type-modifying
programs in the corpus have something to modify against.

The checker also *elaborates*: plain juxtaposition applied to a
continuation-typed function becomes the @ node, since the denotational side
cannot dispatch on "this function value is a captured continuation" at
runtime.

The interpreter maps reset to RESET over a pop-wrapped body, shift to SHIFT
with the one-Tick continuation adapter, @ to APPCONT, and continuation
values to pop-wrapped context homomorphisms.  Configuration denotations
follow the machine shapes: eval/cont/mcont wrap in the pop homomorphism,
ret does not, and the metacontinuation denotes as a stack of pop-wrapped
context homs.
"""

from __future__ import annotations

from typing import Dict, Optional, Tuple

from ..core import (
    Err,
    Fun,
    GITree,
    HomCtx,
    Identity,
    Later,
    NATOPS,
    Nat,
    RUNTIME_ERR,
    Ret,
    SeqValue,
    app,
    fix,
    get_fun,
    get_val,
    if_zero,
    natop_lift,
    tick,
)
from ..effects.control import appcont_op, pop_wrap, reset_op, shift_op
from ..machines import delim as M
from . import ast as A
from .types import NAT, TArrowD, TContD, Type, TypeErr, Unifier

Judgment = Tuple[Type, Type, Type]  # value type, incoming answer, outgoing answer


def infer(u: Unifier, env: Dict[str, Type], e: A.Expr) -> Tuple[Judgment, A.Expr]:
    if isinstance(e, A.Lit):
        a = u.fresh()
        return (NAT, a, a), e
    if isinstance(e, A.Var):
        if e.name == "isprime" and e.name not in env:
            b = u.fresh()
            a = u.fresh()
            return (TArrowD(NAT, b, NAT, b), a, a), e
        if e.name not in env:
            raise TypeErr("var", f"unbound {e.name}")
        a = u.fresh()
        return (env[e.name], a, a), e
    if isinstance(e, A.Fun):
        s, a0, t0, b0 = u.fresh(), u.fresh(), u.fresh(), u.fresh()
        (tb, ab, bb), body = infer(u, {**env, e.param: s}, e.body)
        u.unify(tb, t0, "fun")
        u.unify(ab, a0, "fun")
        u.unify(bb, b0, "fun")
        c = u.fresh()
        return (TArrowD(s, a0, t0, b0), c, c), A.Fun(e.param, body)
    if isinstance(e, A.Rec):
        s, a0, t0, b0 = u.fresh(), u.fresh(), u.fresh(), u.fresh()
        ft = TArrowD(s, a0, t0, b0)
        (tb, ab, bb), body = infer(u, {**env, e.fname: ft, e.param: s}, e.body)
        u.unify(tb, t0, "rec")
        u.unify(ab, a0, "rec")
        u.unify(bb, b0, "rec")
        c = u.fresh()
        return (ft, c, c), A.Rec(e.fname, e.param, body)
    if isinstance(e, A.App):
        (t1, in1, out1), fn = infer(u, env, e.fn)
        if isinstance(u.walk(t1), TContD):
            return _appcont_rule(u, env, fn, t1, in1, out1, e.arg)
        s, a0, t0, b0 = u.fresh(), u.fresh(), u.fresh(), u.fresh()
        u.unify(t1, TArrowD(s, a0, t0, b0), "app")
        (t2, in2, out2), arg = infer(u, env, e.arg)
        u.unify(t2, s, "app")
        u.unify(in1, out2, "app answers")
        u.unify(in2, b0, "app answers")
        return (t0, a0, out1), A.App(fn, arg)
    if isinstance(e, A.AppCont):
        (t1, in1, out1), fn = infer(u, env, e.fn)
        return _appcont_rule(u, env, fn, t1, in1, out1, e.arg)
    if isinstance(e, A.Natop):
        (t1, in1, out1), l = infer(u, env, e.left)
        (t2, in2, out2), r = infer(u, env, e.right)
        u.unify(t1, NAT, "natop")
        u.unify(t2, NAT, "natop")
        u.unify(out1, in2, "natop answers")
        return (NAT, in1, out2), A.Natop(e.op, l, r)
    if isinstance(e, A.If):
        (tc, cin, cout), c = infer(u, env, e.cond)
        u.unify(tc, NAT, "if")
        (tt, tin, tout), th = infer(u, env, e.then)
        (te, ein, eout), el = infer(u, env, e.els)
        u.unify(tt, te, "if branches")
        u.unify(tin, ein, "if branches")
        u.unify(tout, eout, "if branches")
        u.unify(tout, cin, "if answers")
        return (tt, tin, cout), A.If(c, th, el)
    if isinstance(e, A.Let):
        (tb, bin_, bout), bound = infer(u, env, e.bound)
        (t2, a2, b2), body = infer(u, {**env, e.name: tb}, e.body)
        u.unify(bin_, b2, "let answers")
        return (t2, a2, bout), A.Let(e.name, bound, body)
    if isinstance(e, A.Reset):
        (t, ain, aout), body = infer(u, env, e.body)
        u.unify(t, ain, "reset")
        c = u.fresh()
        return (aout, c, c), A.Reset(body)
    if isinstance(e, A.Shift):
        t, a = u.fresh(), u.fresh()
        (ts, sin, sout), body = infer(u, {**env, e.name: TContD(t, a)}, e.body)
        u.unify(ts, sin, "shift")
        return (t, a, sout), A.Shift(e.name, body)
    raise TypeErr("syntax", f"{type(e).__name__} is not a delim expression")


def _appcont_rule(u, env, fn, t1, in1, out1, arg_e):
    t, a = u.fresh(), u.fresh()
    u.unify(t1, TContD(t, a), "@")
    (t2, in2, out2), arg = infer(u, env, arg_e)
    u.unify(t2, t, "@")
    u.unify(in2, out1, "@ answers")
    return (a, in1, out2), A.AppCont(fn, arg)


def typecheck(e: A.Expr, env: Optional[Dict[str, Type]] = None):
    """Infer the (type, in-answer, out-answer) triple; returns it resolved,
    along with the elaborated expression."""
    u = Unifier()
    (t, ain, aout), e2 = infer(u, env or {}, e)
    return (u.resolve(t), u.resolve(ain), u.resolve(aout)), e2


def typecheck_program(e: A.Expr):
    """Whole-program check at nat with nat answers (the adequacy configuration)."""
    u = Unifier()
    (t, ain, aout), e2 = infer(u, {}, e)
    u.unify(t, NAT, "program")
    u.unify(ain, NAT, "program answer")
    u.unify(aout, NAT, "program answer")
    return (u.resolve(t), u.resolve(ain), u.resolve(aout)), e2


def check_pure(e: A.Expr, want: Type) -> A.Expr:
    """The pure judgment at a given type: answers unify and stay flexible."""
    u = Unifier()
    (t, ain, aout), e2 = infer(u, {}, e)
    u.unify(t, want, "pure")
    u.unify(ain, aout, "pure answers")
    if not u.is_free_var(ain):
        raise TypeErr("pure", f"answer type pinned to {u.resolve(ain)}")
    return e2


# --- denotation -------------------------------------------------------------------


def _isprime_value() -> GITree:
    def prime(v):
        if isinstance(v, Ret) and isinstance(v.ground, Nat):
            n = v.ground.value
            if n < 2:
                return Ret(0)
            d = 2
            while d * d <= n:
                if n % d == 0:
                    return Ret(0)
                d += 1
            return Ret(1)
        return Err(RUNTIME_ERR)

    return Fun(Later.now(prime))


def cont_value(k) -> GITree:
    """Reifier-passed continuation as a value (one-Tick adapter, no pop)."""
    from ..core import Tau

    return Fun(Later.now(lambda y: Tau(k(Later.now(y)))))


def interp(e: A.Expr, env: Dict[str, GITree]) -> GITree:
    if isinstance(e, A.Lit):
        return Ret(e.value)
    if isinstance(e, A.Var):
        if e.name == "isprime" and e.name not in env:
            return _isprime_value()
        return env[e.name]
    if isinstance(e, A.PrimVal):
        return _isprime_value()
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
        # function first, then the argument (the machine's app frames)
        return get_val(
            interp(e.fn, env),
            lambda f: get_val(interp(e.arg, env), lambda x: app(f, x)),
        )
    if isinstance(e, A.AppCont):
        return get_val(
            interp(e.arg, env),
            lambda x: get_fun(
                interp(e.fn, env), lambda y: appcont_op(Later.now(x), y)
            ),
        )
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
    if isinstance(e, A.Reset):
        return reset_op(Later.now(pop_wrap.apply(interp(e.body, env))))
    if isinstance(e, A.Shift):
        return shift_op(
            lambda k: Later.now(
                pop_wrap.apply(interp(e.body, {**env, e.name: cont_value(k)}))
            )
        )
    if isinstance(e, A.ContVal):
        hom = ctx_hom(e.frames, env)
        return Fun(Later.now(lambda x: tick(pop_wrap.apply(hom.apply(x)))))
    raise TypeError(f"{type(e).__name__} is not a delim expression")


# --- context / configuration denotations ---------------------------------------------


def ctx_hom(frames, env) -> HomCtx:
    hom: HomCtx = Identity()
    for f in frames:
        hom = hom.then(_frame_hom(f, env))
    return hom


def _frame_hom(f, env) -> HomCtx:
    if isinstance(f, M.FAppL):
        return SeqValue(
            lambda fv: get_val(interp(f.arg, env), lambda x: app(fv, x)), "app-fn"
        )
    if isinstance(f, M.FAppR):
        fn_tree = interp(f.fn, env)
        return SeqValue(lambda x: app(fn_tree, x), "app-arg")
    if isinstance(f, M.FNatopR):
        return SeqValue(
            lambda v: natop_lift(NATOPS[f.op], interp(f.left, env), v),
            f"natop-r[{f.op}]",
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
    if isinstance(f, M.FAppkArg):
        return SeqValue(
            lambda x: get_fun(
                interp(f.fn, env), lambda y: appcont_op(Later.now(x), y)
            ),
            "@-arg",
        )
    if isinstance(f, M.FAppkFun):
        arg_tree = interp(f.arg, env)
        return SeqValue(
            lambda cv: get_fun(cv, lambda y: appcont_op(Later.now(arg_tree), y)),
            "@-fn",
        )
    raise TypeError(f"unknown frame {f!r}")


def mcont_denot(mk, env):
    """Each saved context becomes pop . hom, lifted to delayed trees."""
    entries = []
    for k in mk:
        hom = ctx_hom(k, env)
        entries.append(lambda p, h=hom: p.map(lambda t: pop_wrap.apply(h.apply(t))))
    return tuple(entries)


def config_denot(c, env=None) -> Tuple[GITree, tuple]:
    env = env or {}
    if isinstance(c, M.CTerm):
        return pop_wrap.apply(interp(c.e, env)), ()
    if isinstance(c, M.CRet):
        return interp(c.v, env), ()
    if isinstance(c, M.CEval):
        hom = ctx_hom(c.k, env)
        return pop_wrap.apply(hom.apply(interp(c.e, env))), mcont_denot(c.mk, env)
    if isinstance(c, M.CCont):
        hom = ctx_hom(c.k, env)
        return pop_wrap.apply(hom.apply(interp(c.v, env))), mcont_denot(c.mk, env)
    if isinstance(c, M.CMcont):
        return pop_wrap.apply(interp(c.v, env)), mcont_denot(c.mk, env)
    raise TypeError(c)


def program_tree(e: A.Expr) -> GITree:
    """Top-level denotation: pop-wrapped, run from the empty continuation stack."""
    return pop_wrap.apply(interp(e, {}))
