"""CEK oracle for the exception language.

Configurations: term<e>, eval<e, K>, cont<K, v>, ret<v>, with K a stack of
frames, innermost first.  The application rules follow the usual
argument-first dance: an application pushes an arg-hole frame; when the
argument value meets a non-value function expression the machine switches
to a fun-hole frame; a function value meeting an arg-hole with a rec/fun
head beta-reduces.  Throwing searches the stack for the nearest matching
catch frame, discarding everything inner; a normal exit discards the catch
frame.  The natop/if/let rules are reconstructed in the same style (the
displayed rule set covers only application and the exception forms).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from ..langs import ast as A
from ..langs.ast import Expr, is_value_expr, subst


@dataclass(frozen=True)
class FAppArg:
    fn: Expr  # app(fn, []) -- argument being evaluated


@dataclass(frozen=True)
class FAppFun:
    arg: Expr  # app([], v)


@dataclass(frozen=True)
class FNatopR:
    op: str
    left: Expr


@dataclass(frozen=True)
class FNatopL:
    op: str
    right: Expr


@dataclass(frozen=True)
class FIf:
    then: Expr
    els: Expr


@dataclass(frozen=True)
class FLet:
    name: str
    body: Expr


@dataclass(frozen=True)
class FCatch:
    exc: str
    hname: str
    handler: Expr


@dataclass(frozen=True)
class FRaise:
    exc: str


Kont = Tuple


class Config:
    __slots__ = ()


@dataclass(frozen=True)
class CTerm(Config):
    e: Expr


@dataclass(frozen=True)
class CEval(Config):
    e: Expr
    k: Kont


@dataclass(frozen=True)
class CCont(Config):
    k: Kont
    v: Expr


@dataclass(frozen=True)
class CRet(Config):
    v: Expr


def step(c: Config):
    """('next', c') | ('done', v) | ('stuck', msg)."""
    if isinstance(c, CTerm):
        return ("next", CEval(c.e, ()))
    if isinstance(c, CRet):
        return ("done", c.v)
    if isinstance(c, CEval):
        e, k = c.e, c.k
        if is_value_expr(e):
            return ("next", CCont(k, e))
        if isinstance(e, A.App):
            return ("next", CEval(e.arg, (FAppArg(e.fn),) + k))
        if isinstance(e, A.Natop):
            return ("next", CEval(e.right, (FNatopR(e.op, e.left),) + k))
        if isinstance(e, A.If):
            return ("next", CEval(e.cond, (FIf(e.then, e.els),) + k))
        if isinstance(e, A.Let):
            return ("next", CEval(e.bound, (FLet(e.name, e.body),) + k))
        if isinstance(e, A.TryCatch):
            return ("next", CEval(e.body, (FCatch(e.exc, e.hname, e.handler),) + k))
        if isinstance(e, A.Raise):
            return ("next", CEval(e.payload, (FRaise(e.exc),) + k))
        return ("stuck", f"no eval rule for {type(e).__name__}")
    if isinstance(c, CCont):
        k, v = c.k, c.v
        if not k:
            return ("next", CRet(v))
        f, rest = k[0], k[1:]
        if isinstance(f, FAppArg):
            if isinstance(f.fn, A.Rec):
                body = subst(subst(f.fn.body, f.fn.param, v), f.fn.fname, f.fn)
                return ("next", CEval(body, rest))
            if isinstance(f.fn, A.Fun):
                return ("next", CEval(subst(f.fn.body, f.fn.param, v), rest))
            if is_value_expr(f.fn):
                return ("stuck", "application of a non-function value")
            return ("next", CEval(f.fn, (FAppFun(v),) + rest))
        if isinstance(f, FAppFun):
            # function value arrived: re-dispatch the stored argument under it
            return ("next", CEval(f.arg, (FAppArg(v),) + rest))
        if isinstance(f, FNatopR):
            return ("next", CEval(f.left, (FNatopL(f.op, v),) + rest))
        if isinstance(f, FNatopL):
            if isinstance(f.right, A.Lit) and isinstance(v, A.Lit):
                n = (
                    v.value + f.right.value
                    if f.op == "+"
                    else max(0, v.value - f.right.value)
                )
                return ("next", CCont(rest, A.Lit(n)))
            return ("stuck", "natop on non-numbers")
        if isinstance(f, FIf):
            if isinstance(v, A.Lit):
                return ("next", CEval(f.then if v.value != 0 else f.els, rest))
            return ("stuck", "if on a non-number")
        if isinstance(f, FLet):
            return ("next", CEval(subst(f.body, f.name, v), rest))
        if isinstance(f, FCatch):
            # normal exit: discard the handler frame
            return ("next", CEval(v, rest))
        if isinstance(f, FRaise):
            for i, g in enumerate(rest):
                if isinstance(g, FCatch) and g.exc == f.exc:
                    body = subst(g.handler, g.hname, v)
                    return ("next", CEval(body, rest[i + 1 :]))
            return ("stuck", f"uncaught exception {f.exc}")
        return ("stuck", f"no cont rule for {type(f).__name__}")
    raise TypeError(c)


def machine_run(e: Expr, max_steps: int = 10_000, want_trace: bool = False):
    c: Config = CTerm(e)
    trace = [c] if want_trace else []
    for _ in range(max_steps):
        res = step(c)
        if res[0] == "done":
            return ("value", res[1]), trace
        if res[0] == "stuck":
            return ("stuck", res[1]), trace
        c = res[1]
        if want_trace:
            trace.append(c)
    return ("timeout", None), trace
