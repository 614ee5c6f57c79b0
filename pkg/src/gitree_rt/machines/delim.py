"""CEK oracle for the shift/reset language.

Configurations: term<e>, eval<e, K, mk>, cont<K, v, mk>, mcont<mk, v>,
ret<v>.  K is a frame stack (innermost first); mk is the metacontinuation,
a stack of Ks saved by delimiters.

reset pushes the current K onto mk and starts the body in an empty context;
shift substitutes the captured context as a continuation value and clears
K; applying a continuation value with @ plugs the argument into the
captured context and pushes the current K onto mk; an empty K unwinds mk.

Plain application is function-first here (the context grammar has frames
v [] and [] e); natop and @ are right-first.  The if/natop/let rules are
reconstructed in the same CEK style as the displayed application rules.
Plain application of a continuation value is abortive (jumps into the
captured context without saving the current one) -- the typed surface never
produces it, but it keeps untyped runs aligned with the denotational side.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from ..langs import ast as A
from ..langs.ast import ContVal, Expr, PrimVal, is_value_expr, subst


@dataclass(frozen=True)
class FAppL:
    """app([], e) -- evaluating the function, argument pending."""

    arg: Expr

    def subst(self, name, value):
        return FAppL(subst(self.arg, name, value))

    def free_vars(self):
        return A.free_vars(self.arg)


@dataclass(frozen=True)
class FAppR:
    """app(v, []) -- function value in hand, evaluating the argument."""

    fn: Expr

    def subst(self, name, value):
        return FAppR(subst(self.fn, name, value))

    def free_vars(self):
        return A.free_vars(self.fn)


@dataclass(frozen=True)
class FNatopR:
    op: str
    left: Expr

    def subst(self, name, value):
        return FNatopR(self.op, subst(self.left, name, value))

    def free_vars(self):
        return A.free_vars(self.left)


@dataclass(frozen=True)
class FNatopL:
    op: str
    right: Expr

    def subst(self, name, value):
        return FNatopL(self.op, subst(self.right, name, value))

    def free_vars(self):
        return A.free_vars(self.right)


@dataclass(frozen=True)
class FIf:
    then: Expr
    els: Expr

    def subst(self, name, value):
        return FIf(subst(self.then, name, value), subst(self.els, name, value))

    def free_vars(self):
        return A.free_vars(self.then) | A.free_vars(self.els)


@dataclass(frozen=True)
class FLet:
    name: str
    body: Expr

    def subst(self, name, value):
        if name == self.name:
            return self
        return FLet(self.name, subst(self.body, name, value))

    def free_vars(self):
        return A.free_vars(self.body) - {self.name}


@dataclass(frozen=True)
class FAppkArg:
    """appk(e, []) -- evaluating the @ argument, function expression pending."""

    fn: Expr

    def subst(self, name, value):
        return FAppkArg(subst(self.fn, name, value))

    def free_vars(self):
        return A.free_vars(self.fn)


@dataclass(frozen=True)
class FAppkFun:
    """appk([], v) -- @ argument in hand, evaluating the function position."""

    arg: Expr

    def subst(self, name, value):
        return FAppkFun(subst(self.arg, name, value))

    def free_vars(self):
        return A.free_vars(self.arg)


Kont = Tuple
Mcont = Tuple


class Config:
    __slots__ = ()


@dataclass(frozen=True)
class CTerm(Config):
    e: Expr


@dataclass(frozen=True)
class CEval(Config):
    e: Expr
    k: Kont
    mk: Mcont


@dataclass(frozen=True)
class CCont(Config):
    k: Kont
    v: Expr
    mk: Mcont


@dataclass(frozen=True)
class CMcont(Config):
    mk: Mcont
    v: Expr


@dataclass(frozen=True)
class CRet(Config):
    v: Expr


def _isprime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _beta(fnv: Expr, v: Expr, k: Kont, mk: Mcont):
    if isinstance(fnv, A.Rec):
        body = subst(subst(fnv.body, fnv.param, v), fnv.fname, fnv)
        return ("next", CEval(body, k, mk))
    if isinstance(fnv, A.Fun):
        return ("next", CEval(subst(fnv.body, fnv.param, v), k, mk))
    if isinstance(fnv, PrimVal) and fnv.name == "isprime":
        if isinstance(v, A.Lit):
            return ("next", CCont(k, A.Lit(1 if _isprime(v.value) else 0), mk))
        return ("stuck", "isprime on a non-number")
    if isinstance(fnv, ContVal):
        # abortive plain application: jump into the captured context
        return ("next", CCont(fnv.frames, v, mk))
    return ("stuck", "application of a non-function value")


def step(c: Config):
    if isinstance(c, CTerm):
        return ("next", CEval(c.e, (), ()))
    if isinstance(c, CRet):
        return ("done", c.v)
    if isinstance(c, CEval):
        e, k, mk = c.e, c.k, c.mk
        if isinstance(e, A.Var) and e.name == "isprime":
            return ("next", CCont(k, PrimVal("isprime"), mk))
        if is_value_expr(e):
            return ("next", CCont(k, e, mk))
        if isinstance(e, A.App):
            return ("next", CEval(e.fn, (FAppL(e.arg),) + k, mk))
        if isinstance(e, A.AppCont):
            return ("next", CEval(e.arg, (FAppkArg(e.fn),) + k, mk))
        if isinstance(e, A.Natop):
            return ("next", CEval(e.right, (FNatopR(e.op, e.left),) + k, mk))
        if isinstance(e, A.If):
            return ("next", CEval(e.cond, (FIf(e.then, e.els),) + k, mk))
        if isinstance(e, A.Let):
            return ("next", CEval(e.bound, (FLet(e.name, e.body),) + k, mk))
        if isinstance(e, A.Reset):
            return ("next", CEval(e.body, (), (k,) + mk))
        if isinstance(e, A.Shift):
            return ("next", CEval(subst(e.body, e.name, ContVal(k)), (), mk))
        return ("stuck", f"no eval rule for {type(e).__name__}")
    if isinstance(c, CCont):
        k, v, mk = c.k, c.v, c.mk
        if not k:
            return ("next", CMcont(mk, v))
        f, rest = k[0], k[1:]
        if isinstance(f, FAppL):
            return ("next", CEval(f.arg, (FAppR(v),) + rest, mk))
        if isinstance(f, FAppR):
            return _beta(f.fn, v, rest, mk)
        if isinstance(f, FNatopR):
            return ("next", CEval(f.left, (FNatopL(f.op, v),) + rest, mk))
        if isinstance(f, FNatopL):
            if isinstance(v, A.Lit) and isinstance(f.right, A.Lit):
                n = (
                    v.value + f.right.value
                    if f.op == "+"
                    else max(0, v.value - f.right.value)
                )
                return ("next", CCont(rest, A.Lit(n), mk))
            return ("stuck", "natop on non-numbers")
        if isinstance(f, FIf):
            if isinstance(v, A.Lit):
                return ("next", CEval(f.then if v.value != 0 else f.els, rest, mk))
            return ("stuck", "if on a non-number")
        if isinstance(f, FLet):
            return ("next", CEval(subst(f.body, f.name, v), rest, mk))
        if isinstance(f, FAppkArg):
            return ("next", CEval(f.fn, (FAppkFun(v),) + rest, mk))
        if isinstance(f, FAppkFun):
            if isinstance(v, ContVal):
                # plug the argument into the captured context; save the rest
                return ("next", CCont(v.frames, f.arg, (rest,) + mk))
            return ("stuck", "@ on a non-continuation value")
        return ("stuck", f"no cont rule for {type(f).__name__}")
    if isinstance(c, CMcont):
        mk, v = c.mk, c.v
        if not mk:
            return ("next", CRet(v))
        return ("next", CCont(mk[0], v, mk[1:]))
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
