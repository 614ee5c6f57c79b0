"""Shared expression nodes for the five surface languages.

One node set covers all languages; each parser/checker admits its own
subset.  ``ContVal`` and ``PrimVal`` are runtime-only machine values and
never come out of a parser.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Lit(Expr):
    value: int


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class UnitLit(Expr):
    pass


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Fun(Expr):
    param: str
    body: Expr


@dataclass(frozen=True)
class Rec(Expr):
    fname: str
    param: str
    body: Expr


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class Natop(Expr):
    op: str  # "+" | "-"
    left: Expr
    right: Expr


@dataclass(frozen=True)
class If(Expr):
    cond: Expr
    then: Expr
    els: Expr


@dataclass(frozen=True)
class Let(Expr):
    name: str
    bound: Expr
    body: Expr


# call/cc language


@dataclass(frozen=True)
class Callcc(Expr):
    name: str
    body: Expr


@dataclass(frozen=True)
class Throw(Expr):
    payload: Expr
    target: Expr


# exception language


@dataclass(frozen=True)
class Raise(Expr):
    exc: str
    payload: Expr


@dataclass(frozen=True)
class TryCatch(Expr):
    exc: str
    body: Expr
    hname: str
    handler: Expr


# delimited-control language


@dataclass(frozen=True)
class Reset(Expr):
    body: Expr


@dataclass(frozen=True)
class Shift(Expr):
    name: str
    body: Expr


@dataclass(frozen=True)
class AppCont(Expr):
    fn: Expr
    arg: Expr


# store + embedding language


@dataclass(frozen=True)
class Embed(Expr):
    body: Expr  # a closed delim-language expression


@dataclass(frozen=True)
class Alloc(Expr):
    init: Expr


@dataclass(frozen=True)
class Deref(Expr):
    ref: Expr


@dataclass(frozen=True)
class Assign(Expr):
    ref: Expr
    value: Expr


# concurrent affine language


@dataclass(frozen=True)
class PairE(Expr):
    fst: Expr
    snd: Expr


@dataclass(frozen=True)
class LetPair(Expr):
    n1: str
    n2: str
    bound: Expr
    body: Expr


@dataclass(frozen=True)
class Replace(Expr):
    ref: Expr
    value: Expr


@dataclass(frozen=True)
class Dealloc(Expr):
    ref: Expr


@dataclass(frozen=True)
class ForkSeq(Expr):
    spawn: Expr
    body: Expr


# machine-only values


@dataclass(frozen=True)
class ContVal(Expr):
    frames: Tuple  # innermost frame first; frame classes live with each machine


@dataclass(frozen=True)
class PrimVal(Expr):
    name: str  # currently just "isprime"


VALUE_NODES = (Lit, BoolLit, UnitLit, Fun, Rec, ContVal, PrimVal)


def is_value_expr(e: Expr) -> bool:
    return isinstance(e, VALUE_NODES)


_FRESH = [0]


def fresh_name(hint: str = "v") -> str:
    """Deterministic fresh-name supply for capture-avoiding substitution."""
    _FRESH[0] += 1
    return f"_{hint}{_FRESH[0]}"


def reset_fresh_names():
    _FRESH[0] = 0


def _subst_frames(frames, name, value):
    # continuation values captured at runtime are closed, but substitute
    # structurally anyway so the operation is total
    return tuple(f.subst(name, value) for f in frames)


def free_vars(e: Expr) -> set:
    if isinstance(e, (Lit, BoolLit, UnitLit, PrimVal)):
        return set()
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Fun):
        return free_vars(e.body) - {e.param}
    if isinstance(e, Rec):
        return free_vars(e.body) - {e.fname, e.param}
    if isinstance(e, App):
        return free_vars(e.fn) | free_vars(e.arg)
    if isinstance(e, AppCont):
        return free_vars(e.fn) | free_vars(e.arg)
    if isinstance(e, Natop):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, If):
        return free_vars(e.cond) | free_vars(e.then) | free_vars(e.els)
    if isinstance(e, Let):
        return free_vars(e.bound) | (free_vars(e.body) - {e.name})
    if isinstance(e, Callcc):
        return free_vars(e.body) - {e.name}
    if isinstance(e, Throw):
        return free_vars(e.payload) | free_vars(e.target)
    if isinstance(e, Raise):
        return free_vars(e.payload)
    if isinstance(e, TryCatch):
        return free_vars(e.body) | (free_vars(e.handler) - {e.hname})
    if isinstance(e, Reset):
        return free_vars(e.body)
    if isinstance(e, Shift):
        return free_vars(e.body) - {e.name}
    if isinstance(e, Embed):
        return free_vars(e.body)
    if isinstance(e, (Alloc, Deref, Dealloc)):
        inner = e.init if isinstance(e, Alloc) else e.ref
        return free_vars(inner)
    if isinstance(e, (Assign, Replace)):
        return free_vars(e.ref) | free_vars(e.value)
    if isinstance(e, PairE):
        return free_vars(e.fst) | free_vars(e.snd)
    if isinstance(e, LetPair):
        return free_vars(e.bound) | (free_vars(e.body) - {e.n1, e.n2})
    if isinstance(e, ForkSeq):
        return free_vars(e.spawn) | free_vars(e.body)
    if isinstance(e, ContVal):
        out = set()
        for f in e.frames:
            out |= f.free_vars()
        return out
    raise TypeError(f"unhandled node {e!r}")


def subst(e: Expr, name: str, value: Expr) -> Expr:
    """Capture-avoiding substitution e[name := value]."""
    if isinstance(e, (Lit, BoolLit, UnitLit, PrimVal)):
        return e
    if isinstance(e, Var):
        return value if e.name == name else e
    if isinstance(e, Fun):
        return _subst_binder1(e, name, value, "param", "body", Fun)
    if isinstance(e, Rec):
        if name in (e.fname, e.param):
            return e
        fv = free_vars(value)
        fname, param, body = e.fname, e.param, e.body
        if fname in fv:
            new = fresh_name(fname)
            body = subst(body, fname, Var(new))
            fname = new
        if param in fv:
            new = fresh_name(param)
            body = subst(body, param, Var(new))
            param = new
        return Rec(fname, param, subst(body, name, value))
    if isinstance(e, App):
        return App(subst(e.fn, name, value), subst(e.arg, name, value))
    if isinstance(e, AppCont):
        return AppCont(subst(e.fn, name, value), subst(e.arg, name, value))
    if isinstance(e, Natop):
        return Natop(e.op, subst(e.left, name, value), subst(e.right, name, value))
    if isinstance(e, If):
        return If(
            subst(e.cond, name, value), subst(e.then, name, value), subst(e.els, name, value)
        )
    if isinstance(e, Let):
        bound = subst(e.bound, name, value)
        if e.name == name:
            return Let(e.name, bound, e.body)
        nm, body = _rename_if_captured(e.name, e.body, value)
        return Let(nm, bound, subst(body, name, value))
    if isinstance(e, Callcc):
        if e.name == name:
            return e
        nm, body = _rename_if_captured(e.name, e.body, value)
        return Callcc(nm, subst(body, name, value))
    if isinstance(e, Throw):
        return Throw(subst(e.payload, name, value), subst(e.target, name, value))
    if isinstance(e, Raise):
        return Raise(e.exc, subst(e.payload, name, value))
    if isinstance(e, TryCatch):
        body = subst(e.body, name, value)
        if e.hname == name:
            return TryCatch(e.exc, body, e.hname, e.handler)
        nm, handler = _rename_if_captured(e.hname, e.handler, value)
        return TryCatch(e.exc, body, nm, subst(handler, name, value))
    if isinstance(e, Reset):
        return Reset(subst(e.body, name, value))
    if isinstance(e, Shift):
        if e.name == name:
            return e
        nm, body = _rename_if_captured(e.name, e.body, value)
        return Shift(nm, subst(body, name, value))
    if isinstance(e, Embed):
        return Embed(subst(e.body, name, value))
    if isinstance(e, Alloc):
        return Alloc(subst(e.init, name, value))
    if isinstance(e, Deref):
        return Deref(subst(e.ref, name, value))
    if isinstance(e, Assign):
        return Assign(subst(e.ref, name, value), subst(e.value, name, value))
    if isinstance(e, PairE):
        return PairE(subst(e.fst, name, value), subst(e.snd, name, value))
    if isinstance(e, LetPair):
        bound = subst(e.bound, name, value)
        if name in (e.n1, e.n2):
            return LetPair(e.n1, e.n2, bound, e.body)
        fv = free_vars(value)
        n1, n2, body = e.n1, e.n2, e.body
        if n1 in fv:
            new = fresh_name(n1)
            body = subst(body, n1, Var(new))
            n1 = new
        if n2 in fv:
            new = fresh_name(n2)
            body = subst(body, n2, Var(new))
            n2 = new
        return LetPair(n1, n2, bound, subst(body, name, value))
    if isinstance(e, Replace):
        return Replace(subst(e.ref, name, value), subst(e.value, name, value))
    if isinstance(e, Dealloc):
        return Dealloc(subst(e.ref, name, value))
    if isinstance(e, ForkSeq):
        return ForkSeq(subst(e.spawn, name, value), subst(e.body, name, value))
    if isinstance(e, ContVal):
        return ContVal(_subst_frames(e.frames, name, value))
    raise TypeError(f"unhandled node {e!r}")


def _rename_if_captured(binder: str, body: Expr, value: Expr):
    if binder in free_vars(value):
        new = fresh_name(binder)
        return new, subst(body, binder, Var(new))
    return binder, body


def _subst_binder1(e, name, value, param_attr, body_attr, ctor):
    param = getattr(e, param_attr)
    body = getattr(e, body_attr)
    if param == name:
        return e
    param, body = _rename_if_captured(param, body, value)
    return ctor(param, subst(body, name, value))
