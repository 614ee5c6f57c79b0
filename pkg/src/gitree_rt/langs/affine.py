"""Frontend for the concurrent affine language.

The checker enforces at-most-once variable use by multiplicative context
splitting: sibling subterms must use disjoint variable sets (the two
branches of an ``if`` share, since only one runs).  Types are synthesized
with the shared unifier; ``rec`` has no affine rule and is rejected.

The interpreter makes the affine discipline dynamic as well: every binding
is a *thunk* -- a one-shot function guarded by a heap flag flipped with an
atomic exchange -- and every variable use forces its thunk.  Forcing twice
hits the flipped flag and yields the linearity error.  Because the flip is
a single atomic step, the discipline survives interleaving: a thunk shared
with a forked thread still fires at most once.

Pairs of ground values are ground pairs; pairs with function components
fall back to a function encoding, and the let-pair projections handle both.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, Optional, Tuple

from ..core import (
    Err,
    Fun,
    GITree,
    LIN_ERR,
    Later,
    Loc,
    NATOPS,
    Nat,
    Pair,
    RUNTIME_ERR,
    Ret,
    UNIT,
    Unit,
    app,
    get_ret,
    get_val,
    if_zero,
    natop_lift,
)
from ..effects import store
from ..effects.concurrency import fork_reifier, fork_then
from ..engine import Runtime, combine
from . import ast as A
from .types import (
    BOOL,
    NAT,
    TLolli,
    TRef,
    TTensor,
    Type,
    TypeErr,
    UNIT_T,
    Unifier,
)

Used = FrozenSet[str]


def _disjoint(rule: str, *useds: Used):
    seen: set = set()
    for u in useds:
        overlap = seen & set(u)
        if overlap:
            raise TypeErr(rule, f"affine split reuses {sorted(overlap)}")
        seen |= set(u)
    return frozenset(seen)


def infer(u: Unifier, env: Dict[str, Type], e: A.Expr) -> Tuple[Type, Used]:
    if isinstance(e, A.Lit):
        return NAT, frozenset()
    if isinstance(e, A.BoolLit):
        return BOOL, frozenset()
    if isinstance(e, A.UnitLit):
        return UNIT_T, frozenset()
    if isinstance(e, A.Var):
        if e.name not in env:
            raise TypeErr("var", f"unbound {e.name}")
        return env[e.name], frozenset([e.name])
    if isinstance(e, A.Fun):
        a = u.fresh()
        tb, used = infer(u, {**env, e.param: a}, e.body)
        return TLolli(a, tb), used - {e.param}
    if isinstance(e, A.Rec):
        raise TypeErr("rec", "unrestricted recursion is not affine")
    if isinstance(e, A.App):
        tf, uf = infer(u, env, e.fn)
        ta, ua = infer(u, env, e.arg)
        r = u.fresh()
        u.unify(tf, TLolli(ta, r), "app")
        return r, _disjoint("app", uf, ua)
    if isinstance(e, A.Natop):
        tl, ul = infer(u, env, e.left)
        tr, ur = infer(u, env, e.right)
        u.unify(tl, NAT, "natop")
        u.unify(tr, NAT, "natop")
        return NAT, _disjoint("natop", ul, ur)
    if isinstance(e, A.If):
        tc, uc = infer(u, env, e.cond)
        u.unify(tc, BOOL, "if")
        tt, ut = infer(u, env, e.then)
        te, ue = infer(u, env, e.els)
        u.unify(tt, te, "if")
        # the branches share: only one of them runs
        return tt, _disjoint("if", uc, ut | ue)
    if isinstance(e, A.Let):
        tb, ub = infer(u, env, e.bound)
        t2, u2 = infer(u, {**env, e.name: tb}, e.body)
        return t2, _disjoint("let", ub, u2 - {e.name})
    if isinstance(e, A.PairE):
        t1, u1 = infer(u, env, e.fst)
        t2, u2 = infer(u, env, e.snd)
        return TTensor(t1, t2), _disjoint("pair", u1, u2)
    if isinstance(e, A.LetPair):
        tb, ub = infer(u, env, e.bound)
        a, b = u.fresh(), u.fresh()
        u.unify(tb, TTensor(a, b), "let-pair")
        t2, u2 = infer(u, {**env, e.n1: a, e.n2: b}, e.body)
        return t2, _disjoint("let-pair", ub, u2 - {e.n1, e.n2})
    if isinstance(e, A.Alloc):
        t, used = infer(u, env, e.init)
        return TRef(t), used
    if isinstance(e, A.Dealloc):
        t, used = infer(u, env, e.ref)
        a = u.fresh()
        u.unify(t, TRef(a), "dealloc")
        return UNIT_T, used
    if isinstance(e, A.Replace):
        t1, u1 = infer(u, env, e.ref)
        t2, u2 = infer(u, env, e.value)
        a = u.fresh()
        u.unify(t1, TRef(a), "replace")
        return TTensor(a, TRef(t2)), _disjoint("replace", u1, u2)
    if isinstance(e, A.ForkSeq):
        t1, u1 = infer(u, env, e.spawn)
        u.unify(t1, UNIT_T, "fork")
        t2, u2 = infer(u, env, e.body)
        return t2, _disjoint("fork", u1, u2)
    raise TypeErr("syntax", f"{type(e).__name__} is not an aff expression")


def typecheck(e: A.Expr, env: Optional[Dict[str, Type]] = None) -> Type:
    u = Unifier()
    t, _used = infer(u, env or {}, e)
    return u.resolve(t)


# --- denotation -----------------------------------------------------------------------


def thunk(body: GITree) -> GITree:
    """One-shot suspension: alloc a flag, guard the body with an atomic flip."""
    return store.alloc(
        Ret(0),
        lambda flag: Fun(
            Later.now(
                lambda _x: if_zero(
                    store.xchg(flag, Ret(1)), lambda: Err(LIN_ERR), lambda: body
                )
            )
        ),
    )


def force(v: GITree) -> GITree:
    return app(v, Ret(0))


_FST = Fun(Later.now(lambda a: Fun(Later.now(lambda b: a))))
_SND = Fun(Later.now(lambda a: Fun(Later.now(lambda b: b))))


def pair_value(v1: GITree, v2: GITree) -> GITree:
    """Ground pair when possible, function encoding otherwise."""
    if isinstance(v1, Ret) and isinstance(v2, Ret):
        return Ret(Pair(v1.ground, v2.ground))
    return Fun(Later.now(lambda s: app(app(s, v1), v2)))


def _proj(v: GITree, which: int) -> GITree:
    if isinstance(v, Ret):
        if isinstance(v.ground, Pair):
            return Ret(v.ground.fst if which == 0 else v.ground.snd)
        return Err(RUNTIME_ERR)
    if isinstance(v, Fun):
        return app(v, _FST if which == 0 else _SND)
    return Err(RUNTIME_ERR)


def _bind_thunked(value: GITree, k) -> GITree:
    """Thunk a computed value and hand the thunk to k."""
    return get_val(thunk(value), k)


def interp(e: A.Expr, env: Dict[str, GITree]) -> GITree:
    if isinstance(e, A.Lit):
        return Ret(e.value)
    if isinstance(e, A.BoolLit):
        return Ret(1 if e.value else 0)
    if isinstance(e, A.UnitLit):
        return Ret(UNIT)
    if isinstance(e, A.Var):
        return force(env[e.name])
    if isinstance(e, A.Fun):
        return Fun(Later.now(lambda th: interp(e.body, {**env, e.param: th})))
    if isinstance(e, A.App):
        return get_val(
            interp(e.arg, env),
            lambda x: app(interp(e.fn, env), _lazy_thunk_tree(x)),
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
            interp(e.bound, env),
            lambda v: _bind_thunked(v, lambda th: interp(e.body, {**env, e.name: th})),
        )
    if isinstance(e, A.PairE):
        return get_val(
            interp(e.fst, env),
            lambda v1: get_val(interp(e.snd, env), lambda v2: pair_value(v1, v2)),
        )
    if isinstance(e, A.LetPair):
        def with_pair(x):
            return _bind_thunked(
                _proj(x, 0),
                lambda y: _bind_thunked(
                    _proj(x, 1),
                    lambda z: interp(e.body, {**env, e.n1: y, e.n2: z}),
                ),
            )

        return get_val(interp(e.bound, env), with_pair)
    if isinstance(e, A.Alloc):
        return get_val(
            interp(e.init, env), lambda x: store.alloc(x, lambda l: Ret(l))
        )
    if isinstance(e, A.Dealloc):
        return get_ret(
            interp(e.ref, env),
            lambda g: store.dealloc(g) if isinstance(g, Loc) else Err(RUNTIME_ERR),
        )
    if isinstance(e, A.Replace):
        return get_val(
            interp(e.value, env),
            lambda y: get_ret(
                interp(e.ref, env),
                lambda g: (
                    get_val(store.xchg(g, y), lambda x: pair_value(x, Ret(g)))
                    if isinstance(g, Loc)
                    else Err(RUNTIME_ERR)
                ),
            ),
        )
    if isinstance(e, A.ForkSeq):
        return fork_then(interp(e.spawn, env), interp(e.body, env))
    raise TypeError(f"{type(e).__name__} is not an aff expression")


def _lazy_thunk_tree(value: GITree) -> GITree:
    # the thunk's alloc runs before the function does (strict application)
    return thunk(value)


def runtime() -> Runtime:
    return combine([store.store_reifier(), fork_reifier()])
