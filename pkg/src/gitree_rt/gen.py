"""Type-directed random program generation for the differential harness.

Each generator builds a typing derivation top-down for a target type
(always nat at the root), emitting syntax as it goes, so every generated
program is closed and well-typed by construction.  Recursion is only
emitted in a decreasing-argument pattern (rec f x = if x then ... f (x-1)
... else base, applied to a small literal) to bias toward termination;
plain functions are applied immediately rather than passed around, which
for the exception language also guarantees every raise happens under a
matching catch.

For the shift/reset language the derivation threads answer types through
the application rule; the generator keeps them concrete (nat), which makes
the threading trivially satisfiable while still exercising shift, reset and
continuation application.

Everything is driven by a seeded RNG: one seed, one program.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional

from .langs import ast as A


class GenError(Exception):
    pass


@dataclass
class GenSpec:
    lang: str
    size: int = 20
    seed: int = 0
    target: str = "nat"


def gen_program(spec: GenSpec) -> A.Expr:
    rng = random.Random(spec.seed)
    for attempt in range(10):
        try:
            if spec.lang == "cc":
                return _CcGen(rng).top(spec.size)
            if spec.lang == "exc":
                return _ExcGen(rng).top(spec.size)
            if spec.lang == "delim":
                return _DelimGen(rng).top(spec.size)
            if spec.lang == "aff":
                return _AffGen(rng).top(spec.size)
            raise GenError(f"no generator for language {spec.lang!r}")
        except _Retry:
            continue
    raise GenError(f"generation failed after 10 attempts (size {spec.size} too small?)")


class _Retry(Exception):
    pass


def _pick(rng, weighted):
    total = sum(w for _c, w in weighted)
    r = rng.random() * total
    acc = 0.0
    for c, w in weighted:
        acc += w
        if r < acc:
            return c
    return weighted[-1][0]


class _GenBase:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self._fresh = 0

    def fresh(self, hint="x") -> str:
        self._fresh += 1
        return f"{hint}{self._fresh}"

    def lit(self) -> A.Expr:
        return A.Lit(self.rng.randrange(0, 10))


# --- call/cc --------------------------------------------------------------------------


class _CcGen(_GenBase):
    """Everything at nat; continuations all cont nat; functions applied at once."""

    def top(self, size: int) -> A.Expr:
        return self.nat({}, size)

    def nat(self, env: Dict[str, str], budget: int) -> A.Expr:
        nat_vars = [n for n, t in env.items() if t == "nat"]
        cont_vars = [n for n, t in env.items() if t == "cont"]
        if budget <= 1:
            return A.Var(self.rng.choice(nat_vars)) if nat_vars and self.rng.random() < 0.5 else self.lit()
        cands = [("lit", 2.0), ("natop", 3.0), ("callcc", 3.0)]
        if nat_vars:
            cands.append(("var", 2.0))
        if cont_vars:
            cands.append(("throw", 4.0))
        if budget >= 4:
            cands += [("if", 1.5), ("let", 1.5), ("appfun", 1.5)]
        if budget >= 8:
            cands.append(("rec", 1.0))
        c = _pick(self.rng, cands)
        half = max(1, (budget - 1) // 2)
        if c == "lit":
            return self.lit()
        if c == "var":
            return A.Var(self.rng.choice(nat_vars))
        if c == "natop":
            op = self.rng.choice(["+", "-"])
            return A.Natop(op, self.nat(env, half), self.nat(env, budget - 1 - half))
        if c == "if":
            third = max(1, (budget - 1) // 3)
            return A.If(
                self.nat(env, third), self.nat(env, third), self.nat(env, third)
            )
        if c == "let":
            x = self.fresh()
            return A.Let(x, self.nat(env, half), self.nat({**env, x: "nat"}, budget - 1 - half))
        if c == "appfun":
            x = self.fresh()
            body = self.nat({**env, x: "nat"}, half)
            return A.App(A.Fun(x, body), self.nat(env, budget - 1 - half))
        if c == "callcc":
            k = self.fresh("k")
            return A.Callcc(k, self.nat({**env, k: "cont"}, budget - 1))
        if c == "throw":
            k = self.rng.choice(cont_vars)
            return A.Throw(self.nat(env, budget - 2), A.Var(k))
        if c == "rec":
            return self._rec(env, budget)
        raise AssertionError(c)

    def _rec(self, env, budget) -> A.Expr:
        f, x = self.fresh("f"), self.fresh("n")
        inner_env = {**env, x: "nat"}
        step = A.Natop(
            "+",
            A.App(A.Var(f), A.Natop("-", A.Var(x), A.Lit(1))),
            self.nat(inner_env, max(1, budget - 7)),
        )
        base = self.nat(inner_env, 2)
        fn = A.Rec(f, x, A.If(A.Var(x), step, base))
        return A.App(fn, A.Lit(self.rng.randrange(0, 5)))


# --- exceptions -----------------------------------------------------------------------


EXC_NAMES = ["E", "F", "G"]


class _ExcGen(_GenBase):
    """nat programs; raise only targets a name with a catch in (lexical) scope,
    and functions are applied immediately, so every raise is caught."""

    def top(self, size: int) -> A.Expr:
        return self.nat({}, [], size)

    def nat(self, env: Dict[str, str], catchable: List[str], budget: int) -> A.Expr:
        nat_vars = [n for n, t in env.items() if t == "nat"]
        if budget <= 1:
            return A.Var(self.rng.choice(nat_vars)) if nat_vars and self.rng.random() < 0.5 else self.lit()
        cands = [("lit", 2.0), ("natop", 3.0), ("try", 3.5)]
        if nat_vars:
            cands.append(("var", 2.0))
        if catchable:
            cands.append(("raise", 3.5))
        if budget >= 4:
            cands += [("if", 1.5), ("let", 1.5), ("appfun", 1.5)]
        if budget >= 8:
            cands.append(("rec", 1.0))
        c = _pick(self.rng, cands)
        half = max(1, (budget - 1) // 2)
        if c == "lit":
            return self.lit()
        if c == "var":
            return A.Var(self.rng.choice(nat_vars))
        if c == "natop":
            op = self.rng.choice(["+", "-"])
            return A.Natop(
                op, self.nat(env, catchable, half), self.nat(env, catchable, budget - 1 - half)
            )
        if c == "if":
            third = max(1, (budget - 1) // 3)
            return A.If(
                self.nat(env, catchable, third),
                self.nat(env, catchable, third),
                self.nat(env, catchable, third),
            )
        if c == "let":
            x = self.fresh()
            return A.Let(
                x,
                self.nat(env, catchable, half),
                self.nat({**env, x: "nat"}, catchable, budget - 1 - half),
            )
        if c == "appfun":
            x = self.fresh()
            body = self.nat({**env, x: "nat"}, catchable, half)
            return A.App(A.Fun(x, body), self.nat(env, catchable, budget - 1 - half))
        if c == "try":
            exc = self.rng.choice(EXC_NAMES)
            h = self.fresh("h")
            body = self.nat(env, catchable + [exc], half)
            handler = self.nat({**env, h: "nat"}, catchable, budget - 1 - half)
            return A.TryCatch(exc, body, h, handler)
        if c == "raise":
            exc = self.rng.choice(catchable)
            return A.Raise(exc, self.nat(env, catchable, budget - 2))
        if c == "rec":
            f, x = self.fresh("f"), self.fresh("n")
            inner = {**env, x: "nat"}
            step = A.Natop(
                "+",
                A.App(A.Var(f), A.Natop("-", A.Var(x), A.Lit(1))),
                self.nat(inner, catchable, max(1, budget - 7)),
            )
            base = self.nat(inner, catchable, 2)
            return A.App(A.Rec(f, x, A.If(A.Var(x), step, base)), A.Lit(self.rng.randrange(0, 5)))
        raise AssertionError(c)


# --- shift/reset ----------------------------------------------------------------------


class _DelimGen(_GenBase):
    """Answer types kept at nat; continuation variables invoked with @."""

    def top(self, size: int) -> A.Expr:
        return self.nat({}, size, delimited=False)

    def nat(self, env: Dict[str, str], budget: int, delimited: bool) -> A.Expr:
        nat_vars = [n for n, t in env.items() if t == "nat"]
        cont_vars = [n for n, t in env.items() if t == "cont"]
        if budget <= 1:
            return A.Var(self.rng.choice(nat_vars)) if nat_vars and self.rng.random() < 0.5 else self.lit()
        cands = [("lit", 1.5), ("natop", 3.0), ("reset", 3.0)]
        if nat_vars:
            cands.append(("var", 2.0))
        if delimited:
            cands.append(("shift", 3.5))
        if cont_vars:
            cands.append(("appk", 4.0))
        if budget >= 4:
            cands += [("if", 1.5), ("let", 1.5), ("appfun", 1.5), ("isprime", 0.8)]
        if budget >= 8:
            cands.append(("rec", 0.8))
        c = _pick(self.rng, cands)
        half = max(1, (budget - 1) // 2)
        if c == "lit":
            return self.lit()
        if c == "var":
            return A.Var(self.rng.choice(nat_vars))
        if c == "natop":
            op = self.rng.choice(["+", "-"])
            return A.Natop(
                op,
                self.nat(env, half, delimited),
                self.nat(env, budget - 1 - half, delimited),
            )
        if c == "if":
            third = max(1, (budget - 1) // 3)
            return A.If(
                self.nat(env, third, delimited),
                self.nat(env, third, delimited),
                self.nat(env, third, delimited),
            )
        if c == "let":
            x = self.fresh()
            return A.Let(
                x,
                self.nat(env, half, delimited),
                self.nat({**env, x: "nat"}, budget - 1 - half, delimited),
            )
        if c == "appfun":
            x = self.fresh()
            body = self.nat({**env, x: "nat"}, half, delimited)
            return A.App(A.Fun(x, body), self.nat(env, budget - 1 - half, delimited))
        if c == "reset":
            return A.Reset(self.nat(env, budget - 1, delimited=True))
        if c == "shift":
            k = self.fresh("k")
            # the shift body runs un-delimited (its context was captured)
            return A.Shift(k, self.nat({**env, k: "cont"}, budget - 1, delimited=False))
        if c == "appk":
            k = self.rng.choice(cont_vars)
            return A.AppCont(A.Var(k), self.nat(env, budget - 2, delimited))
        if c == "isprime":
            return A.App(A.Var("isprime"), self.nat(env, budget - 2, delimited))
        if c == "rec":
            f, x = self.fresh("f"), self.fresh("n")
            inner = {**env, x: "nat"}
            step = A.Natop(
                "+",
                A.App(A.Var(f), A.Natop("-", A.Var(x), A.Lit(1))),
                self.nat(inner, max(1, budget - 7), delimited),
            )
            base = self.nat(inner, 2, delimited)
            return A.App(A.Rec(f, x, A.If(A.Var(x), step, base)), A.Lit(self.rng.randrange(0, 4)))
        raise AssertionError(c)


# --- concurrent affine ------------------------------------------------------------------


class _AffGen(_GenBase):
    """Affine splitting is enforced by consuming variables as they are used."""

    def top(self, size: int) -> A.Expr:
        avail: Dict[str, str] = {}
        return self.expr("nat", avail, size)

    def take(self, avail: Dict[str, str], ty: str) -> Optional[str]:
        names = [n for n, t in avail.items() if t == ty]
        if not names:
            return None
        n = self.rng.choice(names)
        del avail[n]
        return n

    def _scoped(self, avail: Dict[str, str], bindings: Dict[str, str], gen):
        """Generate under extra bindings that must not escape their scope."""
        avail.update(bindings)
        out = gen()
        for n in bindings:
            avail.pop(n, None)
        return out

    def expr(self, ty: str, avail: Dict[str, str], budget: int) -> A.Expr:
        if ty == "nat":
            return self.nat(avail, budget)
        if ty == "bool":
            return A.BoolLit(self.rng.random() < 0.5)
        if ty == "unit":
            return self.unit(avail, budget)
        raise AssertionError(ty)

    def nat(self, avail: Dict[str, str], budget: int) -> A.Expr:
        if budget <= 1:
            n = self.take(avail, "nat") if self.rng.random() < 0.5 else None
            return A.Var(n) if n else self.lit()
        cands = [("lit", 2.0), ("natop", 3.0), ("let", 2.0), ("letpair", 2.5), ("ref", 2.5)]
        if any(t == "nat" for t in avail.values()):
            cands.append(("var", 2.5))
        if budget >= 4:
            cands += [("if", 1.5), ("appfun", 1.5), ("fork", 2.5)]
        c = _pick(self.rng, cands)
        half = max(1, (budget - 1) // 2)
        if c == "lit":
            return self.lit()
        if c == "var":
            n = self.take(avail, "nat")
            return A.Var(n) if n else self.lit()
        if c == "natop":
            op = self.rng.choice(["+", "-"])
            left = self.nat(avail, half)
            return A.Natop(op, left, self.nat(avail, budget - 1 - half))
        if c == "if":
            third = max(1, (budget - 1) // 3)
            cond = A.BoolLit(self.rng.random() < 0.5)
            pre = set(avail)
            copy1, copy2 = dict(avail), dict(avail)
            then = self.nat(copy1, third)
            els = self.nat(copy2, third)
            # either branch may run: whatever one of them consumed is gone
            for k in (pre - set(copy1)) | (pre - set(copy2)):
                avail.pop(k, None)
            return A.If(cond, then, els)
        if c == "let":
            x = self.fresh()
            bound = self.nat(avail, half)
            body = self._scoped(avail, {x: "nat"}, lambda: self.nat(avail, budget - 1 - half))
            return A.Let(x, bound, body)
        if c == "letpair":
            a, b = self.fresh("a"), self.fresh("b")
            bound = A.PairE(self.nat(avail, half), self.nat(avail, max(1, half // 2)))
            body = self._scoped(
                avail, {a: "nat", b: "nat"}, lambda: self.nat(avail, budget - 1 - half)
            )
            return A.LetPair(a, b, bound, body)
        if c == "appfun":
            x = self.fresh()
            arg = self.nat(avail, half)
            avail_body = {x: "nat"}
            body = self.nat(avail_body, budget - 1 - half)
            return A.App(A.Fun(x, body), arg)
        if c == "ref":
            # alloc, replace, read back through the returned pair, dealloc
            r, old, r2 = self.fresh("r"), self.fresh("old"), self.fresh("r2")
            init = self.nat(avail, max(1, half // 2))
            newv = self.nat(avail, max(1, half // 2))
            rest = self.nat(avail, max(1, budget - 6))
            return A.Let(
                r,
                A.Alloc(init),
                A.LetPair(
                    old,
                    r2,
                    A.Replace(A.Var(r), newv),
                    A.Let("_u", A.Dealloc(A.Var(r2)), A.Natop("+", A.Var(old), rest)),
                ),
            )
        if c == "fork":
            spawn = self.unit(avail, half)
            return A.ForkSeq(spawn, self.nat(avail, budget - 1 - half))
        raise AssertionError(c)

    def unit(self, avail: Dict[str, str], budget: int) -> A.Expr:
        if budget <= 2:
            return A.UnitLit()
        c = _pick(self.rng, [("unit", 2.0), ("dealloc", 3.0), ("store", 2.5)])
        if c == "unit":
            return A.UnitLit()
        if c == "dealloc":
            return A.Dealloc(A.Alloc(self.nat(avail, budget - 2)))
        if c == "store":
            # alloc then overwrite through replace, discarding the pair
            r = self.fresh("r")
            a, b = self.fresh("a"), self.fresh("b")
            return A.Let(
                r,
                A.Alloc(self.nat(avail, max(1, (budget - 4) // 2))),
                A.LetPair(
                    a, b, A.Replace(A.Var(r), self.nat(avail, max(1, (budget - 4) // 2))),
                    A.Dealloc(A.Var(b)),
                ),
            )
        raise AssertionError(c)
