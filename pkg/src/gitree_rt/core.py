"""Guarded interaction trees: the computation representation everything else runs on.

A tree is one of five node shapes:

  Ret(ground)        -- a ground-value leaf (natural, unit, location, pair)
  Fun(body)          -- a function leaf; body is a delayed IT -> IT
  Err(kind)          -- an error leaf; absorbs all sequencing
  Tau(rest)          -- one silent step; rest is a delayed tree
  Vis(op, value, k)  -- an effect node; k maps the op's output to a delayed tree

Ret and Fun are the *values*.  Recursive positions sit under ``Later``, a
memoized thunk standing in for the one-step delay modality: forcing never
reifies effects, it only exposes structure, and forcing twice returns the
identical result.  Divergence is not ruled out statically; the engine makes
it observable with a fuel budget.

The sequencing combinators (get_val / get_ret / get_fun / app / natop_lift)
implement the usual equational presentation: value leaves feed the
consumer, Err propagates unchanged, Tau commutes, and Vis nodes re-wrap
their continuation.  ``HomCtx`` is a small closed algebra of tree
transformers that commute with Err/Tau/Vis by construction -- the semantic
counterpart of an evaluation context, kept first-class so the homomorphism
laws are testable and contexts can be rendered in reports.

Structural equality is deliberately not defined on trees (host closures are
not comparable); ``bisim_probe`` gives a bounded applicative bisimulation
instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union


# ---------------------------------------------------------------------------
# Later: memoized delay
# ---------------------------------------------------------------------------


class Later:
    """A one-step-delayed value; memoized so forcing twice is identical."""

    __slots__ = ("_fn", "_value", "_forced")

    def __init__(self, fn: Callable[[], object]):
        self._fn = fn
        self._value = None
        self._forced = False

    @staticmethod
    def now(value) -> "Later":
        """Wrap an already-available value (no delay cost beyond the boundary)."""
        lt = Later(lambda: value)
        lt._value = value
        lt._forced = True
        return lt

    def force(self):
        if not self._forced:
            self._value = self._fn()
            self._forced = True
            self._fn = None  # drop the closure once memoized
        return self._value

    def map(self, f: Callable) -> "Later":
        return Later(lambda: f(self.force()))

    def __repr__(self):
        return f"Later({self._value!r})" if self._forced else "Later(<delayed>)"


def later_apply(fn: Later, arg: Later) -> Later:
    """Applicative action of the delay: Later[a -> b] applied to Later[a]."""
    return Later(lambda: fn.force()(arg.force()))


# ---------------------------------------------------------------------------
# Ground values and error kinds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Nat:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("naturals are non-negative")

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Unit:
    def __str__(self):
        return "()"


@dataclass(frozen=True)
class Loc:
    index: int

    def __str__(self):
        return f"loc{self.index}"


@dataclass(frozen=True)
class Pair:
    fst: "Ground"
    snd: "Ground"

    def __str__(self):
        return f"({self.fst}, {self.snd})"


Ground = Union[Nat, Unit, Loc, Pair]

UNIT = Unit()


@dataclass(frozen=True)
class ErrKind:
    tag: str

    def __str__(self):
        return self.tag


RUNTIME_ERR = ErrKind("runtime")
LIN_ERR = ErrKind("lin")


@dataclass(frozen=True)
class OpId:
    family: str
    name: str

    def __str__(self):
        return f"{self.family}/{self.name}"


# ---------------------------------------------------------------------------
# Tree nodes
# ---------------------------------------------------------------------------


class GITree:
    __slots__ = ()


class Ret(GITree):
    __slots__ = ("ground",)

    def __init__(self, ground):
        # convenience: accept bare ints for naturals
        if isinstance(ground, int):
            ground = Nat(ground)
        self.ground = ground

    def __repr__(self):
        return f"Ret({self.ground})"


class Fun(GITree):
    __slots__ = ("body",)

    def __init__(self, body: Later):
        self.body = body  # Later[Callable[[GITree value], GITree]]

    def __repr__(self):
        return "Fun(<body>)"


class Err(GITree):
    __slots__ = ("kind",)

    def __init__(self, kind: ErrKind):
        self.kind = kind

    def __repr__(self):
        return f"Err({self.kind})"


class Tau(GITree):
    __slots__ = ("rest",)

    def __init__(self, rest: Later):
        self.rest = rest

    def __repr__(self):
        return "Tau(...)"


class Vis(GITree):
    __slots__ = ("op", "value", "cont")

    def __init__(self, op: OpId, value, cont: Callable[[object], Later]):
        self.op = op
        self.value = value  # op-specific input payload
        self.cont = cont  # output -> Later[GITree]

    def __repr__(self):
        return f"Vis({self.op})"


def is_value(t: GITree) -> bool:
    return isinstance(t, (Ret, Fun))


def tick(t: GITree) -> GITree:
    """One silent step in front of an already-built tree (Tau of Next)."""
    return Tau(Later.now(t))


def ret_nat(n: int) -> Ret:
    return Ret(Nat(n))


def bottom_cont(_y) -> Later:
    raise AssertionError("continuation of a no-output effect was invoked")


def identity_cont(y: Later) -> Later:
    return y


# ---------------------------------------------------------------------------
# Sequencing combinators
# ---------------------------------------------------------------------------


def get_val(t: GITree, f: Callable[[GITree], GITree]) -> GITree:
    """Compute t to a value, then feed that value to f.

    Err leaves propagate unchanged, Tau commutes, Vis re-wraps its
    continuation with get_val(-, f).
    """
    if isinstance(t, (Ret, Fun)):
        return f(t)
    if isinstance(t, Err):
        return t
    if isinstance(t, Tau):
        return Tau(t.rest.map(lambda a: get_val(a, f)))
    if isinstance(t, Vis):
        k = t.cont
        return Vis(t.op, t.value, lambda y: k(y).map(lambda a: get_val(a, f)))
    raise TypeError(f"not a tree: {t!r}")


def get_ret(t: GITree, f: Callable[[Ground], GITree]) -> GITree:
    """Like get_val but dispatches the Ret payload; wrong head is a runtime error."""
    return get_val(t, lambda v: f(v.ground) if isinstance(v, Ret) else Err(RUNTIME_ERR))


def get_fun(t: GITree, f: Callable[[Later], GITree]) -> GITree:
    """Like get_val but dispatches the Fun payload; wrong head is a runtime error."""
    return get_val(t, lambda v: f(v.body) if isinstance(v, Fun) else Err(RUNTIME_ERR))


def app(a: GITree, b: GITree) -> GITree:
    """Call-by-value application: evaluate the argument, then the function.

    app(Fun(Next g), v) = Tick(g v); value-head mismatches are Err(runtime).
    """
    if not is_value(b):
        if isinstance(b, Err):
            return b
        if isinstance(b, Tau):
            return Tau(b.rest.map(lambda b2: app(a, b2)))
        if isinstance(b, Vis):
            k = b.cont
            return Vis(b.op, b.value, lambda y: k(y).map(lambda b2: app(a, b2)))
        raise TypeError(f"not a tree: {b!r}")
    if not is_value(a):
        if isinstance(a, Err):
            return a
        if isinstance(a, Tau):
            return Tau(a.rest.map(lambda a2: app(a2, b)))
        if isinstance(a, Vis):
            k = a.cont
            return Vis(a.op, a.value, lambda y: k(y).map(lambda a2: app(a2, b)))
        raise TypeError(f"not a tree: {a!r}")
    if isinstance(a, Fun):
        return Tau(a.body.map(lambda g: g(b)))
    return Err(RUNTIME_ERR)


def natop_lift(f: Callable[[int, int], int], a: GITree, b: GITree) -> GITree:
    """Lift a binary function on naturals; evaluates b then a, Err on non-numbers."""

    def with_b(bv):
        def with_a(av):
            if (
                isinstance(av, Ret)
                and isinstance(av.ground, Nat)
                and isinstance(bv, Ret)
                and isinstance(bv.ground, Nat)
            ):
                return Ret(Nat(f(av.ground.value, bv.ground.value)))
            return Err(RUNTIME_ERR)

        return get_val(a, with_a)

    return get_val(b, with_b)


def nat_add(a: int, b: int) -> int:
    return a + b


def nat_sub(a: int, b: int) -> int:
    # truncating subtraction: naturals have no negatives
    return a - b if a >= b else 0


NATOPS = {"+": nat_add, "-": nat_sub}


def if_zero(cond: GITree, then_t: Callable[[], GITree], else_t: Callable[[], GITree]) -> GITree:
    """Branch on a natural: nonzero takes the then-branch, zero the else-branch."""

    def select(g):
        if isinstance(g, Nat):
            return then_t() if g.value != 0 else else_t()
        return Err(RUNTIME_ERR)

    return get_ret(cond, select)


def fix(f: Callable[[Later], GITree]) -> GITree:
    """Guarded fixpoint: f receives the delayed result of the whole fixpoint.

    f must only use its argument under a delay; forcing it during the call
    itself is a guardedness violation and raises.
    """
    cell = {}

    def read_cell():
        if "v" not in cell:
            raise RuntimeError("guarded fixpoint forced during its own construction")
        return cell["v"]

    v = f(Later(read_cell))
    cell["v"] = v
    return v


# ---------------------------------------------------------------------------
# Homomorphism contexts
# ---------------------------------------------------------------------------


class HomCtx:
    """A tree transformer commuting with Err, Tau and Vis by construction.

    Subclasses define only the behavior on values; the structural cases are
    shared, which is exactly what makes every instance a homomorphism.
    """

    def apply(self, t: GITree) -> GITree:
        if isinstance(t, Err):
            return t
        if isinstance(t, Tau):
            return Tau(t.rest.map(self.apply))
        if isinstance(t, Vis):
            k = t.cont
            return Vis(t.op, t.value, lambda y: k(y).map(self.apply))
        if is_value(t):
            return self.apply_value(t)
        raise TypeError(f"not a tree: {t!r}")

    def apply_value(self, v: GITree) -> GITree:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def then(self, outer: "HomCtx") -> "HomCtx":
        """outer after self."""
        return Compose(outer, self)


@dataclass(frozen=True)
class Identity(HomCtx):
    def apply(self, t):
        return t

    def apply_value(self, v):
        return v

    def describe(self):
        return "id"


@dataclass(frozen=True)
class Compose(HomCtx):
    outer: HomCtx
    inner: HomCtx

    def apply(self, t):
        return self.outer.apply(self.inner.apply(t))

    def apply_value(self, v):
        return self.outer.apply(self.inner.apply_value(v))

    def describe(self):
        return f"{self.outer.describe()} . {self.inner.describe()}"


class ApplyToArg(HomCtx):
    """Hole in function position: x |-> app(x, arg).  arg must be a value."""

    __slots__ = ("arg",)

    def __init__(self, arg: GITree):
        if not is_value(arg):
            raise ValueError("fixed operand of an application hole must be a value")
        self.arg = arg

    def apply_value(self, v):
        return app(v, self.arg)

    def describe(self):
        return f"app(., {render_tree(self.arg)})"


class ApplyFun(HomCtx):
    """Hole in argument position: x |-> app(fn, x)."""

    __slots__ = ("fn",)

    def __init__(self, fn: GITree):
        self.fn = fn

    def apply_value(self, v):
        return app(self.fn, v)

    def describe(self):
        return f"app({render_tree(self.fn)}, .)"


class SeqValue(HomCtx):
    """x |-> get_val(x, f) with a fixed consumer."""

    __slots__ = ("f", "label")

    def __init__(self, f: Callable[[GITree], GITree], label: str = "f"):
        self.f = f
        self.label = label

    def apply_value(self, v):
        return self.f(v)

    def describe(self):
        return f"get_val(., {self.label})"


class SeqRet(HomCtx):
    """x |-> get_ret(x, f) with a fixed consumer."""

    __slots__ = ("f", "label")

    def __init__(self, f: Callable[[Ground], GITree], label: str = "f"):
        self.f = f
        self.label = label

    def apply_value(self, v):
        return self.f(v.ground) if isinstance(v, Ret) else Err(RUNTIME_ERR)

    def describe(self):
        return f"get_ret(., {self.label})"


class SeqFun(HomCtx):
    """x |-> get_fun(x, f) with a fixed consumer."""

    __slots__ = ("f", "label")

    def __init__(self, f: Callable[[Later], GITree], label: str = "f"):
        self.f = f
        self.label = label

    def apply_value(self, v):
        return self.f(v.body) if isinstance(v, Fun) else Err(RUNTIME_ERR)

    def describe(self):
        return f"get_fun(., {self.label})"


class NatopHoleLeft(HomCtx):
    """Hole in the left operand: x |-> natop(f, x, right).  right must be a value."""

    __slots__ = ("opname", "f", "right")

    def __init__(self, opname: str, f, right: GITree):
        if not is_value(right):
            raise ValueError("fixed right operand must be a value")
        self.opname = opname
        self.f = f
        self.right = right

    def apply_value(self, v):
        return natop_lift(self.f, v, self.right)

    def describe(self):
        return f"natop[{self.opname}](., {render_tree(self.right)})"


class NatopHoleRight(HomCtx):
    """Hole in the right operand (evaluated first): x |-> natop(f, left, x)."""

    __slots__ = ("opname", "f", "left")

    def __init__(self, opname: str, f, left: GITree):
        self.opname = opname
        self.f = f
        self.left = left

    def apply_value(self, v):
        return natop_lift(self.f, self.left, v)

    def describe(self):
        return f"natop[{self.opname}]({render_tree(self.left)}, .)"


def hom_apply(ctx: HomCtx, t: GITree) -> GITree:
    return ctx.apply(t)


# ---------------------------------------------------------------------------
# Rendering and bounded bisimulation
# ---------------------------------------------------------------------------


def render_ground(g: Ground):
    """Ground values as JSON-able data for traces."""
    if isinstance(g, Nat):
        return g.value
    if isinstance(g, Unit):
        return "()"
    if isinstance(g, Loc):
        return {"loc": g.index}
    if isinstance(g, Pair):
        return [render_ground(g.fst), render_ground(g.snd)]
    return str(g)


def render_tree(t: GITree) -> str:
    if isinstance(t, Ret):
        return f"ret {t.ground}"
    if isinstance(t, Fun):
        return "fun"
    if isinstance(t, Err):
        return f"err {t.kind}"
    if isinstance(t, Tau):
        return "tau"
    if isinstance(t, Vis):
        return f"vis {t.op}"
    return repr(t)


def _strip_taus(t: GITree, budget: int) -> GITree:
    while isinstance(t, Tau) and budget > 0:
        t = t.rest.force()
        budget -= 1
    return t


def _render_input_part(x) -> str:
    if isinstance(x, (Nat, Unit, Loc, Pair)):
        return str(x)
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return "(" + ", ".join(_render_input_part(p) for p in x) + ")"
    if isinstance(x, Later):
        return "<later>"
    if callable(x):
        return "<fn>"
    return "<opaque>"


def bisim_probe(
    a: GITree,
    b: GITree,
    depth: int,
    probes: Sequence[GITree] = (),
    tick_insensitive: bool = False,
    vis_outputs: Optional[Callable[[OpId, Sequence[GITree]], list]] = None,
) -> bool:
    """Bounded applicative bisimulation.

    Heads must match; Ret/Err compare by payload, Tau after one force each,
    Fun by applying both sides to every probe, Vis by op, the ground-renderable
    input parts, and the continuations on probe outputs.  Returns True iff no
    distinguishing context is found within the depth bound.  With
    ``tick_insensitive`` leading Taus are stripped before comparing, giving an
    up-to-Tick check.
    """
    if vis_outputs is None:
        vis_outputs = lambda op, ps: [Later.now(p) for p in ps]
    if tick_insensitive:
        a = _strip_taus(a, 10_000)
        b = _strip_taus(b, 10_000)
    if isinstance(a, Ret) and isinstance(b, Ret):
        return a.ground == b.ground
    if isinstance(a, Err) and isinstance(b, Err):
        return a.kind == b.kind
    if isinstance(a, Tau) and isinstance(b, Tau):
        if depth == 0:
            return True
        return bisim_probe(
            a.rest.force(), b.rest.force(), depth - 1, probes, tick_insensitive, vis_outputs
        )
    if isinstance(a, Fun) and isinstance(b, Fun):
        if depth == 0:
            return True
        fa = a.body.force()
        fb = b.body.force()
        return all(
            bisim_probe(fa(p), fb(p), depth - 1, probes, tick_insensitive, vis_outputs)
            for p in probes
        )
    if isinstance(a, Vis) and isinstance(b, Vis):
        if a.op != b.op:
            return False
        if _render_input_part(a.value) != _render_input_part(b.value):
            return False
        if a.cont is bottom_cont or b.cont is bottom_cont:
            # an empty output arity has nothing to probe
            return a.cont is b.cont
        if depth == 0:
            return True
        for out in vis_outputs(a.op, probes):
            ka = a.cont(out).force()
            kb = b.cont(out).force()
            if not bisim_probe(ka, kb, depth - 1, probes, tick_insensitive, vis_outputs):
                return False
        return True
    return False
