"""A combined delimited-control + store program, built directly as a tree.

``counter_prog()`` is a function value that takes a reference y and:

  1. allocates a scratch cell x := 1,
  2. captures the continuation "n |-> y := !y + n" with shift,
  3. invokes that continuation twice -- first with !x, then after x := x + 1
     with the updated !x.

So y gains 1 then 2: running ``reset (counter_prog (Ret loc_y))`` with
y |-> n leaves y |-> n + 3, invokes appcont exactly twice, and restores the
continuation stack.  This is the canonical check that store effects and
captured delimited continuations interoperate under one combined runtime.
"""

from __future__ import annotations

from .core import GITree, Later, Loc, Ret, app, get_ret, get_val, nat_add, natop_lift
from .effects import store
from .effects.control import appcont_op, delim_reifier, reset_op, shift_op
from .engine import Outcome, Runtime, combine


def _appcont_adapted(tree: GITree, k) -> GITree:
    """Apply a captured continuation to an unevaluated tree.

    The continuation comes as Later->Later; the appcont input wants a delayed
    tree->tree, so adapt with the usual one-Tick wrapper.
    """
    from .core import Tau

    adapted = Later.now(lambda v: Tau(k(Later.now(v))))
    return appcont_op(Later.now(tree), adapted)


def counter_prog() -> GITree:
    """The function value: takes y (a Ret-wrapped location), bumps it twice."""

    def body(y):
        def with_x(x: Loc):
            def shift_body(k) -> Later:
                first = _appcont_adapted(store.read(x), k)
                bump = get_val(
                    natop_lift(nat_add, store.read(x), Ret(1)),
                    lambda m: store.write(x, m),
                )
                second = _appcont_adapted(store.read(x), k)
                return Later.now(get_val(first, lambda _a: get_val(bump, lambda _b: second)))

            after = shift_op(shift_body)

            def with_n(n):
                def write_back(l):
                    if not isinstance(l, Loc):
                        from .core import Err, RUNTIME_ERR

                        return Err(RUNTIME_ERR)
                    return get_val(
                        natop_lift(nat_add, store.read(l), n),
                        lambda p: store.write(l, p),
                    )

                return get_ret(y, write_back)

            return get_val(after, with_n)

        return store.alloc(Ret(1), with_x)

    from .core import Fun

    return Fun(Later.now(body))


def run_counter(n: int, fuel: int = 10_000) -> Outcome:
    """reset (counter_prog (Ret loc_y)) with y |-> n, under delim + store."""
    runtime = combine([delim_reifier(), store.store_reifier()])
    state = runtime.initial_state()
    loc_y, heap = state.get("store").alloc(Later.now(Ret(n)))
    state = state.set("store", heap)
    tree = reset_op(Later.now(app(counter_prog(), Ret(loc_y))))
    return runtime.run(tree, fuel=fuel, state=state), loc_y


def counter_runtime() -> Runtime:
    return combine([delim_reifier(), store.store_reifier()])
