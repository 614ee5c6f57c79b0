"""Store wrappers and reifiers, the atomic effect, and the derived atomics."""

import pytest

from gitree_rt.core import (
    Fun,
    Later,
    Loc,
    Nat,
    RUNTIME_ERR,
    Ret,
    UNIT,
    Unit,
    Vis,
    bisim_probe,
    get_val,
)
from gitree_rt.effects import store
from gitree_rt.engine import combine


def rt():
    return combine([store.store_reifier()])


def step_fn(op, value, heap, cont):
    r = store.store_reifier(heap)
    return r.step(op, value, heap, cont)


IDC = lambda y: y


# --- wrapper shapes ------------------------------------------------------------------------


def test_read_wrapper_shape():
    node = store.read(Loc(3))
    assert isinstance(node, Vis) and node.op == store.READ
    lt = Later.now(Ret(1))
    assert node.cont(lt) is lt  # identity on the stored delayed tree


def test_write_wrapper_returns_unit():
    node = store.write(Loc(3), Ret(1))
    assert node.op == store.WRITE
    out = node.cont(UNIT).force()
    assert isinstance(out, Ret) and isinstance(out.ground, Unit)


def test_dealloc_wrapper_mirrors_write():
    node = store.dealloc(Loc(3))
    assert node.op == store.DEALLOC
    out = node.cont(UNIT).force()
    assert isinstance(out.ground, Unit)


def test_alloc_wrapper_passes_location():
    node = store.alloc(Ret(1), lambda l: Ret(l))
    got = node.cont(Loc(5)).force()
    assert got.ground == Loc(5)


# --- reifier rows ----------------------------------------------------------------------------


def test_write_present_updates():
    heap = store.heap_of(l0=Ret(0))
    res = step_fn(store.WRITE, (Loc(0), Later.now(Ret(9))), heap, lambda _: Later.now(Ret(UNIT)))
    assert res is not None
    _out, heap2, spawned = res
    assert spawned == []
    assert heap2.lookup(Loc(0)).force().ground == Nat(9)


def test_write_absent_is_none():
    res = step_fn(store.WRITE, (Loc(4), Later.now(Ret(9))), store.EMPTY_HEAP, lambda _: None)
    assert res is None


def test_read_present_and_absent():
    heap = store.heap_of(l0=Ret(1))
    out, heap2, _ = step_fn(store.READ, Loc(0), heap, IDC)
    assert out.force().ground == Nat(1)
    assert heap2 is heap
    assert step_fn(store.READ, Loc(1), heap, IDC) is None


def test_alloc_fresh_from_empty_is_zero():
    out, heap2, _ = step_fn(store.ALLOC, Later.now(Ret(5)), store.EMPTY_HEAP, lambda l: Later.now(Ret(l)))
    assert out.force().ground == Loc(0)
    assert heap2.lookup(Loc(0)).force().ground == Nat(5)


def test_alloc_freshness_is_monotonic():
    heap = store.EMPTY_HEAP
    seen = []
    for _ in range(3):
        loc, heap = heap.alloc(Later.now(Ret(0)))
        seen.append(loc.index)
    heap = heap.remove(Loc(1))
    loc, heap = heap.alloc(Later.now(Ret(0)))
    seen.append(loc.index)
    assert seen == [0, 1, 2, 3]  # no index reuse after dealloc


def test_dealloc_absent_is_none():
    assert step_fn(store.DEALLOC, Loc(0), store.EMPTY_HEAP, lambda _: None) is None


# --- atomic -------------------------------------------------------------------------------------


def test_atomic_exchange_shape():
    heap = store.heap_of(l0=Ret(3))
    node = store.atomic(Loc(0), lambda old: (old, Ret(9)))
    res = step_fn(store.ATOMIC, node.value, heap, IDC)
    out, heap2, _ = res
    assert out.force().ground == Nat(3)  # the old value, delayed
    assert heap2.lookup(Loc(0)).force().ground == Nat(9)


def test_atomic_absent_is_none():
    node = store.atomic(Loc(0), lambda old: (old, Ret(9)))
    assert step_fn(store.ATOMIC, node.value, store.EMPTY_HEAP, IDC) is None


def test_atomic_is_one_event():
    state0 = rt().initial_state().set("store", store.heap_of(l0=Ret(3)))
    out = rt().run(store.xchg(Loc(0), Ret(9)), fuel=100, state=state0)
    assert out.kind == "value"
    effects = [e for e in out.trace if e.kind == "effect"]
    assert len(effects) == 1 and effects[0].op == "store/atomic"


# --- derived atomics -------------------------------------------------------------------------------


def run_with_cell(tree, init):
    runtime = rt()
    state = runtime.initial_state().set("store", store.heap_of(l0=init))
    out = runtime.run(tree, fuel=1_000, state=state)
    return out, out.state.get("store")


def test_xchg_row():
    out, heap = run_with_cell(store.xchg(Loc(0), Ret(7)), Ret(3))
    assert out.value.ground == Nat(3)
    assert store.cell_nat(heap, Loc(0)) == 7


def test_faa_row():
    out, heap = run_with_cell(store.faa(Loc(0), 2), Ret(5))
    assert out.value.ground == Nat(5)
    assert store.cell_nat(heap, Loc(0)) == 7


def test_cas_failure_row():
    out, heap = run_with_cell(store.cas(Loc(0), Nat(3), Ret(9)), Ret(4))
    assert out.value.ground == Nat(0)  # false
    assert store.cell_nat(heap, Loc(0)) == 4  # unchanged


def test_cas_success():
    out, heap = run_with_cell(store.cas(Loc(0), Nat(4), Ret(9)), Ret(4))
    assert out.value.ground == Nat(1)
    assert store.cell_nat(heap, Loc(0)) == 9


def test_cas_on_non_ground_is_runtime_error():
    out, heap = run_with_cell(store.cas(Loc(0), Nat(1), Ret(2)), Fun(Later.now(lambda v: v)))
    assert out.kind == "error" and out.error == RUNTIME_ERR
    assert isinstance(store.force_cell(heap, Loc(0)), Fun)  # unchanged


def test_xchg_matches_generic_atomic_on_corpus():
    # 50 (init, new) pairs: identical outcomes and traces via either spelling
    from gitree_rt.engine import events_to_jsonl

    for i in range(50):
        init, new = (i * 7) % 11, (i * 3) % 13
        out1, h1 = run_with_cell(store.xchg(Loc(0), Ret(new)), Ret(init))
        out2, h2 = run_with_cell(
            store.atomic(Loc(0), lambda old, new=new: (old, Ret(new))), Ret(init)
        )
        got1 = get_val(out1.value, lambda v: v)
        assert out1.kind == out2.kind == "value"
        assert out1.value.ground == out2.value.ground == Nat(init)
        assert store.cell_nat(h1, Loc(0)) == store.cell_nat(h2, Loc(0)) == new
        assert events_to_jsonl(out1.trace) == events_to_jsonl(out2.trace)


# --- roundtrip and error outcomes ---------------------------------------------------------------------


def test_alloc_then_read_roundtrip_bisimilar():
    for v in [Ret(42), Fun(Later.now(lambda x: x)), Ret(UNIT)]:
        tree = store.alloc(v, lambda l: store.read(l))
        out = rt().run(tree, fuel=100)
        assert out.kind == "value"
        assert bisim_probe(out.value, v, 3, [Ret(0), Ret(1)])


def test_write_unallocated_is_error_outcome():
    out = rt().run(store.write(Loc(5), Ret(1)), fuel=100)
    assert out.kind == "error" and out.error == RUNTIME_ERR


def test_stored_computations_stay_lazy():
    # storing a delayed computation must not evaluate it at write time
    evaluated = []

    def spy():
        evaluated.append(True)
        return Ret(1)

    heap = store.EMPTY_HEAP
    loc, heap = heap.alloc(Later(spy))
    assert evaluated == []
    assert heap.lookup(loc).force().ground == Nat(1)
    assert evaluated == [True]
