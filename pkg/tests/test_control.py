"""Reifier rows for call/cc, exceptions, and delimited control, plus the
wrapper-level unwind discipline and the combined-effects demo program."""

import pytest

from gitree_rt.core import (
    Err,
    Later,
    Nat,
    RUNTIME_ERR,
    Ret,
    Tau,
    UNIT,
    Vis,
    get_val,
    tick,
)
from gitree_rt.effects import store
from gitree_rt.effects.control import (
    APPCONT,
    CALLCC,
    CC_THROW,
    DC_POP,
    EXC_POP,
    EXC_REGISTER,
    EXC_THROW,
    RESET,
    SHIFT,
    callcc_op,
    callcc_reifier,
    catch_op,
    delim_reifier,
    exc_reifier,
    exc_throw_op,
    pop_wrap,
    reset_op,
    shift_op,
    throw_op,
)
from gitree_rt.demo import run_counter
from gitree_rt.engine import combine


def cc_step(op, value, cont):
    return callcc_reifier().step(op, value, (), cont)


def exc_step(op, value, stack, cont):
    return exc_reifier().step(op, value, stack, cont)


def delim_step(op, value, stack, cont):
    return delim_reifier().step(op, value, stack, cont)


IDC = lambda y: y


# --- call/cc rows -----------------------------------------------------------------------


def test_callcc_passes_and_resumes_continuation():
    seen = {}

    def body(k):
        seen["k"] = k
        return Later.now(Ret(10))

    marks = []

    def cont(lt):
        marks.append("resumed")
        return lt

    out, state, spawned = cc_step(CALLCC, body, cont)
    assert state == () and spawned == []
    assert seen["k"] is cont  # the body received the current continuation
    assert marks == ["resumed"]  # and the continuation wraps the result
    assert out.force().ground == Nat(10)


def test_throw_discards_current_continuation():
    def never(_):
        raise AssertionError("current continuation must not be resumed")

    target = Later.now(lambda v: get_val(v, lambda x: Ret(x.ground.value + 1)))
    out, state, spawned = cc_step(CC_THROW, (Later.now(Ret(41)), target), never)
    assert state == () and spawned == []
    assert out.force().ground == Nat(42)


def test_callcc_wrapper_shapes():
    node = callcc_op(lambda k: Later.now(Ret(1)))
    assert isinstance(node, Vis) and node.op == CALLCC
    lt = Later.now(Ret(2))
    assert node.cont(lt) is lt  # identity continuation
    node2 = throw_op(Later.now(Ret(1)), Later.now(lambda v: v))
    with pytest.raises(AssertionError):
        node2.cont(None)  # output arity is empty


# --- exception rows -----------------------------------------------------------------------


def h_id(payload):
    return payload


def test_register_pushes_entry_with_current_continuation():
    body = Later.now(Ret(3))
    cont = lambda y: y
    out, stack, spawned = exc_step(EXC_REGISTER, ("E", h_id, body), (), cont)
    assert out is body
    assert len(stack) == 1
    name, handler, saved = stack[0]
    assert name == "E" and handler is h_id and saved is cont
    assert spawned == []


def test_pop_empty_is_none():
    assert exc_step(EXC_POP, "E", (), IDC) is None


def test_pop_mismatch_is_none():
    stack = (("F", h_id, IDC),)
    assert exc_step(EXC_POP, "E", stack, IDC) is None


def test_pop_match_resumes_inside_saved():
    order = []
    saved = lambda lt: order.append("saved") or lt
    cont = lambda u: order.append(("cont", u)) or Later.now(Ret(7))
    out, stack, _ = exc_step(EXC_POP, "E", (("E", h_id, saved),), cont)
    assert stack == ()
    assert order == [("cont", UNIT), "saved"]
    assert out.force().ground == Nat(7)


def test_throw_finds_nearest_handler_and_drops_prefix():
    hits = []
    outer = ("E", lambda p: hits.append("outer") or p, lambda lt: lt)
    mid = ("F", lambda p: hits.append("mid") or p, lambda lt: lt)
    inner = ("E", lambda p: hits.append("inner") or p, lambda lt: lt)
    stack = (inner, mid, outer)
    out, stack2, _ = exc_step(EXC_THROW, ("E", Later.now(Ret(5))), stack, IDC)
    assert hits == ["inner"]
    assert stack2 == (mid, outer)  # everything up to and incl. the handler removed
    assert out.force().ground == Nat(5)


def test_throw_no_handler_is_none():
    assert exc_step(EXC_THROW, ("E", Later.now(Ret(5))), (("F", h_id, IDC),), IDC) is None


def test_throw_wrapper_evaluates_payload_first():
    node = exc_throw_op("E", tick(Ret(3)))
    assert isinstance(node, Tau)  # payload still computing
    inner = node.rest.force()
    assert isinstance(inner, Vis) and inner.op == EXC_THROW


def test_catch_wrapper_pops_on_normal_exit():
    rt = combine([exc_reifier()])
    out = rt.run(catch_op("E", h_id, Ret(7)), fuel=100)
    assert out.kind == "value" and out.value.ground == Nat(7)
    assert [e.op for e in out.trace if e.kind == "effect"] == [
        "exc/register",
        "exc/pop",
    ]
    assert out.state.get("exc") == ()


def test_uncaught_throw_is_error_outcome():
    rt = combine([exc_reifier()])
    out = rt.run(exc_throw_op("E", Ret(5)), fuel=100)
    assert out.kind == "error" and out.error == RUNTIME_ERR


# --- delimited-control rows (figure-literal reifiers) ------------------------------------------


def test_reset_saves_current_continuation():
    e = Later.now(Ret(1))
    cont = lambda y: y
    out, stack, _ = delim_step(RESET, e, (), cont)
    assert out is e
    assert stack == (cont,)


def test_shift_hands_continuation_without_resuming():
    seen = {}

    def f(k):
        seen["k"] = k
        return Later.now(Ret(2))

    cont = lambda y: y
    out, stack, _ = delim_step(SHIFT, f, ("marker",), cont)
    assert seen["k"] is cont
    assert stack == ("marker",)  # untouched
    assert out.force().ground == Nat(2)


def test_pop_on_empty_passes_through():
    e = Later.now(Ret(4))
    out, stack, _ = delim_step(DC_POP, e, (), IDC)
    assert out is e and stack == ()


def test_pop_restores_top():
    restored = []
    top = lambda lt: restored.append(True) or lt
    out, stack, _ = delim_step(DC_POP, Later.now(Ret(4)), (top, "rest"), IDC)
    assert restored == [True]
    assert stack == ("rest",)
    assert out.force().ground == Nat(4)


def test_appcont_applies_and_saves_current():
    target = Later.now(lambda v: get_val(v, lambda x: Ret(x.ground.value * 2)))
    cur = lambda y: y
    out, stack, _ = delim_step(APPCONT, (Later.now(Ret(21)), target), (), cur)
    assert stack == (cur,)
    assert out.force().ground == Nat(42)


def test_reset_wrapper_injects_unwind():
    # the wrapper (not the reifier) wraps the delimited body in the pop hom
    rt = combine([delim_reifier()])
    out = rt.run(reset_op(Later.now(Ret(5))), fuel=100)
    assert out.kind == "value" and out.value.ground == Nat(5)
    ops = [e.op for e in out.trace if e.kind == "effect"]
    assert ops == ["delim/reset", "delim/pop"]
    assert out.state.get("delim") == ()


def test_shift_wrapper_injects_unwind():
    rt = combine([delim_reifier()])
    prog = reset_op(Later.now(pop_wrap.apply(shift_op(lambda k: Later.now(Ret(3))))))
    out = rt.run(prog, fuel=100)
    assert out.kind == "value" and out.value.ground == Nat(3)
    assert out.state.get("delim") == ()


# --- the combined delim + store program ----------------------------------------------------------


@pytest.mark.parametrize("n", [0, 1, 5])
def test_counter_program_adds_three(n):
    out, loc_y = run_counter(n)
    assert out.kind == "value"
    heap = out.state.get("store")
    assert store.cell_nat(heap, loc_y) == n + 3
    assert out.state.get("delim") == ()  # continuation stack restored


def test_counter_program_resumes_twice():
    out, _ = run_counter(1)
    appconts = [e for e in out.trace if e.op == "delim/appcont"]
    assert len(appconts) == 2
