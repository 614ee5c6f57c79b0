"""Hand traces and rule coverage for the three abstract machines."""

from gitree_rt.langs import ast as A
from gitree_rt.langs.syntax import parse
from gitree_rt.machines import callcc as MCC
from gitree_rt.machines import delim as MD
from gitree_rt.machines import exceptions as MEXC


def run_cc(src, steps=10_000):
    return MCC.machine_run(parse(src, "cc"), steps)[0]


def run_exc(src, steps=10_000):
    return MEXC.machine_run(parse(src, "exc"), steps)[0]


def run_delim(src, steps=10_000, elaborate=True):
    e = parse(src, "delim")
    if elaborate:
        from gitree_rt.langs import delim as D

        _t, e = D.typecheck_program(e)
    return MD.machine_run(e, steps)[0]


# --- call/cc -------------------------------------------------------------------------


def test_cc_escape_hand_trace():
    assert run_cc("1 + callcc k. throw 41 to k") == ("value", A.Lit(42))


def test_cc_unused_continuation():
    assert run_cc("callcc k. 5") == ("value", A.Lit(5))


def test_cc_throw_to_non_continuation_is_stuck():
    res = run_cc("throw 1 to 2")
    assert res[0] == "stuck"


def test_cc_beta_if_natop():
    assert run_cc("(rec f x = if x then f (x - 1) else 7) 3") == ("value", A.Lit(7))
    assert run_cc("(fun x -> x + 1) 4") == ("value", A.Lit(5))


def test_cc_first_throw_wins():
    # natop is right-first, so the right throw fires; the left one never runs
    assert run_cc("callcc k. (throw 3 to k) + (throw 4 to k)") == ("value", A.Lit(4))


def test_cc_throw_payload_evaluated_before_target():
    # payload is a diverging-free computation; target a continuation
    assert run_cc("callcc k. throw (2 + 3) to k") == ("value", A.Lit(5))


def test_cc_timeout():
    res = run_cc("(rec f x = f x) 0", steps=100)
    assert res == ("timeout", None)


def test_cc_determinism_of_decomposition():
    # each step yields exactly one successor: tracing twice is identical
    e = parse("1 + callcc k. throw 41 to k", "cc")
    _r1, t1 = MCC.machine_run(e, 100, want_trace=True)
    _r2, t2 = MCC.machine_run(e, 100, want_trace=True)
    assert t1 == t2 and len(t1) > 1


# --- exceptions -----------------------------------------------------------------------


def test_exc_normal_exit_discards_handler():
    assert run_exc("try 2 + 3 catch E with h. 0") == ("value", A.Lit(5))


def test_exc_nearest_handler_wins():
    src = "try (try (raise E 3) catch F with h. 0) catch E with h. h + 10"
    assert run_exc(src) == ("value", A.Lit(13))


def test_exc_inner_matching_handler_wins():
    src = "try (try (raise E 3) catch E with h. h + 1) catch E with h. h + 10"
    assert run_exc(src) == ("value", A.Lit(4))


def test_exc_uncaught_is_stuck():
    res = run_exc("raise E 5")
    assert res[0] == "stuck" and "uncaught" in res[1]


def test_exc_payload_evaluated_first():
    assert run_exc("try (raise E (2 + 3)) catch E with h. h") == ("value", A.Lit(5))


def test_exc_handler_returns_try_type():
    assert run_exc("try ((fun x -> raise E x) 5) catch E with h. h") == (
        "value",
        A.Lit(5),
    )


def test_exc_raise_through_app_frames():
    src = "try ((fun x -> x + 1) (raise E 7)) catch E with h. h"
    assert run_exc(src) == ("value", A.Lit(7))


# --- shift/reset ---------------------------------------------------------------------------


def test_delim_k_twice():
    assert run_delim("reset (1 + shift k. k (k 10))") == ("value", A.Lit(12))


def test_delim_shift_discards_context():
    assert run_delim("10 + reset (2 + shift k. 100)") == ("value", A.Lit(110))


def test_delim_mcont_unwind_path():
    assert run_delim("reset 5") == ("value", A.Lit(5))
    assert run_delim("reset (reset 5)") == ("value", A.Lit(5))


def test_delim_cont_application_pushes_meta():
    # k escapes one delimiter but @ re-delimits around the call
    assert run_delim("reset (shift k. 1 + (k @ 10))") == ("value", A.Lit(11))


def test_delim_isprime_primitive():
    assert run_delim("isprime 7") == ("value", A.Lit(1))
    assert run_delim("isprime 8") == ("value", A.Lit(0))


def test_delim_function_position_evaluates_first():
    # the shift in function position fires before the argument is touched
    src = "reset ((shift k. 5) (raisefree 0))".replace("(raisefree 0)", "(0 - 1)")
    assert run_delim(src, elaborate=False) == ("value", A.Lit(5))


def test_delim_natop_right_first():
    # the right operand's shift fires before the left operand is touched
    assert run_delim("reset ((shift k. 3) + (shift k2. 5))", elaborate=False) == (
        "value",
        A.Lit(5),
    )


def test_delim_stuck_on_bad_application():
    assert run_delim("1 2", elaborate=False)[0] == "stuck"


def test_delim_rec_with_reset():
    src = "reset ((rec f x = if x then f (x - 1) else 9) 3)"
    assert run_delim(src) == ("value", A.Lit(9))
