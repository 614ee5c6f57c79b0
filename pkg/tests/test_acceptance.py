"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with  python3 -m pytest tests/test_acceptance.py -v -s  to see the lines.
"""

import time

import pytest

from gitree_rt.core import (
    Err,
    ErrKind,
    Fun,
    Later,
    Loc,
    Nat,
    RUNTIME_ERR,
    Ret,
    Tau,
    UNIT,
    Vis,
    bisim_probe,
    get_val,
    hom_apply,
    identity_cont,
    nat_add,
    natop_lift,
    tick,
)
from gitree_rt.demo import run_counter
from gitree_rt.diff import (
    denot_setup,
    diff_generated,
    diff_source,
    soundness_pairs,
    typecheck_and_elaborate,
)
from gitree_rt.effects import store
from gitree_rt.effects.concurrency import FORK, fork_reifier
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
    callcc_reifier,
    delim_reifier,
    exc_reifier,
)
from gitree_rt.engine import combine, events_to_jsonl, make_scheduler
from gitree_rt.gen import GenSpec, gen_program
from gitree_rt.langs import affine as AFF
from gitree_rt.langs.syntax import parse

PROBES = [Ret(0), Ret(1)]


def report(n, text):
    print(f"ACCEPTANCE {n}: PASS - {text}")


# --- criterion 1: equational-law suite ----------------------------------------------------------


def _tau_body(t):
    assert isinstance(t, Tau)
    return t.rest.force()


def _laws_get_val():
    n = 0
    assert get_val(Ret(2), lambda v: Ret(5)).ground == Nat(5); n += 1
    f = Fun(Later.now(lambda v: v))
    assert get_val(f, lambda v: Ret(9)).ground == Nat(9); n += 1
    e = Err(ErrKind("x"))
    assert get_val(e, lambda v: Ret(5)) is e; n += 1
    out = get_val(Tau(Later(lambda: Ret(2))), lambda v: Ret(5))
    assert isinstance(out, Tau) and _tau_body(out).ground == Nat(5); n += 1
    out = get_val(tick(Ret(2)), lambda v: Ret(5))
    assert isinstance(out, Tau) and _tau_body(out).ground == Nat(5); n += 1
    node = Vis(store.READ, Loc(0), identity_cont)
    out = get_val(node, lambda v: Ret(7))
    assert isinstance(out, Vis)
    assert out.cont(Later.now(Ret(1))).force().ground == Nat(7); n += 1
    return n


def _laws_app():
    from gitree_rt.core import app

    n = 0
    fn = Fun(Later.now(lambda v: v))
    out = app(fn, tick(Ret(1)))
    assert isinstance(out, Tau) and _tau_body(_tau_body(out)).ground == Nat(1); n += 1
    out = app(fn, Vis(store.READ, Loc(0), identity_cont))
    assert isinstance(out, Vis); n += 1
    out = app(tick(fn), Ret(2))
    assert isinstance(out, Tau) and _tau_body(_tau_body(out)).ground == Nat(2); n += 1
    out = app(Vis(store.READ, Loc(0), identity_cont), Ret(2))
    assert isinstance(out, Vis); n += 1
    out = app(fn, Ret(4))
    assert isinstance(out, Tau) and _tau_body(out).ground == Nat(4); n += 1
    out = app(Ret(0), Ret(1))
    assert isinstance(out, Err) and out.kind == RUNTIME_ERR; n += 1
    return n


def _laws_hom():
    from gitree_rt.core import (
        ApplyFun,
        ApplyToArg,
        Compose,
        Identity,
        NatopHoleLeft,
        NatopHoleRight,
        SeqFun,
        SeqRet,
        SeqValue,
    )

    from gitree_rt.effects.control import pop_wrap

    ctxs = [
        Identity(),
        Compose(SeqValue(lambda v: Ret(1), "one"), Identity()),
        ApplyToArg(Ret(3)),
        ApplyFun(Fun(Later.now(lambda v: v))),
        SeqValue(lambda v: Ret(1), "one"),
        SeqRet(lambda g: Ret(g), "id"),
        SeqFun(lambda b: Ret(0), "zero"),
        NatopHoleLeft("+", nat_add, Ret(2)),
        NatopHoleRight("+", nat_add, Ret(2)),
        pop_wrap,
    ]
    n = 0
    for ctx in ctxs:
        e = Err(ErrKind("boom"))
        assert hom_apply(ctx, e) is e; n += 1
        out = hom_apply(ctx, tick(Ret(1)))
        assert isinstance(out, Tau)
        assert bisim_probe(_tau_body(out), hom_apply(ctx, Ret(1)), 4, PROBES); n += 1
        node = Vis(store.READ, Loc(0), identity_cont)
        out = hom_apply(ctx, node)
        assert isinstance(out, Vis) and out.op == node.op and out.value == node.value
        for p in PROBES:
            got = out.cont(Later.now(p)).force()
            want = hom_apply(ctx, node.cont(Later.now(p)).force())
            assert bisim_probe(got, want, 3, PROBES)
        n += 1
    return n


def _laws_reify():
    n = 0
    idc = lambda y: y
    # store rows
    sr = store.store_reifier()
    heap = store.heap_of(l0=Ret(0))
    out, h2, _ = sr.step(store.WRITE, (Loc(0), Later.now(Ret(9))), heap, lambda _: Later.now(Ret(UNIT)))
    assert h2.lookup(Loc(0)).force().ground == Nat(9); n += 1
    assert sr.step(store.WRITE, (Loc(4), Later.now(Ret(9))), heap, idc) is None; n += 1
    out, _, _ = sr.step(store.READ, Loc(0), heap, idc)
    assert out.force().ground == Nat(0); n += 1
    assert sr.step(store.READ, Loc(9), heap, idc) is None; n += 1
    out, h2, _ = sr.step(store.ALLOC, Later.now(Ret(5)), store.EMPTY_HEAP, lambda l: Later.now(Ret(l)))
    assert out.force().ground == Loc(0); n += 1
    assert sr.step(store.DEALLOC, Loc(0), store.EMPTY_HEAP, idc) is None; n += 1
    node = store.atomic(Loc(0), lambda old: (old, Ret(9)))
    out, h2, _ = sr.step(store.ATOMIC, node.value, heap, idc)
    assert out.force().ground == Nat(0) and h2.lookup(Loc(0)).force().ground == Nat(9); n += 1
    # cc rows
    cc = callcc_reifier()
    marks = []
    cont = lambda lt: marks.append(1) or lt
    out, st, sp = cc.step(CALLCC, lambda k: Later.now(Ret(10)), (), cont)
    assert marks == [1] and out.force().ground == Nat(10) and sp == []; n += 1
    out, _, _ = cc.step(
        CC_THROW,
        (Later.now(Ret(41)), Later.now(lambda v: get_val(v, lambda x: Ret(x.ground.value + 1)))),
        (),
        lambda _: (_ for _ in ()).throw(AssertionError("resumed")),
    )
    assert out.force().ground == Nat(42); n += 1
    # exc rows
    ex = exc_reifier()
    body = Later.now(Ret(3))
    out, st, _ = ex.step(EXC_REGISTER, ("E", lambda p: p, body), (), idc)
    assert out is body and st[0][0] == "E" and st[0][2] is idc; n += 1
    assert ex.step(EXC_POP, "E", (), idc) is None; n += 1
    assert ex.step(EXC_POP, "E", (("F", lambda p: p, idc),), idc) is None; n += 1
    out, st, _ = ex.step(EXC_POP, "E", (("E", lambda p: p, idc),), lambda u: Later.now(Ret(7)))
    assert st == () and out.force().ground == Nat(7); n += 1
    stack = (("F", lambda p: p, idc), ("E", lambda p: p, idc))
    out, st, _ = ex.step(EXC_THROW, ("E", Later.now(Ret(5))), stack, idc)
    assert st == () and out.force().ground == Nat(5); n += 1
    assert ex.step(EXC_THROW, ("E", Later.now(Ret(5))), (("F", lambda p: p, idc),), idc) is None; n += 1
    # delim rows (figure-literal)
    dl = delim_reifier()
    e = Later.now(Ret(1))
    out, st, _ = dl.step(RESET, e, (), idc)
    assert out is e and st == (idc,); n += 1
    out, st, _ = dl.step(SHIFT, lambda k: Later.now(Ret(2)), ("m",), idc)
    assert st == ("m",) and out.force().ground == Nat(2); n += 1
    out, st, _ = dl.step(DC_POP, e, (), idc)
    assert out is e and st == (); n += 1
    out, st, _ = dl.step(DC_POP, Later.now(Ret(4)), (idc, "rest"), idc)
    assert st == ("rest",) and out.force().ground == Nat(4); n += 1
    out, st, _ = dl.step(
        APPCONT, (Later.now(Ret(21)), Later.now(lambda v: get_val(v, lambda x: Ret(x.ground.value * 2)))), (), idc
    )
    assert st == (idc,) and out.force().ground == Nat(42); n += 1
    # fork row
    fr = fork_reifier()
    out, st, sp = fr.step(FORK, Later.now(Ret(1)), (), lambda u: Later.now(Ret(u)))
    assert st == () and len(sp) == 1 and sp[0].force().ground == Nat(1); n += 1
    return n


def test_criterion_1_equational_laws():
    t0 = time.time()
    count = _laws_get_val() + _laws_app() + _laws_hom() + _laws_reify()
    elapsed = time.time() - t0
    assert count >= 60, count
    assert elapsed < 5.0
    report(1, f"{count} law assertions (get_val/APP/hom/reify) in {elapsed:.2f}s")


# --- criterion 2: adequacy differential ---------------------------------------------------------


HAND_CORPUS = [
    ("cc", "1 + callcc k. throw 41 to k", "AGREE 42"),
    ("delim", "reset (1 + shift k. k (k 10))", "AGREE 12"),
    ("delim", "10 + reset (2 + shift k. 100)", "AGREE 110"),
    ("exc", "try (try (raise E 3) catch F with h. 0) catch E with h. h + 10", "AGREE 13"),
]


def test_criterion_2_adequacy_differential():
    for lang, src, want in HAND_CORPUS:
        assert diff_source(lang, src, fuel=10_000).line() == want
    timings = {}
    for lang in ("cc", "exc", "delim"):
        t0 = time.time()
        reports = diff_generated(lang, 100, seed=2_000, size=20, fuel=10_000)
        timings[lang] = time.time() - t0
        disagreements = [(s, r.line()) for s, r in reports if not r.ok]
        assert disagreements == []
        assert timings[lang] < 60.0
    report(
        2,
        "0 disagreements over 3x100 generated programs + hand corpus "
        + ", ".join(f"{l}={t:.1f}s" for l, t in timings.items()),
    )


# --- criterion 3: soundness sampling -------------------------------------------------------------


def test_criterion_3_soundness_sampling():
    failures = []
    for lang in ("exc", "delim"):
        progs = [
            typecheck_and_elaborate(lang, gen_program(GenSpec(lang, size=18, seed=s)))
            for s in range(40)
        ]
        checks = soundness_pairs(lang, progs, 500, seed=3, fuel=20_000)
        assert len(checks) == 500
        failures += [(lang, c.detail) for c in checks if not c.ok]
    assert failures == []
    report(3, "2x500 sampled machine steps: outcomes equal, effect suffixes aligned")


# --- criterion 4: the combined delim+store program ------------------------------------------------


def test_criterion_4_counter_program():
    for n in (0, 1, 5):
        out, loc_y = run_counter(n)
        assert out.kind == "value"
        assert store.cell_nat(out.state.get("store"), loc_y) == n + 3
        assert out.state.get("delim") == ()
        assert len([e for e in out.trace if e.op == "delim/appcont"]) == 2
    report(4, "y |-> n+3 for n in {0,1,5}, continuation stack restored, 2 appconts")


# --- criterion 5: atomicity under exhaustive scheduling --------------------------------------------


def test_criterion_5_atomicity():
    t0 = time.time()
    runtime = combine([store.store_reifier(), fork_reifier()])
    state = runtime.initial_state().set("store", store.heap_of(l0=Ret(0)))

    def faa_thread():
        return get_val(store.faa(Loc(0), 1), lambda _v: Ret(0))

    def racy_thread():
        return get_val(
            store.read(Loc(0)),
            lambda v: get_val(
                natop_lift(nat_add, v, Ret(1)), lambda w: store.write(Loc(0), w)
            ),
        )

    atomic_runs = runtime.explore([faa_thread(), faa_thread()], fuel=64, state=state)
    finals = [store.cell_nat(o.state.get("store"), Loc(0)) for _c, o in atomic_runs]
    assert 1 <= len(atomic_runs) <= 20
    assert set(finals) == {2}

    racy_runs = runtime.explore([racy_thread(), racy_thread()], fuel=64, state=state)
    racy_finals = [store.cell_nat(o.state.get("store"), Loc(0)) for _c, o in racy_runs]
    assert 1 <= len(racy_runs) <= 20
    assert 1 in racy_finals
    elapsed = time.time() - t0
    assert elapsed < 1.0
    report(
        5,
        f"FAA: {len(atomic_runs)} interleavings all end at 2; racy increment loses "
        f"an update in {racy_finals.count(1)}/{len(racy_runs)} ({elapsed:.2f}s)",
    )


# --- criterion 6: affine type safety ---------------------------------------------------------------


def test_criterion_6_affine_type_safety():
    runtime_factory = AFF.runtime
    bad = 0
    for seed in range(50):
        e = gen_program(GenSpec("aff", size=20, seed=9_000 + seed))
        AFF.typecheck(e)
        for sched in ["rr", "rand:1", "rand:2", "rand:3", "rand:4", "rand:5"]:
            out = runtime_factory().run(
                AFF.interp(e, {}), fuel=10_000, scheduler=make_scheduler(sched)
            )
            if out.kind not in ("value", "timeout"):
                bad += 1
    assert bad == 0
    fixture = parse("(fun x -> x + x) 1", "aff")
    outs = {
        AFF.runtime().run(AFF.interp(fixture, {}), fuel=10_000).describe()
        for _ in range(3)
    }
    assert outs == {"ERROR lin"}
    report(6, "50 programs x 6 schedules: no Error/Stuck; double-use fixture is ERROR lin")


# --- criterion 7: delimiter bracket invariant --------------------------------------------------------


def test_criterion_7_bracket_invariant():
    checked = 0
    corpus = [
        ("delim", "reset (1 + shift k. k (k 10))"),
        ("delim", "10 + reset (2 + shift k. 100)"),
        ("delim", "reset (shift k. 1 + (k @ 10))"),
        ("delim", "reset ((rec f x = isprime (shift k. x - 1)) 2)"),
        ("embed", "embed { reset (1 + shift k. k (k 1)) }"),
        (
            "embed",
            "let y = alloc 5 in (let u = (y := !y + embed { reset (1 + shift k. k (k 1)) }) in !y)",
        ),
    ]
    for lang, src in corpus:
        e = typecheck_and_elaborate(lang, parse(src, lang))
        runtime, tree = denot_setup(lang, e)
        out = runtime.run(tree, fuel=10_000)
        assert out.kind == "value"
        assert out.state.get("delim") == ()
        checked += 1
    for seed in range(100):
        e = typecheck_and_elaborate(
            "delim", gen_program(GenSpec("delim", size=20, seed=4_000 + seed))
        )
        runtime, tree = denot_setup("delim", e)
        out = runtime.run(tree, fuel=10_000)
        if out.kind == "value":
            assert out.state.get("delim") == ()
            checked += 1
    report(7, f"{checked} terminating delim/embed runs all end with an empty stack")


# --- criterion 8: determinism --------------------------------------------------------------------------


def test_criterion_8_determinism():
    diff_outputs = set()
    for _ in range(10):
        lines = [r.line() for _s, r in diff_generated("delim", 10, seed=31, size=18)]
        diff_outputs.add("\n".join(lines))
    assert len(diff_outputs) == 1

    run_outputs = set()
    src = "fork { dealloc (alloc 1) } ; (fun x -> x + 1) 4"
    for _ in range(10):
        e = parse(src, "aff")
        AFF.typecheck(e)
        out = AFF.runtime().run(
            AFF.interp(e, {}), fuel=10_000, scheduler=make_scheduler("rand:12")
        )
        run_outputs.add(out.describe() + "\n" + events_to_jsonl(out.trace))
    assert len(run_outputs) == 1
    report(8, "10 repetitions of diff and run: byte-identical reports and traces")
