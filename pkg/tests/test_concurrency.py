"""Fork, schedulers, and the atomicity scenarios under exhaustive interleaving."""

from gitree_rt.core import Later, Loc, Nat, Ret, get_val, tick
from gitree_rt.effects import store
from gitree_rt.effects.concurrency import FORK, fork_reifier, fork_then
from gitree_rt.engine import SeededRandom, combine


def rt():
    return combine([store.store_reifier(), fork_reifier()])


def test_fork_row():
    spawned_child = Ret(1)
    out, state, spawned = fork_reifier().step(
        FORK, Later.now(spawned_child), (), lambda u: Later.now(Ret(u))
    )
    assert state == ()
    assert len(spawned) == 1 and spawned[0].force() is spawned_child
    assert isinstance(out.force(), Ret)


def test_fork_of_value_finishes_both():
    out = rt().run(fork_then(Ret(1), Ret(2)), fuel=100)
    assert out.kind == "value" and out.value.ground == Nat(2)
    assert len(out.pool) == 2
    assert all(not isinstance(t, tick(Ret(0)).__class__) for t in out.pool)


def test_spawn_events_match_fork_count():
    prog = fork_then(Ret(1), fork_then(Ret(2), Ret(3)))
    out = rt().run(prog, fuel=100)
    forks = [e for e in out.trace if e.kind == "effect" and e.op == "fork/fork"]
    spawns = [e for e in out.trace if e.kind == "spawn"]
    assert len(forks) == len(spawns) == 2


def test_random_schedule_reproducible_outcomes():
    def prog():
        return fork_then(tick(tick(Ret(1))), tick(Ret(2)))

    a = rt().run(prog(), fuel=100, scheduler=SeededRandom(9))
    b = rt().run(prog(), fuel=100, scheduler=SeededRandom(9))
    from gitree_rt.engine import events_to_jsonl

    assert events_to_jsonl(a.trace) == events_to_jsonl(b.trace)


def test_fuel_is_global_across_threads():
    # two infinite threads: the run still ends by fuel exhaustion
    def omega():
        cell = {}
        from gitree_rt.core import Tau

        cell["t"] = Tau(Later(lambda: cell["t"]))
        return cell["t"]

    out = rt().run(pool=[omega(), omega()], fuel=50)
    assert out.kind == "timeout"
    assert len(out.trace) == 50


# --- atomicity at small scope -----------------------------------------------------------------


def faa_thread():
    return get_val(store.faa(Loc(0), 1), lambda _v: Ret(0))


def racy_increment_thread():
    # read, compute, write back: the lost-update shape
    return get_val(
        store.read(Loc(0)),
        lambda v: get_val(
            _plus_one(v), lambda w: store.write(Loc(0), w)
        ),
    )


def _plus_one(v):
    from gitree_rt.core import nat_add, natop_lift

    return natop_lift(nat_add, v, Ret(1))


def explore_two(threads_builder):
    runtime = rt()
    state = runtime.initial_state().set("store", store.heap_of(l0=Ret(0)))
    results = runtime.explore(
        [threads_builder(), threads_builder()], fuel=64, state=state
    )
    finals = []
    for _choices, out in results:
        heap = out.state.get("store")
        finals.append(store.cell_nat(heap, Loc(0)))
    return results, finals


def test_two_faa_always_sum_to_two():
    results, finals = explore_two(faa_thread)
    assert 1 <= len(results) <= 20
    assert all(out.kind in ("value", "stuck") for _c, out in results)
    assert set(finals) == {2}


def test_racy_increment_can_lose_an_update():
    results, finals = explore_two(racy_increment_thread)
    assert 1 in finals  # at least one interleaving loses an update
    assert 2 in finals  # and at least one does not
    assert set(finals) == {1, 2}


def test_exhaustive_visits_distinct_final_heaps():
    _r1, finals_atomic = explore_two(faa_thread)
    _r2, finals_racy = explore_two(racy_increment_thread)
    assert len(set(finals_atomic)) == 1
    assert len(set(finals_racy)) >= 2
