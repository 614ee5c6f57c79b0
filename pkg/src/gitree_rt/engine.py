"""Effect registry, reification, and the (thread-pooled) step relation.

A ``Reifier`` gives one effect family its semantics: a named initial
sub-state plus a step function

    step(op, input, sub_state, cont) -> None
        | (Later[tree], new_sub_state, [Later[tree] spawned threads])

Reifiers see the *current continuation* of the effect node, which is what
makes context-dependent effects (call/cc, shift/reset, exceptions)
expressible: the reifier may resume it, store it, or drop it.  Families
that spawn nothing return an empty thread list.

``combine`` builds a ``Runtime`` from several reifiers: the signature is
their disjoint union, the composite state the product of the per-family
states, and dispatch routes each op to its family, touching only that
family's slot (the frame property; asserted after every reification).

One ``tp_step`` advances a single thread of the pool: a Tau node is forced,
a Vis node reified (one Tick, one Effect event, one fuel unit), values and
errors do not step.  ``run`` drives a pool under a scheduler until the main
thread is a value, any thread reaches an error leaf, nothing can step, or
fuel runs out; it is a pure function of its inputs, so repeated runs are
bit-identical.  ``explore`` enumerates every schedule at small scope.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .core import (
    RUNTIME_ERR,
    Err,
    ErrKind,
    GITree,
    OpId,
    Tau,
    Vis,
    is_value,
    render_tree,
)


@dataclass(frozen=True)
class OpSpec:
    op: OpId
    inputs: str  # arity tag, documentation + trace rendering only
    outputs: str


@dataclass
class Reifier:
    """One effect family: its ops, initial sub-state, and step function."""

    family: str
    ops: List[OpSpec]
    state0: object
    step: Callable[[OpId, object, object, Callable], Optional[tuple]]
    render_input: Callable[[OpId, object], object] = lambda op, x: None
    render_state: Callable[[object], object] = lambda s: None

    def op_ids(self) -> List[OpId]:
        return [spec.op for spec in self.ops]


class RegistrationError(Exception):
    pass


@dataclass(frozen=True)
class CompositeState:
    """Ordered product of per-family sub-states."""

    slots: Tuple[Tuple[str, object], ...]

    def get(self, family: str):
        for name, sub in self.slots:
            if name == family:
                return sub
        raise KeyError(family)

    def set(self, family: str, sub) -> "CompositeState":
        return CompositeState(
            tuple((name, sub if name == family else old) for name, old in self.slots)
        )

    def families(self):
        return [name for name, _ in self.slots]


# --- step results and events ------------------------------------------------


@dataclass
class Stepped:
    next: GITree
    state: CompositeState
    spawned: List[GITree]
    event: Optional["Event"] = None


@dataclass
class Value:
    v: GITree


@dataclass
class Stuck:
    reason: str


@dataclass
class Event:
    kind: str  # "tau" | "effect" | "spawn"
    thread: int = 0
    step: int = 0
    op: Optional[str] = None
    input: object = None
    count: Optional[int] = None

    def to_json(self) -> dict:
        d = {"step": self.step, "thread": self.thread, "kind": self.kind}
        if self.op is not None:
            d["op"] = self.op
        if self.kind == "effect":
            d["input"] = self.input
        if self.count is not None:
            d["count"] = self.count
        return d


def events_to_jsonl(events: Sequence[Event]) -> str:
    return "\n".join(json.dumps(e.to_json(), sort_keys=True) for e in events) + "\n"


# --- outcome -----------------------------------------------------------------


@dataclass
class Outcome:
    kind: str  # "value" | "error" | "timeout" | "stuck"
    value: Optional[GITree] = None
    error: Optional[ErrKind] = None
    reason: str = ""
    state: Optional[CompositeState] = None
    trace: List[Event] = field(default_factory=list)
    pool: List[GITree] = field(default_factory=list)

    def describe(self) -> str:
        if self.kind == "value":
            return f"VALUE {render_tree(self.value)}"
        if self.kind == "error":
            return f"ERROR {self.error}"
        if self.kind == "timeout":
            return "TIMEOUT"
        return f"STUCK {self.reason}"


# --- schedulers ---------------------------------------------------------------


class RoundRobin:
    """Cycles over threads, skipping unrunnable ones."""

    def __init__(self):
        self.cursor = 0

    def pick(self, runnable: List[int], n_threads: int) -> int:
        for off in range(n_threads):
            i = (self.cursor + off) % n_threads
            if i in runnable:
                self.cursor = i + 1
                return i
        raise AssertionError("pick called with no runnable thread")


class SeededRandom:
    """Uniform choice over runnable threads, reproducible from the seed."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def pick(self, runnable: List[int], n_threads: int) -> int:
        return self.rng.choice(runnable)


class FixedChoices:
    """Replays a prescribed choice sequence; used by the exhaustive driver."""

    def __init__(self, choices: Sequence[int]):
        self.choices = list(choices)
        self.pos = 0

    def pick(self, runnable: List[int], n_threads: int) -> int:
        if self.pos < len(self.choices) and self.choices[self.pos] in runnable:
            c = self.choices[self.pos]
            self.pos += 1
            return c
        # past the prescribed prefix: fall back to the first runnable thread
        self.pos += 1
        return runnable[0]


def make_scheduler(spec: str):
    """Parse a CLI-style scheduler spec: rr | rand:SEED."""
    if spec == "rr":
        return RoundRobin()
    if spec.startswith("rand:"):
        return SeededRandom(int(spec.split(":", 1)[1]))
    raise ValueError(f"unknown scheduler {spec!r}")


# --- the runtime ---------------------------------------------------------------


EXHAUSTIVE_MAX_THREADS = 3
EXHAUSTIVE_MAX_FUEL = 64


class Runtime:
    """A set of combined reifiers plus the step relation over their product state."""

    def __init__(self, reifiers: Sequence[Reifier]):
        self.reifiers: Dict[str, Reifier] = {}
        self.by_op: Dict[OpId, Reifier] = {}
        self.signature: List[OpSpec] = []
        for r in reifiers:
            if r.family in self.reifiers:
                raise RegistrationError(f"duplicate family {r.family!r}")
            self.reifiers[r.family] = r
            for spec in r.ops:
                if spec.op in self.by_op:
                    raise RegistrationError(f"duplicate op {spec.op}")
                if spec.op.family != r.family:
                    raise RegistrationError(f"{spec.op} registered under family {r.family!r}")
                self.by_op[spec.op] = r
                self.signature.append(spec)

    def initial_state(self) -> CompositeState:
        return CompositeState(tuple((f, r.state0) for f, r in self.reifiers.items()))

    # -- single-thread step ----------------------------------------------------

    def reify(self, t: Vis, state: CompositeState):
        """Reify the top-level effect node; returns (tree, state, spawned trees).

        A declined reification (reifier returned None) yields an Err leaf with
        the state unchanged; an unregistered op raises KeyError (engine
        misconfiguration, reported as Stuck at the istep level).
        """
        r = self.by_op.get(t.op)
        if r is None:
            raise KeyError(t.op)
        sub = state.get(r.family)
        res = r.step(t.op, t.value, sub, t.cont)
        if res is None:
            return Err(RUNTIME_ERR), state, []
        later_tree, sub2, spawned = res
        state2 = state.set(r.family, sub2)
        # frame property: no other family's slot may change
        for name, old in state.slots:
            if name != r.family:
                assert state2.get(name) is old, f"reifier {t.op} touched family {name!r}"
        return Tau(later_tree), state2, [lt.force() for lt in spawned]

    def istep(self, t: GITree, state: CompositeState):
        """One reduction step of a single tree."""
        if is_value(t):
            return Value(t)
        if isinstance(t, Err):
            return Stuck(f"error leaf: {t.kind}")
        if isinstance(t, Tau):
            return Stepped(t.rest.force(), state, [])
        if isinstance(t, Vis):
            r = self.by_op.get(t.op)
            if r is None:
                return Stuck(f"unknown op {t.op}")
            sub = state.get(r.family)
            res = r.step(t.op, t.value, sub, t.cont)
            ev = Event(kind="effect", op=str(t.op), input=r.render_input(t.op, t.value))
            if res is None:
                # the reifier declined: the program is at fault, not the engine
                return Stepped(Err(RUNTIME_ERR), state, [], event=ev)
            later_tree, sub2, spawned = res
            state2 = state.set(r.family, sub2)
            for name, old in state.slots:
                if name != r.family:
                    assert state2.get(name) is old, f"reifier {t.op} touched family {name!r}"
            return Stepped(later_tree.force(), state2, [lt.force() for lt in spawned], event=ev)
        raise TypeError(f"not a tree: {t!r}")

    # -- pool step ---------------------------------------------------------------

    def runnable(self, pool: Sequence[GITree]) -> List[int]:
        out = []
        for i, t in enumerate(pool):
            if is_value(t) or isinstance(t, Err):
                continue
            if isinstance(t, Vis) and t.op not in self.by_op:
                continue
            out.append(i)
        return out

    def tp_step(self, pool: List[GITree], state: CompositeState, choice: int):
        """Step pool[choice]; spawned threads append at the end.

        Returns (pool, state, events, ok); a value/stuck choice is a no-op
        signal for the scheduler (ok=False).
        """
        if not 0 <= choice < len(pool):
            return pool, state, [], False
        res = self.istep(pool[choice], state)
        if not isinstance(res, Stepped):
            return pool, state, [], False
        events = []
        if res.event is not None:
            ev = res.event
            ev.thread = choice
            events.append(ev)
        else:
            events.append(Event(kind="tau", thread=choice))
        if res.spawned:
            events.append(Event(kind="spawn", thread=choice, count=len(res.spawned)))
        new_pool = list(pool)
        new_pool[choice] = res.next
        new_pool.extend(res.spawned)
        return new_pool, res.state, events, True

    # -- driving -------------------------------------------------------------------

    def run(
        self,
        tree: Optional[GITree] = None,
        fuel: int = 10_000,
        scheduler=None,
        state: Optional[CompositeState] = None,
        pool: Optional[Sequence[GITree]] = None,
    ) -> Outcome:
        """Drive a pool (default: the single given tree) to an Outcome."""
        if pool is None:
            pool = [tree]
        pool = list(pool)
        if scheduler is None:
            scheduler = RoundRobin()
        if state is None:
            state = self.initial_state()
        trace: List[Event] = []
        step_no = 0
        while True:
            if is_value(pool[0]):
                return Outcome("value", value=pool[0], state=state, trace=trace, pool=pool)
            erred = next((t for t in pool if isinstance(t, Err)), None)
            if erred is not None:
                return Outcome(
                    "error", error=erred.kind, state=state, trace=trace, pool=pool
                )
            runnable = self.runnable(pool)
            if not runnable:
                return Outcome(
                    "stuck", reason=self._stuck_reason(pool), state=state, trace=trace, pool=pool
                )
            if fuel == 0:
                return Outcome("timeout", state=state, trace=trace, pool=pool)
            choice = scheduler.pick(runnable, len(pool))
            pool, state, events, ok = self.tp_step(pool, state, choice)
            assert ok
            for ev in events:
                ev.step = step_no
            trace.extend(events)
            step_no += 1
            fuel -= 1

    def _stuck_reason(self, pool) -> str:
        for t in pool:
            if isinstance(t, Vis) and t.op not in self.by_op:
                return f"unknown op {t.op}"
        return "no runnable thread"

    def explore(
        self,
        pool: Sequence[GITree],
        fuel: int = EXHAUSTIVE_MAX_FUEL,
        state: Optional[CompositeState] = None,
        max_threads: int = EXHAUSTIVE_MAX_THREADS,
    ) -> List[Tuple[Tuple[int, ...], Outcome]]:
        """Enumerate every interleaving (DFS over scheduler choices) at small scope.

        Unlike ``run`` (which reports as soon as the main thread is a value),
        exploration drives every branch to quiescence: a branch ends when no
        thread can step, a thread errs, or fuel runs out.  Trees and states
        are immutable, so branches share structure.
        """
        if fuel > EXHAUSTIVE_MAX_FUEL:
            raise ValueError(f"exhaustive exploration is gated to fuel <= {EXHAUSTIVE_MAX_FUEL}")
        results: List[Tuple[Tuple[int, ...], Outcome]] = []
        init_state = state if state is not None else self.initial_state()

        def walk(pool, state, fuel_left, prefix):
            if len(pool) > max_threads:
                raise ValueError(
                    f"exhaustive exploration is gated to pools <= {max_threads} threads"
                )
            runnable = self.runnable(pool)
            if (
                any(isinstance(t, Err) for t in pool)
                or not runnable
                or fuel_left == 0
            ):
                results.append((prefix, self._summarize(pool, state)))
                return
            for choice in runnable:
                p2, s2, _, ok = self.tp_step(list(pool), state, choice)
                assert ok
                walk(p2, s2, fuel_left - 1, prefix + (choice,))

        walk(list(pool), init_state, fuel, ())
        return results

    def _summarize(self, final_pool, final_state):
        erred = next((t for t in final_pool if isinstance(t, Err)), None)
        if erred is not None:
            return Outcome("error", error=erred.kind, state=final_state, pool=list(final_pool))
        if self.runnable(final_pool):
            return Outcome("timeout", state=final_state, pool=list(final_pool))
        if is_value(final_pool[0]):
            return Outcome("value", value=final_pool[0], state=final_state, pool=list(final_pool))
        return Outcome(
            "stuck", reason=self._stuck_reason(final_pool), state=final_state, pool=list(final_pool)
        )


def combine(reifiers: Sequence[Reifier]) -> Runtime:
    """Disjoint union of effect families over the product of their states."""
    return Runtime(reifiers)
