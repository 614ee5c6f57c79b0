"""Differential testing: denotational runs against the machine oracles.

``diff_expr`` runs a (typechecked, elaborated) program both ways and
classifies the pair:

  AGREE n       both sides computed the natural n
  AGREE error   both sides observed a runtime fault (the machine has no
                error leaves; its stuck states on uncaught raises and
                ill-typed redexes are the same observation)
  BOTH-TIMEOUT  both sides ran out of fuel: consistent divergence
  DISAGREE      anything else, with both verdicts in the detail

``soundness_pairs`` samples machine steps c0 |-> c1 from oracle traces and
checks that running the denotations of c0 and c1 (each from its denoted
state) yields the same final outcome and that c1's effect events are a
suffix of c0's after alignment.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Tuple

import json

from .core import Nat, Ret
from .effects.control import callcc_reifier, delim_reifier, exc_reifier
from .engine import Outcome, RoundRobin, Runtime, combine
from .gen import GenSpec, gen_program
from .langs import affine as AFF
from .langs import ast as A
from .langs import callcc as CC
from .langs import delim as D
from .langs import embed as EMB
from .langs import exceptions as EXC
from .langs.syntax import parse
from .machines import callcc as MCC
from .machines import delim as MD
from .machines import exceptions as MEXC

ORACLE_LANGS = ("cc", "exc", "delim")


def typecheck_and_elaborate(lang: str, e: A.Expr) -> A.Expr:
    if lang == "cc":
        CC.typecheck(e)
        return e
    if lang == "exc":
        EXC.typecheck(e)
        return e
    if lang == "delim":
        _t, e2 = D.typecheck_program(e)
        return e2
    if lang == "embed":
        _t, e2 = EMB.typecheck(e)
        return e2
    if lang == "aff":
        AFF.typecheck(e)
        return e
    raise ValueError(f"unknown language {lang!r}")


def denot_setup(lang: str, e: A.Expr):
    """Runtime and tree for the denotational run of an elaborated program."""
    if lang == "cc":
        return combine([callcc_reifier()]), CC.interp(e, {})
    if lang == "exc":
        return combine([exc_reifier()]), EXC.interp(e, {})
    if lang == "delim":
        return combine([delim_reifier()]), D.program_tree(e)
    if lang == "embed":
        return EMB.runtime(), EMB.interp(e, {})
    if lang == "aff":
        return AFF.runtime(), AFF.interp(e, {})
    raise ValueError(f"unknown language {lang!r}")


def machine_module(lang: str):
    return {"cc": MCC, "exc": MEXC, "delim": MD}[lang]


def outcome_class(out: Outcome) -> Tuple:
    if out.kind == "value":
        v = out.value
        if isinstance(v, Ret) and isinstance(v.ground, Nat):
            return ("value", v.ground.value)
        return ("value-other",)
    if out.kind == "error":
        return ("error",)
    if out.kind == "timeout":
        return ("timeout",)
    return ("stuck", out.reason)


def machine_class(res: Tuple) -> Tuple:
    kind, payload = res
    if kind == "value":
        if isinstance(payload, A.Lit):
            return ("value", payload.value)
        return ("value-other",)
    if kind == "stuck":
        return ("error",)
    return ("timeout",)


@dataclass
class DiffReport:
    status: str  # "agree" | "agree-error" | "both-timeout" | "disagree"
    detail: str

    def line(self) -> str:
        if self.status == "agree":
            return f"AGREE {self.detail}"
        if self.status == "agree-error":
            return "AGREE error"
        if self.status == "both-timeout":
            return "BOTH-TIMEOUT"
        return f"DISAGREE {self.detail}"

    @property
    def ok(self) -> bool:
        return self.status != "disagree"


def diff_expr(lang: str, e: A.Expr, fuel: int = 10_000, runtime_override=None) -> DiffReport:
    """Run an elaborated program denotationally and on the oracle machine."""
    if lang not in ORACLE_LANGS:
        raise ValueError(f"language {lang!r} has no machine oracle")
    runtime, tree = denot_setup(lang, e)
    if runtime_override is not None:
        runtime = runtime_override
    out = runtime.run(tree, fuel=fuel, scheduler=RoundRobin())
    mres, _ = machine_module(lang).machine_run(e, max_steps=fuel)
    dc = outcome_class(out)
    mc = machine_class(mres)
    if dc == mc:
        if dc[0] == "value":
            return DiffReport("agree", str(dc[1]))
        if dc[0] == "error":
            return DiffReport("agree-error", "")
        if dc[0] == "timeout":
            return DiffReport("both-timeout", "")
    return DiffReport("disagree", f"denot={dc} machine={mc}")


def diff_generated(
    lang: str, count: int, seed: int, size: int = 20, fuel: int = 10_000
) -> List[Tuple[int, DiffReport]]:
    reports = []
    for i in range(count):
        e = gen_program(GenSpec(lang, size=size, seed=seed + i))
        e2 = typecheck_and_elaborate(lang, e)
        reports.append((seed + i, diff_expr(lang, e2, fuel=fuel)))
    return reports


def diff_source(lang: str, source: str, fuel: int = 10_000) -> DiffReport:
    e = parse(source, lang)
    e2 = typecheck_and_elaborate(lang, e)
    return diff_expr(lang, e2, fuel=fuel)


# --- soundness sampling -----------------------------------------------------------------


def _effect_keys(out: Outcome) -> List[str]:
    keys = []
    for ev in out.trace:
        if ev.kind == "effect":
            keys.append(f"{ev.op}|{json.dumps(ev.input, sort_keys=True)}")
    return keys


def _config_runtime(lang: str, stack) -> Runtime:
    if lang == "exc":
        return combine([exc_reifier(stack)])
    return combine([delim_reifier(stack)])


def _config_denot(lang: str, c):
    return (EXC if lang == "exc" else D).config_denot(c)


@dataclass
class SoundnessCheck:
    ok: bool
    detail: str


def soundness_pairs(
    lang: str,
    programs: List[A.Expr],
    sample_n: int,
    seed: int = 0,
    fuel: int = 20_000,
) -> List[SoundnessCheck]:
    """Sample machine steps across the programs' runs and check each pair."""
    if lang not in ("exc", "delim"):
        raise ValueError("soundness sampling is defined for exc and delim")
    M = machine_module(lang)
    pairs = []
    for e in programs:
        _res, tr = M.machine_run(e, max_steps=2_000, want_trace=True)
        pairs.extend(zip(tr, tr[1:]))
    if not pairs:
        return []
    rng = random.Random(seed)
    sample = [pairs[rng.randrange(len(pairs))] for _ in range(sample_n)]
    return [_check_pair(lang, c0, c1, fuel) for c0, c1 in sample]


def _check_pair(lang: str, c0, c1, fuel: int) -> SoundnessCheck:
    t0, s0 = _config_denot(lang, c0)
    t1, s1 = _config_denot(lang, c1)
    out0 = _config_runtime(lang, s0).run(t0, fuel=fuel)
    out1 = _config_runtime(lang, s1).run(t1, fuel=fuel)
    k0, k1 = outcome_class(out0), outcome_class(out1)
    if k0 != k1:
        return SoundnessCheck(False, f"outcomes differ: {k0} vs {k1}")
    e0, e1 = _effect_keys(out0), _effect_keys(out1)
    if e1 and e0[len(e0) - len(e1):] != e1:
        return SoundnessCheck(False, "effect-event suffix misaligned")
    return SoundnessCheck(True, "")
