"""The differential harness: agreement, sensitivity, and reproducibility."""

import pytest

from gitree_rt.core import Later
from gitree_rt.diff import (
    diff_expr,
    diff_generated,
    diff_source,
    soundness_pairs,
    typecheck_and_elaborate,
)
from gitree_rt.effects.control import CALLCC, CC_THROW
from gitree_rt.engine import OpSpec, Reifier, combine
from gitree_rt.gen import GenSpec, gen_program
from gitree_rt.langs.syntax import parse


def test_hand_corpus_agreement():
    assert diff_source("cc", "1 + callcc k. throw 41 to k").line() == "AGREE 42"
    assert diff_source("delim", "reset (1 + shift k. k (k 10))").line() == "AGREE 12"
    assert diff_source("delim", "10 + reset (2 + shift k. 100)").line() == "AGREE 110"
    assert (
        diff_source(
            "exc", "try (try (raise E 3) catch F with h. 0) catch E with h. h + 10"
        ).line()
        == "AGREE 13"
    )


def test_both_timeout_is_consistent():
    r = diff_source("cc", "(rec f x = f x) 0", fuel=200)
    assert r.line() == "BOTH-TIMEOUT" and r.ok


def test_small_batches_agree():
    for lang in ("cc", "exc", "delim"):
        reports = diff_generated(lang, 25, seed=77, size=18)
        assert all(r.ok for _s, r in reports), [
            (s, r.line()) for s, r in reports if not r.ok
        ]


def test_reports_are_reproducible():
    a = [r.line() for _s, r in diff_generated("delim", 10, seed=5)]
    b = [r.line() for _s, r in diff_generated("delim", 10, seed=5)]
    assert a == b


def _corrupted_cc_runtime():
    """A callcc reifier that forgets to resume the continuation."""

    def bad_step(op, value, state, cont):
        if op == CALLCC:
            return value(cont), state, []  # missing the outer cont(...) wrap
        if op == CC_THROW:
            payload, target = value
            return Later(lambda: target.force()(payload)), state, []
        raise AssertionError(op)

    bad = Reifier(
        family="cc",
        ops=[
            OpSpec(CALLCC, "cont-callback", "later-tree"),
            OpSpec(CC_THROW, "later-tree * later-fn", "empty"),
        ],
        state0=(),
        step=bad_step,
        render_input=lambda op, v: "<fn>",
    )
    return combine([bad])


def test_corrupted_reifier_is_detected():
    src = "1 + callcc k. 41"
    e = typecheck_and_elaborate("cc", parse(src, "cc"))
    report = diff_expr("cc", e, runtime_override=_corrupted_cc_runtime())
    assert not report.ok and "DISAGREE" in report.line()


def test_no_oracle_languages_are_rejected():
    with pytest.raises(ValueError):
        diff_expr("aff", parse("1", "aff"))


def test_soundness_sampling_smoke():
    progs = [
        typecheck_and_elaborate("exc", gen_program(GenSpec("exc", size=16, seed=s)))
        for s in range(10)
    ]
    checks = soundness_pairs("exc", progs, 40, seed=1)
    assert checks and all(c.ok for c in checks)
    progs = [
        typecheck_and_elaborate("delim", gen_program(GenSpec("delim", size=16, seed=s)))
        for s in range(10)
    ]
    checks = soundness_pairs("delim", progs, 40, seed=1)
    assert checks and all(c.ok for c in checks)
