"""Generator properties: determinism, well-typedness, feature frequency."""

from gitree_rt.gen import GenSpec, gen_program
from gitree_rt.langs import affine as AFF
from gitree_rt.langs import callcc as CC
from gitree_rt.langs import delim as D
from gitree_rt.langs import exceptions as EXC
from gitree_rt.langs.syntax import parse, print_expr


def test_generation_is_deterministic_per_seed():
    for lang in ("cc", "exc", "delim", "aff"):
        a = print_expr(gen_program(GenSpec(lang, size=20, seed=1)))
        b = print_expr(gen_program(GenSpec(lang, size=20, seed=1)))
        assert a == b
        c = print_expr(gen_program(GenSpec(lang, size=20, seed=2)))
        assert a != c


def test_generated_cc_programs_typecheck():
    for seed in range(200):
        CC.typecheck(gen_program(GenSpec("cc", size=20, seed=seed)))


def test_generated_exc_programs_typecheck():
    for seed in range(200):
        EXC.typecheck(gen_program(GenSpec("exc", size=20, seed=seed)))


def test_generated_delim_programs_typecheck_at_nat():
    for seed in range(200):
        D.typecheck_program(gen_program(GenSpec("delim", size=20, seed=seed)))


def test_generated_aff_programs_typecheck():
    # correct-by-construction context splitting
    for seed in range(1000):
        AFF.typecheck(gen_program(GenSpec("aff", size=20, seed=seed)))


def test_cc_control_feature_frequency():
    with_control = 0
    for seed in range(1000):
        src = print_expr(gen_program(GenSpec("cc", size=20, seed=seed)))
        if "callcc" in src or "throw" in src:
            with_control += 1
    assert with_control >= 200  # >= 20 percent


def test_generated_programs_roundtrip_and_are_closed():
    from gitree_rt.langs.ast import free_vars

    for lang in ("cc", "exc", "delim", "aff"):
        for seed in range(50):
            e = gen_program(GenSpec(lang, size=20, seed=seed))
            assert parse(print_expr(e), lang) == e
            assert free_vars(e) <= {"isprime"}
