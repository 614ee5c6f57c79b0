"""gitree-rt: run, diff, fuzz, and typecheck programs in the five languages.

Exit codes for `run`: 0 value, 2 parse error, 3 type error, 4 runtime
error, 5 timeout or stuck.  `diff` exits nonzero iff any program
disagrees.  A --config file of key=value lines presets any long flag.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import diff as DIFF
from .core import Loc, Nat, Ret, render_tree
from .engine import EXHAUSTIVE_MAX_FUEL, events_to_jsonl, make_scheduler
from .gen import GenSpec, gen_program
from .langs import ast as A
from .langs.syntax import ParseError, parse, print_expr
from .langs.types import TypeErr

EXTENSIONS = {".cc": "cc", ".exc": "exc", ".dl": "delim", ".emb": "embed", ".aff": "aff"}

EXIT_OK, EXIT_PARSE, EXIT_TYPE, EXIT_RUNTIME, EXIT_STOPPED = 0, 2, 3, 4, 5


def detect_lang(path: str, flag: str | None) -> str:
    if flag:
        return flag
    ext = Path(path).suffix
    if ext in EXTENSIONS:
        return EXTENSIONS[ext]
    raise SystemExit(f"cannot infer language from {path!r}; pass --lang")


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def render_value(v) -> str:
    if isinstance(v, Ret):
        if isinstance(v.ground, Nat):
            return str(v.ground.value)
        return str(v.ground)
    return "<fun>"


def _machine_trace_jsonl(trace) -> str:
    import json

    lines = []
    for i, c in enumerate(trace):
        lines.append(
            json.dumps({"step": i, "kind": "machine-step", "config": repr(c)})
        )
    return "\n".join(lines) + "\n"


def cmd_run(args) -> int:
    lang = detect_lang(args.file, args.lang)
    source = Path(args.file).read_text()
    try:
        expr = parse(source, lang)
    except ParseError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    inspect_var = args.inspect_heap
    if inspect_var:
        expr, err = _rewrite_for_inspect(expr, inspect_var)
        if err:
            print(err, file=sys.stderr)
            return EXIT_TYPE
    if not args.no_typecheck:
        try:
            expr = DIFF.typecheck_and_elaborate(lang, expr)
        except TypeErr as ex:
            print(f"type error: {ex}", file=sys.stderr)
            return EXIT_TYPE

    if args.mode == "machine":
        return _run_machine(lang, expr, args)

    runtime, tree = DIFF.denot_setup(lang, expr)
    if args.sched == "exhaustive":
        results = runtime.explore([tree], fuel=min(args.fuel, EXHAUSTIVE_MAX_FUEL))
        seen = {}
        for _choices, out in results:
            seen.setdefault(out.describe(), 0)
            seen[out.describe()] += 1
        for desc in sorted(seen):
            print(f"{desc}  [{seen[desc]} interleavings]")
        return EXIT_OK
    out = runtime.run(tree, fuel=args.fuel, scheduler=make_scheduler(args.sched))
    if args.trace:
        Path(args.trace).write_text(events_to_jsonl(out.trace))
    if out.kind == "value":
        print(f"VALUE {render_value(out.value)}")
        if inspect_var:
            _print_heap_cell(out, inspect_var)
        return EXIT_OK
    if out.kind == "error":
        print(f"ERROR {str(out.error.tag).capitalize() if out.error else ''}".rstrip())
        return EXIT_RUNTIME
    if out.kind == "timeout":
        print("TIMEOUT")
        return EXIT_STOPPED
    print(f"STUCK {out.reason}")
    return EXIT_STOPPED


def _run_machine(lang: str, expr, args) -> int:
    if lang not in DIFF.ORACLE_LANGS:
        print(f"language {lang!r} has no machine oracle", file=sys.stderr)
        return EXIT_TYPE
    res, trace = DIFF.machine_module(lang).machine_run(
        expr, max_steps=args.fuel, want_trace=bool(args.trace)
    )
    if args.trace:
        Path(args.trace).write_text(_machine_trace_jsonl(trace))
    kind, payload = res
    if kind == "value":
        print(f"VALUE {payload.value if isinstance(payload, A.Lit) else '<value>'}")
        return EXIT_OK
    if kind == "stuck":
        print(f"STUCK {payload}")
        return EXIT_STOPPED
    print("TIMEOUT")
    return EXIT_STOPPED


def _rewrite_for_inspect(expr, var: str):
    """Rebind the program so its final value is the inspected variable.

    Only works when the variable is bound by a let on the top-level spine.
    """
    if isinstance(expr, A.Let):
        if expr.name == var:
            new_body = A.Let("_inspected", expr.body, A.Var(var))
            return A.Let(expr.name, expr.bound, new_body), None
        inner, err = _rewrite_for_inspect(expr.body, var)
        if err:
            return expr, err
        return A.Let(expr.name, expr.bound, inner), None
    return expr, f"--inspect-heap: {var!r} is not bound by a top-level let"


def _print_heap_cell(out, var: str):
    v = out.value
    if not (isinstance(v, Ret) and isinstance(v.ground, Loc)):
        print(f"{var} = <not a reference: {render_tree(v)}>")
        return
    heap = out.state.get("store")
    cell = heap.lookup(v.ground)
    if cell is None:
        print(f"{var} = <deallocated>")
        return
    print(f"{var} = {render_value(cell.force())}")


def cmd_diff(args) -> int:
    fuel = args.fuel
    any_disagree = False
    if args.gen:
        lang = args.lang or "delim"
        reports = DIFF.diff_generated(lang, args.count, args.seed, args.size, fuel)
        for seed, r in reports:
            print(f"[seed {seed}] {r.line()}")
            any_disagree |= not r.ok
        agree = sum(1 for _s, r in reports if r.ok)
        print(f"# {agree}/{len(reports)} consistent")
    else:
        if not args.file:
            print("diff needs a file or --gen", file=sys.stderr)
            return 2
        lang = detect_lang(args.file, args.lang)
        try:
            r = DIFF.diff_source(lang, Path(args.file).read_text(), fuel)
        except ParseError as ex:
            print(f"parse error: {ex}", file=sys.stderr)
            return EXIT_PARSE
        except TypeErr as ex:
            print(f"type error: {ex}", file=sys.stderr)
            return EXIT_TYPE
        print(r.line())
        any_disagree = not r.ok
    return 1 if any_disagree else 0


def cmd_fuzz(args) -> int:
    ext = {v: k for k, v in EXTENSIONS.items()}[args.lang]
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        seed = args.seed + i
        src = print_expr(gen_program(GenSpec(args.lang, size=args.size, seed=seed)))
        if outdir:
            (outdir / f"{args.lang}_{seed}{ext}").write_text(src + "\n")
        else:
            print(f"# seed {seed}")
            print(src)
    return 0


def cmd_typecheck(args) -> int:
    lang = detect_lang(args.file, args.lang)
    try:
        expr = parse(Path(args.file).read_text(), lang)
    except ParseError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return EXIT_PARSE
    try:
        if lang == "cc":
            from .langs import callcc as CC

            print(CC.typecheck(expr))
        elif lang == "exc":
            from .langs import exceptions as EXC

            print(EXC.typecheck(expr))
        elif lang == "delim":
            from .langs import delim as D

            (t, ain, aout), _ = D.typecheck(expr)
            print(f"{t} ; {ain} => {aout}")
        elif lang == "embed":
            from .langs import embed as EMB

            t, _ = EMB.typecheck(expr)
            print(t)
        else:
            from .langs import affine as AFF

            print(AFF.typecheck(expr))
    except TypeErr as ex:
        print(f"type error: {ex}", file=sys.stderr)
        return EXIT_TYPE
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gitree-rt", description=__doc__)
    p.add_argument("--config", help="key=value file presetting flags")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_file=True):
        if with_file:
            sp.add_argument("file", nargs="?")
        sp.add_argument("--lang", choices=["cc", "exc", "delim", "embed", "aff"])
        sp.add_argument("--fuel", type=int, default=10_000)

    run = sub.add_parser("run", help="run a program denotationally (or -m machine)")
    common(run)
    run.add_argument("--sched", default="rr", help="rr | rand:SEED | exhaustive")
    run.add_argument("--trace", help="write the event trace as JSON lines")
    run.add_argument("--no-typecheck", action="store_true")
    run.add_argument("--inspect-heap", metavar="VAR")
    run.add_argument("--mode", choices=["denote", "machine"], default="denote")
    run.set_defaults(fn=cmd_run)

    d = sub.add_parser("diff", help="denotational run vs machine oracle")
    common(d)
    d.add_argument("--gen", action="store_true", help="diff generated programs")
    d.add_argument("--count", type=int, default=100)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--size", type=int, default=20)
    d.set_defaults(fn=cmd_diff)

    f = sub.add_parser("fuzz", help="generate well-typed programs")
    f.add_argument("--lang", required=True, choices=["cc", "exc", "delim", "aff"])
    f.add_argument("--count", type=int, default=10)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--size", type=int, default=20)
    f.add_argument("--out", help="directory to write programs into")
    f.set_defaults(fn=cmd_fuzz)

    t = sub.add_parser("typecheck", help="typecheck a program")
    common(t)
    t.set_defaults(fn=cmd_typecheck)
    return p


_FLAG_ONLY = {"no-typecheck", "gen"}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        # config supplies defaults; explicit flags win
        for key, value in load_config(cfg_path).items():
            flag = f"--{key}"
            if flag in argv:
                continue
            if key in _FLAG_ONLY:
                if value.lower() in ("1", "true", "yes"):
                    argv.append(flag)
            else:
                argv += [flag, value]
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
