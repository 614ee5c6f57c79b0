"""Lexer, parsers, and printer for the five surface languages.

Common core: integers, identifiers, ``fun x -> e``, ``rec f x = e``,
application by juxtaposition, ``e + e`` / ``e - e``, ``if/then/else``, and
``let x = e in e`` sugar.  Per-language extensions are gated by the language
tag:

  cc     callcc k. e         throw e1 to e2
  exc    try e1 catch E with h. e2        raise E e
  delim  reset e  (or  < e >)   shift k. e    e1 @ e2    isprime
  embed  embed { e }   alloc e   !e   e1 := e2   ()  (embedded body is delim)
  aff    (e1, e2)   let (a, b) = e1 in e2   replace(e1, e2)   dealloc e
         alloc e   fork { e1 } ; e2   true/false   ()   and  l <- r  as
         sugar for  let (a, b) = replace(l, r) in ()

'#' starts a line comment.  The printer emits a fully parenthesized
canonical form, so parse(print(ast)) == ast.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from . import ast as A

LANGS = ("cc", "exc", "delim", "embed", "aff")

KEYWORDS = {
    "fun", "rec", "if", "then", "else", "let", "in", "callcc", "throw", "to",
    "try", "catch", "with", "raise", "reset", "shift", "embed", "alloc",
    "dealloc", "replace", "fork", "true", "false",
}

SYMBOLS = ["->", ":=", "<-", "(", ")", "{", "}", "<", ">", "+", "-", "@", "!", ";", ",", ".", "="]


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str  # "int" | "ident" | "kw" | "sym" | "eof"
    text: str
    line: int
    col: int


def lex(source: str) -> List[Token]:
    toks: List[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            toks.append(Token("int", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            toks.append(Token("kw" if word in KEYWORDS else "ident", word, line, col))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


PREFIX_KEYWORDS = {
    "fun", "rec", "if", "let", "callcc", "shift", "try", "raise", "throw",
    "reset", "fork",
}

ATOM_STARTERS_SYM = {"(", "<", "!", "{"}


class Parser:
    def __init__(self, tokens: List[Token], lang: str):
        if lang not in LANGS:
            raise ValueError(f"unknown language {lang!r}")
        self.toks = tokens
        self.pos = 0
        self.lang = lang

    # -- token plumbing ---------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at_sym(self, s: str) -> bool:
        t = self.peek()
        return t.kind == "sym" and t.text == s

    def at_kw(self, w: str) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.text == w

    def expect_sym(self, s: str) -> Token:
        t = self.next()
        if t.kind != "sym" or t.text != s:
            raise ParseError(f"expected {s!r}, found {t.text!r}", t.line, t.col)
        return t

    def expect_kw(self, w: str) -> Token:
        t = self.next()
        if t.kind != "kw" or t.text != w:
            raise ParseError(f"expected {w!r}, found {t.text!r}", t.line, t.col)
        return t

    def expect_ident(self) -> str:
        t = self.next()
        if t.kind != "ident":
            raise ParseError(f"expected identifier, found {t.text!r}", t.line, t.col)
        return t.text

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    def require(self, langs, what: str):
        if self.lang not in langs:
            self.fail(f"{what} is not part of the {self.lang} language")

    # -- grammar ------------------------------------------------------------

    def parse_expr(self) -> A.Expr:
        if self.peek().kind == "kw" and self.peek().text in PREFIX_KEYWORDS:
            return self.parse_prefix()
        return self.parse_assign()

    def parse_prefix(self) -> A.Expr:
        t = self.peek()
        w = t.text
        if w == "fun":
            self.next()
            x = self.expect_ident()
            self.expect_sym("->")
            return A.Fun(x, self.parse_expr())
        if w == "rec":
            self.next()
            f = self.expect_ident()
            x = self.expect_ident()
            self.expect_sym("=")
            return A.Rec(f, x, self.parse_expr())
        if w == "if":
            self.next()
            c = self.parse_expr()
            self.expect_kw("then")
            th = self.parse_expr()
            self.expect_kw("else")
            return A.If(c, th, self.parse_expr())
        if w == "let":
            self.next()
            if self.at_sym("("):
                self.require(("aff",), "let-pair")
                self.next()
                n1 = self.expect_ident()
                self.expect_sym(",")
                n2 = self.expect_ident()
                self.expect_sym(")")
                self.expect_sym("=")
                bound = self.parse_expr()
                self.expect_kw("in")
                return A.LetPair(n1, n2, bound, self.parse_expr())
            x = self.expect_ident()
            self.expect_sym("=")
            bound = self.parse_expr()
            self.expect_kw("in")
            return A.Let(x, bound, self.parse_expr())
        if w == "callcc":
            self.require(("cc",), "callcc")
            self.next()
            k = self.expect_ident()
            self.expect_sym(".")
            return A.Callcc(k, self.parse_expr())
        if w == "throw":
            self.require(("cc",), "throw")
            self.next()
            payload = self.parse_assign()
            self.expect_kw("to")
            return A.Throw(payload, self.parse_expr())
        if w == "shift":
            self.require(("delim",), "shift")
            self.next()
            k = self.expect_ident()
            self.expect_sym(".")
            return A.Shift(k, self.parse_expr())
        if w == "reset":
            self.require(("delim",), "reset")
            self.next()
            return A.Reset(self.parse_expr())
        if w == "try":
            self.require(("exc",), "try/catch")
            self.next()
            body = self.parse_expr()
            self.expect_kw("catch")
            exc = self.expect_ident()
            self.expect_kw("with")
            h = self.expect_ident()
            self.expect_sym(".")
            return A.TryCatch(exc, body, h, self.parse_expr())
        if w == "raise":
            self.require(("exc",), "raise")
            self.next()
            exc = self.expect_ident()
            return A.Raise(exc, self.parse_expr())
        if w == "fork":
            self.require(("aff",), "fork")
            self.next()
            self.expect_sym("{")
            spawn = self.parse_expr()
            self.expect_sym("}")
            self.expect_sym(";")
            return A.ForkSeq(spawn, self.parse_expr())
        self.fail(f"unexpected keyword {w!r}")

    def parse_assign(self) -> A.Expr:
        left = self.parse_additive()
        if self.at_sym(":="):
            self.require(("embed",), "assignment")
            self.next()
            return A.Assign(left, self.parse_expr())
        if self.at_sym("<-"):
            self.require(("aff",), "store-into sugar")
            self.next()
            right = self.parse_expr()
            # sugar: let (a, b) = replace(left, right) in ()
            a, b = A.fresh_name("old"), A.fresh_name("ref")
            return A.LetPair(a, b, A.Replace(left, right), A.UnitLit())
        return left

    def _parse_operand(self) -> A.Expr:
        if self.peek().kind == "kw" and self.peek().text in PREFIX_KEYWORDS:
            return self.parse_prefix()
        return self.parse_appcont()

    def parse_additive(self) -> A.Expr:
        left = self.parse_appcont()
        while self.peek().kind == "sym" and self.peek().text in ("+", "-"):
            op = self.next().text
            right = self._parse_operand()
            left = A.Natop(op, left, right)
        return left

    def parse_appcont(self) -> A.Expr:
        left = self.parse_app()
        while self.at_sym("@"):
            self.require(("delim",), "continuation application")
            self.next()
            right = (
                self.parse_prefix()
                if self.peek().kind == "kw" and self.peek().text in PREFIX_KEYWORDS
                else self.parse_app()
            )
            left = A.AppCont(left, right)
        return left

    def parse_app(self) -> A.Expr:
        e = self.parse_atom()
        while self.starts_atom():
            e = A.App(e, self.parse_atom())
        return e

    def starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("int", "ident"):
            return True
        if t.kind == "kw" and t.text in ("true", "false", "embed", "alloc", "dealloc", "replace"):
            return True
        if t.kind == "sym" and t.text in ("(", "!"):
            return True
        if t.kind == "sym" and t.text == "<" and self.lang == "delim":
            return True
        return False

    def parse_atom(self) -> A.Expr:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return A.Lit(int(t.text))
        if t.kind == "ident":
            self.next()
            return A.Var(t.text)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.require(("aff",), "boolean literals")
            self.next()
            return A.BoolLit(t.text == "true")
        if t.kind == "kw" and t.text == "embed":
            self.require(("embed",), "embed")
            self.next()
            self.expect_sym("{")
            inner = Parser(self.toks, "delim")
            inner.pos = self.pos
            body = inner.parse_expr()
            self.pos = inner.pos
            self.expect_sym("}")
            return A.Embed(body)
        if t.kind == "kw" and t.text == "alloc":
            self.require(("embed", "aff"), "alloc")
            self.next()
            return A.Alloc(self.parse_atom())
        if t.kind == "kw" and t.text == "dealloc":
            self.require(("aff",), "dealloc")
            self.next()
            return A.Dealloc(self.parse_atom())
        if t.kind == "kw" and t.text == "replace":
            self.require(("aff",), "replace")
            self.next()
            self.expect_sym("(")
            r = self.parse_expr()
            self.expect_sym(",")
            v = self.parse_expr()
            self.expect_sym(")")
            return A.Replace(r, v)
        if self.at_sym("!"):
            self.require(("embed",), "dereference")
            self.next()
            return A.Deref(self.parse_atom())
        if self.at_sym("<"):
            self.require(("delim",), "reset brackets")
            self.next()
            body = self.parse_expr()
            self.expect_sym(">")
            return A.Reset(body)
        if self.at_sym("("):
            self.next()
            if self.at_sym(")"):
                self.require(("embed", "aff"), "unit literal")
                self.next()
                return A.UnitLit()
            e = self.parse_expr()
            if self.at_sym(","):
                self.require(("aff",), "pairs")
                self.next()
                snd = self.parse_expr()
                self.expect_sym(")")
                return A.PairE(e, snd)
            self.expect_sym(")")
            return e
        self.fail(f"unexpected token {t.text!r}")


def parse(source: str, lang: str) -> A.Expr:
    p = Parser(lex(source), lang)
    e = p.parse_expr()
    t = p.peek()
    if t.kind != "eof":
        raise ParseError(f"trailing input {t.text!r}", t.line, t.col)
    return e


# --- printer ---------------------------------------------------------------------


def print_expr(e: A.Expr) -> str:
    """Fully parenthesized canonical source; parse(print_expr(e), lang) == e."""
    if isinstance(e, A.Lit):
        return str(e.value)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.UnitLit):
        return "()"
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Fun):
        return f"(fun {e.param} -> {print_expr(e.body)})"
    if isinstance(e, A.Rec):
        return f"(rec {e.fname} {e.param} = {print_expr(e.body)})"
    if isinstance(e, A.App):
        return f"({print_expr(e.fn)} {print_expr(e.arg)})"
    if isinstance(e, A.AppCont):
        return f"({print_expr(e.fn)} @ {print_expr(e.arg)})"
    if isinstance(e, A.Natop):
        return f"({print_expr(e.left)} {e.op} {print_expr(e.right)})"
    if isinstance(e, A.If):
        return f"(if {print_expr(e.cond)} then {print_expr(e.then)} else {print_expr(e.els)})"
    if isinstance(e, A.Let):
        return f"(let {e.name} = {print_expr(e.bound)} in {print_expr(e.body)})"
    if isinstance(e, A.Callcc):
        return f"(callcc {e.name}. {print_expr(e.body)})"
    if isinstance(e, A.Throw):
        return f"(throw {print_expr(e.payload)} to {print_expr(e.target)})"
    if isinstance(e, A.Raise):
        return f"(raise {e.exc} {print_expr(e.payload)})"
    if isinstance(e, A.TryCatch):
        return (
            f"(try {print_expr(e.body)} catch {e.exc} with {e.hname}. "
            f"{print_expr(e.handler)})"
        )
    if isinstance(e, A.Reset):
        return f"(reset {print_expr(e.body)})"
    if isinstance(e, A.Shift):
        return f"(shift {e.name}. {print_expr(e.body)})"
    if isinstance(e, A.Embed):
        return f"embed {{ {print_expr(e.body)} }}"
    if isinstance(e, A.Alloc):
        return f"(alloc {_atomize(e.init)})"
    if isinstance(e, A.Deref):
        return f"(!{_atomize(e.ref)})"
    if isinstance(e, A.Assign):
        return f"({print_expr(e.ref)} := {print_expr(e.value)})"
    if isinstance(e, A.PairE):
        return f"({print_expr(e.fst)}, {print_expr(e.snd)})"
    if isinstance(e, A.LetPair):
        return (
            f"(let ({e.n1}, {e.n2}) = {print_expr(e.bound)} in {print_expr(e.body)})"
        )
    if isinstance(e, A.Replace):
        return f"replace ({print_expr(e.ref)}, {print_expr(e.value)})"
    if isinstance(e, A.Dealloc):
        return f"(dealloc {_atomize(e.ref)})"
    if isinstance(e, A.ForkSeq):
        return f"(fork {{ {print_expr(e.spawn)} }} ; {print_expr(e.body)})"
    raise TypeError(f"unprintable node {e!r}")


def _atomize(e: A.Expr) -> str:
    s = print_expr(e)
    if isinstance(e, (A.Lit, A.Var, A.BoolLit, A.UnitLit)) or s.startswith("("):
        return s
    return f"({s})"
