"""Type representations and a small monomorphic unifier.

Each language uses a subset:

  cc     nat | a -> b | cont a
  delim  nat | (s/a -> t/b) | cont(t, a)      (answer types on arrows/conts)
  embed  nat | unit | a -> b | ref a
  aff    nat | bool | unit | a * b | a -o b | ref a

No polymorphism or generalization; unification only resolves the flexible
variables introduced by unannotated binders.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class TVar(Type):
    id: int

    def __str__(self):
        return f"'t{self.id}"


@dataclass(frozen=True)
class TNat(Type):
    def __str__(self):
        return "nat"


@dataclass(frozen=True)
class TBool(Type):
    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class TUnit(Type):
    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class TArrow(Type):
    a: Type
    b: Type

    def __str__(self):
        return f"({self.a} -> {self.b})"


@dataclass(frozen=True)
class TContCc(Type):
    t: Type

    def __str__(self):
        return f"cont {self.t}"


@dataclass(frozen=True)
class TArrowD(Type):
    """Delimited-control arrow s/a -> t/b: answer types at the call site."""

    s: Type
    a: Type
    t: Type
    b: Type

    def __str__(self):
        return f"({self.s}/{self.a} -> {self.t}/{self.b})"


@dataclass(frozen=True)
class TContD(Type):
    t: Type
    a: Type

    def __str__(self):
        return f"cont({self.t}, {self.a})"


@dataclass(frozen=True)
class TRef(Type):
    t: Type

    def __str__(self):
        return f"ref {self.t}"


@dataclass(frozen=True)
class TTensor(Type):
    a: Type
    b: Type

    def __str__(self):
        return f"({self.a} * {self.b})"


@dataclass(frozen=True)
class TLolli(Type):
    a: Type
    b: Type

    def __str__(self):
        return f"({self.a} -o {self.b})"


NAT = TNat()
BOOL = TBool()
UNIT_T = TUnit()

_COMPOUND_FIELDS = {
    TArrow: ("a", "b"),
    TContCc: ("t",),
    TArrowD: ("s", "a", "t", "b"),
    TContD: ("t", "a"),
    TRef: ("t",),
    TTensor: ("a", "b"),
    TLolli: ("a", "b"),
}


class TypeErr(Exception):
    def __init__(self, rule: str, detail: str = ""):
        super().__init__(f"{rule}" + (f": {detail}" if detail else ""))
        self.rule = rule


class Unifier:
    def __init__(self):
        self.subst: Dict[int, Type] = {}
        self._next = 0

    def fresh(self) -> TVar:
        self._next += 1
        return TVar(self._next)

    def walk(self, t: Type) -> Type:
        while isinstance(t, TVar) and t.id in self.subst:
            t = self.subst[t.id]
        return t

    def resolve(self, t: Type) -> Type:
        t = self.walk(t)
        cls = type(t)
        if cls in _COMPOUND_FIELDS:
            return cls(*(self.resolve(getattr(t, f)) for f in _COMPOUND_FIELDS[cls]))
        return t

    def occurs(self, v: TVar, t: Type) -> bool:
        t = self.walk(t)
        if isinstance(t, TVar):
            return t.id == v.id
        cls = type(t)
        if cls in _COMPOUND_FIELDS:
            return any(self.occurs(v, getattr(t, f)) for f in _COMPOUND_FIELDS[cls])
        return False

    def unify(self, a: Type, b: Type, rule: str = "unify"):
        a = self.walk(a)
        b = self.walk(b)
        if isinstance(a, TVar):
            if isinstance(b, TVar) and a.id == b.id:
                return
            if self.occurs(a, b):
                raise TypeErr(rule, f"recursive type {a} = {b}")
            self.subst[a.id] = b
            return
        if isinstance(b, TVar):
            self.unify(b, a, rule)
            return
        if type(a) is not type(b):
            raise TypeErr(rule, f"{self.resolve(a)} vs {self.resolve(b)}")
        cls = type(a)
        if cls in _COMPOUND_FIELDS:
            for f in _COMPOUND_FIELDS[cls]:
                self.unify(getattr(a, f), getattr(b, f), rule)
            return
        # identical nullary constructors
        return

    def is_free_var(self, t: Type) -> bool:
        return isinstance(self.walk(t), TVar)
