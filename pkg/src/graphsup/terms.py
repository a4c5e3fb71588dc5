"""First-order terms used as node labels, substitutions and syntactic unification."""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Union


class NoUnifier(Exception):
    """Raised when a set of term pairs has no unifier (clash or occurs check)."""


@dataclass(frozen=True, order=True)
class TermSymbol:
    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("symbol name must be nonempty")
        if self.arity < 0:
            raise ValueError("arity must be non-negative")


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class App:
    symbol: str
    args: tuple = ()

    def __post_init__(self):
        if not self.symbol:
            raise ValueError("symbol name must be nonempty")
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __str__(self):
        if not self.args:
            return self.symbol
        return f"{self.symbol}({', '.join(str(a) for a in self.args)})"


Term = Union[Var, App]


def const(name: str) -> App:
    return App(name, ())


def fn(name: str, *args: Term) -> App:
    return App(name, tuple(args))


def variables(t: Term) -> frozenset[str]:
    """Names of the variables occurring in ``t``."""
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.add(u.name)
        else:
            stack.extend(u.args)
    return frozenset(out)


def is_ground(t: Term) -> bool:
    return not variables(t)


def symbols(t: Term) -> Iterator[TermSymbol]:
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            yield TermSymbol(u.symbol, len(u.args))
            stack.extend(u.args)


class Substitution(Mapping):
    """An immutable finite map from variable names to terms.

    Identity bindings are dropped on construction. Application is
    simultaneous: ``{x: y, y: b}`` maps ``h(x, y)`` to ``h(y, b)``.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, bindings: Mapping[str, Term] | Iterable[tuple[str, Term]] = ()):
        items = dict(bindings)
        self._map = {k: v for k, v in items.items() if v != Var(k)}
        self._hash = None

    def __getitem__(self, name):
        return self._map[name]

    def __iter__(self):
        return iter(self._map)

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._map.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        if isinstance(other, Mapping):
            return self._map == dict(other)
        return NotImplemented

    def __repr__(self):
        inner = ", ".join(f"{k} ↦ {v}" for k, v in sorted(self._map.items()))
        return "{" + inner + "}"

    def __call__(self, t: Term) -> Term:
        return apply_substitution(self, t)

    def compose(self, first: Mapping[str, Term]) -> "Substitution":
        """Return ``self ∘ first``: apply ``first``, then ``self``."""
        out = {k: apply_substitution(self, v) for k, v in first.items()}
        for k, v in self._map.items():
            out.setdefault(k, v)
        return Substitution(out)

    def is_ground(self) -> bool:
        return all(is_ground(v) for v in self._map.values())


EMPTY = Substitution()


def apply_substitution(s: Mapping[str, Term], t: Term) -> Term:
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t.name, t)
    if not t.args:
        return t
    return App(t.symbol, tuple(apply_substitution(s, a) for a in t.args))


def _occurs(name: str, t: Term) -> bool:
    return name in variables(t)


def unify(
    pairs: Iterable[tuple[Term, Term]],
    *,
    rigid: Iterable[str] = (),
    base: Mapping[str, Term] | None = None,
) -> Substitution:
    """Most general unifier of ``pairs`` (Robinson, with occurs check).

    Variables named in ``rigid`` behave like constants, which turns
    unification into one-sided matching against terms containing them.
    ``base`` is an idempotent substitution to extend. The result is
    idempotent. Raises :class:`NoUnifier`.
    """
    frozen = frozenset(rigid)
    sub: dict[str, Term] = dict(base) if base else {}
    todo = [(apply_substitution(sub, a), apply_substitution(sub, b)) for a, b in pairs]
    while todo:
        a, b = todo.pop()
        if a == b:
            continue
        if isinstance(a, Var) and a.name not in frozen:
            var, t = a, b
        elif isinstance(b, Var) and b.name not in frozen:
            var, t = b, a
        elif isinstance(a, App) and isinstance(b, App):
            if a.symbol != b.symbol or len(a.args) != len(b.args):
                raise NoUnifier(f"symbol clash: {a} vs {b}")
            todo.extend(zip(a.args, b.args))
            continue
        else:
            raise NoUnifier(f"cannot bind rigid variable: {a} vs {b}")
        if _occurs(var.name, t):
            raise NoUnifier(f"occurs check: {var} in {t}")
        step = {var.name: t}
        for k in list(sub):
            sub[k] = apply_substitution(step, sub[k])
        sub[var.name] = t
        todo = [(apply_substitution(step, x), apply_substitution(step, y)) for x, y in todo]
    return Substitution(sub)


def try_unify(pairs, *, rigid=(), base=None) -> Substitution | None:
    try:
        return unify(pairs, rigid=rigid, base=base)
    except NoUnifier:
        return None


_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh_name(name: str, reserved: set[str] | frozenset[str]) -> str:
    stem = _TRAILING_DIGITS.sub("", name) or name
    i = 0
    while f"{stem}{i}" in reserved:
        i += 1
    return f"{stem}{i}"


def fresh_renaming(names: Iterable[str], reserved: Iterable[str]) -> Substitution:
    """Injective renaming of ``names`` onto variables outside ``reserved``."""
    reserved = set(reserved)
    ordered = sorted(set(names))
    taken = reserved | set(ordered)
    out = {}
    for n in ordered:
        if n not in reserved:
            continue
        new = fresh_name(n, taken)
        taken.add(new)
        out[n] = Var(new)
    return Substitution(out)


def fresh_rename(t: Term, reserved: Iterable[str]) -> tuple[Term, Substitution]:
    """Rename the variables of ``t`` away from ``reserved``.

    >>> fresh_rename(fn("f", Var("x")), {"x"})
    (App(symbol='f', args=(Var(name='x0'),)), {x ↦ x0})
    """
    ren = fresh_renaming(variables(t), reserved)
    return apply_substitution(ren, t), ren


def anonymize(t: Term) -> tuple:
    """Shape of ``t`` with variable names erased (hashable)."""
    if isinstance(t, Var):
        return ("?",)
    return (t.symbol,) + tuple(anonymize(a) for a in t.args)
