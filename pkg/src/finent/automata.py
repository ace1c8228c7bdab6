"""Path expressions and their compilation into one shared semiautomaton.

A semiautomaton is a total deterministic transition structure without
initial or final states.  Every path expression of a query contributes a
DFA; the product of all of them (restricted to states reachable from the
tuple of initial states, then minimized) is the shared carrier, and each
expression is represented by the start class plus its accepting classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


# ---------------------------------------------------------------------------
# Path expression ASTs


@dataclass(frozen=True)
class Role:
    name: str


@dataclass(frozen=True)
class Star:
    arg: "PathExpr"


@dataclass(frozen=True)
class Alt:
    left: "PathExpr"
    right: "PathExpr"


@dataclass(frozen=True)
class Seq:
    left: "PathExpr"
    right: "PathExpr"


PathExpr = Role | Star | Alt | Seq


def expr_roles(e: PathExpr) -> set[str]:
    match e:
        case Role(name):
            return {name}
        case Star(a):
            return expr_roles(a)
        case Alt(a, b) | Seq(a, b):
            return expr_roles(a) | expr_roles(b)
    raise TypeError(f"not a path expression: {e!r}")


def expr_str(e: PathExpr) -> str:
    match e:
        case Role(name):
            return name
        case Star(a):
            inner = expr_str(a)
            return f"({inner})*" if not isinstance(a, Role) else f"{inner}*"
        case Alt(a, b):
            return f"({expr_str(a)} | {expr_str(b)})"
        case Seq(a, b):
            return f"({expr_str(a)} ; {expr_str(b)})"
    raise TypeError(f"not a path expression: {e!r}")


def matches_word(e: PathExpr, word: Sequence[str]) -> bool:
    """Direct semantics: does the word belong to the expression's language?"""
    word = tuple(word)

    @lru_cache(maxsize=None)
    def go(expr: PathExpr, i: int, j: int) -> bool:
        match expr:
            case Role(name):
                return j == i + 1 and word[i] == name
            case Seq(a, b):
                return any(go(a, i, k) and go(b, k, j) for k in range(i, j + 1))
            case Alt(a, b):
                return go(a, i, j) or go(b, i, j)
            case Star(a):
                if i == j:
                    return True
                # split off a non-empty prefix matched by a
                return any(k > i and go(a, i, k) and go(expr, k, j) for k in range(i + 1, j + 1))
        raise TypeError(f"not a path expression: {expr!r}")

    return go(e, 0, len(word))


def has_empty_word(e: PathExpr) -> bool:
    match e:
        case Role(_):
            return False
        case Star(_):
            return True
        case Alt(a, b):
            return has_empty_word(a) or has_empty_word(b)
        case Seq(a, b):
            return has_empty_word(a) and has_empty_word(b)
    raise TypeError(f"not a path expression: {e!r}")


# ---------------------------------------------------------------------------
# Thompson NFA and subset construction


class _NFA:
    def __init__(self) -> None:
        self.count = 0
        self.eps: dict[int, set[int]] = {}
        self.trans: dict[tuple[int, str], set[int]] = {}

    def state(self) -> int:
        self.count += 1
        self.eps.setdefault(self.count - 1, set())
        return self.count - 1

    def add_eps(self, a: int, b: int) -> None:
        self.eps.setdefault(a, set()).add(b)

    def add(self, a: int, letter: str, b: int) -> None:
        self.trans.setdefault((a, letter), set()).add(b)

    def build(self, e: PathExpr) -> tuple[int, int]:
        match e:
            case Role(name):
                s, t = self.state(), self.state()
                self.add(s, name, t)
                return s, t
            case Seq(a, b):
                sa, ta = self.build(a)
                sb, tb = self.build(b)
                self.add_eps(ta, sb)
                return sa, tb
            case Alt(a, b):
                s, t = self.state(), self.state()
                sa, ta = self.build(a)
                sb, tb = self.build(b)
                self.add_eps(s, sa)
                self.add_eps(s, sb)
                self.add_eps(ta, t)
                self.add_eps(tb, t)
                return s, t
            case Star(a):
                s, t = self.state(), self.state()
                sa, ta = self.build(a)
                self.add_eps(s, sa)
                self.add_eps(s, t)
                self.add_eps(ta, sa)
                self.add_eps(ta, t)
                return s, t
        raise TypeError(f"not a path expression: {e!r}")

    def closure(self, states: frozenset[int]) -> frozenset[int]:
        seen = set(states)
        todo = list(states)
        while todo:
            s = todo.pop()
            for t in self.eps.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return frozenset(seen)


def _expr_dfa(e: PathExpr, alphabet: Sequence[str]) -> tuple[list[dict[str, int]], int, set[int]]:
    """Total DFA over the given alphabet: (transitions, initial, finals)."""
    nfa = _NFA()
    start, final = nfa.build(e)
    init = nfa.closure(frozenset({start}))
    index: dict[frozenset[int], int] = {init: 0}
    table: list[dict[str, int]] = [{}]
    todo = [init]
    while todo:
        cur = todo.pop(0)
        i = index[cur]
        for letter in alphabet:
            nxt = frozenset(t for s in cur for t in nfa.trans.get((s, letter), ()))
            nxt = nfa.closure(nxt)
            if nxt not in index:
                index[nxt] = len(table)
                table.append({})
                todo.append(nxt)
            table[i][letter] = index[nxt]
    finals = {i for st, i in index.items() if final in st}
    return table, 0, finals


# ---------------------------------------------------------------------------
# Semiautomaton


@dataclass(frozen=True)
class Semiautomaton:
    """Total deterministic transitions over an ordered state set."""

    n: int
    alphabet: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]   # table[state][letter index] -> state

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("a semiautomaton needs at least one state")

    def letter_index(self, letter: str) -> int:
        try:
            return self.alphabet.index(letter)
        except ValueError:
            raise KeyError(f"letter outside the alphabet: {letter}") from None

    def step(self, q: int, letter: str) -> int:
        return self.table[q][self.letter_index(letter)]

    def run(self, q: int, word: Iterable[str]) -> int:
        for letter in word:
            q = self.step(q, letter)
        return q

    def states(self) -> range:
        return range(self.n)


def _minimize(table: list[dict[str, int]], alphabet: Sequence[str], outputs: list[int]) -> tuple[list[int], int]:
    """Moore minimization w.r.t. per-state output classes; returns state->class."""
    classes = {}
    rep: dict[int, int] = {}
    cls = [0] * len(table)
    for i, out in enumerate(outputs):
        if out not in rep:
            rep[out] = len(rep)
        cls[i] = rep[out]
    k = len(rep)
    while True:
        sig: dict[tuple, int] = {}
        new_cls = [0] * len(table)
        for i, row in enumerate(table):
            signature = (cls[i],) + tuple(cls[row[a]] for a in alphabet)
            if signature not in sig:
                sig[signature] = len(sig)
            new_cls[i] = sig[signature]
        if len(sig) == k:
            return new_cls, k
        cls, k = new_cls, len(sig)


@dataclass(frozen=True)
class SharedAutomaton:
    """The shared semiautomaton plus per-expression start/accepting data."""

    automaton: Semiautomaton
    exprs: tuple[PathExpr, ...]
    start: int
    accepting: tuple[frozenset[int], ...]   # per expression

    def atom_pairs(self, expr_id: int) -> tuple[tuple[int, int], ...]:
        return tuple((self.start, q) for q in sorted(self.accepting[expr_id]))


def build_shared_automaton(exprs: Sequence[PathExpr], alphabet: Sequence[str]) -> SharedAutomaton:
    """Compile all expressions into one minimized product semiautomaton."""
    alphabet = tuple(alphabet)
    if not alphabet:
        raise ValueError("cannot compile over an empty alphabet")
    for e in exprs:
        missing = expr_roles(e) - set(alphabet)
        if missing:
            raise KeyError(f"role names outside the alphabet: {sorted(missing)}")
    if not exprs:
        table = tuple(tuple(0 for _ in alphabet) for _ in range(1))
        return SharedAutomaton(Semiautomaton(1, alphabet, table), (), 0, ())

    dfas = [_expr_dfa(e, alphabet) for e in exprs]
    # product construction restricted to states reachable from the tuple of inits
    init = tuple(d[1] for d in dfas)
    index: dict[tuple[int, ...], int] = {init: 0}
    prod: list[dict[str, int]] = [{}]
    todo = [init]
    while todo:
        cur = todo.pop(0)
        i = index[cur]
        for letter in alphabet:
            nxt = tuple(dfas[j][0][cur[j]][letter] for j in range(len(dfas)))
            if nxt not in index:
                index[nxt] = len(prod)
                prod.append({})
                todo.append(nxt)
            prod[i][letter] = index[nxt]
    # outputs: which expressions accept in this product state
    outputs = [0] * len(prod)
    for state, i in index.items():
        bits = 0
        for j, (_, _, finals) in enumerate(dfas):
            if state[j] in finals:
                bits |= 1 << j
        outputs[i] = bits
    cls, k = _minimize(prod, alphabet, outputs)
    table = [[0] * len(alphabet) for _ in range(k)]
    out_by_cls = [0] * k
    for i, row in enumerate(prod):
        for a_idx, letter in enumerate(alphabet):
            table[cls[i]][a_idx] = cls[row[letter]]
        out_by_cls[cls[i]] = outputs[i]
    automaton = Semiautomaton(k, alphabet, tuple(tuple(r) for r in table))
    accepting = tuple(
        frozenset(q for q in range(k) if out_by_cls[q] & (1 << j)) for j in range(len(exprs))
    )
    return SharedAutomaton(automaton, tuple(exprs), cls[0], accepting)


def automaton_dot(b: Semiautomaton, highlight: Iterable[int] = ()) -> str:
    hi = set(highlight)
    lines = ["digraph semiautomaton {", "  rankdir=LR;"]
    for q in range(b.n):
        shape = "doublecircle" if q in hi else "circle"
        lines.append(f'  q{q} [shape={shape} label="q{q}"];')
    for q in range(b.n):
        for i, letter in enumerate(b.alphabet):
            lines.append(f'  q{q} -> q{b.table[q][i]} [label="{letter}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
