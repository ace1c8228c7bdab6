"""Shared random generators for the test suite (seeded, deterministic)."""

from __future__ import annotations

import itertools
import random

from finent.automata import Alt, PathExpr, Role, Semiautomaton, Seq, Star
from finent.expansion import Expansion
from finent.interp import Interp, make_interp
from finent.queries import deco_name


def random_semiautomaton(rng: random.Random, max_states: int = 3, max_letters: int = 2) -> Semiautomaton:
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_letters)
    alphabet = tuple(f"r{i}" for i in range(k))
    table = tuple(tuple(rng.randrange(n) for _ in alphabet) for _ in range(n))
    return Semiautomaton(n, alphabet, table)


def all_semiautomata(max_states: int, alphabet: tuple[str, ...]):
    for n in range(1, max_states + 1):
        cells = list(itertools.product(range(n), repeat=n * len(alphabet)))
        for flat in cells:
            table = tuple(
                tuple(flat[q * len(alphabet) + a] for a in range(len(alphabet)))
                for q in range(n)
            )
            yield Semiautomaton(n, alphabet, table)


def random_expr(rng: random.Random, roles: tuple[str, ...], depth: int = 2) -> PathExpr:
    if depth == 0 or rng.random() < 0.35:
        return Role(rng.choice(roles))
    kind = rng.choice(["star", "alt", "seq"])
    if kind == "star":
        return Star(random_expr(rng, roles, depth - 1))
    a = random_expr(rng, roles, depth - 1)
    b = random_expr(rng, roles, depth - 1)
    return Alt(a, b) if kind == "alt" else Seq(a, b)


def random_interp(
    rng: random.Random,
    size: int,
    concepts: tuple[str, ...],
    roles: tuple[str, ...],
    edge_prob: float = 0.3,
    concept_prob: float = 0.5,
) -> Interp:
    cext = {c: frozenset(e for e in range(size) if rng.random() < concept_prob) for c in concepts}
    rext = {
        r: frozenset(
            (x, y) for x in range(size) for y in range(size) if rng.random() < edge_prob
        )
        for r in roles
    }
    return make_interp(range(size), cext, rext)


def random_decorated_interp(
    rng: random.Random,
    b: Semiautomaton,
    size: int,
    min_level: int = 1,
    concepts: tuple[str, ...] = (),
    extra_edge_tries: int = 4,
) -> Interp:
    """Random decorated interpretation: a spanning forest plus consistent extras.

    Every element gets a permutation; edges follow expansion transitions,
    respect the single-incoming-role restriction, and stay at or above
    min_level.
    """
    exp = Expansion(b)
    perms: list[tuple[int, ...]] = []
    incoming: list[str | None] = [None] * size
    edges: dict[str, set[tuple[int, int]]] = {}
    all_perms = list(itertools.permutations(range(b.n)))
    for e in range(size):
        if e == 0 or rng.random() < 0.4:
            perms.append(tuple(rng.choice(all_perms)))
        else:
            parent = rng.randrange(e)
            role = rng.choice(b.alphabet)
            target, lv = exp.step(perms[parent], role)
            if lv >= min_level:
                perms.append(target)
                incoming[e] = role
                edges.setdefault(role, set()).add((parent, e))
            else:
                perms.append(tuple(rng.choice(all_perms)))
    for _ in range(extra_edge_tries * size):
        x, y = rng.randrange(size), rng.randrange(size)
        role = rng.choice(b.alphabet)
        if incoming[y] not in (None, role):
            continue
        target, lv = exp.step(perms[x], role)
        if target == perms[y] and lv >= min_level:
            incoming[y] = role
            edges.setdefault(role, set()).add((x, y))
    cext: dict[str, set[int]] = {}
    for e, p in enumerate(perms):
        for level, q in enumerate(p, start=1):
            cext.setdefault(deco_name(q, level), set()).add(e)
    for c in concepts:
        cext[c] = {e for e in range(size) if rng.random() < 0.5}
    return make_interp(range(size), cext, edges)


def words_up_to(alphabet: tuple[str, ...], max_len: int):
    for length in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=length)
