"""Conjunctive regular path queries over a shared semiautomaton.

A compiled CRPQ keeps unary atoms (including decoration concepts),
direct edge atoms, and path atoms given by state pairs of the shared
semiautomaton.  Variables are non-negative ints, individuals are
strings.  Equality of queries is modulo a canonical variable renaming.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .automata import PathExpr, Semiautomaton, SharedAutomaton, build_shared_automaton, expr_roles
from .interp import Interp

Term = int | str

DECO_PREFIX = "C@"


def deco_name(q: int, level: int) -> str:
    return f"{DECO_PREFIX}{q}.{level}"


def parse_deco(name: str) -> tuple[int, int] | None:
    if not name.startswith(DECO_PREFIX):
        return None
    q, _, l = name[len(DECO_PREFIX):].partition(".")
    return int(q), int(l)


def term_key(t: Term) -> tuple:
    return (0, t, "") if isinstance(t, int) else (1, -1, t)


@dataclass(frozen=True)
class CRPQ:
    unary: tuple[tuple[str, Term], ...]
    edges: tuple[tuple[str, Term, Term], ...]
    rpqs: tuple[tuple[int, int, Term, Term], ...]

    def variables(self) -> tuple[int, ...]:
        vs: set[int] = set()
        for _, t in self.unary:
            if isinstance(t, int):
                vs.add(t)
        for _, t, t2 in self.edges:
            vs.update(x for x in (t, t2) if isinstance(x, int))
        for _, _, t, t2 in self.rpqs:
            vs.update(x for x in (t, t2) if isinstance(x, int))
        return tuple(sorted(vs))

    def individuals(self) -> tuple[str, ...]:
        out: set[str] = set()
        for _, t in self.unary:
            if isinstance(t, str):
                out.add(t)
        for _, t, t2 in self.edges:
            out.update(x for x in (t, t2) if isinstance(x, str))
        for _, _, t, t2 in self.rpqs:
            out.update(x for x in (t, t2) if isinstance(x, str))
        return tuple(sorted(out))

    def terms(self) -> tuple[Term, ...]:
        return tuple(self.variables()) + tuple(self.individuals())

    def atom_count(self) -> int:
        return len(self.unary) + len(self.edges) + len(self.rpqs)

    def states_used(self) -> set[int]:
        out: set[int] = set()
        for q, q2, _, _ in self.rpqs:
            out.update((q, q2))
        for name, _ in self.unary:
            d = parse_deco(name)
            if d:
                out.add(d[0])
        return out


def make_crpq(
    unary: Iterable[tuple[str, Term]] = (),
    edges: Iterable[tuple[str, Term, Term]] = (),
    rpqs: Iterable[tuple[int, int, Term, Term]] = (),
) -> CRPQ:
    return CRPQ(
        tuple(sorted(set(unary), key=lambda a: (a[0], term_key(a[1])))),
        tuple(sorted(set(edges), key=lambda a: (a[0], term_key(a[1]), term_key(a[2])))),
        tuple(sorted(set(rpqs), key=lambda a: (a[0], a[1], term_key(a[2]), term_key(a[3])))),
    )


def rename_crpq(crpq: CRPQ, mapping: Mapping[int, Term]) -> CRPQ:
    def m(t: Term) -> Term:
        return mapping.get(t, t) if isinstance(t, int) else t

    return make_crpq(
        ((c, m(t)) for c, t in crpq.unary),
        ((r, m(t), m(t2)) for r, t, t2 in crpq.edges),
        ((q, q2, m(t), m(t2)) for q, q2, t, t2 in crpq.rpqs),
    )


def is_connected(crpq: CRPQ) -> bool:
    """Connectivity over all terms through binary atoms."""
    terms = set(crpq.terms())
    if len(terms) <= 1:
        return True
    adj: dict[Term, set[Term]] = {t: set() for t in terms}
    for _, t, t2 in crpq.edges:
        adj[t].add(t2)
        adj[t2].add(t)
    for _, _, t, t2 in crpq.rpqs:
        adj[t].add(t2)
        adj[t2].add(t)
    start = next(iter(terms))
    seen = {start}
    todo = [start]
    while todo:
        for u in adj[todo.pop()]:
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return seen == terms


_MAX_CANON_PERMS = 40320


def canonical(crpq: CRPQ) -> tuple[CRPQ, dict[int, int]]:
    """Canonical variable renaming: the one minimizing the atom tuple.

    Variables are first partitioned by local invariants; only orderings
    compatible with the invariant classes are tried.
    """
    vs = list(crpq.variables())
    if not vs:
        return crpq, {}
    sig: dict[int, list] = {v: [] for v in vs}
    for c, t in crpq.unary:
        if isinstance(t, int):
            sig[t].append(("u", c))
    for r, t, t2 in crpq.edges:
        if isinstance(t, int):
            sig[t].append(("e>", r, t2 if isinstance(t2, str) else ("*", t == t2)))
        if isinstance(t2, int):
            sig[t2].append(("e<", r, t if isinstance(t, str) else ("*", t == t2)))
    for q, q2, t, t2 in crpq.rpqs:
        if isinstance(t, int):
            sig[t].append(("b>", q, q2, t2 if isinstance(t2, str) else ("*", t == t2)))
        if isinstance(t2, int):
            sig[t2].append(("b<", q, q2, t if isinstance(t, str) else ("*", t == t2)))
    keyed = sorted(vs, key=lambda v: (sorted(sig[v]), v))
    classes: list[list[int]] = []
    for v in keyed:
        if classes and sorted(sig[classes[-1][0]]) == sorted(sig[v]):
            classes[-1].append(v)
        else:
            classes.append([v])
    total = 1
    for c in classes:
        for i in range(2, len(c) + 1):
            total *= i
        if total > _MAX_CANON_PERMS:
            raise ValueError("query too symmetric to canonicalize within budget")
    best: tuple | None = None
    best_map: dict[int, int] | None = None
    for perm_parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for part in perm_parts for v in part]
        mapping = {v: i for i, v in enumerate(order)}
        cand = rename_crpq(crpq, mapping)
        key = (cand.unary, cand.edges, cand.rpqs)
        if best is None or key < best:
            best = key
            best_map = mapping
    assert best_map is not None
    return rename_crpq(crpq, best_map), best_map


def crpq_sort_key(crpq: CRPQ) -> tuple:
    return (
        len(crpq.variables()),
        crpq.atom_count(),
        tuple((c, term_key(t)) for c, t in crpq.unary),
        tuple((r, term_key(t), term_key(t2)) for r, t, t2 in crpq.edges),
        tuple((q, q2, term_key(t), term_key(t2)) for q, q2, t, t2 in crpq.rpqs),
    )


# ---------------------------------------------------------------------------
# Decorations


def decoration_levels(crpq: CRPQ, t: Term, q: int) -> tuple[int, ...]:
    out = []
    for name, tt in crpq.unary:
        if tt == t:
            d = parse_deco(name)
            if d and d[0] == q:
                out.append(d[1])
    return tuple(sorted(out))


def atom_levels(crpq: CRPQ, atom: tuple[int, int, Term, Term]) -> tuple[int, int] | None:
    """(begin, end) levels of a path atom, if uniquely decorated."""
    q, q2, t, t2 = atom
    lb = decoration_levels(crpq, t, q)
    le = decoration_levels(crpq, t2, q2)
    if len(lb) == 1 and len(le) == 1:
        return lb[0], le[0]
    return None


def well_decorated(crpq: CRPQ) -> bool:
    for atom in crpq.rpqs:
        lv = atom_levels(crpq, atom)
        if lv is None or lv[0] < lv[1]:
            return False
    return True


def has_level(crpq: CRPQ, level: int) -> bool:
    """No path atom ends strictly below the given level."""
    for atom in crpq.rpqs:
        lv = atom_levels(crpq, atom)
        if lv is None or lv[1] < level:
            return False
    return True


def completions(crpq: CRPQ, b: Semiautomaton) -> tuple[CRPQ, ...]:
    """All minimal decorations of the path-atom endpoints, begin >= end."""
    n = b.n
    needed: list[tuple[Term, int]] = []
    for q, q2, t, t2 in crpq.rpqs:
        for tt, qq in ((t, q), (t2, q2)):
            existing = decoration_levels(crpq, tt, qq)
            if len(existing) > 1:
                return ()
            if len(existing) == 0 and (tt, qq) not in needed:
                needed.append((tt, qq))
    needed.sort(key=lambda p: (term_key(p[0]), p[1]))
    out: list[CRPQ] = []
    for levels in itertools.product(range(1, n + 1), repeat=len(needed)):
        assignment = dict(zip(needed, levels))
        extra = [(deco_name(q, l), t) for (t, q), l in assignment.items()]
        cand = make_crpq(tuple(crpq.unary) + tuple(extra), crpq.edges, crpq.rpqs)
        if well_decorated(cand):
            out.append(cand)
    seen = set()
    uniq = []
    for c in out:
        key = canonical(c)[0]
        if key not in seen:
            seen.add(key)
            uniq.append(c)
    return tuple(sorted(uniq, key=crpq_sort_key))


# ---------------------------------------------------------------------------
# Parsed queries and compilation


@dataclass(frozen=True)
class ParsedCRPQ:
    unary: tuple[tuple[str, Term], ...] = ()
    edges: tuple[tuple[str, Term, Term], ...] = ()
    paths: tuple[tuple[PathExpr, Term, Term], ...] = ()

    def concept_names(self) -> set[str]:
        return {c for c, _ in self.unary}

    def role_names(self) -> set[str]:
        out = {r for r, _, _ in self.edges}
        for e, _, _ in self.paths:
            out |= expr_roles(e)
        return out


@dataclass(frozen=True)
class CompiledUCRPQ:
    shared: SharedAutomaton
    crpqs: tuple[CRPQ, ...]
    stats: Mapping[str, int] = field(default_factory=dict)

    @property
    def automaton(self) -> Semiautomaton:
        return self.shared.automaton


def compile_ucrpq(parsed: Sequence[ParsedCRPQ], alphabet: Sequence[str]) -> CompiledUCRPQ:
    """Rewrite a parsed union of CRPQs over one shared semiautomaton.

    Each path atom becomes a disjunction over accepting end states, taken
    as alternative CRPQs of the union.
    """
    exprs: list[PathExpr] = []
    for p in parsed:
        for e, _, _ in p.paths:
            if e not in exprs:
                exprs.append(e)
    shared = build_shared_automaton(exprs, alphabet)
    crpqs: list[CRPQ] = []
    seen: set[CRPQ] = set()
    for p in parsed:
        choices = []
        for e, t, t2 in p.paths:
            pairs = shared.atom_pairs(exprs.index(e))
            choices.append([(q, q2, t, t2) for q, q2 in pairs])
        for combo in itertools.product(*choices):
            cand = make_crpq(p.unary, p.edges, combo)
            key = canonical(cand)[0]
            if key not in seen:
                seen.add(key)
                crpqs.append(cand)
    crpqs.sort(key=crpq_sort_key)
    max_expr = max((_expr_size(e) for e in exprs), default=0)
    stats = {
        "expressions": len(exprs),
        "max_expression_size": max_expr,
        "automaton_states": shared.automaton.n,
        "crpqs": len(crpqs),
    }
    return CompiledUCRPQ(shared, tuple(crpqs), stats)


def _expr_size(e: PathExpr) -> int:
    from .automata import Alt, Role, Seq, Star

    match e:
        case Role(_):
            return 1
        case Star(a):
            return 1 + _expr_size(a)
        case Alt(a, b) | Seq(a, b):
            return 1 + _expr_size(a) + _expr_size(b)
    raise TypeError


def completion_of_ucrpq(compiled: CompiledUCRPQ) -> CompiledUCRPQ:
    """Union of all completions of all member CRPQs, deduplicated."""
    out: list[CRPQ] = []
    seen: set[CRPQ] = set()
    for crpq in compiled.crpqs:
        for c in completions(crpq, compiled.automaton):
            key = canonical(c)[0]
            if key not in seen:
                seen.add(key)
                out.append(key)
    out.sort(key=crpq_sort_key)
    stats = dict(compiled.stats)
    stats["completions"] = len(out)
    return CompiledUCRPQ(compiled.shared, tuple(out), stats)


# ---------------------------------------------------------------------------
# Evaluation


class Evaluator:
    """Match enumeration for compiled CRPQs over one interpretation.

    Path atoms are answered by reachability in the product of the
    interpretation's edges with the semiautomaton; the product relation
    is cached per start state.
    """

    def __init__(self, interp: Interp, b: Semiautomaton):
        self.interp = interp
        self.b = b
        self._succ: dict[int, list[tuple[str, int]]] | None = None
        self._reach: dict[tuple[int, int], frozenset[tuple[int, int]]] = {}

    def _successors(self) -> dict[int, list[tuple[str, int]]]:
        if self._succ is None:
            succ: dict[int, list[tuple[str, int]]] = {e: [] for e in self.interp.domain}
            for role, pairs in sorted(self.interp.role_ext.items()):
                if role not in self.b.alphabet:
                    continue
                for (x, y) in sorted(pairs):
                    succ[x].append((role, y))
            self._succ = succ
        return self._succ

    def reach(self, q: int, q2: int) -> frozenset[tuple[int, int]]:
        """All element pairs (e, e2) connected by a word driving q to q2."""
        key = (q, q2)
        if key in self._reach:
            return self._reach[key]
        succ = self._successors()
        pairs: set[tuple[int, int]] = set()
        for e in self.interp.domain:
            seen = {(e, q)}
            todo = [(e, q)]
            while todo:
                cur_e, cur_q = todo.pop()
                for role, y in succ[cur_e]:
                    nxt = (y, self.b.step(cur_q, role))
                    if nxt not in seen:
                        seen.add(nxt)
                        todo.append(nxt)
            for (e2, qq) in seen:
                if qq == q2:
                    pairs.add((e, e2))
        result = frozenset(pairs)
        self._reach[key] = result
        return result

    def witness_path(self, q: int, q2: int, e: int, e2: int) -> list[tuple[int, str, int]] | None:
        """A shortest witnessing path as (source, role, target) steps."""
        succ = self._successors()
        start = (e, q)
        parents: dict[tuple[int, int], tuple[tuple[int, int], str] | None] = {start: None}
        queue = [start]
        while queue:
            cur = queue.pop(0)
            if cur == (e2, q2):
                steps: list[tuple[int, str, int]] = []
                node = cur
                while parents[node] is not None:
                    prev, role = parents[node]  # type: ignore[misc]
                    steps.append((prev[0], role, node[0]))
                    node = prev
                return list(reversed(steps))
            for role, y in succ[cur[0]]:
                nxt = (y, self.b.step(cur[1], role))
                if nxt not in parents:
                    parents[nxt] = (cur, role)
                    queue.append(nxt)
        return None

    def matches(self, crpq: CRPQ) -> Iterator[dict[Term, int]]:
        interp = self.interp
        for a in crpq.individuals():
            if a not in interp.individuals:
                return
        base: dict[Term, int] = {a: interp.individuals[a] for a in crpq.individuals()}
        vs = list(crpq.variables())
        # candidate domains narrowed by unary atoms
        cands: dict[int, list[int]] = {}
        for v in vs:
            dom = set(interp.domain)
            for name, t in crpq.unary:
                if t == v:
                    dom &= interp.concept(name)
            cands[v] = sorted(dom)
        for name, t in crpq.unary:
            if isinstance(t, str) and base[t] not in interp.concept(name):
                return
        # order variables: most constrained first
        touch: dict[int, int] = {v: 0 for v in vs}
        for _, t, t2 in crpq.edges:
            for x in (t, t2):
                if isinstance(x, int):
                    touch[x] += 1
        for _, _, t, t2 in crpq.rpqs:
            for x in (t, t2):
                if isinstance(x, int):
                    touch[x] += 1
        order = sorted(vs, key=lambda v: (len(cands[v]), -touch[v], v))

        edges = crpq.edges
        rpqs = crpq.rpqs

        def consistent(assign: dict[Term, int]) -> bool:
            for r, t, t2 in edges:
                a, b2 = assign.get(t), assign.get(t2)
                if a is not None and b2 is not None and (a, b2) not in interp.role(r):
                    return False
            for q, q2, t, t2 in rpqs:
                a, b2 = assign.get(t), assign.get(t2)
                if a is not None and b2 is not None and (a, b2) not in self.reach(q, q2):
                    return False
            return True

        def backtrack(i: int, assign: dict[Term, int]) -> Iterator[dict[Term, int]]:
            if i == len(order):
                yield dict(assign)
                return
            v = order[i]
            for e in cands[v]:
                assign[v] = e
                if consistent(assign):
                    yield from backtrack(i + 1, assign)
                del assign[v]

        if not consistent(base):
            return
        yield from backtrack(0, dict(base))

    def satisfies(self, crpq: CRPQ) -> bool:
        return next(self.matches(crpq), None) is not None

    def match_with_witnesses(
        self, crpq: CRPQ
    ) -> Iterator[tuple[dict[Term, int], dict[tuple[int, int, Term, Term], list[tuple[int, str, int]]]]]:
        for m in self.matches(crpq):
            wit = {}
            ok = True
            for atom in crpq.rpqs:
                q, q2, t, t2 = atom
                path = self.witness_path(q, q2, m[t], m[t2])
                if path is None:
                    ok = False
                    break
                wit[atom] = path
            if ok:
                yield m, wit


def satisfies_ucrpq(interp: Interp, compiled: CompiledUCRPQ) -> bool:
    ev = Evaluator(interp, compiled.automaton)
    return any(ev.satisfies(c) for c in compiled.crpqs)
