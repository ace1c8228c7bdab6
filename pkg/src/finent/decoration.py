"""Decorated interpretations: expansion states as concept labels.

An interpretation is decorated when every element carries exactly one
permutation of the semiautomaton states (via the per-level concepts
C@q.l), no element has incoming edges over two distinct roles, and every
edge realizes the corresponding expansion transition.  The polynomial
TBox emitted here axiomatizes exactly that; elements' edge levels are the
levels of the underlying expansion transitions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .automata import Semiautomaton
from .expansion import Expansion, Perm
from .interp import Interp, make_interp
from .kb import ConjToDisj, ForallRHS, NormalCI, complement_name
from .queries import deco_name, parse_deco

TOP_NAME = "_T"


def marker_name(r: str) -> str:
    return f"Mk@{r}"


def hassucc_name(r: str, p: int, j: int) -> str:
    return f"Hs@{r}.{p}.{j}"


def record_name(r: str, i: int, j: int) -> str:
    return f"Rc@{r}.{i}.{j}"


def avail_name(r: str, i: int, j: int) -> str:
    return f"Av@{r}.{i}.{j}"


def filler_name(r: str, k: int) -> str:
    return f"Fl@{r}.{k}"


def w5_name(r: str, q: int, i: int, j: int) -> str:
    return f"W5@{r}.{q}.{i}.{j}"


def x5_name(r: str, q: int, j: int) -> str:
    return f"X5@{r}.{q}.{j}"


def pair_name(r: str, m: int, i: int, j: int) -> str:
    return f"Yp@{r}.{m}.{i}.{j}"


# ---------------------------------------------------------------------------
# Direct semantic checks


def state_of(interp: Interp, e: int, b: Semiautomaton) -> Perm | None:
    """The unique permutation decorating e, or None if ill-decorated."""
    perm = []
    for level in range(1, b.n + 1):
        states = [q for q in range(b.n) if e in interp.concept(deco_name(q, level))]
        if len(states) != 1:
            return None
        perm.append(states[0])
    if sorted(perm) != list(range(b.n)):
        return None
    return tuple(perm)


def is_decorated(interp: Interp, b: Semiautomaton) -> bool:
    """Direct check of the three decoration conditions."""
    exp = Expansion(b)
    states: dict[int, Perm] = {}
    for e in interp.domain:
        p = state_of(interp, e, b)
        if p is None:
            return False
        states[e] = p
    incoming: dict[int, str] = {}
    for role in sorted(interp.role_ext):
        if role not in b.alphabet:
            continue
        for (x, y) in interp.role(role):
            if incoming.setdefault(y, role) != role:
                return False
            target, _ = exp.step(states[x], role)
            if states[y] != target:
                return False
    return True


def edge_level(interp: Interp, b: Semiautomaton, e: int, e2: int, role: str) -> int:
    if (e, e2) not in interp.role(role):
        raise KeyError(f"no {role}-edge ({e},{e2})")
    exp = Expansion(b)
    p = state_of(interp, e, b)
    p2 = state_of(interp, e2, b)
    if p is None or p2 is None:
        raise ValueError("endpoints are not decorated")
    target, level = exp.step(p, role)
    if target != p2:
        raise ValueError("edge does not follow the expansion transition")
    return level


def min_edge_level(interp: Interp, b: Semiautomaton) -> int | None:
    """Smallest edge level, or None when the interpretation is edgeless."""
    best: int | None = None
    for role in sorted(interp.role_ext):
        if role not in b.alphabet:
            continue
        for (x, y) in sorted(interp.role(role)):
            lv = edge_level(interp, b, x, y, role)
            best = lv if best is None else min(best, lv)
    return best


def is_level(interp: Interp, b: Semiautomaton, level: int) -> bool:
    """No edge of level strictly below the bound; above n this means edgeless."""
    m = min_edge_level(interp, b)
    if m is None:
        return True
    return m >= level


# ---------------------------------------------------------------------------
# Polynomial decoration TBox


@dataclass(frozen=True)
class DecorationTBox:
    cis: tuple[NormalCI, ...]
    concept_names: tuple[str, ...]       # all auxiliary + decoration names used
    complemented: tuple[str, ...]        # names that carry complement axioms


def build_decoration_tbox(b: Semiautomaton) -> DecorationTBox:
    """Axioms whose models are exactly the decorated interpretations.

    Auxiliary concepts encode, per source element, the first-appearance
    listing of successor states: Hs (observes a successor position), Rc
    (records the image position), Av (the next free position counter,
    indexed up to n+1), and Fl (start of the tail of leftover states,
    which must ascend in the base order).
    """
    n = b.n
    cis: list[NormalCI] = []
    names: set[str] = {TOP_NAME}
    complemented: set[str] = set()

    def emit(ci: NormalCI) -> None:
        cis.append(ci)

    def complement_pair(x: str) -> None:
        if x in complemented:
            return
        complemented.add(x)
        names.add(x)
        names.add(complement_name(x))
        emit(ConjToDisj((), tuple(sorted((x, complement_name(x))))))
        emit(ConjToDisj(tuple(sorted((x, complement_name(x)))), ()))

    # single incoming role
    emit(ConjToDisj((), (TOP_NAME,)))
    for r in b.alphabet:
        names.add(marker_name(r))
        emit(ForallRHS(TOP_NAME, r, marker_name(r)))
    for r, s in itertools.combinations(b.alphabet, 2):
        emit(ConjToDisj(tuple(sorted((marker_name(r), marker_name(s)))), ()))

    # permutation shape of the decoration
    for level in range(1, n + 1):
        row = tuple(sorted(deco_name(q, level) for q in range(n)))
        names.update(row)
        emit(ConjToDisj((), row))
        for q, q2 in itertools.combinations(range(n), 2):
            emit(ConjToDisj(tuple(sorted((deco_name(q, level), deco_name(q2, level)))), ()))
    for q in range(n):
        for l1, l2 in itertools.combinations(range(1, n + 1), 2):
            emit(ConjToDisj(tuple(sorted((deco_name(q, l1), deco_name(q, l2)))), ()))

    for r in b.alphabet:
        # observation of successor positions (contrapositive of exists-lhs)
        for p in range(n):
            for j in range(1, n + 1):
                hs = hassucc_name(r, p, j)
                complement_pair(hs)
                complement_pair(deco_name(p, j))
                emit(ForallRHS(complement_name(hs), r, complement_name(deco_name(p, j))))
        # the first free position starts at 1
        names.add(avail_name(r, 1, 1))
        emit(ConjToDisj((), (avail_name(r, 1, 1),)))
        for q in range(n):
            tgt = b.step(q, r)
            for j in range(1, n + 1):
                x5 = x5_name(r, q, j)
                names.add(x5)
                emit(ConjToDisj((x5,), tuple(sorted(deco_name(tgt, k) for k in range(1, j + 1)))))
                for i in range(1, n + 1):
                    w5 = w5_name(r, q, i, j)
                    names.add(w5)
                    emit(ConjToDisj(tuple(sorted((deco_name(q, i), avail_name(r, i, j)))), (w5,)))
                    emit(ForallRHS(w5, r, x5))
                    # record where the image of the level-i state landed
                    emit(
                        ConjToDisj(
                            tuple(sorted((deco_name(q, i), hassucc_name(r, tgt, j)))),
                            (record_name(r, i, j),),
                        )
                    )
                    names.add(record_name(r, i, j))
        # counter updates
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                names.add(avail_name(r, i, j))
                names.add(avail_name(r, i + 1, j))
                if j + 1 <= n + 1:
                    names.add(avail_name(r, i + 1, j + 1))
                    emit(
                        ConjToDisj(
                            tuple(sorted((record_name(r, i, j), avail_name(r, i, j)))),
                            (avail_name(r, i + 1, j + 1),),
                        )
                    )
                for j2 in range(1, j):
                    emit(
                        ConjToDisj(
                            tuple(sorted((record_name(r, i, j2), avail_name(r, i, j)))),
                            (avail_name(r, i + 1, j),),
                        )
                    )
        # leftover tail: the final counter is pushed to successors
        for k in range(1, n + 2):
            names.add(filler_name(r, k))
            emit(ForallRHS(avail_name(r, n + 1, k), r, filler_name(r, k)))
        for k in range(1, n + 1):
            for m in range(k, n):
                options = []
                for qi, qj in itertools.combinations(range(n), 2):
                    yp = pair_name(r, m, qi, qj)
                    names.add(yp)
                    emit(ConjToDisj((yp,), (deco_name(qi, m),)))
                    emit(ConjToDisj((yp,), (deco_name(qj, m + 1),)))
                    options.append(yp)
                emit(ConjToDisj((filler_name(r, k),), tuple(sorted(options))))
        # functional consistency of the bookkeeping
        for i in range(1, n + 2):
            for j, j2 in itertools.combinations(range(1, n + 2), 2):
                emit(ConjToDisj(tuple(sorted((avail_name(r, i, j), avail_name(r, i, j2)))), ()))
        for i in range(1, n + 1):
            for j, j2 in itertools.combinations(range(1, n + 1), 2):
                emit(ConjToDisj(tuple(sorted((record_name(r, i, j), record_name(r, i, j2)))), ()))
        for k, k2 in itertools.combinations(range(1, n + 2), 2):
            emit(ConjToDisj(tuple(sorted((filler_name(r, k), filler_name(r, k2)))), ()))

    uniq = tuple(sorted(set(cis), key=lambda ci: (type(ci).__name__, ci)))
    return DecorationTBox(uniq, tuple(sorted(names)), tuple(sorted(complemented)))


def satisfies_tbox(interp: Interp, cis: Iterable[NormalCI]) -> bool:
    for ci in cis:
        match ci:
            case ConjToDisj(lhs, rhs):
                for d in interp.domain:
                    if all(d in interp.concept(a) for a in lhs):
                        if not any(d in interp.concept(bn) for bn in rhs):
                            return False
            case ForallRHS(a, r, bn):
                ext = interp.concept(a)
                for (x, y) in interp.role(r):
                    if x in ext and y not in interp.concept(bn):
                        return False
            case _:
                raise TypeError(f"unexpected CI shape: {ci!r}")
    return True


def canonical_aux_completion(interp: Interp, b: Semiautomaton) -> Interp:
    """Extend a decoration-labeled interpretation with canonical auxiliaries.

    For decorated inputs the result satisfies the decoration TBox; for
    ill-decorated inputs it needn't.
    """
    n = b.n
    dom = frozenset(interp.domain)
    ext: dict[str, set[int]] = {TOP_NAME: set(dom)}

    def add(name: str, elems: Iterable[int]) -> None:
        ext.setdefault(name, set()).update(elems)

    for r in b.alphabet:
        pairs = sorted(interp.role(r))
        add(marker_name(r), (y for _, y in pairs))
        succs: dict[int, list[int]] = {}
        for (x, y) in pairs:
            succs.setdefault(x, []).append(y)
        # observations
        for p in range(n):
            for j in range(1, n + 1):
                target = interp.concept(deco_name(p, j))
                holders = {x for x, ys in succs.items() if any(y in target for y in ys)}
                add(hassucc_name(r, p, j), holders)
        # records per element
        for d in sorted(dom):
            for i in range(1, n + 1):
                for q in range(n):
                    if d not in interp.concept(deco_name(q, i)):
                        continue
                    tgt = b.step(q, r)
                    for j in range(1, n + 1):
                        if d in ext.get(hassucc_name(r, tgt, j), ()):
                            add(record_name(r, i, j), [d])
        # counters
        final_counter: dict[int, int] = {}
        for d in sorted(dom):
            counter = 1
            add(avail_name(r, 1, 1), [d])
            ok = True
            for i in range(1, n + 1):
                recs = [j for j in range(1, n + 1) if d in ext.get(record_name(r, i, j), ())]
                if not recs:
                    ok = False
                    break
                if counter in recs:
                    counter += 1
                elif all(j < counter for j in recs):
                    pass
                else:
                    ok = False
                    break
                add(avail_name(r, i + 1, counter), [d])
            if ok:
                final_counter[d] = counter
        for (x, y) in pairs:
            if x in final_counter:
                add(filler_name(r, final_counter[x]), [y])
        # helper names
        for q in range(n):
            tgt = b.step(q, r)
            for j in range(1, n + 1):
                x5 = set()
                for k in range(1, j + 1):
                    x5 |= set(interp.concept(deco_name(tgt, k)))
                add(x5_name(r, q, j), x5)
                for i in range(1, n + 1):
                    w5 = set(interp.concept(deco_name(q, i))) & set(
                        ext.get(avail_name(r, i, j), ())
                    )
                    add(w5_name(r, q, i, j), w5)
        for m in range(1, n):
            for qi, qj in itertools.combinations(range(n), 2):
                yp = set(interp.concept(deco_name(qi, m))) & set(
                    interp.concept(deco_name(qj, m + 1))
                )
                add(pair_name(r, m, qi, qj), yp)

    # complements for the names that carry complement axioms
    tbox = build_decoration_tbox(b)
    for name in tbox.complemented:
        have = set(ext.get(name, set())) | set(interp.concept(name))
        ext[name] = have
        ext[complement_name(name)] = set(dom) - have
    merged = {k: frozenset(v) for k, v in ext.items() if v}
    return interp.with_concepts(merged)


# ---------------------------------------------------------------------------
# Product with the expansion


@dataclass(frozen=True)
class ProductResult:
    interp: Interp
    element_of: Mapping[int, tuple[int, str, Perm]]    # product id -> (base, role, perm)
    id_of: Mapping[tuple[int, str, Perm], int]


def product(
    interp: Interp,
    b: Semiautomaton,
    seeds: Sequence[tuple[int, str, Perm]] | None = None,
    max_elements: int = 20000,
) -> ProductResult:
    """Forward-closed part of the product of an interpretation with the expansion.

    Elements are triples (base element, incoming role tag, permutation);
    only elements reachable from the seeds are materialized, which keeps
    the factorial blow-up in check while preserving modelhood and query
    satisfaction on the closed part.
    """
    exp = Expansion(b)
    if seeds is None:
        r0 = b.alphabet[0]
        seeds = [(e, r0, exp.identity()) for e in interp.domain]
    ids: dict[tuple[int, str, Perm], int] = {}
    order: list[tuple[int, str, Perm]] = []

    def intern(key: tuple[int, str, Perm]) -> int:
        if key not in ids:
            if len(ids) >= max_elements:
                raise ResourceWarning("product exceeds the element budget")
            ids[key] = len(order)
            order.append(key)
        return ids[key]

    todo = [intern(s) for s in seeds]
    roles: dict[str, set[tuple[int, int]]] = {}
    seen_edges: set[tuple[int, str, int]] = set()
    while todo:
        i = todo.pop(0)
        e, _, p = order[i]
        for role in b.alphabet:
            target_perm, _ = exp.step(p, role)
            for (x, y) in interp.role(role):
                if x != e:
                    continue
                key = (y, role, target_perm)
                fresh = key not in ids
                j = intern(key)
                if (i, role, j) not in seen_edges:
                    seen_edges.add((i, role, j))
                    roles.setdefault(role, set()).add((i, j))
                if fresh:
                    todo.append(j)

    concepts: dict[str, set[int]] = {}
    for name, elems in interp.concept_ext.items():
        lifted = {i for i, (e, _, _) in enumerate(order) if e in elems}
        if lifted:
            concepts[name] = lifted
    for q in range(b.n):
        for level in range(1, b.n + 1):
            holders = {i for i, (_, _, p) in enumerate(order) if p[level - 1] == q}
            if holders:
                concepts[deco_name(q, level)] = holders
    individuals = {}
    for name, e in interp.individuals.items():
        for i, (e2, _, _) in enumerate(order):
            if e2 == e:
                individuals[name] = i
                break
    out = make_interp(range(len(order)), concepts, roles, individuals)
    return ProductResult(out, dict(enumerate(order)), ids)


def rpq_reach_equivalence(
    interp: Interp, b: Semiautomaton, q: int, q2: int, level: int
) -> list[tuple[int, int, bool, bool]]:
    """Per element pair: automaton-guided vs plain reachability.

    Considers pairs (e, e2) with e labeled C@q.level and e2 labeled
    C@q2.level; requires a level-bounded decorated interpretation.
    """
    if not is_level(interp, b, level):
        raise ValueError("interpretation has edges below the requested level")
    from .queries import Evaluator

    ev = Evaluator(interp, b)
    rpq = ev.reach(q, q2)
    adj: dict[int, set[int]] = {e: set() for e in interp.domain}
    for role in interp.role_ext:
        if role not in b.alphabet:
            continue
        for (x, y) in interp.role(role):
            adj[x].add(y)
    out = []
    for e in sorted(interp.concept(deco_name(q, level))):
        seen = {e}
        todo = [e]
        while todo:
            for y in adj[todo.pop()]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        for e2 in sorted(interp.concept(deco_name(q2, level))):
            out.append((e, e2, (e, e2) in rpq, e2 in seen))
    return out


def decorated_dot(interp: Interp, b: Semiautomaton) -> str:
    lines = ["digraph decorated {", "  rankdir=LR;"]
    for e in interp.domain:
        p = state_of(interp, e, b)
        plain = sorted(
            name for name, ext in interp.concept_ext.items() if e in ext and parse_deco(name) is None
        )
        label = f"{e} {tuple(p) if p else '?'} {','.join(plain)}"
        lines.append(f'  e{e} [shape=box label="{label}"];')
    for role in sorted(interp.role_ext):
        for (x, y) in sorted(interp.role(role)):
            try:
                lv = edge_level(interp, b, x, y, role)
                lines.append(f'  e{x} -> e{y} [label="{role}/{lv}"];')
            except (ValueError, KeyError):
                lines.append(f'  e{x} -> e{y} [label="{role}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
