"""ALC concepts, normal-form concept inclusions, and knowledge bases.

A loaded knowledge base keeps its TBox in three normal shapes only
(conjunction-of-names below disjunction-of-names, name below exists,
name below forall) over a complement-closed concept signature.  The
original concept inclusions are retained so that brute-force tooling can
evaluate them directly, independently of the normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

# ---------------------------------------------------------------------------
# Concept ASTs


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Not:
    arg: "Concept"


@dataclass(frozen=True)
class And:
    left: "Concept"
    right: "Concept"


@dataclass(frozen=True)
class Or:
    left: "Concept"
    right: "Concept"


@dataclass(frozen=True)
class Exists:
    role: str
    arg: "Concept"


@dataclass(frozen=True)
class Forall:
    role: str
    arg: "Concept"


Concept = Union[Atom, Top, Bottom, Not, And, Or, Exists, Forall]


def conj(parts: Iterable[Concept]) -> Concept:
    parts = list(parts)
    if not parts:
        return Top()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Concept]) -> Concept:
    parts = list(parts)
    if not parts:
        return Bottom()
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def nnf(c: Concept, negate: bool = False) -> Concept:
    """Negation normal form; negations end up on concept names only."""
    match c:
        case Atom(name):
            return Not(Atom(name)) if negate else c
        case Top():
            return Bottom() if negate else c
        case Bottom():
            return Top() if negate else c
        case Not(arg):
            return nnf(arg, not negate)
        case And(a, b):
            if negate:
                return Or(nnf(a, True), nnf(b, True))
            return And(nnf(a, False), nnf(b, False))
        case Or(a, b):
            if negate:
                return And(nnf(a, True), nnf(b, True))
            return Or(nnf(a, False), nnf(b, False))
        case Exists(r, arg):
            if negate:
                return Forall(r, nnf(arg, True))
            return Exists(r, nnf(arg, False))
        case Forall(r, arg):
            if negate:
                return Exists(r, nnf(arg, True))
            return Forall(r, nnf(arg, False))
    raise TypeError(f"not a concept: {c!r}")


def concept_names(c: Concept) -> set[str]:
    match c:
        case Atom(name):
            return {name}
        case Top() | Bottom():
            return set()
        case Not(arg):
            return concept_names(arg)
        case And(a, b) | Or(a, b):
            return concept_names(a) | concept_names(b)
        case Exists(_, arg) | Forall(_, arg):
            return concept_names(arg)
    raise TypeError(f"not a concept: {c!r}")


def role_names(c: Concept) -> set[str]:
    match c:
        case Atom(_) | Top() | Bottom():
            return set()
        case Not(arg):
            return role_names(arg)
        case And(a, b) | Or(a, b):
            return role_names(a) | role_names(b)
        case Exists(r, arg) | Forall(r, arg):
            return {r} | role_names(arg)
    raise TypeError(f"not a concept: {c!r}")


def concept_str(c: Concept) -> str:
    match c:
        case Atom(name):
            return name
        case Top():
            return "top"
        case Bottom():
            return "bot"
        case Not(arg):
            return f"not {concept_str(arg)}" if isinstance(arg, Atom) else f"not ({concept_str(arg)})"
        case And(a, b):
            return f"({concept_str(a)} & {concept_str(b)})"
        case Or(a, b):
            return f"({concept_str(a)} | {concept_str(b)})"
        case Exists(r, arg):
            return f"exists {r} . ({concept_str(arg)})"
        case Forall(r, arg):
            return f"forall {r} . ({concept_str(arg)})"
    raise TypeError(f"not a concept: {c!r}")


# ---------------------------------------------------------------------------
# Normal-form concept inclusions


@dataclass(frozen=True, order=True)
class ConjToDisj:
    """conj(lhs) included in disj(rhs); empty lhs is top, empty rhs is bottom."""

    lhs: tuple[str, ...]
    rhs: tuple[str, ...]


@dataclass(frozen=True, order=True)
class ExistsRHS:
    lhs: str
    role: str
    rhs: str


@dataclass(frozen=True, order=True)
class ForallRHS:
    lhs: str
    role: str
    rhs: str


NormalCI = Union[ConjToDisj, ExistsRHS, ForallRHS]


def ci_str(ci: NormalCI) -> str:
    match ci:
        case ConjToDisj(lhs, rhs):
            left = " & ".join(lhs) if lhs else "top"
            right = " | ".join(rhs) if rhs else "bot"
            return f"{left} <= {right}"
        case ExistsRHS(a, r, b):
            return f"{a} <= exists {r} . {b}"
        case ForallRHS(a, r, b):
            return f"{a} <= forall {r} . {b}"
    raise TypeError(f"not a normal CI: {ci!r}")


COMPLEMENT_PREFIX = "~"
FRESH_PREFIX = "_N"


def complement_name(name: str) -> str:
    if name.startswith(COMPLEMENT_PREFIX):
        return name[len(COMPLEMENT_PREFIX):]
    return COMPLEMENT_PREFIX + name


def is_complement(name: str) -> bool:
    return name.startswith(COMPLEMENT_PREFIX)


# ---------------------------------------------------------------------------
# Knowledge bases


@dataclass(frozen=True)
class NormalKB:
    """Normalized KB: normal-form TBox, ABox, and the working signature.

    concept_names is the full working signature (inputs, fresh structural
    names, complements), in a fixed order that downstream bitset encodings
    rely on.  derived_defs gives, for every generated name, the concept
    whose extension canonically realizes it when extending a model of the
    original CIs.
    """

    tbox: tuple[NormalCI, ...]
    abox_concepts: tuple[tuple[str, str], ...]         # (concept name, individual)
    abox_roles: tuple[tuple[str, str, str], ...]       # (role, a, b)
    concept_names: tuple[str, ...]
    role_names: tuple[str, ...]
    individuals: tuple[str, ...]
    complement: Mapping[str, str] = field(default_factory=dict)
    original_cis: tuple[tuple[Concept, Concept], ...] = ()
    original_concept_names: tuple[str, ...] = ()
    original_role_names: tuple[str, ...] = ()
    derived_defs: tuple[tuple[str, Concept], ...] = ()

    def is_trivial_abox(self) -> bool:
        return len(self.individuals) == 1 and not self.abox_roles

    @property
    def positive_names(self) -> tuple[str, ...]:
        return tuple(n for n in self.concept_names if not is_complement(n))

    def concept_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.concept_names)}

    def conj_to_disj_cis(self) -> tuple[ConjToDisj, ...]:
        return tuple(ci for ci in self.tbox if isinstance(ci, ConjToDisj))

    def exists_cis(self) -> tuple[ExistsRHS, ...]:
        return tuple(ci for ci in self.tbox if isinstance(ci, ExistsRHS))

    def forall_cis(self) -> tuple[ForallRHS, ...]:
        return tuple(ci for ci in self.tbox if isinstance(ci, ForallRHS))


class _Normalizer:
    def __init__(self, known_names: list[str], roles: list[str]):
        self.cis: list[NormalCI] = []
        self.names: list[str] = list(known_names)
        self.name_set = set(self.names)
        self.roles = list(roles)
        self.role_set = set(self.roles)
        self.fresh_count = 0
        self.derived: list[tuple[str, Concept]] = []

    def fresh(self, definition: Concept) -> str:
        self.fresh_count += 1
        name = f"{FRESH_PREFIX}{self.fresh_count}"
        self.names.append(name)
        self.name_set.add(name)
        self.derived.append((name, definition))
        return name

    def add_role(self, r: str) -> None:
        if r not in self.role_set:
            self.role_set.add(r)
            self.roles.append(r)

    def emit(self, ci: NormalCI) -> None:
        self.cis.append(ci)

    # A lower name for c satisfies name <= c in every model of the output.
    def lower_name(self, c: Concept) -> str:
        match c:
            case Atom(name):
                return name
            case Not(Atom(name)):
                return complement_name(name)
            case Top():
                return self.fresh(c)
            case Bottom():
                x = self.fresh(c)
                self.emit(ConjToDisj((x,), ()))
                return x
            case And(a, b):
                x = self.fresh(c)
                self.emit(ConjToDisj((x,), (self.lower_name(a),)))
                self.emit(ConjToDisj((x,), (self.lower_name(b),)))
                return x
            case Or(a, b):
                x = self.fresh(c)
                la, lb = self.lower_name(a), self.lower_name(b)
                self.emit(ConjToDisj((x,), tuple(sorted({la, lb}))))
                return x
            case Exists(r, a):
                self.add_role(r)
                x = self.fresh(c)
                self.emit(ExistsRHS(x, r, self.lower_name(a)))
                return x
            case Forall(r, a):
                self.add_role(r)
                x = self.fresh(c)
                self.emit(ForallRHS(x, r, self.lower_name(a)))
                return x
        raise TypeError(f"not in NNF: {c!r}")

    # An upper name for c satisfies c <= name in every model of the output.
    def upper_name(self, c: Concept) -> str:
        match c:
            case Atom(name):
                return name
            case Not(Atom(name)):
                return complement_name(name)
            case Top():
                x = self.fresh(c)
                self.emit(ConjToDisj((), (x,)))
                return x
            case Bottom():
                return self.fresh(c)
            case And(a, b):
                x = self.fresh(c)
                ua, ub = self.upper_name(a), self.upper_name(b)
                self.emit(ConjToDisj(tuple(sorted({ua, ub})), (x,)))
                return x
            case Or(a, b):
                x = self.fresh(c)
                self.emit(ConjToDisj((self.upper_name(a),), (x,)))
                self.emit(ConjToDisj((self.upper_name(b),), (x,)))
                return x
            case Exists(r, a):
                # exists r.a <= x  iff  ~x <= forall r.(complement of a)
                self.add_role(r)
                x = self.fresh(c)
                ua = self.upper_name(a)
                self.emit(ForallRHS(complement_name(x), r, complement_name(ua)))
                return x
            case Forall(r, a):
                # forall r.a <= x  iff  ~x <= exists r.(complement of a)
                self.add_role(r)
                x = self.fresh(c)
                ua = self.upper_name(a)
                self.emit(ExistsRHS(complement_name(x), r, complement_name(ua)))
                return x
        raise TypeError(f"not in NNF: {c!r}")


def _as_name_conj(c: Concept) -> tuple[str, ...] | None:
    """Flatten a conjunction of atoms/negated atoms to names, or None."""
    out: list[str] = []
    stack = [c]
    while stack:
        cur = stack.pop()
        match cur:
            case Top():
                continue
            case Atom(name):
                out.append(name)
            case Not(Atom(name)):
                out.append(complement_name(name))
            case And(a, b):
                stack.extend((a, b))
            case _:
                return None
    return tuple(sorted(set(out)))


def _as_name_disj(c: Concept) -> tuple[str, ...] | None:
    out: list[str] = []
    stack = [c]
    while stack:
        cur = stack.pop()
        match cur:
            case Bottom():
                continue
            case Atom(name):
                out.append(name)
            case Not(Atom(name)):
                out.append(complement_name(name))
            case Or(a, b):
                stack.extend((a, b))
            case _:
                return None
    return tuple(sorted(set(out)))


def normalize_kb(
    cis: Iterable[tuple[Concept, Concept]],
    abox_concepts: Iterable[tuple[Concept, str]] = (),
    abox_roles: Iterable[tuple[str, str, str]] = (),
    extra_concept_names: Iterable[str] = (),
    extra_role_names: Iterable[str] = (),
) -> NormalKB:
    """Normalize arbitrary ALC concept inclusions into the three shapes.

    The output is a conservative extension of the input: fresh structural
    names carry one-directional definitions, and the whole working
    signature is complement-closed afterwards.
    """
    cis = list(cis)
    abox_concepts = list(abox_concepts)
    abox_roles = list(abox_roles)

    base_names: set[str] = set(extra_concept_names)
    base_roles: set[str] = set(extra_role_names)
    for lhs, rhs in cis:
        base_names |= concept_names(lhs) | concept_names(rhs)
        base_roles |= role_names(lhs) | role_names(rhs)
    for c, _ in abox_concepts:
        base_names |= concept_names(c)
        base_roles |= role_names(c)
    for r, _, _ in abox_roles:
        base_roles.add(r)
    for n in base_names:
        if n.startswith(COMPLEMENT_PREFIX) or n.startswith(FRESH_PREFIX):
            raise ValueError(f"reserved concept name: {n}")

    norm = _Normalizer(sorted(base_names), sorted(base_roles))

    for lhs, rhs in cis:
        l, r = nnf(lhs), nnf(rhs)
        lc, rd = _as_name_conj(l), _as_name_disj(r)
        if lc is not None and rd is not None:
            # negated atoms switch sides (an equivalence under complement closure)
            lhs, rhs = set(lc), set(rd)
            for x in [x for x in rhs if is_complement(x)]:
                rhs.discard(x)
                lhs.add(complement_name(x))
            for x in [x for x in lhs if is_complement(x)]:
                lhs.discard(x)
                rhs.add(complement_name(x))
            norm.emit(ConjToDisj(tuple(sorted(lhs)), tuple(sorted(rhs))))
            continue
        match (l, r):
            case (Atom(a), Exists(role, arg)):
                norm.add_role(role)
                norm.emit(ExistsRHS(a, role, norm.lower_name(arg)))
                continue
            case (Atom(a), Forall(role, arg)):
                norm.add_role(role)
                norm.emit(ForallRHS(a, role, norm.lower_name(arg)))
                continue
        norm.emit(ConjToDisj((norm.upper_name(l),), (norm.lower_name(r),)))

    out_abox: list[tuple[str, str]] = []
    individuals: set[str] = set()
    for c, ind in abox_concepts:
        individuals.add(ind)
        match nnf(c):
            case Atom(name):
                out_abox.append((name, ind))
            case other:
                out_abox.append((norm.lower_name(other), ind))
    for _, a, b in abox_roles:
        individuals.add(a)
        individuals.add(b)

    # Complement closure over the full working signature.
    all_names = list(norm.names)
    complement: dict[str, str] = {}
    derived = list(norm.derived)
    for n in all_names:
        cn = complement_name(n)
        complement[n] = cn
        complement[cn] = n
        derived.append((cn, Not(Atom(n))))
        norm.emit(ConjToDisj((), tuple(sorted((n, cn)))))
        norm.emit(ConjToDisj(tuple(sorted((n, cn))), ()))
    working = tuple(sorted(all_names + [complement[n] for n in all_names]))

    tbox = tuple(sorted(set(norm.cis), key=lambda ci: (type(ci).__name__, ci)))
    return NormalKB(
        tbox=tbox,
        abox_concepts=tuple(sorted(set(out_abox))),
        abox_roles=tuple(sorted(set(abox_roles))),
        concept_names=working,
        role_names=tuple(norm.roles),
        individuals=tuple(sorted(individuals)),
        complement=complement,
        original_cis=tuple(cis),
        original_concept_names=tuple(sorted(base_names)),
        original_role_names=tuple(sorted(base_roles)),
        derived_defs=tuple(derived),
    )


def extend_signature(kb: NormalKB, names: Iterable[str], roles: Iterable[str]) -> NormalKB:
    """Register extra concept/role names (e.g. from a query) into the KB.

    New concept names are complement-closed like everything else so that
    unary types stay well-formed.
    """
    new_names = sorted(set(names) - set(kb.concept_names))
    new_roles = sorted(set(roles) - set(kb.role_names))
    if not new_names and not new_roles:
        return kb
    for n in new_names:
        if n.startswith(COMPLEMENT_PREFIX) or n.startswith(FRESH_PREFIX):
            raise ValueError(f"reserved concept name: {n}")
    complement = dict(kb.complement)
    tbox = list(kb.tbox)
    derived = list(kb.derived_defs)
    for n in new_names:
        cn = complement_name(n)
        complement[n] = cn
        complement[cn] = n
        derived.append((cn, Not(Atom(n))))
        tbox.append(ConjToDisj((), tuple(sorted((n, cn)))))
        tbox.append(ConjToDisj(tuple(sorted((n, cn))), ()))
    working = tuple(sorted(set(kb.concept_names) | {x for n in new_names for x in (n, complement_name(n))}))
    return NormalKB(
        tbox=tuple(sorted(set(tbox), key=lambda ci: (type(ci).__name__, ci))),
        abox_concepts=kb.abox_concepts,
        abox_roles=kb.abox_roles,
        concept_names=working,
        role_names=tuple(list(kb.role_names) + new_roles),
        individuals=kb.individuals,
        complement=complement,
        original_cis=kb.original_cis,
        original_concept_names=tuple(sorted(set(kb.original_concept_names) | set(new_names))),
        original_role_names=tuple(sorted(set(kb.original_role_names) | set(new_roles))),
        derived_defs=tuple(derived),
    )
