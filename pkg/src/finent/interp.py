"""Finite interpretations, unary types, and (relaxed) model checking."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .kb import (
    And,
    Atom,
    Bottom,
    Concept,
    ConjToDisj,
    Exists,
    ExistsRHS,
    Forall,
    ForallRHS,
    Not,
    NormalKB,
    Or,
    Top,
    complement_name,
)


@dataclass(frozen=True)
class Interp:
    """A finite interpretation with integer element ids.

    Immutable after construction; all derived machinery treats instances
    as shareable values.
    """

    domain: tuple[int, ...]
    concept_ext: Mapping[str, frozenset[int]] = field(default_factory=dict)
    role_ext: Mapping[str, frozenset[tuple[int, int]]] = field(default_factory=dict)
    individuals: Mapping[str, int] = field(default_factory=dict)

    def concept(self, name: str) -> frozenset[int]:
        return self.concept_ext.get(name, frozenset())

    def role(self, name: str) -> frozenset[tuple[int, int]]:
        return self.role_ext.get(name, frozenset())

    def successors(self, e: int, role: str) -> frozenset[int]:
        return frozenset(y for (x, y) in self.role(role) if x == e)

    def with_concepts(self, extra: Mapping[str, frozenset[int]]) -> "Interp":
        merged = dict(self.concept_ext)
        merged.update(extra)
        return Interp(self.domain, merged, self.role_ext, self.individuals)


def make_interp(
    domain: Iterable[int],
    concepts: Mapping[str, Iterable[int]] | None = None,
    roles: Mapping[str, Iterable[tuple[int, int]]] | None = None,
    individuals: Mapping[str, int] | None = None,
) -> Interp:
    return Interp(
        tuple(sorted(domain)),
        {k: frozenset(v) for k, v in (concepts or {}).items() if v},
        {k: frozenset(v) for k, v in (roles or {}).items() if v},
        dict(individuals or {}),
    )


def unary_type(interp: Interp, d: int, signature: Iterable[str]) -> frozenset[str]:
    """The set of signature concepts containing d."""
    if d not in interp.domain:
        raise KeyError(f"unknown element id: {d}")
    return frozenset(name for name in signature if d in interp.concept(name))


def eval_concept(c: Concept, interp: Interp) -> frozenset[int]:
    """Standard ALC semantics of an arbitrary concept."""
    dom = frozenset(interp.domain)
    match c:
        case Atom(name):
            return interp.concept(name)
        case Top():
            return dom
        case Bottom():
            return frozenset()
        case Not(arg):
            return dom - eval_concept(arg, interp)
        case And(a, b):
            return eval_concept(a, interp) & eval_concept(b, interp)
        case Or(a, b):
            return eval_concept(a, interp) | eval_concept(b, interp)
        case Exists(r, arg):
            target = eval_concept(arg, interp)
            return frozenset(x for (x, y) in interp.role(r) if y in target)
        case Forall(r, arg):
            target = eval_concept(arg, interp)
            bad = frozenset(x for (x, y) in interp.role(r) if y not in target)
            return dom - bad
    raise TypeError(f"not a concept: {c!r}")


def complete_working(interp: Interp, kb: NormalKB) -> Interp:
    """Extend an interpretation over the original signature to the working one.

    Fresh structural names receive their canonical defining extension and
    complements become set differences, in definition order.
    """
    current = interp
    dom = frozenset(interp.domain)
    extra: dict[str, frozenset[int]] = {}
    for name, definition in kb.derived_defs:
        ext = eval_concept(definition, current)
        if isinstance(definition, Not):
            ext = dom - eval_concept(definition.arg, current)
        extra[name] = ext
        current = current.with_concepts({name: ext})
    return current


def satisfies_original(interp: Interp, kb: NormalKB) -> bool:
    for lhs, rhs in kb.original_cis:
        if not eval_concept(lhs, interp) <= eval_concept(rhs, interp):
            return False
    return True


# ---------------------------------------------------------------------------
# Model checking for normalized KBs


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    kind: str = ""           # "", "type-violation", "ci-violation", "abox-violation"
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


_OK = CheckResult(True)


def _check_conj_to_disj(interp: Interp, ci: ConjToDisj) -> CheckResult:
    for d in interp.domain:
        if all(d in interp.concept(a) for a in ci.lhs):
            if not any(d in interp.concept(b) for b in ci.rhs):
                return CheckResult(False, "ci-violation", f"{d} violates {ci}")
    return _OK


def _check_forall(interp: Interp, ci: ForallRHS) -> CheckResult:
    ext = interp.concept(ci.lhs)
    for (x, y) in interp.role(ci.role):
        if x in ext and y not in interp.concept(ci.rhs):
            return CheckResult(False, "ci-violation", f"({x},{y}) violates {ci}")
    return _OK


def check_model(interp: Interp, kb: NormalKB) -> CheckResult:
    """Does the interpretation model the normalized KB (standard semantics)?"""
    for name, e in ((n, interp.individuals.get(n)) for n in kb.individuals):
        if e is None or e not in interp.domain:
            return CheckResult(False, "abox-violation", f"individual {name} unmapped")
    for cname, ind in kb.abox_concepts:
        if interp.individuals[ind] not in interp.concept(cname):
            return CheckResult(False, "abox-violation", f"{cname}({ind}) not satisfied")
    for role, a, b in kb.abox_roles:
        if (interp.individuals[a], interp.individuals[b]) not in interp.role(role):
            return CheckResult(False, "abox-violation", f"{role}({a},{b}) not satisfied")
    for ci in kb.tbox:
        match ci:
            case ConjToDisj():
                res = _check_conj_to_disj(interp, ci)
            case ForallRHS():
                res = _check_forall(interp, ci)
            case ExistsRHS(a, r, b):
                ext = interp.concept(a)
                target = interp.concept(b)
                res = _OK
                for d in ext:
                    if not any(y in target for y in interp.successors(d, r)):
                        res = CheckResult(False, "ci-violation", f"{d} has no {r}-witness for {ci}")
                        break
        if not res:
            return res
    return _OK


# ---------------------------------------------------------------------------
# Environments (extensional form) and the relaxed semantics


@dataclass(frozen=True)
class Environment:
    """Allowed unary types plus promised external existential witnesses."""

    allowed: frozenset[frozenset[str]]
    witnesses: Mapping[frozenset[str], frozenset[tuple[str, str]]]
    signature: tuple[str, ...]

    def eps(self, tau: frozenset[str]) -> frozenset[tuple[str, str]]:
        return self.witnesses.get(tau, frozenset())


def full_environment(kb: NormalKB) -> Environment:
    """All complement-complete types over the working names, no witnesses."""
    positives = kb.positive_names
    if len(positives) > 16:
        raise ValueError("signature too large for an extensional environment")
    types: list[frozenset[str]] = []
    for mask in range(1 << len(positives)):
        tau = set()
        for i, name in enumerate(positives):
            tau.add(name if mask & (1 << i) else complement_name(name))
        types.append(frozenset(tau))
    return Environment(frozenset(types), {}, kb.concept_names)


def check_model_modulo(interp: Interp, kb: NormalKB, env: Environment) -> CheckResult:
    """Model check under the relaxed semantics of existential restrictions.

    Every realized type (restricted to the environment signature) must be
    allowed, and existential requirements may be discharged by the
    environment's witness promises for the realized type.
    """
    sig = tuple(env.signature)
    types: dict[int, frozenset[str]] = {}
    for d in interp.domain:
        tau = unary_type(interp, d, sig)
        if tau not in env.allowed:
            return CheckResult(False, "type-violation", f"element {d} realizes disallowed type")
        types[d] = tau
    for name in kb.individuals:
        e = interp.individuals.get(name)
        if e is None or e not in interp.domain:
            return CheckResult(False, "abox-violation", f"individual {name} unmapped")
    for cname, ind in kb.abox_concepts:
        if interp.individuals[ind] not in interp.concept(cname):
            return CheckResult(False, "abox-violation", f"{cname}({ind}) not satisfied")
    for role, a, b in kb.abox_roles:
        if (interp.individuals[a], interp.individuals[b]) not in interp.role(role):
            return CheckResult(False, "abox-violation", f"{role}({a},{b}) not satisfied")
    for ci in kb.tbox:
        match ci:
            case ConjToDisj():
                res = _check_conj_to_disj(interp, ci)
            case ForallRHS():
                res = _check_forall(interp, ci)
            case ExistsRHS(a, r, b):
                res = _OK
                target = interp.concept(b)
                for d in interp.concept(a):
                    if any(y in target for y in interp.successors(d, r)):
                        continue
                    if (r, b) in env.eps(types[d]):
                        continue
                    res = CheckResult(False, "ci-violation", f"{d} lacks witness for {ci}")
                    break
        if not res:
            return res
    return _OK
