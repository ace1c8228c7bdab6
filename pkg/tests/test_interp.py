import random

import pytest

from finent.kb import Atom, Exists, normalize_kb
from finent.interp import (
    Environment,
    check_model,
    check_model_modulo,
    full_environment,
    make_interp,
    unary_type,
)

from helpers import random_interp


def test_unary_type_basics():
    interp = make_interp([0], {"A": {0}})
    assert unary_type(interp, 0, ("A", "~A")) == frozenset({"A"})
    interp2 = make_interp([0])
    assert unary_type(interp2, 0, ("A", "~A")) == frozenset()
    with pytest.raises(KeyError):
        unary_type(interp, 5, ("A",))


def test_unary_type_agrees_with_membership_scan():
    rng = random.Random(7)
    names = ("A", "B", "C")
    for _ in range(25):
        interp = random_interp(rng, 3, names, ("r",))
        for d in interp.domain:
            tau = unary_type(interp, d, names)
            for n in names:
                assert (n in tau) == (d in interp.concept(n))


def test_check_model_simple_cases():
    kb = normalize_kb([], abox_concepts=[(Atom("A"), "a")])
    # element outside both A and ~A breaks complement coverage
    interp = make_interp([0, 1], {"A": {0}, "~A": set()}, {}, {"a": 0})
    assert not check_model(interp, kb)
    good = make_interp([0, 1], {"A": {0}, "~A": {1}}, {}, {"a": 0})
    assert check_model(good, kb)
    # missing ABox assertion
    bad = make_interp([0], {"~A": {0}}, {}, {"a": 0})
    res = check_model(bad, kb)
    assert not res and res.kind == "abox-violation"


def test_check_model_existential_witness():
    kb = normalize_kb([(Atom("A"), Exists("r", Atom("A")))], [(Atom("A"), "a")])
    base = {"A": {0}, "~A": set()}
    no_edge = make_interp([0], base, {}, {"a": 0})
    assert not check_model(no_edge, kb)
    loop = make_interp([0], base, {"r": {(0, 0)}}, {"a": 0})
    assert check_model(loop, kb)


def test_modulo_env_external_witness():
    kb = normalize_kb([(Atom("A"), Exists("r", Atom("B")))], [(Atom("A"), "a")])
    tau = frozenset({"A", "~B"})
    interp = make_interp([0], {"A": {0}, "~B": {0}}, {}, {"a": 0})
    sig = kb.concept_names
    promising = Environment(frozenset([tau]), {tau: frozenset({("r", "B")})}, sig)
    silent = Environment(frozenset([tau]), {}, sig)
    narrow = Environment(frozenset([frozenset({"B", "~A"})]), {}, sig)
    assert check_model_modulo(interp, kb, promising).ok
    res = check_model_modulo(interp, kb, silent)
    assert not res.ok and res.kind == "ci-violation"
    res2 = check_model_modulo(interp, kb, narrow)
    assert not res2.ok and res2.kind == "type-violation"


def test_full_environment_matches_plain_semantics():
    rng = random.Random(3)
    kb = normalize_kb([(Atom("A"), Exists("r", Atom("B")))], [(Atom("A"), "a")])
    env = full_environment(kb)
    for _ in range(40):
        interp = random_interp(rng, 3, ("A", "B"), ("r",))
        # complement completion
        dom = frozenset(interp.domain)
        interp = interp.with_concepts(
            {"~A": dom - interp.concept("A"), "~B": dom - interp.concept("B")}
        )
        interp = make_interp(
            interp.domain, interp.concept_ext, interp.role_ext, {"a": 0}
        )
        assert bool(check_model(interp, kb)) == bool(check_model_modulo(interp, kb, env))
