import itertools

import pytest

from finent.kb import (
    And,
    Atom,
    Bottom,
    ConjToDisj,
    Exists,
    ExistsRHS,
    Forall,
    ForallRHS,
    Not,
    Or,
    Top,
    complement_name,
    concept_str,
    extend_signature,
    nnf,
    normalize_kb,
)
from finent.interp import (
    check_model,
    complete_working,
    eval_concept,
    make_interp,
    satisfies_original,
)


def test_nnf_pushes_negations_to_atoms():
    c = Not(And(Atom("A"), Exists("r", Not(Atom("B")))))
    out = nnf(c)
    assert out == Or(Not(Atom("A")), Forall("r", Atom("B")))


def test_empty_tbox_yields_only_complement_axioms():
    kb = normalize_kb([], extra_concept_names=["A"])
    assert kb.concept_names == ("A", "~A")
    assert set(kb.tbox) == {
        ConjToDisj((), ("A", "~A")),
        ConjToDisj(("A", "~A"), ()),
    }


def test_negation_elimination_normal_shape():
    kb = normalize_kb([(Top(), Not(Atom("A")))])
    assert ConjToDisj(("A",), ()) in kb.tbox


def test_exists_conjunction_structural_names():
    kb = normalize_kb([(Atom("A"), Exists("r", And(Atom("B"), Atom("C"))))])
    fresh = [n for n in kb.concept_names if n.startswith("_N")]
    assert len(fresh) == 1
    x = fresh[0]
    assert ExistsRHS("A", "r", x) in kb.tbox
    assert ConjToDisj((x,), ("B",)) in kb.tbox
    assert ConjToDisj((x,), ("C",)) in kb.tbox


def _all_interps(size, concepts, roles):
    elems = list(range(size))
    pair_space = [(x, y) for x in elems for y in elems]
    for cbits in itertools.product([False, True], repeat=size * len(concepts)):
        cext = {
            c: frozenset(
                e for e in elems if cbits[ci * size + e]
            )
            for ci, c in enumerate(concepts)
        }
        for rmask in range(1 << (len(pair_space) * len(roles))):
            rext = {}
            for ri, r in enumerate(roles):
                rext[r] = frozenset(
                    p
                    for pi, p in enumerate(pair_space)
                    if rmask & (1 << (ri * len(pair_space) + pi))
                )
            yield make_interp(elems, cext, rext)


def test_normalization_is_conservative_on_small_models():
    # every model of the input (<= 2 elements) extends to a model of the
    # output, and the extension restricted back still models the input
    cis = [(Atom("A"), Exists("r", And(Atom("B"), Atom("C"))))]
    kb = normalize_kb(cis)
    checked = 0
    for interp in _all_interps(2, ("A", "B", "C"), ("r",)):
        original_ok = satisfies_original(interp, kb)
        completed = complete_working(interp, kb)
        normalized_ok = bool(check_model(completed, kb))
        assert original_ok == normalized_ok
        checked += 1
    assert checked == 2 ** 6 * 2 ** 4


def test_normalization_idempotent_on_normal_shapes():
    cis = [
        (And(Atom("A"), Atom("B")), Or(Atom("C"), Atom("D"))),
        (Atom("A"), Exists("r", Atom("B"))),
        (Atom("A"), Forall("r", Atom("B"))),
    ]
    kb = normalize_kb(cis)
    assert not any(n.startswith("_N") for n in kb.concept_names)
    assert ConjToDisj(("A", "B"), ("C", "D")) in kb.tbox
    assert ExistsRHS("A", "r", "B") in kb.tbox
    assert ForallRHS("A", "r", "B") in kb.tbox


def test_complement_closure_covers_working_signature():
    kb = normalize_kb([(Atom("A"), Exists("r", And(Atom("B"), Not(Atom("C")))))])
    for n in kb.concept_names:
        assert kb.complement[n] in kb.concept_names
        assert kb.complement[kb.complement[n]] == n
        pair = tuple(sorted((n, kb.complement[n])))
        assert ConjToDisj((), pair) in kb.tbox
        assert ConjToDisj(pair, ()) in kb.tbox


def test_complex_abox_assertion_gets_fresh_name():
    kb = normalize_kb([], abox_concepts=[(And(Atom("A"), Atom("B")), "a")])
    (name, ind) = kb.abox_concepts[0]
    assert ind == "a"
    assert name.startswith("_N")
    assert ConjToDisj((name,), ("A",)) in kb.tbox


def test_trivial_abox_detection():
    kb = normalize_kb([], abox_concepts=[(Atom("A"), "a")])
    assert kb.is_trivial_abox()
    kb2 = normalize_kb([], abox_concepts=[(Atom("A"), "a")], abox_roles=[("r", "a", "b")])
    assert not kb2.is_trivial_abox()


def test_extend_signature_registers_complements():
    kb = normalize_kb([(Atom("A"), Atom("B"))])
    kb2 = extend_signature(kb, ["Q"], ["s"])
    assert "Q" in kb2.concept_names and complement_name("Q") in kb2.concept_names
    assert "s" in kb2.role_names
    assert kb2.abox_concepts == kb.abox_concepts


def test_reserved_names_rejected():
    with pytest.raises(ValueError):
        normalize_kb([(Atom("~A"), Atom("B"))])


def test_eval_concept_matches_hand_semantics():
    interp = make_interp(
        [0, 1], {"A": {0}, "B": {1}}, {"r": {(0, 1)}}
    )
    assert eval_concept(Exists("r", Atom("B")), interp) == frozenset({0})
    assert eval_concept(Forall("r", Atom("B")), interp) == frozenset({0, 1})
    assert eval_concept(Not(Atom("A")), interp) == frozenset({1})
    assert concept_str(Exists("r", Atom("B"))) == "exists r . (B)"
