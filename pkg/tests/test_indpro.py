import pytest

from internality.builders import pure_set
from internality.defsets import DefCategory, FinStructure
from internality.fincat import cyclic_group_category, discrete_category, preorder_category, terminal_category
from internality.indpro import (
    IndMorphism,
    OrientationError,
    bi_ind_object,
    chain,
    check_cofiltering,
    check_filtering,
    classify_ind_object,
    constant_chain,
    fiber_product_criterion,
    global_points,
    hom_from_pro,
    hom_into_ind,
    is_base_morphism,
    is_compact,
    is_proper,
    refines_to,
    stage_inclusion,
)
from internality.presheaves import grothendieck_index
from internality.scenario import _chain_from, bundled_path, load_scenario


def test_filtering_examples():
    assert check_filtering(terminal_category()).ok
    assert check_filtering(preorder_category(range(3), lambda a, b: a <= b)).ok
    v = check_filtering(discrete_category("ab"))
    assert not v.ok and v.witness[1:] == ("a", "b")
    # a group has one object but its parallel pairs are never coequalized
    assert not check_filtering(cyclic_group_category(2)).ok
    chain3 = preorder_category(range(3), lambda a, b: a <= b)
    assert check_filtering(grothendieck_index(chain3, 2, 1)).ok
    assert check_cofiltering(chain3).ok


def test_hom_into_constant_chain_is_plain_hom():
    y = constant_chain((0, 1, 2), 3)
    cc = hom_into_ind((None, None), y)
    assert len(cc.apex) == 9


def test_hom_into_increasing_subsets_gives_union():
    stages = [("a",), ("a", "b"), ("a", "b", "c"), ("a", "b", "c", "d")]
    y = chain(stages, [{e: e for e in s} for s in stages[:-1]])
    assert len(hom_into_ind((None,), y).apex) == 4
    assert len(global_points(y)) == 4


def test_hom_from_pro_duals():
    stages = [("a", "b", "c", "d"), ("a", "b", "c"), ("a", "b"), ("a",)]
    # pro orientation: transitions[i] maps stage i+1 to stage i
    x = chain(stages, [{e: e for e in s} for s in stages[1:]], orientation="pro")
    assert len(hom_from_pro(x, (0, 1)).apex) == 2  # maps out of the limit point set {a}
    with pytest.raises(OrientationError):
        hom_into_ind((None,), x)
    with pytest.raises(OrientationError):
        hom_from_pro(constant_chain((0,), 2), (0,))


def test_refinement_is_an_equivalence():
    y = chain([(0, 1, 2), (0, 1), (0,)], [{0: 0, 1: 0, 2: 1}, {0: 0, 1: 0}])
    pts = [(j, a) for j in range(3) for a in y.stage(j)]
    for a in pts:
        assert refines_to(y, a, a)
        for b in pts:
            assert refines_to(y, a, b) == refines_to(y, b, a)
            for c in pts:
                if refines_to(y, a, b) and refines_to(y, b, c):
                    assert refines_to(y, a, c)


def test_stage_inclusion_into_strict_chain_is_proper():
    y = chain([(0,), (0, 1), (0, 1, 2)], [{0: 0}, {0: 0, 1: 1}])
    assert classify_ind_object(y)[0] == "strict"
    assert is_proper(stage_inclusion(y, 0)).ok


def test_non_proper_fixture_has_growing_pullbacks():
    raw = load_scenario(bundled_path("non_proper_chain")).raw["indpro"]
    src, tgt = _chain_from(raw["source"]), _chain_from(raw["target"])
    f = IndMorphism(src, tgt, {j: dict(zip(src.stage(j), imgs)) for j, imgs in enumerate(raw["components"])})
    assert f.check().ok
    v = is_proper(f)
    assert not v.ok and v.witness["pullback_sizes"] == [1, 2, 3, 4]


def test_non_strict_chain():
    y = chain([("u", "v"), ("u", "v"), ("w",)], [{"u": "u", "v": "v"}, {"u": "w", "v": "w"}])
    label, verdicts = classify_ind_object(y)
    assert not verdicts["strict"].ok
    assert label == "neither"
    assert not fiber_product_criterion(y).ok


def test_classify_rejects_pro():
    with pytest.raises(OrientationError):
        classify_ind_object(chain([(0,), (0,)], [{0: 0}], orientation="pro"))


def test_compact_maps_are_base_maps():
    x = chain([("a", "b"), ("A", "B")], [{"a": "A", "b": "B"}])
    y = chain([("p",), ("q",)], [{"p": "q"}])
    f = IndMorphism(x, y, {0: {"a": "p", "b": "p"}, 1: {"A": "q", "B": "q"}})
    assert is_compact(x).ok and is_compact(y).ok
    assert is_proper(f).ok and is_base_morphism(f).ok
    grow = chain([("a",), ("a", "b")], [{"a": "a"}])
    g = IndMorphism(grow, y, {0: {"a": "p"}, 1: {"a": "q", "b": "q"}})
    assert not is_base_morphism(g).ok


def test_bi_examples():
    d = DefCategory(pure_set(3), arity=2)
    one = bi_ind_object(d, d.terminal, d.terminal, 1)
    assert len(global_points(one)) == 1
    x = d.by_name["X"]
    bi = bi_ind_object(d, x, x, 2, pool=list(range(d.structure.N)))
    assert len(global_points(bi)) == 6
    assert [len(bi.stage(j)) for j in range(3)] == [1, 4, 6]
    assert classify_ind_object(bi)[0] == "strict"
    m = FinStructure({"X": ["a", "b"], "Y": ["p", "q", "r"]})
    d2 = DefCategory(m, arity=1)
    empty = bi_ind_object(d2, d2.by_name["X"], d2.by_name["Y"], 2, pool=list(range(m.N)))
    assert len(global_points(empty)) == 0
