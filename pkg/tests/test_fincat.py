import itertools

import pytest

from internality.fincat import (
    CapacityError,
    FinCategory,
    SetDiagram,
    certify_limit,
    colimit_of_diagram,
    cyclic_group_category,
    discrete_category,
    empty_category,
    enumerate_functors,
    enumerate_nat_transformations,
    identity_functor,
    image_factorization,
    limit_of_diagram,
    monoid_category,
    preorder_category,
    terminal_category,
    validate_category,
)
from internality.groups import FiniteGroup


def group_category(g: FiniteGroup):
    els = [f"g{i}" for i in range(len(g))]
    mult = {(els[a], els[b]): els[g.mul(a, b)] for a in range(len(g)) for b in range(len(g))}
    return monoid_category(els, mult, els[g.identity], name=g.name)


def test_terminal_and_z2_validate():
    assert validate_category(terminal_category()).ok
    assert validate_category(cyclic_group_category(2)).ok


def test_broken_unit_law_reports_identity_witness():
    c = FinCategory(["*"], [("id", "*", "*"), ("s", "*", "*")], {"*": "id"},
                    {("s", "s"): "s", ("s", "id"): "id", ("id", "s"): "s", ("id", "id"): "id"})
    rep = validate_category(c)
    assert not rep.ok
    assert rep.law.startswith("identity") and "s" in rep.witness


def test_functors_from_terminal_pick_an_object():
    d = preorder_category(range(3), lambda a, b: a <= b)
    assert len(enumerate_functors(terminal_category(), d)) == 3


def test_functor_counts_between_cyclic_groups():
    z2, z3 = cyclic_group_category(2), cyclic_group_category(3)
    assert len(enumerate_functors(z2, z2)) == 2
    assert len(enumerate_functors(z3, z2)) == 1
    # hom(Z_m, Z_n) has gcd(m, n) elements
    assert len(enumerate_functors(cyclic_group_category(4), cyclic_group_category(6))) == 2


def test_functor_capacity_is_enforced():
    c = discrete_category(range(4))
    with pytest.raises(CapacityError):
        enumerate_functors(c, discrete_category(range(5)), cap=10)


def test_center_of_z2_and_discrete_endomorphisms():
    z2 = cyclic_group_category(2)
    idf = identity_functor(z2)
    assert len(enumerate_nat_transformations(idf, idf)) == 2
    disc = discrete_category("ab")
    i2 = identity_functor(disc)
    assert len(enumerate_nat_transformations(i2, i2)) == 1


def test_center_matches_group_center_for_s3():
    s3 = FiniteGroup.symmetric(3)
    c = group_category(s3)
    idf = identity_functor(c)
    centre = [z for z in range(6) if all(s3.mul(z, g) == s3.mul(g, z) for g in range(6))]
    assert len(enumerate_nat_transformations(idf, idf)) == len(centre) == 1


def test_empty_limit_is_a_point():
    cone = limit_of_diagram(SetDiagram(empty_category(), {}, {}))
    assert len(cone.apex) == 1


def _cospan(f, g, left, right, base):
    idx = FinCategory(
        ["L", "R", "B"],
        [("idL", "L", "L"), ("idR", "R", "R"), ("idB", "B", "B"), ("f", "L", "B"), ("g", "R", "B")],
        {"L": "idL", "R": "idR", "B": "idB"},
        {("idL", "idL"): "idL", ("idR", "idR"): "idR", ("idB", "idB"): "idB",
         ("f", "idL"): "f", ("idB", "f"): "f", ("g", "idR"): "g", ("idB", "g"): "g"},
    )
    ids = {"idL": {a: a for a in left}, "idR": {a: a for a in right}, "idB": {a: a for a in base}}
    return SetDiagram(idx, {"L": left, "R": right, "B": base}, {**ids, "f": f, "g": g})


def test_pullback_of_disjoint_injections_is_empty():
    d = _cospan({0: 0}, {0: 1, 1: 2}, (0,), (0, 1), (0, 1, 2))
    cone = limit_of_diagram(d)
    assert len(cone.apex) == 0
    assert certify_limit(d, cone)


def test_pullback_matches_brute_force():
    left, right, base = (0, 1, 2), (0, 1), (0, 1)
    f, g = {0: 0, 1: 1, 2: 0}, {0: 0, 1: 0}
    cone = limit_of_diagram(_cospan(f, g, left, right, base))
    expected = {(a, b) for a, b in itertools.product(left, right) if f[a] == g[b]}
    assert len(cone.apex) == len(expected) == 4


def _parallel(f, g, dom, cod):
    idx = FinCategory(["A", "B"], [("idA", "A", "A"), ("idB", "B", "B"), ("f", "A", "B"), ("g", "A", "B")],
                      {"A": "idA", "B": "idB"},
                      {("idA", "idA"): "idA", ("idB", "idB"): "idB", ("f", "idA"): "f", ("idB", "f"): "f",
                       ("g", "idA"): "g", ("idB", "g"): "g"})
    return SetDiagram(idx, {"A": dom, "B": cod},
                      {"idA": {a: a for a in dom}, "idB": {b: b for b in cod}, "f": f, "g": g})


def test_equalizers():
    d = _parallel({"a": 0, "b": 0}, {"a": 1, "b": 1}, ("a", "b"), (0, 1))
    assert len(limit_of_diagram(d).apex) == 0
    d = _parallel({"a": 0, "b": 1}, {"a": 0, "b": 1}, ("a", "b"), (0, 1))
    assert len(limit_of_diagram(d).apex) == 2


def test_coproduct_of_points_has_two_elements():
    d = SetDiagram(discrete_category("xy"), {"x": ("*",), "y": ("*",)},
                   {"id_x": {"*": "*"}, "id_y": {"*": "*"}})
    assert len(colimit_of_diagram(d).apex) == 2


def test_coequalizer_of_projections_merges():
    d = _parallel({(0, 1): 0}, {(0, 1): 1}, ((0, 1),), (0, 1))
    assert len(colimit_of_diagram(d).apex) == 1
    d = _parallel({0: 0, 1: 1}, {0: 0, 1: 1}, (0, 1), (0, 1))
    assert len(colimit_of_diagram(d).apex) == 2


def test_image_factorization_examples():
    surj, image, inj = image_factorization({0: 0, 1: 1, 2: 2})
    assert surj == {0: 0, 1: 1, 2: 2} and inj == {0: 0, 1: 1, 2: 2}
    surj, image, inj = image_factorization({0: "z", 1: "z", 2: "z"})
    assert image == ("z",)
    surj, image, inj = image_factorization({x: x % 2 for x in range(4)})
    assert image == (0, 1)
    assert all(inj[surj[x]] == x % 2 for x in range(4))
