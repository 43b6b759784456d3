import pytest

from internality.builders import field_structure, gset_structure, named_group, pure_set, vecspace_structure
from internality.defsets import FinStructure, PreconditionError, StructureError
from internality.galois import (
    BindingGroupMismatch,
    HypothesisRefusal,
    InternalityError,
    Presentation,
    Term,
    binding_pro_group,
    brute_force_relative_automorphisms,
    build_internal_cover,
    certify_hypotheses,
    check_actions_natural,
    check_promotion,
    compact_binding_group,
    promote_points_automorphism,
    validate_internal_cover,
)
from internality.groups import groups_isomorphic
from internality.scenario import _build_cover, bundled_path, load_scenario


def vec_cover(q=2, n=2):
    m, red, pres = vecspace_structure(q, n)
    return build_internal_cover(m, red, pres)


def test_vector_space_cover_validates():
    rep = validate_internal_cover(vec_cover())
    assert rep.ok, rep.failed()


def test_unclosed_fixture_fails_both_closedness_clauses():
    sc = load_scenario(bundled_path("cover_not_closed"))
    rep = validate_internal_cover(_build_cover(sc, sc.structure, 2))
    assert sorted(rep.failed()) == ["F_closed", "I_closed"]
    assert rep.clauses["FI_identity"].ok


def test_relative_automorphism_oracle():
    m, _, _ = vecspace_structure(2, 2)
    assert brute_force_relative_automorphisms(m, ["L", "V"]).order == 1
    assert brute_force_relative_automorphisms(m, ["L"]).order == 6
    m3, _, _ = vecspace_structure(3, 1)
    assert brute_force_relative_automorphisms(m3, ["L"]).order == 2
    assert brute_force_relative_automorphisms(pure_set(3), []).order == 6
    with pytest.raises(StructureError):
        brute_force_relative_automorphisms(m, ["Nope"])


def test_binding_group_of_f3_line_is_units():
    res = binding_pro_group(vec_cover(3, 1))
    assert res.order == 2
    assert groups_isomorphic(res.categorical.top, named_group("Z2")).isomorphic


def test_mismatch_carries_both_groups():
    cover = vec_cover()
    wrong = brute_force_relative_automorphisms(cover.m, ["L", "V"])
    with pytest.raises(BindingGroupMismatch) as exc:
        binding_pro_group(cover, oracle=wrong)
    assert exc.value.categorical["order"] == 6 and exc.value.oracle["order"] == 1


def test_actions_are_natural_and_promotion_round_trips():
    cover = vec_cover()
    res = binding_pro_group(cover)
    assert check_actions_natural(res) is None
    chk = check_promotion(cover, res)
    assert chk.ok and chk.size == 6


def test_promotion_of_identity_is_identity():
    cover = vec_cover()
    res = binding_pro_group(cover)
    d = res.diagram
    ident = {x: tuple(pts) for x, pts in d.objects.items()}
    p = promote_points_automorphism(cover, d, ident)
    assert p.perm == tuple(range(cover.m.N))


def test_non_natural_family_is_rejected():
    cover = vec_cover()
    res = binding_pro_group(cover)
    d = res.diagram
    bad = {x: tuple(pts) for x, pts in d.objects.items()}
    moving = [x for x in d.objects if x not in d.fixed and len(d.objects[x]) > 1]
    x = moving[0]
    pts = list(d.objects[x])
    pts[0], pts[1] = pts[1], pts[0]
    bad[x] = tuple(pts)
    with pytest.raises(PreconditionError):
        promote_points_automorphism(cover, d, bad)


def test_compact_group_for_z3_torsor():
    m, red, pres = gset_structure(named_group("Z3"))
    cover = build_internal_cover(m, red, pres)
    rep = certify_hypotheses(cover)
    assert rep.ok
    g, data = compact_binding_group(cover, rep)
    assert len(g) == 3
    assert len(data["X"].j) == 3


def test_compact_group_refuses_uncertified():
    cover = vec_cover()
    rep = certify_hypotheses(cover)
    rep.clauses.pop(3)
    with pytest.raises(HypothesisRefusal) as exc:
        compact_binding_group(cover, rep)
    assert exc.value.clause == 3


def test_terms():
    m = field_structure(3)
    t = Term("add(p1, mul(c1, c1))", m)
    g = lambda s: m.gid("F", s)
    assert m.label(t({"p1": g("1"), "c1": g("2")})) == "2"
    for bad in ("p1 + c1", "sub(p1, c1)", "add(", "lambda: 0"):
        with pytest.raises(StructureError):
            Term(bad, m)
    with pytest.raises(StructureError):
        Term("add(p1)", m)({"p1": g("0")})
    with pytest.raises(StructureError):
        Term("add(p1, q)", m)({"p1": g("0")})


def test_cover_construction_errors():
    m, red, pres = vecspace_structure(2, 2)
    with pytest.raises((StructureError, InternalityError)):
        build_internal_cover(m, red, [Presentation("V", (("V", "v10"),), ("L",), "smul(c1, p1)")])
    with pytest.raises((StructureError, InternalityError)):
        build_internal_cover(m, ["Nope"], pres)


def test_reduct_parameters_must_be_definable_over_nothing():
    m = FinStructure({"X": ["a", "b"], "Y": ["u", "v"]}, {"f": (("X",), "Y", {("a",): "u", ("b",): "v"})})
    pres = [Presentation("Y", (("X", "a"),), ("X",), "f(c1)")]
    with pytest.raises(InternalityError) as exc:
        build_internal_cover(m, ["X"], pres)
    assert exc.value.witness == "a"
