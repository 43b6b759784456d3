import itertools

from internality.builders import gset_structure, named_group, vecspace_structure
from internality.ends import (
    Bifunctor,
    ConcreteDiagram,
    assemble_pro_group,
    check_wedge,
    end_of_bifunctor,
    end_presheaf_Aut,
    end_presheaf_End,
    global_sections,
    hom_bifunctor,
    natural_families,
)
from internality.fincat import (
    cyclic_group_category,
    empty_category,
    enumerate_functors,
    enumerate_nat_transformations,
    preorder_category,
)
from internality.galois import binding_pro_group, build_internal_cover
from internality.groups import FiniteGroup, groups_isomorphic


def regular_gset_diagram(g: FiniteGroup, fixed=()):
    """The regular left g-set with its g-maps, the right translations."""
    pts = tuple(range(len(g)))
    maps = [("X", "X", {x: g.mul(x, h) for x in pts}) for h in range(len(g))]
    return ConcreteDiagram({"X": pts}, maps, frozenset(fixed))


def test_end_of_constant_point_is_a_point():
    c = preorder_category(range(3), lambda a, b: a <= b)
    s = Bifunctor(c, {(x, y): ("*",) for x in c.objects for y in c.objects}, lambda f, g, v: v)
    assert len(end_of_bifunctor(s)) == 1


def test_end_over_empty_category_is_terminal():
    s = Bifunctor(empty_category(), {}, lambda f, g, v: v)
    assert len(end_of_bifunctor(s)) == 1


def test_end_of_hom_is_nat_and_every_family_is_a_wedge():
    c = cyclic_group_category(2)
    d = cyclic_group_category(4)
    fs = enumerate_functors(c, d)
    for f, g in itertools.product(fs, repeat=2):
        s = hom_bifunctor(f, g)
        res = end_of_bifunctor(s)
        assert len(res) == len(enumerate_nat_transformations(f, g))
        for fam in res.families:
            assert check_wedge(s, fam) is None


def test_end_monoid_of_regular_z2():
    z2 = FiniteGroup.cyclic(2)
    end = end_presheaf_End(regular_gset_diagram(z2))
    assert len(end) == 2
    # T with two points: one endomorphism per point
    assert len(end_presheaf_End(regular_gset_diagram(z2), copies=((0,), (1,)))) == 4


def test_end_monoid_into_a_point_is_trivial():
    diag = ConcreteDiagram({"A": ("*",), "B": ("*",)}, [("A", "B", {"*": "*"})])
    assert len(end_presheaf_End(diag)) == 1
    assert len(end_presheaf_End(diag, copies=((0,), (1,), (2,)))) == 1


def test_end_monoid_table_is_associative_with_unit():
    end = end_presheaf_End(regular_gset_diagram(FiniteGroup.cyclic(3)))
    t = end.table()
    n = len(t)
    e = [k for k, _ in enumerate(end.families) if end.families[k] == end.identity()][0]
    for a, b, c in itertools.product(range(n), repeat=3):
        assert t[t[a][b]][c] == t[a][t[b][c]]
    assert all(t[e][a] == a == t[a][e] for a in range(n))


def test_aut_of_regular_s3_is_s3():
    s3 = FiniteGroup.symmetric(3)
    aut = end_presheaf_Aut(regular_gset_diagram(s3))
    assert len(aut) == 6
    assert len(end_presheaf_Aut(regular_gset_diagram(s3, fixed=("X",)))) == 1


def test_natural_families_respect_partial_maps():
    # a map defined on {0} only forces sigma to preserve {0}
    diag = ConcreteDiagram({"A": (0, 1), "B": ("p",)}, [("A", "B", {0: "p"})])
    fams = natural_families(diag, invertible=True)
    assert all(f["A"][0] == 0 for f in fams)
    assert len(fams) == 1


def test_trivial_pro_group_on_a_point():
    diag = ConcreteDiagram({"P": ("*",)}, [])
    pro = assemble_pro_group(diag, [["P"], ["P"]])
    assert pro.orders == [1, 1] and pro.stable_level == 0


def test_z4_and_vector_space_stabilize():
    m, red, pres = gset_structure(named_group("Z4"))
    res = binding_pro_group(build_internal_cover(m, red, pres))
    assert res.categorical.orders[-1] == 4 and res.categorical.stable_level is not None
    m, red, pres = vecspace_structure(2, 2)
    res = binding_pro_group(build_internal_cover(m, red, pres))
    assert res.order == 6


def test_global_sections():
    m, red, pres = vecspace_structure(2, 2)
    res = binding_pro_group(build_internal_cover(m, red, pres))
    pro = res.categorical
    assert len(global_sections(pro, [])) == 6
    d = pro.diagrams[-1]
    conj = []
    for perm in res.oracle.perms:
        acts = {}
        for x, pts in d.objects.items():
            idx = {q: i for i, q in enumerate(pts)}
            acts[x] = [idx[tuple(perm[g] for g in q)] for q in pts]
        conj.append(acts)
    # conjugation by all of GL2(F2): only the centre (trivial) survives
    assert len(global_sections(pro, conj)) == 1
    assert groups_isomorphic(pro.top, named_group("S3")).isomorphic
