import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from internality.builders import gset_structure, named_group, pair_coded_set, pure_set, vecspace_structure
from internality.defsets import BOOL, DefCategory, ParameterSet, definable_closure, points_over_parameters
from internality.ends import end_of_bifunctor, hom_bifunctor
from internality.fincat import enumerate_nat_transformations, validate_category
from internality.galois import binding_pro_group, build_internal_cover, promote_points_automorphism
from internality.groups import perm_mul
from internality.indpro import classify_ind_object, fiber_product_criterion, is_base_morphism, is_proper
from internality.sampling import random_category, random_chain, random_chain_morphism, random_functor_pair

seeds = st.integers(min_value=0, max_value=2**32 - 1)

STRUCTURES = {
    "set4": pure_set(4),
    "vec": vecspace_structure(2, 2)[0],
    "paircoded": pair_coded_set(4),
}
CATEGORIES = {k: DefCategory(m, arity=1) for k, m in STRUCTURES.items()}


def _cover(kind):
    if kind == "vec":
        m, red, pres = vecspace_structure(2, 2)
    else:
        m, red, pres = gset_structure(named_group(kind))
    cover = build_internal_cover(m, red, pres)
    return cover, binding_pro_group(cover)


COVERS = {k: _cover(k) for k in ("vec", "Z4", "S3")}


@given(seeds)
def test_random_categories_satisfy_the_laws(seed):
    assert validate_category(random_category(random.Random(seed))).ok


@given(seeds)
@settings(max_examples=30)
def test_end_of_hom_counts_natural_transformations(seed):
    f, g = random_functor_pair(random.Random(seed))
    assert len(end_of_bifunctor(hom_bifunctor(f, g))) == len(enumerate_nat_transformations(f, g))


@given(seeds)
def test_strict_implies_semi_strict_and_fiber_criterion_agrees(seed):
    y = random_chain(random.Random(seed))
    _, v = classify_ind_object(y)
    if v["strict"].ok:
        assert v["semi_strict"].ok
    assert fiber_product_criterion(y).ok == v["semi_strict"].ok


@given(seeds)
def test_proper_equals_base_on_compact_chains(seed):
    rng = random.Random(seed)
    k = rng.randint(2, 4)
    x, y = random_chain(rng, k, compact=True), random_chain(rng, k, compact=True)
    f = random_chain_morphism(rng, x, y)
    if f is not None:
        assert is_proper(f).ok == is_base_morphism(f).ok


def _random_subset(rng, pool):
    return frozenset(g for g in pool if rng.random() < 0.4)


@given(st.sampled_from(sorted(STRUCTURES)), seeds)
def test_dcl_is_a_closure_operator(name, seed):
    m, d = STRUCTURES[name], CATEGORIES[name]
    rng = random.Random(seed)
    a = _random_subset(rng, range(m.N))
    b = a | _random_subset(rng, range(m.N))
    ca = definable_closure(m, ParameterSet(m, a), d.group).elements
    cb = definable_closure(m, ParameterSet(m, b), d.group).elements
    assert a <= ca
    assert definable_closure(m, ParameterSet(m, ca), d.group).elements == ca
    assert ca <= cb


@given(st.sampled_from(sorted(STRUCTURES)), seeds)
def test_invariant_subsets_are_unions_of_orbits(name, seed):
    d = CATEGORIES[name]
    rng = random.Random(seed)
    obj = rng.choice([o for o in d.objects if 0 < len(o) <= 16])
    s = {e for e in obj.elements if rng.random() < 0.5}
    if rng.random() < 0.5:
        # bias towards the invariant case
        s = set().union(*[set(o.elements) for o in d.orbits(obj) if rng.random() < 0.5])
    closed = all({tuple(p[g] for g in e) for e in s} == s for p in d.group.perms)
    assert d.is_invariant(sorted(s)) == closed


@given(st.sampled_from(sorted(COVERS)), seeds)
@settings(max_examples=30)
def test_promotion_is_multiplicative(kind, seed):
    cover, res = COVERS[kind]
    fams, top = res.categorical.families[-1], res.categorical.top
    rng = random.Random(seed)
    i, j = rng.randrange(len(fams)), rng.randrange(len(fams))
    pi = promote_points_automorphism(cover, res.diagram, fams[i]).perm
    pj = promote_points_automorphism(cover, res.diagram, fams[j]).perm
    pk = promote_points_automorphism(cover, res.diagram, fams[top.mul(i, j)]).perm
    assert perm_mul(pi, pj) == pk


@given(st.sampled_from(sorted(STRUCTURES)), seeds)
@settings(max_examples=30)
def test_points_preserve_terminal_and_products(name, seed):
    m, d = STRUCTURES[name], CATEGORIES[name]
    rng = random.Random(seed)
    a = ParameterSet(m, _random_subset(rng, range(m.N)))
    one = d.terminal
    assert len(points_over_parameters(d, a, one, one)) == 1
    sorts = [d.by_name[s] for s in m.sorts if s != BOOL]
    x, y = rng.choice(sorts), rng.choice(sorts)
    px = points_over_parameters(d, a, one, x)
    py = points_over_parameters(d, a, one, y)
    pxy = points_over_parameters(d, a, one, d.product(x, y))
    assert sorted(pxy) == sorted((p[0] + q[0],) for p, q in itertools.product(px, py))
