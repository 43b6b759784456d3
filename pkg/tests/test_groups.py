import itertools

import pytest

from internality.builders import named_group
from internality.fincat import CapacityError
from internality.groups import (
    FiniteGroup,
    general_linear_group,
    groups_isomorphic,
    perm_closure,
    perm_inv,
    perm_mul,
)


def test_perm_mul_applies_right_factor_first():
    a, b = (1, 2, 0), (1, 0, 2)
    assert perm_mul(a, b) == tuple(a[b[i]] for i in range(3))
    assert perm_mul(a, perm_inv(a)) == (0, 1, 2)


def test_closure_of_transposition_and_cycle_is_s3():
    assert len(perm_closure([(1, 0, 2), (1, 2, 0)], 3)) == 6


@pytest.mark.parametrize("g", [FiniteGroup.cyclic(5), FiniteGroup.symmetric(3), general_linear_group(2, 2),
                               FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))])
def test_axioms(g):
    assert g.check_axioms()


def test_gl_orders():
    # |GL_n(F_q)| = prod (q^n - q^i)
    for n, q in ((1, 2), (1, 3), (2, 2), (2, 3)):
        expected = 1
        for i in range(n):
            expected *= q**n - q**i
        assert len(general_linear_group(n, q)) == expected


def test_self_isomorphism_and_gl2_s3():
    s3 = FiniteGroup.symmetric(3)
    assert groups_isomorphic(s3, s3).isomorphic
    res = groups_isomorphic(general_linear_group(2, 2), s3)
    assert res.isomorphic
    g1, g2 = general_linear_group(2, 2), s3
    mp = res.mapping
    for a, b in itertools.product(range(6), repeat=2):
        assert mp[g1.mul(a, b)] == g2.mul(mp[a], mp[b])


def test_z4_not_klein():
    klein = FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))
    res = groups_isomorphic(FiniteGroup.cyclic(4), klein)
    assert not res.isomorphic
    assert res.certificate


def test_z6_is_z2_times_z3():
    assert groups_isomorphic(FiniteGroup.cyclic(6),
                             FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(3))).isomorphic


def test_order_bound():
    with pytest.raises(CapacityError):
        groups_isomorphic(FiniteGroup.symmetric(4), FiniteGroup.symmetric(4), bound=10)


def test_named_group_parsing():
    assert len(named_group("S3")) == 6 and len(named_group("Z4")) == 4 and len(named_group("GL2_2")) == 6
    with pytest.raises(ValueError):
        named_group("Q8")
