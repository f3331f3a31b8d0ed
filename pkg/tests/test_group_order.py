import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from orderlam.errors import SpecMismatch, UndecidedOrder, UnknownGenerator
from orderlam.group_order import (
    Cmp,
    GroupSpec,
    LexFreeAbelian,
    LexProductWithZ,
    MagnusFree,
    ResidualFamily,
    Undecided,
    ball,
    compare,
    dehn_reduce,
    magnus_leading,
    reduce,
    sorted_ball,
)

from oracles import lex_less, magnus_lex_less, naive_dehn_trivial, surface_relator

Z2 = GroupSpec.free_abelian(2)
F2 = GroupSpec.free(2)
S2 = GroupSpec.surface(2)
ZZ = GroupSpec.direct_sum_z(GroupSpec.free_abelian(1))
SZ = GroupSpec.direct_sum_z(S2)


def oracles():
    return {
        "lex": LexFreeAbelian(Z2),
        "magnus": MagnusFree(F2),
        "residual": ResidualFamily(S2),
        "product": LexProductWithZ(ZZ, LexFreeAbelian(ZZ.inner)),
        "product_surface": LexProductWithZ(SZ, ResidualFamily(S2)),
    }


# ------------------------------------------------------------ reduce

def test_free_cancellation():
    assert reduce(["a", "-a"], F2).is_identity()
    assert reduce(["a", "-a"], F2).normal_form == ()


def test_free_abelian_exponents():
    assert reduce(["a", "b", "a"], Z2).normal_form == (2, 1)


def test_surface_relator_is_identity():
    e = reduce(["a", "b", "-a", "-b", "c", "d", "-c", "-d"], S2)
    assert e.is_identity() and e.normal_form == ()


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        reduce(["z"], F2)
    with pytest.raises(UnknownGenerator):
        reduce([5], F2)


def test_identity_has_empty_normal_form():
    for spec in (Z2, F2, S2, ZZ, SZ):
        assert spec.identity().normal_form == ()


def test_dehn_against_naive_reducer():
    # all words of length <= 8 over a, b, c, d would be 8^8; sample them
    # exhaustively up to length 4 and randomly beyond
    rng = random.Random(7)
    letters = [1, -1, 2, -2, 3, -3, 4, -4]
    words = [w for n in range(5) for w in itertools.product(letters, repeat=n)]
    words += [tuple(rng.choice(letters) for _ in range(8)) for _ in range(3000)]
    # conjugates and cyclic shifts of the relator are trivial and long
    rel = surface_relator(2)
    for k in range(8):
        for w in words[:50]:
            inv = tuple(-x for x in reversed(w))
            words.append(w + rel[k:] + rel[:k] + inv)
    for w in words:
        assert (not dehn_reduce(w, S2)) == naive_dehn_trivial(w, 2), w


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(["a", "-a", "b", "-b", "c", "-c", "d", "-d"]), max_size=6))
def test_reduce_idempotent_and_inverse(word):
    for spec in (S2, GroupSpec.free(4), GroupSpec.free_abelian(4)):
        e = reduce(word, spec)
        assert reduce(e.word, spec) == e
        assert reduce(e.word, spec).normal_form == e.normal_form
        inv = [w[1:] if w.startswith("-") else "-" + w for w in reversed(word)]
        assert reduce(list(word) + inv, spec).is_identity()


def test_surface_normal_forms_are_shortlex_geodesics():
    # BFS by length gives geodesic lengths independently of the shortlex table
    seen = {S2.identity(): 0}
    frontier = [S2.identity()]
    for r in range(1, 4):
        nxt = []
        for x in frontier:
            for g in S2.gens():
                for y in (x * g, x * g.inverse()):
                    if y not in seen:
                        seen[y] = r
                        nxt.append(y)
        frontier = nxt
    for e, r in seen.items():
        assert len(e.normal_form) == r


def test_surface_equal_elements_have_equal_forms():
    a, b, c, d = S2.gens()
    lhs = a * b * a.inverse() * b.inverse()
    rhs = (c * d * c.inverse() * d.inverse()).inverse()
    assert lhs == rhs and lhs.normal_form == rhs.normal_form and hash(lhs) == hash(rhs)


# ------------------------------------------------------------ compare

def test_product_with_z_dominates():
    # ZZ elements are (inner, t-exponent); Z coordinate 0 < 3 decides
    o = oracles()["product"]
    x = reduce(["a"], ZZ)            # inner 1, t^0
    y = reduce(["t", "t", "t"], ZZ)  # inner 0, t^3
    assert compare(x, y, o) is Cmp.LT


def test_reflexive():
    for o in oracles().values():
        for h in ball(o.spec, 2):
            assert compare(h, h, o) is Cmp.EQ


def test_magnus_a_before_b():
    o = MagnusFree(F2, degree=2)
    assert compare(F2.gen("a"), F2.gen("b"), o) is Cmp.LT
    assert magnus_lex_less((1,), (2,), 2, 2) is True


def test_spec_mismatch():
    with pytest.raises(SpecMismatch):
        compare(Z2.identity(), F2.identity(), MagnusFree(F2))


def test_magnus_agrees_with_full_expansion():
    o = MagnusFree(F2)
    elems = ball(F2, 3)
    for x, y in itertools.product(elems, repeat=2):
        c = compare(x, y, o)
        deg = 2 * max(len(x.word), len(y.word), 1)
        less = magnus_lex_less(x.word, y.word, 2, deg)
        if x == y:
            assert c is Cmp.EQ and less is None
        else:
            assert (c is Cmp.LT) == less


def test_magnus_leading_degree_bound():
    for x in ball(F2, 5):
        if not x.is_identity():
            mono, coef = magnus_leading(x.word, 2)
            assert 1 <= len(mono) <= len(x.word) and coef != 0


def test_lex_against_brute_force():
    o = LexFreeAbelian(Z2, [1, 0])
    for x, y in itertools.product(ball(Z2, 3), repeat=2):
        c = compare(x, y, o)
        assert (c is Cmp.LT) == lex_less(x.exponents, y.exponents, [1, 0])


def test_residual_undecided_when_depth_is_zero():
    o = ResidualFamily(S2, depth=0)
    a = S2.gen("a")
    assert isinstance(compare(a, S2.identity(), o), Undecided)
    with pytest.raises(UndecidedOrder):
        sorted_ball(o, 1)


def test_residual_rejects_bad_hom():
    with pytest.raises(ValueError):
        ResidualFamily(S2, homs=[((1,), (2,), (), ())])


# ------------------------------------------------------------ sorted_ball

def test_radius_zero():
    for o in oracles().values():
        assert sorted_ball(o, 0) == [o.spec.identity()]


def test_lex_y_major_radius_one():
    got = [x.exponents for x in sorted_ball(LexFreeAbelian(Z2, [1, 0]), 1)]
    assert got == [(0, -1), (-1, 0), (0, 0), (1, 0), (0, 1)]


def test_magnus_radius_one():
    got = sorted_ball(MagnusFree(F2), 1)
    assert len(got) == 5
    assert got[0] == got[-1].inverse()
    assert 0 < got.index(F2.identity()) < 4


def test_ball_sizes():
    assert [len(ball(S2, r)) for r in range(5)] == [1, 9, 65, 457, 3193]
    assert [len(ball(F2, r)) for r in range(4)] == [1, 5, 17, 53]
    assert [len(ball(Z2, r)) for r in range(4)] == [1, 5, 13, 25]


@pytest.mark.parametrize("name", ["lex", "magnus", "product", "residual", "product_surface"])
def test_total_order_on_balls(name):
    o = oracles()[name]
    radius = {"residual": 3, "product_surface": 2}.get(name, 4)
    b = sorted_ball(o, radius)
    assert len(set(b)) == len(b)
    assert set(b) == {x.inverse() for x in b}
    pos = {x: i for i, x in enumerate(b)}
    sample = b if len(b) <= 200 else random.Random(1).sample(b, 200)
    for x, y in itertools.product(sample, repeat=2):
        c = compare(x, y, o)
        assert c is {-1: Cmp.GT, 0: Cmp.EQ, 1: Cmp.LT}[(pos[y] > pos[x]) - (pos[y] < pos[x])]
        assert compare(y, x, o) is {Cmp.LT: Cmp.GT, Cmp.GT: Cmp.LT, Cmp.EQ: Cmp.EQ}[c]


@pytest.mark.parametrize("name", ["lex", "magnus", "product", "residual", "product_surface"])
def test_left_invariance(name):
    o = oracles()[name]
    b = ball(o.spec, 2)
    if len(b) > 40:
        b = random.Random(2).sample(b, 40)
    for g, x, y in itertools.product(b, repeat=3):
        c1, c2 = compare(x, y, o), compare(g * x, g * y, o)
        if not isinstance(c1, Undecided) and not isinstance(c2, Undecided):
            assert c1 is c2


@pytest.mark.parametrize("name", ["lex", "magnus", "product", "residual"])
def test_sign_antisymmetry(name):
    o = oracles()[name]
    one = o.spec.identity()
    for h in ball(o.spec, 3):
        assert compare(one, h, o) is compare(h.inverse(), one, o)


@pytest.mark.parametrize("spec", [Z2, F2, S2, ZZ, SZ])
def test_torsion_free(spec):
    for h in ball(spec, 2):
        if not h.is_identity():
            for k in range(1, 5):
                assert not (h ** k).is_identity()


def test_residual_separates_radius_four():
    o = ResidualFamily(S2)
    assert o.undecided_pairs(ball(S2, 4)) == []
