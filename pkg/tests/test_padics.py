"""Field arithmetic tests.

Root valuations are cross-checked against the Newton polygon of the
defining quadratic (an independent computation from integer coefficients);
algebraic identities are exact statements asserted directly.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padiclog.errors import (
    EqualRoots,
    EvenPrime,
    OrdinaryForm,
    RootsNotInField,
    UnsupportedField,
)
from padiclog.padics import (
    FieldDescriptor,
    build_field,
    cyclotomic_field,
    extend_cyclotomic,
    field_for_forms,
    hecke_roots,
    newton_slopes,
    qp_field,
    ram_quad_field,
    root_of_unity,
    solve_linear,
    teichmuller_int,
    unramified_field,
    vp_int,
)

PREC = 170


@pytest.fixture(scope="module")
def desk():
    F, rf, rg = field_for_forms(5, 0, 1, 0, 5, 1, 1, aprec=PREC)
    return F, rf, rg


@pytest.fixture(scope="module")
def second():
    F, rf, rg = field_for_forms(7, 1, 2, 7, 0, 1, 1, aprec=PREC)
    return F, rf, rg


def test_desk_field_shape(desk):
    F, _, _ = desk
    assert (F.p, F.f, F.e, F.d) == (5, 2, 2, 4)


def test_second_field_shape(second):
    F, _, _ = second
    assert (F.p, F.f, F.e, F.d) == (7, 1, 2, 2)


def test_root_valuations_match_newton_polygon(desk, second):
    for (F, (a1, b1), (a2, b2)), polys in (
        (desk, ([5, 0, 1], [25, -5, 1])),
        (second, ([49, -7, 1], [343, 0, 1])),
    ):
        for (x, y), poly in zip(((a1, b1), (a2, b2)), polys):
            slopes = newton_slopes(poly, F.p)
            expected = sorted(s for s, length in slopes for _ in range(length))
            assert sorted([x.vp(), y.vp()]) == expected


def test_root_identities(desk):
    F, (af, bf), (ag, bg) = desk
    assert (af + bf).is_zero()
    assert (af * bf - F.scalar(5, PREC)).is_zero()
    assert (ag + bg - F.scalar(5, PREC)).is_zero()
    assert (ag * bg - F.scalar(25, PREC)).is_zero()
    assert af.vp() + bf.vp() == Fraction(1)
    assert ag.vp() + bg.vp() == Fraction(2)


def test_root_identities_second(second):
    F, (af, bf), (ag, bg) = second
    assert (af + bf - F.scalar(7, PREC)).is_zero()
    assert (af * bf - F.scalar(49, PREC)).is_zero()
    assert (ag + bg).is_zero()
    assert (ag * bg - F.scalar(343, PREC)).is_zero()


def test_hecke_rejections():
    F = qp_field(5)
    with pytest.raises(OrdinaryForm):
        hecke_roots(F, 1, 0, 1, PREC)
    with pytest.raises(EqualRoots):
        hecke_roots(qp_field(5), 10, 1, 1, PREC)  # disc = 100 - 100
    with pytest.raises(RootsNotInField):
        hecke_roots(F, 0, 0, 1, PREC)  # sqrt(-20) is ramified


def test_even_prime_rejected():
    with pytest.raises(EvenPrime):
        build_field(2)


def test_build_field_shapes():
    assert build_field(5).d == 1
    assert build_field(5, [5, 5, 1]).e == 2  # Eisenstein
    assert build_field(5, [-2, 0, 1]).f == 2  # x^2 - 2 irreducible mod 5
    with pytest.raises(UnsupportedField):
        build_field(5, [25, 5, 1])  # not Eisenstein, not unramified


def test_inverse_and_precision(desk):
    F, (af, _), _ = desk
    x = af + F.scalar(7, PREC)
    xi = x.inverse()
    assert (x * xi - F.one(PREC)).is_zero()
    assert xi.aprec >= PREC - 2 * F.e


def test_sqrt_roundtrip(desk):
    F, _, _ = desk
    for n in (-20, 6, 30, 11):
        x = F.scalar(n, PREC)
        try:
            s = x.sqrt()
        except RootsNotInField:
            continue
        assert (s * s - x).is_zero()


def test_sqrt_canonical_is_deterministic(desk):
    F, _, _ = desk
    s1 = F.scalar(-20, PREC).sqrt()
    s2 = F.scalar(-20, PREC).sqrt()
    assert (s1 - s2).is_zero()


def test_teichmuller_orders(desk):
    F, _, _ = desk
    t = teichmuller_int(F, 2, PREC)
    assert (t**4 - F.one(PREC)).is_zero()
    assert not (t**2 - F.one(PREC)).is_zero()
    assert (t - F.scalar(2, PREC)).val_pi() >= F.e
    # multiplicativity
    t3 = teichmuller_int(F, 3, PREC)
    t6 = teichmuller_int(F, 6, PREC)
    assert (t * t3 - t6).is_zero()


def test_roots_of_unity_cyclotomic():
    T = cyclotomic_field(5, 2)
    z = root_of_unity(T, 25, 300)
    assert (z**25 - T.one(300)).is_zero()
    assert not (z**5 - T.one(300)).is_zero()
    z5 = root_of_unity(T, 5, 300)
    assert (z5**5 - T.one(300)).is_zero()
    assert not (z5 - T.one(300)).is_zero()


def test_cyclotomic_extension_embeds_desk(desk):
    F, (af, _), _ = desk
    for level in (1, 2):
        e_target = 2 * (F.p - 1) * F.p ** (level - 1)
        T, emb = extend_cyclotomic(F, level, 60 * e_target)
        ia = emb.apply(af)
        assert (ia * ia + T.scalar(5, ia.aprec)).is_zero()
        assert ia.vp() == Fraction(1, 2)


def test_unramified_field_residue_size():
    U = unramified_field(7, 2)
    t = teichmuller_int(U, 3, 100)
    assert (t ** (49 - 1) - U.one(100)).is_zero()


def test_solve_linear_roundtrip(desk):
    F, (af, _), (ag, _) = desk
    rows = [
        [F.scalar(2, PREC), af, F.one(PREC)],
        [F.one(PREC), F.scalar(3, PREC), ag],
        [af, F.zero(PREC), F.scalar(1, PREC)],
    ]
    rhs = [F.scalar(1, PREC), F.scalar(-2, PREC), ag]
    sol = solve_linear(rows, rhs)
    for r, b in zip(rows, rhs):
        acc = F.zero(PREC)
        for c, s in zip(r, sol):
            acc = acc + c * s
        assert (acc - b).val_pi() >= PREC - 3 * F.e


small_ints = st.integers(min_value=-10**6, max_value=10**6)


@settings(max_examples=60, deadline=None)
@given(st.lists(small_ints, min_size=4, max_size=4), st.lists(small_ints, min_size=4, max_size=4))
def test_mul_commutes_and_associates(u, v):
    F = ram_quad_field(5, -4, f=2)
    x = F.from_vec(u, 0, 120)
    y = F.from_vec(v, 0, 120)
    assert ((x * y) - (y * x)).is_zero()
    z = x + y
    assert ((x * y) * z - x * (y * z)).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.lists(small_ints, min_size=4, max_size=4))
def test_inverse_property(u):
    F = ram_quad_field(5, -4, f=2)
    x = F.from_vec(u, 0, 120)
    if x.val_pi() >= 40:
        return
    xi = x.inverse()
    assert (x * xi - F.one(100)).val_pi() >= 90


@settings(max_examples=60, deadline=None)
@given(st.lists(small_ints, min_size=4, max_size=4), st.lists(small_ints, min_size=4, max_size=4))
def test_valuation_additive(u, v):
    F = ram_quad_field(5, -4, f=2)
    x = F.from_vec(u, 0, 120)
    y = F.from_vec(v, 0, 120)
    if x.val_pi() >= 60 or y.val_pi() >= 60:
        return
    assert (x * y).val_pi() == x.val_pi() + y.val_pi()


def test_vp_int():
    assert vp_int(250, 5) == 3
    assert vp_int(-20, 5) == 1
    with pytest.raises(ValueError):
        vp_int(0, 5)


def test_struct_constants_are_exact(desk):
    F, _, _ = desk
    # pi^2 = -20 in the desk field: check via struct table directly
    vec = F.vec_mul((0, 1, 0, 0), (0, 1, 0, 0))
    assert vec == [-20, 0, 0, 0]
