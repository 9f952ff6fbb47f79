"""Finite-level group algebra: transforms, factored residues, characters."""

import random

import pytest
from fractions import Fraction

from padiclog.errors import (
    ConductorExceedsLevel,
    InvalidInput,
    NotPsiZero,
)
from padiclog.iwasawa import (
    CharacterSpec,
    DistApproximant,
    LambdaElement,
    LambdaLevel,
    bigphi_intpoly,
    eval_character,
    factor_keys,
    factored_membership_floors,
    forward_divisibility_floors,
    frak_n_representative,
    level_context,
    mellin_forward_poly,
    mellin_inverse,
    omega_intpoly,
    omega_phi_constructors,
    theorem_mellin_check,
    tw_factor_intpoly,
    validate_u,
)
from padiclog.padics import qp_field, ram_quad_field, unramified_field
from padiclog.polys import PolyVec

PREC = 120
U3 = 4


def random_level(ctx, aprec, rng, mod_exp=6):
    draw = ctx.F.p**mod_exp
    comps = []
    for _ in range(ctx.F.p - 1):
        lanes = [
            [rng.randrange(draw) for _ in range(ctx.nx)] for _ in range(ctx.F.d)
        ]
        comps.append(PolyVec(ctx.F, lanes, 0, aprec))
    return LambdaLevel(ctx, comps)


@pytest.fixture(scope="module")
def F3():
    return qp_field(3)


@pytest.fixture(scope="module")
def ctx2(F3):
    return level_context(F3, U3, 2)


def test_u_validation(F3):
    validate_u(3, 4)
    with pytest.raises(InvalidInput):
        validate_u(3, 3)
    with pytest.raises(InvalidInput):
        validate_u(3, 10)  # = 1 mod 9
    with pytest.raises(InvalidInput):
        validate_u(3, 1)


def test_context_tables(ctx2):
    # Teichmuller lift of 2 modulo 27 is 26 = -1
    assert ctx2.teich == [1, 26]
    assert ctx2.L == 27 and ctx2.nx == 9
    # unit addressing is a bijection onto the units mod 27
    units = {a for a in range(27) if a % 3}
    assert set(ctx2.addr) == units
    for key, a in ctx2.unit_of.items():
        assert ctx2.addr[a] == key


def test_forward_of_group_elements(F3, ctx2):
    one = LambdaLevel.one(ctx2, PREC)
    W = mellin_forward_poly(one)
    expect = PolyVec.from_int_coeffs(F3, [1, 1], PREC)
    assert (W - expect).is_zero()
    # sigma_a maps to (1+pi)^a for every unit a
    for a in (1, 2, 4, 7, 25, 26):
        lam = LambdaLevel.sigma(ctx2, a, PREC)
        W = mellin_forward_poly(lam)
        from math import comb

        expect = PolyVec.from_int_coeffs(F3, [comb(a, k) for k in range(a + 1)], PREC)
        expect = expect.rem_intpoly(omega_intpoly(3, 3))
        assert (W - expect).is_zero()


def test_roundtrip_exact(F3, ctx2):
    rng = random.Random(11)
    for trial in range(6):
        lam = random_level(ctx2, PREC, rng)
        back = mellin_inverse(mellin_forward_poly(lam), ctx2, tol=PREC - 8)
        assert lam.diff_floor(back) >= PREC
    # ramified coefficient field, level 1
    F3r = ram_quad_field(3, -1)
    ctx = level_context(F3r, U3, 1)
    for trial in range(3):
        lam = random_level(ctx, 2 * PREC, rng)
        back = mellin_inverse(mellin_forward_poly(lam), ctx, tol=PREC - 8)
        assert lam.diff_floor(back) >= PREC


def test_not_psi_zero(F3, ctx2):
    rng = random.Random(5)
    lam = random_level(ctx2, PREC, rng)
    W = mellin_forward_poly(lam)
    # add tau^3 = (1+pi)^3, a p-divisible group index
    bad = W + PolyVec.from_int_coeffs(F3, [1, 3, 3, 1], PREC)
    with pytest.raises(NotPsiZero):
        mellin_inverse(bad, ctx2, tol=PREC - 8)
    mellin_inverse(W, ctx2, tol=PREC - 8)


def test_tw_matches_derivative_jet(F3, ctx2):
    rng = random.Random(7)
    lam = random_level(ctx2, PREC, rng)
    lhs = mellin_forward_poly(lam.tw(1))
    rhs = mellin_forward_poly(lam, jet=1)
    assert (lhs - rhs).is_zero()
    lhs2 = mellin_forward_poly(lam.tw(2))
    rhs2 = mellin_forward_poly(lam, jet=2)
    assert (lhs2 - rhs2).is_zero()
    # automorphism: roundtrip and multiplicativity
    back = lam.tw(1).tw(-1)
    assert lam.diff_floor(back) >= PREC
    mu = random_level(ctx2, PREC, rng)
    # on reduced representatives multiplicativity holds modulo p^(n+1)
    prod_tw = (lam * mu).tw(1)
    tw_prod = lam.tw(1) * mu.tw(1)
    assert prod_tw.diff_floor(tw_prod) >= ctx2.n + 1
    # on honest lifts it is exact: twist the unreduced product
    honest = LambdaLevel(ctx2, [a * b for a, b in zip(lam.comps, mu.comps)])
    honest_tw = LambdaLevel(
        ctx2, [a * b for a, b in zip(lam.tw(1).comps, mu.tw(1).comps)]
    )
    assert honest.tw(1).diff_floor(honest_tw) >= PREC


def test_factored_residues_jets_vs_reduction(F3, ctx2):
    rng = random.Random(13)
    m = 3
    lam = random_level(ctx2, PREC, rng)
    jets = [mellin_forward_poly(lam, jet=s) for s in range(m)]
    el_jets = LambdaElement.from_jets(F3, U3, 2, m, jets, tol=PREC - 8)
    el_red = LambdaElement.from_level(lam, m)
    assert el_jets.diff_floor(el_red) >= PREC - 2
    # independent oracle: the residue at Tw^(-i)(Phi_l), evaluated at the
    # point u^i zeta - 1, equals the original eigencoordinate there
    for (i, l) in ((1, 1), (2, 2), (0, 1)):
        theta = CharacterSpec.make(F3, U3, l + 1, 0, PREC)
        powers_big = theta.point_powers(i, ctx2.nx)
        for t in (0, 1):
            r = el_jets.residue(t, i, l)
            lhs = r.evaluate_embedded(theta.emb, powers_big[: r.length])
            rhs = lam.comps[t].evaluate_embedded(theta.emb, powers_big)
            assert (lhs - rhs).vp() >= PREC - 6


def test_factored_ring_ops(F3, ctx2):
    rng = random.Random(17)
    m = 3
    a = random_level(ctx2, PREC, rng)
    b = random_level(ctx2, PREC, rng)
    ea = LambdaElement.from_level(a, m)
    eb = LambdaElement.from_level(b, m)
    # residues multiply against the honest (unreduced) product; reduction
    # modulo omega_n would disturb twisted factors by omega_n(u^i zeta - 1),
    # a constant of valuation n+1
    honest = LambdaLevel(ctx2, [x * y for x, y in zip(a.comps, b.comps)])
    prod = LambdaElement.from_level(honest, m)
    assert (ea * eb).diff_floor(prod) >= PREC - 2
    reduced = LambdaElement.from_level(a * b, m)
    assert (ea * eb).diff_floor(reduced) >= ctx2.n + 1
    ssum = LambdaElement.from_level(a + b, m)
    assert (ea + eb).diff_floor(ssum) >= PREC
    # twist reindexing against direct reduction of the twisted element;
    # Tw shifts factor keys down, so compare on the overlap i < m-1.
    # a.tw(1) reduces exactly here because a has degree < p^n (the
    # substitution preserves degree, no modulus reduction happens).
    ta = LambdaElement.from_level(a.tw(1), m)
    raw = ea.tw(1)
    for t in range(2):
        for (i, l) in ((0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)):
            r1 = raw.comps[t].get((i, l))
            r2 = ta.comps[t].get((i, l))
            diff = r1 - r2
            v = diff.vp() if l == 0 else Fraction(diff.max_coeff_val(), F3.e)
            assert v >= PREC - 2


def test_eval_character_oracle(F3, ctx2):
    rng = random.Random(23)
    coeffs = {}
    for a in (1, 2, 5, 7, 16, 26):
        coeffs[a] = F3.scalar(rng.randrange(3**6), PREC)
    lam = LambdaLevel.from_group_coeffs(ctx2, coeffs, PREC)
    elem = LambdaElement.from_level(lam, 3)
    for cond, i0, j in ((3, 1, 1), (3, 0, 2), (2, 1, 0), (1, 1, 1), (0, 0, 2)):
        theta = CharacterSpec.make(F3, U3, cond, i0, PREC)
        got_level = eval_character(lam, j, theta)
        got_elem = eval_character(elem, j, theta)
        # direct sum over group elements: chi^j theta(sigma_a)
        # chi^j theta(sigma_a) = omega(delta)^(j+i0) u^(jx) zeta^x for
        # a = omega(delta) u^x; the integer key only fixes a mod p^(n+1),
        # so the exact value must come from the (delta, x) factorization
        pK = 3 ** (PREC)
        acc = None
        for a, c in coeffs.items():
            dIdx, x = ctx2.addr[a % 27]
            w = ctx2.weights(pK)[dIdx][(i0 + j) % 2]
            term = theta.emb.apply(c.mul_int(w * pow(U3, j * x, pK)))
            term = term * (theta.zeta**x)
            acc = term if acc is None else acc + term
        assert (got_level - acc).vp() >= PREC - 10
        assert (got_elem - acc).vp() >= PREC - 10


def test_eval_character_locality(F3, ctx2):
    # the value at chi^j theta only depends on the element modulo the
    # matching twisted factor
    rng = random.Random(29)
    lam = random_level(ctx2, PREC, rng)
    mu = random_level(ctx2, PREC, rng)
    j, cond = 1, 2
    theta = CharacterSpec.make(F3, U3, cond, 1, PREC)
    fac = tw_factor_intpoly(3, U3, j, cond - 1, 3**PREC)
    fac_poly = PolyVec.from_int_coeffs(F3, fac, PREC)
    # honest bump: reducing modulo omega_n afterwards would shift the
    # value by a multiple of omega_n(u^j zeta - 1), of valuation n+1
    bumped = LambdaLevel(
        ctx2, [c + q * fac_poly for c, q in zip(lam.comps, mu.comps)]
    )
    v1 = eval_character(lam, j, theta)
    v2 = eval_character(bumped, j, theta)
    assert (v1 - v2).vp() >= PREC - 6
    with pytest.raises(ConductorExceedsLevel):
        eval_character(lam, 0, CharacterSpec.make(F3, U3, 4, 0, PREC))


def test_omega_phi_constructors(F3):
    w1 = omega_phi_constructors(F3, U3, 1, 1, "omega_n", PREC)
    assert [int(w1.coeff(k).mants[0]) for k in range(4)] == [0, 3, 3, 1]
    f1 = omega_phi_constructors(F3, U3, 1, 1, "phi_n", PREC)
    assert [int(f1.coeff(k).mants[0]) for k in range(3)] == [3, 3, 1]
    wnm = omega_phi_constructors(F3, U3, 1, 2, "omega_nm", PREC)
    assert wnm.degree() == 2 * 3
    w_n1 = omega_phi_constructors(F3, U3, 2, 1, "omega_nm", PREC)
    assert (w_n1 - omega_phi_constructors(F3, U3, 2, 1, "omega_n", PREC)).is_zero()
    # zero set: omega_{1,2} vanishes at u * zeta_3 - 1
    theta = CharacterSpec.make(F3, U3, 2, 0, PREC)
    val = wnm.evaluate_embedded(theta.emb, theta.point_powers(1, wnm.length))
    assert val.vp() >= PREC - 10


def test_frak_representative(F3):
    N1, s1 = frak_n_representative(F3, U3, 1, 1, PREC)
    phi1 = PolyVec.from_int_coeffs(F3, bigphi_intpoly(3, 1), PREC)
    assert (N1 - phi1).is_zero()
    assert s1 == Fraction(-1)
    N2, s2 = frak_n_representative(F3, U3, 2, 1, PREC)
    assert s2 == Fraction(-2)
    theta = CharacterSpec.make(F3, U3, 2, 0, PREC)
    # vanishes at the twist-1 point u zeta - 1
    val = N2.evaluate_embedded(theta.emb, theta.point_powers(1, N2.length))
    assert val.vp() >= PREC - 10
    # does not vanish at u^j - 1 (zeta = 1 excluded)
    for j in range(4):
        pt = F3.scalar(pow(U3, j, 3**PREC) - 1, PREC)
        acc = F3.zero(PREC)
        for k in range(N2.length - 1, -1, -1):
            acc = acc * pt + N2.coeff(k)
        assert acc.vp() < 20


def test_theorem_check_small(F3):
    rep = theorem_mellin_check(F3, U3, 1, 2, sample_count=8, seed=3)
    assert rep.passed, str(rep)
    rep0 = theorem_mellin_check(F3, U3, 0, 1, sample_count=8, seed=4)
    assert rep0.passed, str(rep0)
    rep23 = theorem_mellin_check(F3, U3, 2, 3, sample_count=3, seed=5)
    assert rep23.passed, str(rep23)


def test_theorem_check_negative_controls(F3):
    rng = random.Random(31)
    n, m = 1, 2
    ctx = level_context(F3, U3, n)
    lam = random_level(ctx, PREC, rng)
    # forward side without the twisted factor: divisibility must fail
    jets = [mellin_forward_poly(lam, jet=s) for s in range(m + 1)]
    lo, tk, ty = forward_divisibility_floors(jets, F3, n, m)
    assert lo < m or tk < 20
    # backward side without the phi-side factor: top residues must not vanish
    elem = LambdaElement.from_jets(F3, U3, n, m, jets[:m], tol=PREC - 8)
    tp, _ = factored_membership_floors(elem)
    assert tp < 20


def test_dist_approximant_tower(F3, ctx2):
    rng = random.Random(37)
    m = 3
    lam = random_level(ctx2, PREC, rng)
    # each level built independently from the same honest jets; their
    # agreement on shared factors is the coherence being certified
    jets = [mellin_forward_poly(lam, jet=s) for s in range(m)]
    levels = [
        LambdaElement.from_jets(F3, U3, k, m, jets, tol=PREC - 8)
        for k in range(3)
    ]
    dist = DistApproximant.from_tower(levels, Fraction(0), U3)
    assert dist.c == 0
    assert dist.coherence_report(tol=PREC - 4).passed
    assert dist.growth_report().passed
    theta = CharacterSpec.make(F3, U3, 3, 1, PREC)
    v1 = eval_character(dist, 1, theta)
    v2 = eval_character(levels[2], 1, theta)
    assert (v1 - v2).vp() >= PREC - 6
    # a tampered level breaks coherence
    bad2 = levels[2].mul_int(1)
    bad2.comps[0][(0, 0)] = bad2.comps[0][(0, 0)] + F3.one(PREC)
    bad = DistApproximant.from_tower([levels[0], levels[1], bad2], Fraction(0), U3)
    assert not bad.coherence_report(tol=PREC - 4).passed


def test_unramified_field_roundtrip():
    Fu = unramified_field(3, 2)
    ctx = level_context(Fu, U3, 1)
    rng = random.Random(41)
    lam = random_level(ctx, PREC, rng)
    back = mellin_inverse(mellin_forward_poly(lam), ctx, tol=PREC - 8)
    assert lam.diff_floor(back) >= PREC
    elem = LambdaElement.from_level(lam, 2)
    jets = [mellin_forward_poly(lam, jet=s) for s in range(2)]
    el2 = LambdaElement.from_jets(Fu, U3, 1, 2, jets, tol=PREC - 8)
    assert elem.diff_floor(el2) >= PREC - 2
