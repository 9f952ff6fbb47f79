"""Finite-level cyclotomic Iwasawa algebra and its Mellin picture.

The group algebra O[Delta][[X]] is modelled through its level-n
quotients.  Conventions fixed here and relied on downstream:

* gamma is the topological generator acting as 1+X, with cyclotomic
  character value chi(gamma) = u (u = 1+p unless configured otherwise);
  u must satisfy u = 1 mod p and u != 1 mod p^2.
* Delta-characters are the powers omega^t of the Teichmuller character.
  An element is stored through its p-1 eigencoordinates lambda_t(X);
  at level n the plain modulus is omega_n = (1+X)^(p^n) - 1.
* A unit a mod p^(n+1) factors as a = omega(delta) u^x with x < p^n;
  the group element sigma_a contributes omega(delta)^t (1+X)^x to
  eigencoordinate t.
* The Mellin transform sends sigma_a to tau^a = (1+pi)^a inside
  O[[pi]] / phi^(n+1)(pi), where phi^(n+1)(pi) = tau^(p^(n+1)) - 1.
  Its image is the span of the unit-index tau-monomials, which is
  exactly the psi = 0 part of the quotient.
* Tw^s substitutes X -> u^s(1+X) - 1 and shifts the eigenindex by s.
  Factored moduli list the linear factors Tw^(-i)(X) (residue = value
  at u^i - 1) and the cyclotomic factors Tw^(-i)(Phi_l) (residue = a
  polynomial of degree < p^l - p^(l-1), kept in the original variable).

Derivative bookkeeping: with D = (1+pi) d/dpi one has D(tau^a) =
a tau^a, so the residue of an element at the twisted factor
Tw^(-i)(Phi_l) is read off from the i-th D-jet of its Mellin image:
invert the jet at level l, take eigencoordinate t-i, reduce modulo
the untwisted Phi_l and substitute X -> u^(-i)(1+X) - 1.  Jets must be
formed on honest (unfolded) polynomials; folding exponents modulo
p^(l+1) before differentiating discards the twist data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import (
    ConductorExceedsLevel,
    InvalidInput,
    LevelMismatch,
    NotPsiZero,
)
from .padics import (
    PadicScalar,
    cyclotomic_epoly,
    extend_cyclotomic,
    root_of_unity,
)
from .polys import PolyVec, poly_affine_int, poly_divmod_int, poly_mulmod_int
from .piseries import PiSeries
from .reporting import ReportSet


# -- integer polynomial constructors ------------------------------------------


def omega_intpoly(p, n):
    """(1+X)^(p^n) - 1 as a plain integer coefficient list."""
    N = p**n
    out = [comb(N, k) for k in range(N + 1)]
    out[0] = 0
    return out


def bigphi_intpoly(p, l):
    """Phi_l(X), the level-l cyclotomic polynomial in 1+X (l >= 1)."""
    return cyclotomic_epoly(p, l)


_TW_CACHE = {}


def tw_factor_intpoly(p, u, i, l, pK):
    """Tw^(-i) applied to X (l = 0) or Phi_l (l >= 1), coefficients mod pK."""
    key = (p, u, i, l, pK)
    hit = _TW_CACHE.get(key)
    if hit is not None:
        return hit
    base = [0, 1] if l == 0 else bigphi_intpoly(p, l)
    if i % pK == 0:
        out = [c % pK for c in base]
    else:
        a = pow(u, -i, pK)
        out = poly_affine_int(base, a, (a - 1) % pK, pK)
    _TW_CACHE[key] = out
    return out


def _teich_table(p, modulus):
    """Teichmuller lifts of 1..p-1 modulo a power of p."""
    out = []
    for dd in range(1, p):
        t = dd % modulus
        while True:
            t2 = pow(t, p, modulus)
            if t2 == t:
                break
            t = t2
        out.append(t)
    return out


def validate_u(p, u):
    if u % p != 1 or u % (p * p) == 1:
        raise InvalidInput(
            f"u = {u} must be = 1 mod {p} and != 1 mod {p * p}"
        )


# -- level context --------------------------------------------------------------


class LevelContext:
    """Unit-addressing and Teichmuller tables for one level n."""

    __slots__ = ("F", "u", "n", "L", "nx", "teich", "unit_of", "addr", "_wcache")

    def __init__(self, F, u, n):
        validate_u(F.p, u)
        p = F.p
        self.F = F
        self.u = u
        self.n = n
        self.L = p ** (n + 1)
        self.nx = p**n
        self.teich = _teich_table(p, self.L)
        self.unit_of = {}
        self.addr = {}
        upow = 1
        for x in range(self.nx):
            for dIdx in range(p - 1):
                a = self.teich[dIdx] * upow % self.L
                self.unit_of[(dIdx, x)] = a
                self.addr[a] = (dIdx, x)
            upow = upow * u % self.L
        self._wcache = {}

    def weights(self, pK):
        """omega(delta)^t mod pK, indexed [dIdx][t] for t in 0..p-2."""
        hit = self._wcache.get(pK)
        if hit is not None:
            return hit
        p = self.F.p
        base = _teich_table(p, pK)
        tab = []
        for b in base:
            row = [1]
            for _ in range(p - 2):
                row.append(row[-1] * b % pK)
            tab.append(row)
        self._wcache[pK] = tab
        return tab


_CTX_CACHE = {}


def level_context(F, u, n):
    key = (id(F), u, n)
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        ctx = LevelContext(F, u, n)
        _CTX_CACHE[key] = ctx
    return ctx


def _common_lanes(polys):
    """Shift a family of PolyVecs to one (scale, aprec) and expose raw lanes."""
    scale = min(q.scale for q in polys)
    aprec = min(q.aprec for q in polys)
    F = polys[0].F
    e = F.e
    K = max(0, -(-(aprec - e * scale) // e))
    pK = F.p**K
    out = []
    for q in polys:
        shift = F.p ** (q.scale - scale)
        out.append([[c * shift % pK for c in lane] for lane in q.coords])
    return out, scale, aprec, pK


# -- plain level-n elements ------------------------------------------------------


class LambdaLevel:
    """Element of the level-n group algebra via Delta-eigencoordinates.

    comps[t] is the eigencoordinate for omega^t, a polynomial in X.  The
    canonical representative has degree < p^n; ring operations reduce,
    but honest lifts of larger degree are allowed transiently (the
    Mellin transform folds them consistently).
    """

    __slots__ = ("ctx", "comps")

    def __init__(self, ctx, comps):
        self.ctx = ctx
        self.comps = tuple(comps)
        if len(self.comps) != ctx.F.p - 1:
            raise InvalidInput("need one eigencoordinate per Delta-character")

    # constructors

    @classmethod
    def zero(cls, ctx, aprec):
        z = PolyVec.zero(ctx.F, aprec)
        return cls(ctx, [z] * (ctx.F.p - 1))

    @classmethod
    def one(cls, ctx, aprec):
        o = PolyVec.one(ctx.F, aprec)
        return cls(ctx, [o] * (ctx.F.p - 1))

    @classmethod
    def sigma(cls, ctx, a, aprec):
        """The group element sigma_a for a unit a mod p^(n+1)."""
        a = a % ctx.L
        if a not in ctx.addr:
            raise InvalidInput(f"{a} is not a unit modulo {ctx.L}")
        dIdx, x = ctx.addr[a]
        F = ctx.F
        e = F.e
        K = max(0, -(-aprec // e))
        pK = F.p**K
        W = ctx.weights(pK)[dIdx]
        gam = [comb(x, k) % pK for k in range(x + 1)]
        comps = []
        for t in range(F.p - 1):
            poly = PolyVec.from_int_coeffs(F, gam, aprec).mul_int(W[t])
            comps.append(poly)
        return cls(ctx, comps)

    @classmethod
    def from_group_coeffs(cls, ctx, coeffs, aprec):
        """Build sum of c_a sigma_a from a dict {unit a: PadicScalar}."""
        F = ctx.F
        p = F.p
        out = None
        for a, c in coeffs.items():
            term = cls.sigma(ctx, a, aprec)
            term = LambdaLevel(ctx, [q.mul_scalar(c) for q in term.comps])
            out = term if out is None else out + term
        return out if out is not None else cls.zero(ctx, aprec)

    # ring structure (componentwise in the eigencoordinates)

    def _match(self, other):
        if self.ctx is not other.ctx:
            raise LevelMismatch("elements live at different levels")

    def __add__(self, other):
        self._match(other)
        return LambdaLevel(
            self.ctx, [a + b for a, b in zip(self.comps, other.comps)]
        )

    def __sub__(self, other):
        self._match(other)
        return LambdaLevel(
            self.ctx, [a - b for a, b in zip(self.comps, other.comps)]
        )

    def __neg__(self):
        return LambdaLevel(self.ctx, [-a for a in self.comps])

    def __mul__(self, other):
        self._match(other)
        mod = omega_intpoly(self.ctx.F.p, self.ctx.n)
        return LambdaLevel(
            self.ctx,
            [(a * b).rem_intpoly(mod) for a, b in zip(self.comps, other.comps)],
        )

    def mul_scalar(self, s):
        return LambdaLevel(self.ctx, [a.mul_scalar(s) for a in self.comps])

    def mul_int(self, k):
        return LambdaLevel(self.ctx, [a.mul_int(k) for a in self.comps])

    def reduced(self):
        mod = omega_intpoly(self.ctx.F.p, self.ctx.n)
        return LambdaLevel(self.ctx, [a.rem_intpoly(mod) for a in self.comps])

    def reduce_to_level(self, n2):
        if n2 > self.ctx.n:
            raise LevelMismatch("cannot lift to a deeper level by reduction")
        ctx2 = level_context(self.ctx.F, self.ctx.u, n2)
        mod = omega_intpoly(self.ctx.F.p, n2)
        return LambdaLevel(ctx2, [a.rem_intpoly(mod) for a in self.comps])

    def tw(self, s):
        """The automorphism sigma -> chi(sigma)^s sigma.

        Exact on honest lifts.  On representatives reduced modulo
        omega_n it is a ring map only modulo p^(n+1): the twisted
        modulus Tw^s(omega_n) differs from omega_n by the constant
        u^(s p^n) - 1, of valuation n+1.  Factored representations
        (LambdaElement) twist exactly instead.
        """
        ctx = self.ctx
        p = ctx.F.p
        out = [None] * (p - 1)
        for t in range(p - 1):
            comp = self.comps[t]
            a = pow(ctx.u, s, comp.pK())
            out[(t + s) % (p - 1)] = comp.substitute_affine(a, (a - 1) % comp.pK())
        return LambdaLevel(ctx, out)

    def eta_component(self, t):
        return self.comps[t % (self.ctx.F.p - 1)]

    def min_vp(self):
        e = self.ctx.F.e
        return min(Fraction(c.max_coeff_val(), e) for c in self.comps)

    def is_integral(self):
        return self.min_vp() >= 0

    def diff_floor(self, other):
        """Valuation floor of the difference (agreement certificate)."""
        self._match(other)
        e = self.ctx.F.e
        return min(
            Fraction((a - b).max_coeff_val(), e)
            for a, b in zip(self.comps, other.comps)
        )

    def __repr__(self):
        return f"LambdaLevel(n={self.ctx.n}, p={self.ctx.F.p})"


# -- Mellin transforms -----------------------------------------------------------


def mellin_forward_poly(lam, jet=0):
    """Mellin image as an honest polynomial in pi, degree < p^(n+1).

    With jet = s the s-th D-jet of the image is produced instead, using
    the exact per-group-element weights a^s = omega(delta)^s u^(xs); the
    eigencoordinates may be honest lifts of degree >= p^n, which fold
    into the level consistently.
    """
    ctx = lam.ctx
    F = ctx.F
    p = F.p
    L = ctx.L
    d = F.d
    gam = [comp.substitute_affine(1, -1) for comp in lam.comps]
    lanes, scale, aprec, pK = _common_lanes(gam)
    W = ctx.weights(pK)
    Winv = [[W[dIdx][(p - 1 - t) % (p - 1)] for t in range(p - 1)] for dIdx in range(p - 1)]
    inv_pm1 = pow(p - 1, -1, pK) if pK > 1 else 0
    tj = [pow(W[dIdx][1] if p > 2 else 1, jet, pK) for dIdx in range(p - 1)]
    us = pow(ctx.u, jet, pK)
    xlen = max(len(l[0]) for l in lanes)
    tau = [[0] * L for _ in range(d)]
    ujet = 1
    uL = 1
    for x in range(xlen):
        for dIdx in range(p - 1):
            a = ctx.teich[dIdx] * uL % L
            swt = inv_pm1 * tj[dIdx] * ujet % pK
            if not swt:
                continue
            wrow = Winv[dIdx]
            for b in range(d):
                v = 0
                for t in range(p - 1):
                    lane = lanes[t][b]
                    if x < len(lane) and lane[x]:
                        v += wrow[t] * lane[x]
                if v:
                    tau[b][a] = (tau[b][a] + swt * v) % pK
        ujet = ujet * us % pK
        uL = uL * ctx.u % L
    body = PolyVec(F, tau, scale, aprec, normalize=False)
    return body.substitute_affine(1, 1)


def mellin_forward(lam, jet=0):
    """Spec-facing wrapper returning a PiSeries at the level's truncation."""
    poly = mellin_forward_poly(lam, jet)
    return PiSeries(poly, lam.ctx.L)


def mellin_inverse(W, ctx, tol):
    """Invert the Mellin transform at level ctx.n.

    W is a polynomial in pi (PolyVec or PiSeries), reduced here modulo
    phi^(n+1)(pi).  Coefficients at p-divisible tau-indices must vanish
    to valuation >= tol (p-adic units); otherwise NotPsiZero is raised.
    The base change tau^a <-> pi-powers is exact, so the transform
    itself loses no precision.
    """
    F = ctx.F
    p = F.p
    L = ctx.L
    poly = W.poly if isinstance(W, PiSeries) else W
    folded = poly.rem_intpoly(omega_intpoly(p, ctx.n + 1))
    tau = folded.substitute_affine(1, -1)
    for a in range(0, min(tau.length, L), p):
        c = tau.coeff(a)
        if c.vp() < tol:
            raise NotPsiZero(
                f"tau^{a} coefficient has valuation {c.vp()} < {tol}"
            )
    lanes, scale, aprec, pK = _common_lanes([tau])
    tl = lanes[0]
    Wtab = ctx.weights(pK)
    comps = []
    for t in range(p - 1):
        lanes_t = [[0] * ctx.nx for _ in range(F.d)]
        for x in range(ctx.nx):
            for dIdx in range(p - 1):
                a = ctx.unit_of[(dIdx, x)]
                w = Wtab[dIdx][t]
                for b in range(F.d):
                    if a < len(tl[b]) and tl[b][a]:
                        lanes_t[b][x] = (lanes_t[b][x] + w * tl[b][a]) % pK
        body = PolyVec(F, lanes_t, scale, aprec, normalize=False)
        comps.append(body.substitute_affine(1, 1))
    return LambdaLevel(ctx, comps)


# -- factored-modulus elements ---------------------------------------------------


def factor_keys(n, m):
    """Canonical factor list for the modulus omega_{n,m}: (i, l) pairs."""
    keys = []
    for l in range(n + 1):
        for i in range(m):
            keys.append((i, l))
    return keys


class LambdaElement:
    """Level-n element presented by residues at the factors of omega_{n,m}.

    comps[t] maps each factor key (i, l) to the residue of the omega^t
    eigencoordinate: the value at u^i - 1 for l = 0, else the reduction
    modulo Tw^(-i)(Phi_l) as a polynomial of degree < p^l - p^(l-1).
    Keeping residues per factor avoids recombination across twists,
    which would cost p-adic precision.
    """

    __slots__ = ("F", "u", "n", "m", "comps")

    def __init__(self, F, u, n, m, comps):
        self.F = F
        self.u = u
        self.n = n
        self.m = m
        self.comps = tuple(comps)
        if len(self.comps) != F.p - 1:
            raise InvalidInput("need one residue table per Delta-character")

    # constructors

    @classmethod
    def from_level(cls, lam, m):
        """Plain reduction of a polynomial element at every factor."""
        ctx = lam.ctx
        F = ctx.F
        p = F.p
        comps = []
        for t in range(p - 1):
            comp = lam.comps[t]
            pK = comp.pK()
            dd = {}
            for i in range(m):
                pt = (pow(ctx.u, i, pK) - 1) % pK
                dd[(i, 0)] = comp.substitute_affine(0, pt).coeff(0)
                for l in range(1, ctx.n + 1):
                    dd[(i, l)] = comp.rem_intpoly(
                        tw_factor_intpoly(p, ctx.u, i, l, pK)
                    )
            comps.append(dd)
        return cls(F, ctx.u, ctx.n, m, comps)

    @classmethod
    def from_jets(cls, F, u, n, m, jets, tol):
        """Residues of the inverse Mellin transform of an honest jet family.

        jets[s] must be the s-th D-jet of one Mellin image, formed
        before any exponent folding.  The residue at Tw^(-i)(Phi_l) is
        the eigenshifted residue of the i-th jet inverted at level l.
        """
        if len(jets) < m:
            raise InvalidInput("need one jet per twist")
        p = F.p
        comps = [dict() for _ in range(p - 1)]
        for l in range(n + 1):
            ctx = level_context(F, u, l)
            phi_l = bigphi_intpoly(p, l) if l >= 1 else None
            for i in range(m):
                lam = mellin_inverse(jets[i], ctx, tol)
                for t in range(p - 1):
                    src = lam.comps[(t - i) % (p - 1)]
                    if l == 0:
                        comps[t][(i, 0)] = src.coeff(0)
                    else:
                        r = src.rem_intpoly(phi_l)
                        ai = pow(u, -i, r.pK())
                        comps[t][(i, l)] = r.substitute_affine(
                            ai, (ai - 1) % r.pK()
                        )
        return cls(F, u, n, m, comps)

    @classmethod
    def from_scalar(cls, F, u, n, m, s):
        """The constant s at every factor."""
        comps = []
        for _ in range(F.p - 1):
            dd = {}
            for (i, l) in factor_keys(n, m):
                dd[(i, l)] = s if l == 0 else PolyVec.from_scalars([s])
            comps.append(dd)
        return cls(F, u, n, m, comps)

    # ring structure

    def _match(self, other):
        if self.F is not other.F or self.u != other.u:
            raise LevelMismatch("elements over different towers")
        if self.n != other.n or self.m != other.m:
            raise LevelMismatch("elements with different moduli")
        for t in range(self.F.p - 1):
            if self.comps[t].keys() != other.comps[t].keys():
                raise LevelMismatch("elements with different factor sets")

    def _zip(self, other, f_scalar, f_poly):
        self._match(other)
        comps = []
        for t in range(self.F.p - 1):
            dd = {}
            for key, r in self.comps[t].items():
                s = other.comps[t][key]
                dd[key] = f_scalar(key, r, s) if key[1] == 0 else f_poly(key, r, s)
            comps.append(dd)
        return LambdaElement(self.F, self.u, self.n, self.m, comps)

    def __add__(self, other):
        return self._zip(other, lambda k, a, b: a + b, lambda k, a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda k, a, b: a - b, lambda k, a, b: a - b)

    def __neg__(self):
        return self.map_residues(lambda k, r: -r)

    def __mul__(self, other):
        def poly_mul(key, a, b):
            prod = a * b
            i, l = key
            return prod.rem_intpoly(
                tw_factor_intpoly(self.F.p, self.u, i, l, prod.pK())
            )

        return self._zip(other, lambda k, a, b: a * b, poly_mul)

    def map_residues(self, f):
        comps = []
        for t in range(self.F.p - 1):
            comps.append({key: f(key, r) for key, r in self.comps[t].items()})
        return LambdaElement(self.F, self.u, self.n, self.m, comps)

    def mul_scalar(self, s):
        return self.map_residues(
            lambda k, r: r * s if k[1] == 0 else r.mul_scalar(s)
        )

    def mul_int(self, k):
        return self.map_residues(lambda key, r: r.mul_int(k))

    def shift_p(self, k):
        return self.map_residues(lambda key, r: r.shift_p(k))

    def tw(self, s):
        """Reindex under the twist automorphism.

        Tw^s carries the factor Tw^(-i)(F) to Tw^(-(i-s))(F), so keys
        shift down by s; residues transport through X -> u^s(1+X) - 1
        and linear values are unchanged.  Exact, unlike twisting a
        representative reduced modulo omega_n.
        """
        p = self.F.p
        comps = [dict() for _ in range(p - 1)]
        for t in range(p - 1):
            for (i, l), r in self.comps[t].items():
                if l == 0:
                    out = r
                else:
                    a = pow(self.u, s, r.pK())
                    out = r.substitute_affine(a, (a - 1) % r.pK())
                comps[(t + s) % (p - 1)][(i - s, l)] = out
        return LambdaElement(self.F, self.u, self.n, self.m, comps)

    # access and measurements

    def residue(self, t, i, l):
        return self.comps[t % (self.F.p - 1)][(i, l)]

    def reduce_level(self, n2):
        if n2 > self.n:
            raise LevelMismatch("cannot deepen by reduction")
        comps = [
            {key: r for key, r in dd.items() if key[1] <= n2}
            for dd in self.comps
        ]
        return LambdaElement(self.F, self.u, n2, self.m, comps)

    def min_vp(self, keys=None):
        e = self.F.e
        best = None
        for dd in self.comps:
            for key, r in dd.items():
                if keys is not None and key not in keys:
                    continue
                v = r.vp() if isinstance(r, PadicScalar) else Fraction(
                    r.max_coeff_val(), e
                )
                if best is None or v < best:
                    best = v
        return best

    def is_integral(self):
        return self.min_vp() >= 0

    def diff_floor(self, other):
        return (self - other).min_vp()

    def __repr__(self):
        return f"LambdaElement(p={self.F.p}, n={self.n}, m={self.m})"


def tw(x, s):
    """Twist automorphism on either element representation."""
    return x.tw(s)


# -- towers ----------------------------------------------------------------------


@dataclass
class DistApproximant:
    """Coherent tower of factored elements with a declared growth order.

    levels[n] is reduced modulo omega_{n,m}; the denominator exponent at
    level n is bounded by n*growth_order + c.
    """

    levels: tuple
    m: int
    growth_order: Fraction
    c: Fraction
    u: int

    @classmethod
    def from_tower(cls, levels, growth_order, u, c=None):
        growth_order = Fraction(growth_order)
        if c is None:
            c = Fraction(0)
            for n, el in enumerate(levels):
                v = el.min_vp()
                need = -v - n * growth_order
                if need > c:
                    c = need
            if c < 0:
                c = Fraction(0)
        return cls(tuple(levels), levels[0].m, growth_order, Fraction(c), u)

    @property
    def n_max(self):
        return len(self.levels) - 1

    def level(self, n):
        return self.levels[n]

    def coherence_report(self, tol):
        rep = ReportSet()
        for n in range(self.n_max):
            floor = self.levels[n + 1].reduce_level(n).diff_floor(self.levels[n])
            rep.add(
                f"coherence level {n + 1}->{n}",
                floor >= tol,
                f"agreement floor {floor} >= {tol}",
            )
        return rep

    def growth_report(self):
        rep = ReportSet()
        for n, el in enumerate(self.levels):
            bound = -(n * self.growth_order + self.c)
            v = el.min_vp()
            rep.add(
                f"growth bound level {n}",
                v >= bound,
                f"min valuation {v} >= {bound}",
            )
        return rep

    def _binary(self, other, f, r):
        if len(self.levels) != len(other.levels):
            raise LevelMismatch("towers of different depth")
        levels = tuple(f(a, b) for a, b in zip(self.levels, other.levels))
        return DistApproximant.from_tower(levels, r, self.u)

    def __add__(self, other):
        return self._binary(
            other, lambda a, b: a + b, max(self.growth_order, other.growth_order)
        )

    def __sub__(self, other):
        return self._binary(
            other, lambda a, b: a - b, max(self.growth_order, other.growth_order)
        )

    def __mul__(self, other):
        return self._binary(
            other, lambda a, b: a * b, self.growth_order + other.growth_order
        )

    def mul_scalar(self, s):
        levels = tuple(el.mul_scalar(s) for el in self.levels)
        return DistApproximant.from_tower(levels, self.growth_order, self.u)


# -- characters ------------------------------------------------------------------


@dataclass
class CharacterSpec:
    """A locally algebraic character datum chi^j theta, theta finite.

    theta has conductor p^cond (cond = 0 means unramified, cond = 1
    means Delta-only), Delta-part omega^delta_pow, and theta(gamma) =
    zeta, a fixed primitive p^(cond-1)-th root of unity for cond >= 2.
    """

    F: object
    u: int
    cond: int
    delta_pow: int
    ell: int
    T: object
    emb: object
    zeta: object

    @classmethod
    def make(cls, F, u, cond, delta_pow, aprec):
        validate_u(F.p, u)
        if cond < 0:
            raise InvalidInput("conductor exponent must be >= 0")
        ell = max(cond - 1, 0)
        if ell == 0:
            T, emb = extend_cyclotomic(F, 0, aprec)
            return cls(F, u, cond, delta_pow, 0, T, emb, T.one(aprec))
        # extend_cyclotomic takes precision in destination pi-units; scale
        # so the composite carries at least aprec/F.e p-adic digits
        phi_ell = (F.p - 1) * F.p ** (ell - 1)
        dst_aprec = aprec * max(1, -(-phi_ell // F.e))
        T, emb = extend_cyclotomic(F, ell, dst_aprec)
        zeta = root_of_unity(T, F.p**ell, dst_aprec)
        return cls(F, u, cond, delta_pow, ell, T, emb, zeta)

    def point(self, j):
        """The substitution point u^j zeta - 1 in T."""
        K = max(1, -(-self.zeta.aprec // self.T.e))
        uj = self.T.scalar(pow(self.u, j, self.T.p**K), self.zeta.aprec)
        return uj * self.zeta - self.T.one(self.zeta.aprec)

    def point_powers(self, j, length):
        pt = self.point(j)
        powers = [self.T.one(pt.aprec)]
        for _ in range(max(0, length - 1)):
            powers.append(powers[-1] * pt)
        return powers


def eval_character(elem, j, theta):
    """Evaluate at chi^j theta; the value lives in theta's cyclotomic field."""
    p = theta.F.p
    t_sel = (j + theta.delta_pow) % (p - 1)
    if isinstance(elem, DistApproximant):
        if theta.ell > elem.n_max:
            raise ConductorExceedsLevel(
                f"conductor exponent {theta.cond} needs level {theta.ell}"
            )
        elem = elem.levels[-1]
    if isinstance(elem, LambdaLevel):
        if theta.ell > elem.ctx.n:
            raise ConductorExceedsLevel(
                f"conductor exponent {theta.cond} needs level {theta.ell}"
            )
        comp = elem.comps[t_sel]
        powers = theta.point_powers(j, comp.length)
        return comp.evaluate_embedded(theta.emb, powers)
    key = (j, theta.ell)
    if key not in elem.comps[t_sel]:
        if theta.ell > elem.n:
            raise ConductorExceedsLevel(
                f"conductor exponent {theta.cond} needs level {theta.ell}"
            )
        raise InvalidInput(f"twist {j} outside the factored modulus")
    r = elem.comps[t_sel][key]
    if theta.ell == 0:
        return theta.emb.apply(r) if theta.T is not theta.F else r
    powers = theta.point_powers(j, r.length)
    return r.evaluate_embedded(theta.emb, powers)


# -- named polynomial constructors ------------------------------------------------


def omega_phi_constructors(F, u, n, m, variant, aprec):
    """Exact twisted products of omega_n / Phi_n as a PolyVec.

    variant is one of "omega_n", "phi_n", "omega_nm", "phi_nm"; the nm
    variants are the products over twists Tw^(-i) for 0 <= i < m.
    """
    p = F.p
    e = F.e
    K = max(1, -(-aprec // e))
    pK = p**K
    if variant == "omega_n":
        out = [c % pK for c in omega_intpoly(p, n)]
    elif variant == "phi_n":
        base = [0, 1] if n == 0 else bigphi_intpoly(p, n)
        out = [c % pK for c in base]
    elif variant in ("omega_nm", "phi_nm"):
        out = [1]
        for i in range(m):
            if variant == "omega_nm":
                fac = poly_mulmod_int(
                    tw_factor_intpoly(p, u, i, 0, pK),
                    _tw_omega_over_x_intpoly(p, u, i, n, pK),
                    pK,
                )
            else:
                fac = tw_factor_intpoly(p, u, i, max(n, 1), pK) if n >= 1 else \
                    tw_factor_intpoly(p, u, i, 0, pK)
            out = poly_mulmod_int(out, fac, pK)
    else:
        raise InvalidInput(f"unknown constructor variant {variant!r}")
    return PolyVec.from_int_coeffs(F, out, aprec)


def _tw_omega_over_x_intpoly(p, u, i, n, pK):
    """Tw^(-i)(omega_n / X) = product of Tw^(-i)(Phi_l) for 1 <= l <= n."""
    out = [1]
    for l in range(1, n + 1):
        out = poly_mulmod_int(out, tw_factor_intpoly(p, u, i, l, pK), pK)
    return out


def frak_n_representative(F, u, m, n, aprec, start=0):
    """Finite-level representative of the logarithm product.

    Returns (N, s) with N = prod over start <= i < m of Tw^(-i)(omega_n/X)
    and s the power of p (as a valuation, -n*(m-start)) scaling N to the
    analytic object modulo twisted-omega error terms.  The zero set of N
    is {u^i zeta - 1 : start <= i < m, zeta^(p^n) = 1, zeta != 1}.
    """
    p = F.p
    e = F.e
    K = max(1, -(-aprec // e))
    pK = p**K
    out = [1]
    for i in range(start, m):
        out = poly_mulmod_int(out, _tw_omega_over_x_intpoly(p, u, i, n, pK), pK)
    return PolyVec.from_int_coeffs(F, out, aprec), Fraction(-n * (m - start))


# -- structure theorem checks ------------------------------------------------------


def _pow_intpoly(base, m, pK):
    out = [1]
    for _ in range(m):
        out = poly_mulmod_int(out, base, pK)
    return out


def forward_divisibility_floors(W_jets, F, n, m):
    """Floors certifying divisibility of a psi = 0 image by phi^n(q^m).

    Decompose the level-n quotient along the coprime factors of
    phi^(n+1)(pi).  On the factors of phi^n(pi) the divisor acts as p^m
    (Phi_(n+1) = p there), so the residues must have valuation >= m.
    On the top factor Phi_(n+1) the first m jets must vanish, and the
    Taylor coefficient of order m must be divisible by p^(m(n+1)) after
    multiplication by omega_n^m, which inverts the jet normalization
    (D Phi_(n+1))^m exactly.
    """
    p = F.p
    e = F.e
    W0 = W_jets[0]
    lower = Fraction(W0.substitute_affine(0, 0).coeff(0).vp())
    for l in range(1, n + 1):
        r = W0.rem_intpoly(bigphi_intpoly(p, l))
        lower = min(lower, Fraction(r.max_coeff_val(), e))
    top_mod = bigphi_intpoly(p, n + 1)
    top_kill = None
    for s in range(m):
        r = W_jets[s].rem_intpoly(top_mod)
        v = Fraction(r.max_coeff_val(), e)
        top_kill = v if top_kill is None else min(top_kill, v)
    omega_n = PolyVec.from_int_coeffs(F, omega_intpoly(p, n), W0.aprec)
    body = W_jets[m]
    for _ in range(m):
        body = body * omega_n
    taylor = Fraction(body.rem_intpoly(top_mod).max_coeff_val(), e)
    return lower, top_kill, taylor


def factored_membership_floors(elem):
    """Floors certifying divisibility by the top twisted factors.

    For an element modulo omega_{n,m} to be a multiple of the product of
    Tw^(-i)(Phi_n) over i < m, the residues at those factors must vanish
    and the remaining residues must be divisible by p^m, since the top
    product reduces to a constant of valuation exactly m at every other
    factor.
    """
    n = elem.n
    top = elem.min_vp(keys={(i, n) for i in range(elem.m)})
    lower = elem.min_vp(
        keys={key for key in factor_keys(n, elem.m) if key[1] < n}
    )
    return top, lower


def theorem_mellin_check(F, u, n, m, sample_count=12, seed=0, aprec=None, tol=None):
    """Two-sided finite-level check of the twisted structure isomorphism.

    Forward: for random integral lambda, the Mellin image of
    Phi_{n,m} * lambda is divisible by phi^n(q^m) with integral
    quotient.  Backward (n >= 1): the inverse image of phi^n(q^m) times
    a random integral psi = 0 series is divisible by Phi_{n,m} with
    integral quotient.  All floors are certified coefficientwise; no
    residue ring is ever inverted.
    """
    p = F.p
    e = F.e
    if aprec is None:
        aprec = 40 * e
    if tol is None:
        tol = Fraction(aprec, e) - 6
    rng = random.Random(seed)
    ctx = level_context(F, u, n)
    K = max(1, -(-aprec // e))
    pK = p**K
    draw_mod = p ** min(8, K)
    phinm = [1]
    base_n = [0, 1] if n == 0 else bigphi_intpoly(p, n)
    for i in range(m):
        if n == 0:
            fac = tw_factor_intpoly(p, u, i, 0, pK)
        else:
            fac = tw_factor_intpoly(p, u, i, n, pK)
        phinm = poly_mulmod_int(phinm, fac, pK)
    phinm_poly = PolyVec.from_int_coeffs(F, phinm, aprec)
    rep = ReportSet()

    lower_worst = top_worst = taylor_worst = None
    for trial in range(sample_count):
        comps = []
        for t in range(p - 1):
            lanes = [
                [rng.randrange(draw_mod) for _ in range(ctx.nx)]
                for _ in range(F.d)
            ]
            comps.append(PolyVec(F, lanes, 0, aprec))
        lam = LambdaLevel(ctx, comps)
        lifted = LambdaLevel(ctx, [c * phinm_poly for c in lam.comps])
        jets = [mellin_forward_poly(lifted, jet=s) for s in range(m + 1)]
        lo, tk, ty = forward_divisibility_floors(jets, F, n, m)
        lower_worst = lo if lower_worst is None else min(lower_worst, lo)
        top_worst = tk if top_worst is None else min(top_worst, tk)
        taylor_worst = ty if taylor_worst is None else min(taylor_worst, ty)
    rep.add(
        "forward lower-factor divisibility",
        lower_worst >= m,
        f"floor {lower_worst} >= {m} over {sample_count} samples",
    )
    rep.add(
        "forward top-factor multiplicity",
        top_worst >= tol,
        f"jet floor {top_worst} >= {tol}",
    )
    rep.add(
        "forward Taylor integrality",
        taylor_worst >= m * (n + 1),
        f"floor {taylor_worst} >= {m * (n + 1)}",
    )

    if n >= 1:
        phi_tau = [0] * ((p - 1) * p**n + 1)
        for i in range(p):
            phi_tau[i * p**n] = 1
        mult = _pow_intpoly(phi_tau, m, pK)
        top_worst2 = lower_worst2 = None
        for trial in range(sample_count):
            jets_pi = []
            lanes0 = []
            for b in range(F.d):
                lane = [0] * ctx.L
                for a in range(ctx.L):
                    if a % p:
                        lane[a] = rng.randrange(draw_mod)
                lanes0.append(lane)
            prod = [poly_mulmod_int(mult, lane, pK) for lane in lanes0]
            for s in range(m):
                folded = [[0] * ctx.L for _ in range(F.d)]
                for b in range(F.d):
                    pl = prod[b]
                    fl = folded[b]
                    for a, c in enumerate(pl):
                        if c:
                            fl[a % ctx.L] = (fl[a % ctx.L] + c * pow(a, s, pK)) % pK
                body = PolyVec(F, folded, 0, aprec, normalize=False)
                jets_pi.append(body.substitute_affine(1, 1))
            elem = LambdaElement.from_jets(F, u, n, m, jets_pi, tol)
            tp, lo = factored_membership_floors(elem)
            top_worst2 = tp if top_worst2 is None else min(top_worst2, tp)
            lower_worst2 = lo if lower_worst2 is None else min(lower_worst2, lo)
        rep.add(
            "backward top-factor vanishing",
            top_worst2 >= tol,
            f"floor {top_worst2} >= {tol}",
        )
        rep.add(
            "backward quotient integrality",
            lower_worst2 >= m,
            f"floor {lower_worst2} >= {m} over {sample_count} samples",
        )
    return rep
