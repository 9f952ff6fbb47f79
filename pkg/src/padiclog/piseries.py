"""Truncated power series in the cyclotomic variable pi.

The ring carries three commuting structures: the Frobenius phi acting by
pi -> (1+pi)^p - 1, the group Gamma acting by pi -> (1+pi)^c - 1 for
units c, and the left inverse psi of phi.

psi is computed exactly through the tau = 1 + pi basis: a polynomial in
tau maps under psi by keeping the tau-exponents divisible by p and
dividing them by p.  This is the same operator as the root-of-unity
averaging (1/p) sum_zeta f(zeta(1+pi) - 1) but loses no precision; the
averaging form is kept as psi_by_averaging for cross-checks.

Series here are for module-level identities at moderate pi-order; the
heavy finite-level apparatus works with exact polynomials elsewhere.
"""

from __future__ import annotations

from math import comb

from .errors import InvalidInput, LevelMismatch
from .polys import PolyVec


def q_intpoly(p):
    """phi(pi)/pi as an integer polynomial: the distinguished factor."""
    return [comb(p, j + 1) for j in range(p)]


def mu_inv_intpoly(p):
    """(q - pi^(p-1))/p, an integral polynomial with constant term 1."""
    q = q_intpoly(p)
    q[p - 1] -= 1
    assert all(c % p == 0 for c in q)
    out = [c // p for c in q]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def phi_pow_pi_intpoly(p, n):
    """phi^n(pi) = (1+pi)^(p^n) - 1 as an integer polynomial."""
    N = p**n
    return [comb(N, j) if j else 0 for j in range(N + 1)]


class PiSeries:
    """A power series in pi known modulo pi^N (and modulo the precision
    of its coefficients)."""

    __slots__ = ("poly", "N")

    def __init__(self, poly, N):
        if poly.length > N:
            poly = PolyVec(
                poly.F, [lane[:N] for lane in poly.coords], poly.scale, poly.aprec, False
            )
        self.poly = poly
        self.N = N

    @classmethod
    def from_int_coeffs(cls, F, ints, N, aprec, scale=0):
        return cls(PolyVec.from_int_coeffs(F, ints[:N], aprec, scale), N)

    @classmethod
    def one(cls, F, N, aprec):
        return cls(PolyVec.one(F, aprec), N)

    @classmethod
    def pi(cls, F, N, aprec):
        return cls(PolyVec.xvar(F, aprec), N)

    def _samelevel(self, other):
        if self.N != other.N:
            raise LevelMismatch("series truncated at different orders")

    def __add__(self, other):
        self._samelevel(other)
        return PiSeries(self.poly + other.poly, self.N)

    def __sub__(self, other):
        self._samelevel(other)
        return PiSeries(self.poly - other.poly, self.N)

    def __neg__(self):
        return PiSeries(-self.poly, self.N)

    def __mul__(self, other):
        self._samelevel(other)
        return PiSeries(self.poly * other.poly, self.N)

    def mul_scalar(self, s):
        return PiSeries(self.poly.mul_scalar(s), self.N)

    def coeff(self, i):
        return self.poly.coeff(i)

    def is_zero(self):
        return self.poly.is_zero()

    def order_ge(self, k):
        """Whether the series vanishes to pi-order k (to coefficient precision)."""
        for i in range(min(k, self.poly.length)):
            if not self.poly.coeff(i).is_zero():
                return False
        return True

    # -- composition-type operations -----------------------------------------

    def substitute(self, other):
        """f(g(pi)) for g with g(0) = 0, truncated at this series' order."""
        if not other.poly.coeff(0).is_zero():
            raise InvalidInput("substitution needs a series with zero constant term")
        N = self.N
        F = self.poly.F
        acc = PolyVec.zero(F, self.poly.aprec)
        for i in range(self.poly.length - 1, -1, -1):
            acc = acc * other.poly
            if acc.length > N:
                acc = PolyVec(F, [lane[:N] for lane in acc.coords], acc.scale, acc.aprec, False)
            c = self.poly.coeff(i)
            if not c.is_zero():
                acc = acc + PolyVec(F, [[m] for m in c.mants], c.scale, c.aprec)
        return PiSeries(acc, N)

    def phi(self):
        """Frobenius: pi -> (1+pi)^p - 1, coefficients untouched."""
        p = self.poly.F.p
        g = PiSeries.from_int_coeffs(
            self.poly.F, phi_pow_pi_intpoly(p, 1), self.N, self.poly.aprec
        )
        return self.substitute(g)

    def gamma(self, c):
        """The group action pi -> (1+pi)^c - 1 for a positive integer c."""
        if c < 1:
            raise InvalidInput("gamma action implemented for positive integers")
        g = PiSeries.from_int_coeffs(
            self.poly.F,
            [comb(c, j) if j else 0 for j in range(min(c, self.N - 1) + 1)],
            self.N,
            self.poly.aprec,
        )
        return self.substitute(g)

    def psi(self):
        """Exact psi through the tau basis; output order floor((N-p+1)/p)."""
        p = self.poly.F.p
        tau = self.poly.substitute_affine(1, -1)  # coefficients in tau = 1+pi
        picked = [lane[::p] for lane in tau.coords]
        n = max(1, max(len(lane) for lane in picked))
        picked = [lane + [0] * (n - len(lane)) for lane in picked]
        down = PolyVec(tau.F, picked, tau.scale, tau.aprec, False)
        back = down.substitute_affine(1, 1)
        N_out = max(1, (self.N - p + 1 + p - 1) // p)
        return PiSeries(back, N_out)

    def __repr__(self):
        return f"PiSeries(N={self.N}, deg={self.poly.degree()})"


def geometric_inverse(f, N):
    """Inverse of a series with unit constant term, modulo pi^N."""
    c0 = f.poly.coeff(0)
    if c0.val_pi() != 0:
        raise InvalidInput("series inversion needs a unit constant term")
    F = f.poly.F
    inv0 = c0.inverse()
    y = PiSeries(PolyVec(F, [[m] for m in inv0.mants], inv0.scale, inv0.aprec), N)
    two = PiSeries.from_int_coeffs(F, [2], N, f.poly.aprec)
    order = 1
    while order < N:
        y = y * (two - f * y)
        order *= 2
    return y


def phi_psi_by_averaging(f, T, emb, zeta):
    """Root-of-unity averaging form of phi(psi(f)), a cross-check oracle.

    f: PiSeries over E; T: a field containing E and a primitive p-th root
    of unity zeta; emb: the embedding E -> T.  Returns the PiSeries over T

        (1/p) sum_{zeta^p = 1} f(zeta(1+pi) - 1) = phi(psi(f)),

    one digit weaker than the exact path because of the 1/p.
    """
    p = f.poly.F.p
    fT = PiSeries(
        PolyVec.from_scalars([emb.apply(f.poly.coeff(i)) for i in range(f.poly.length)]),
        f.N,
    )
    acc = None
    zpow = T.one(zeta.aprec)
    for _ in range(p):
        shifted = _affine_scalar(fT.poly, zpow, f.N)
        acc = shifted if acc is None else acc + shifted
        zpow = zpow * zeta
    inv_p = T.scalar(p, acc.aprec + 2 * T.e).inverse()
    return PiSeries(acc.mul_scalar(inv_p), f.N)


def _affine_scalar(poly, a, N):
    """Substitute X -> a*(1+X) - 1 with a scalar a, truncating at order N."""
    F = poly.F
    lin = PolyVec.from_scalars([a - F.one(a.aprec), a])
    acc = PolyVec.zero(F, poly.aprec)
    for i in range(poly.length - 1, -1, -1):
        acc = acc * lin
        if acc.length > N:
            acc = PolyVec(F, [lane[:N] for lane in acc.coords], acc.scale, acc.aprec, False)
        c = poly.coeff(i)
        if not c.is_zero():
            acc = acc + PolyVec(F, [[m] for m in c.mants], c.scale, c.aprec)
    return acc
