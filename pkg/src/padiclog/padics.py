"""Exact arithmetic in finite extensions of Q_p.

A field is described by an unramified part of residue degree f, generated
by an element w whose minimal polynomial is irreducible mod p, and a
totally ramified part of degree e generated by a uniformizer pi satisfying
an Eisenstein polynomial with coefficients in the unramified part.
Elements are stored on the integral basis {w^i pi^j : i < f, j < e} as
integer mantissa vectors together with a shared power-of-p scale.

Valuations are handled internally as integers in pi-units (v(pi) = 1,
v(p) = e) so hot paths never touch Fraction arithmetic; the public
accessors report v_p as a Fraction.  The basis is triangular for the
valuation, so the valuation of an element is the exact minimum over its
nonzero coordinates; no Newton-polygon estimate is involved.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    EqualRoots,
    EvenPrime,
    InvalidInput,
    OrdinaryForm,
    PrecisionExhausted,
    RootsNotInField,
    UnsupportedField,
)


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_qr(u: int, p: int) -> bool:
    """Whether the unit u is a square modulo the odd prime p."""
    return pow(u % p, (p - 1) // 2, p) == 1


# ---------------------------------------------------------------------------
# small polynomial helpers over F_p, used only for field construction


def _fp_polmulmod(a, b, mod, p):
    deg = len(mod) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    for i in range(len(out) - 1, deg - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for t in range(deg):
                out[i - deg + t] = (out[i - deg + t] - c * mod[t]) % p
    out = out[:deg]
    while len(out) < deg:
        out.append(0)
    return out


def _fp_powmod(base, n, mod, p):
    result = [1] + [0] * (len(mod) - 2)
    cur = list(base)
    while n:
        if n & 1:
            result = _fp_polmulmod(result, cur, mod, p)
        cur = _fp_polmulmod(cur, cur, mod, p)
        n >>= 1
    return result


def _is_irreducible_fp(coeffs, p):
    """Irreducibility test for a monic polynomial over F_p."""
    d = len(coeffs) - 1
    if d < 1:
        return False
    mod = [c % p for c in coeffs]
    x = [0, 1] if d > 1 else [(-mod[0]) % p]
    if d == 1:
        return True
    xq = _fp_powmod([0, 1], p**d, mod, p)
    lin = list(xq)
    lin[1] = (lin[1] - 1) % p
    if any(lin):
        return False
    # no root field of proper degree: gcd(x^{p^{d/q}} - x, f) must be 1
    for q in _prime_divisors(d):
        xq2 = _fp_powmod([0, 1], p ** (d // q), mod, p)
        diff = list(xq2)
        diff[1] = (diff[1] - 1) % p
        if _fp_gcd_is_nontrivial(diff, mod, p):
            return False
    return True


def _prime_divisors(n):
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def _fp_gcd_is_nontrivial(a, b, p):
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        a, b = b, _fp_polrem(a, b, p)
    return len(a) > 1


def _fp_polrem(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        if c:
            for i in range(len(b)):
                a[len(a) - len(b) + i] = (a[len(a) - len(b) + i] - c * b[i]) % p
        a.pop()
        a = _trim(a)
    return a


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def newton_slopes(coeffs, p):
    """Lower-hull slopes of a monic integer polynomial.

    Returns a list of (slope, length) pairs with slope a Fraction, read
    from the constant term to the leading term, i.e. slopes of the roots
    with multiplicity = length (slope = valuation of the roots on that
    segment).
    """
    pts = []
    for i, c in enumerate(coeffs):
        if c != 0:
            pts.append((i, vp_int(c, p)))
    if coeffs[0] == 0:
        raise InvalidInput("polynomial has zero constant term")
    hull = []
    i0, v0 = pts[0]
    rest = pts[1:]
    while rest:
        best = None
        for i, v in rest:
            s = Fraction(v - v0, i - i0)
            if best is None or s < best[0] or (s == best[0] and i > best[1]):
                best = (s, i, v)
        hull.append((-best[0], best[1] - i0))
        rest = [(i, v) for (i, v) in rest if i > best[1]]
        i0, v0 = best[1], best[2]
    return hull


# ---------------------------------------------------------------------------


class FieldDescriptor:
    """A finite extension of Q_p with precomputed structure constants.

    fpoly: monic integer polynomial of the unramified generator w,
           irreducible mod p (degree f; (−1, 1) encodes w = 1 when f = 1).
    epoly: None for e = 1, else a monic Eisenstein polynomial of degree e
           whose lower coefficients are f-vectors over Z (elements of the
           unramified part): pi^e + sum_j epoly[j] * pi^j = 0.
    zeta_order: k means the p^k-th roots of unity are available as
           powers of 1 + pi (set by the cyclotomic constructor).
    """

    def __init__(self, p, fpoly, epoly=None, zeta_order=0, label=""):
        if p == 2:
            raise EvenPrime("p = 2 is not supported")
        self.p = p
        self.fpoly = tuple(int(c) for c in fpoly)
        self.f = len(self.fpoly) - 1
        if epoly is None:
            self.epoly = None
            self.e = 1
        else:
            self.epoly = tuple(tuple(int(c) for c in vec) for vec in epoly)
            self.e = len(self.epoly)
            for vec in self.epoly:
                if len(vec) != self.f:
                    raise InvalidInput("epoly coefficient has wrong length")
        self.d = self.f * self.e
        self.zeta_order = zeta_order
        self.label = label or f"ext(p={p},f={self.f},e={self.e})"
        self._wred = tuple(-c for c in self.fpoly[: self.f])
        self._build_struct()
        self._pi_pow_cache = {}
        self._inv2 = None

    # -- table construction -------------------------------------------------

    def _build_struct(self):
        f, e, d = self.f, self.e, self.d
        wpow = [[1 if t == i else 0 for t in range(f)] for i in range(f)]
        for i in range(f, 3 * f - 2):
            prev = wpow[i - 1]
            cur = [0] * f
            for t in range(1, f):
                cur[t] = prev[t - 1]
            top = prev[f - 1]
            if top:
                for t in range(f):
                    cur[t] += top * self._wred[t]
            wpow.append(cur)
        self._wpow = [tuple(v) for v in wpow]

        pipow = []
        for j in range(e):
            v = [0] * d
            v[j] = 1
            pipow.append(v)
        for j in range(e, 2 * e - 1):
            prev = pipow[j - 1]
            cur = [0] * d
            for i in range(f):
                for jj in range(e):
                    c = prev[i * e + jj]
                    if not c:
                        continue
                    if jj + 1 < e:
                        cur[i * e + jj + 1] += c
                    else:
                        for j2 in range(e):
                            avec = self.epoly[j2]
                            for t in range(f):
                                if avec[t]:
                                    cc = -c * avec[t]
                                    wr = self._wpow[i + t]
                                    for t2 in range(f):
                                        if wr[t2]:
                                            cur[t2 * e + j2] += cc * wr[t2]
            pipow.append(cur)

        struct = [[None] * d for _ in range(d)]
        for b1 in range(d):
            i1, j1 = divmod(b1, e)
            for b2 in range(d):
                i2, j2 = divmod(b2, e)
                acc = [0] * d
                for b3, c3 in enumerate(pipow[j1 + j2]):
                    if not c3:
                        continue
                    i3, j3 = divmod(b3, e)
                    wr = self._wpow[i1 + i2 + i3]
                    for t, ct in enumerate(wr):
                        if ct:
                            acc[t * e + j3] += c3 * ct
                struct[b1][b2] = tuple(acc)
        self.struct = struct

    # -- raw vector arithmetic (no precision bookkeeping) --------------------

    def vec_mul(self, u, v):
        d = self.d
        acc = [0] * d
        struct = self.struct
        for b1 in range(d):
            c1 = u[b1]
            if not c1:
                continue
            row = struct[b1]
            for b2 in range(d):
                c2 = v[b2]
                if not c2:
                    continue
                c = c1 * c2
                sv = row[b2]
                for t in range(d):
                    if sv[t]:
                        acc[t] += c * sv[t]
        return acc

    def vec_val(self, vec):
        """Exact pi-adic valuation of a mantissa vector, or None if zero."""
        e, p = self.e, self.p
        best = None
        for b, m in enumerate(vec):
            if m:
                v = e * vp_int(m, p) + (b % e)
                if best is None or v < best:
                    best = v
        return best

    # -- element constructors ------------------------------------------------

    def zero(self, aprec):
        return PadicScalar(self, (0,) * self.d, 0, aprec)

    def one(self, aprec):
        vec = [0] * self.d
        vec[0] = 1
        return PadicScalar(self, tuple(vec), 0, aprec)

    def scalar(self, n, aprec):
        vec = [0] * self.d
        vec[0] = int(n)
        return PadicScalar(self, tuple(vec), 0, aprec)

    def from_vec(self, vec, scale, aprec):
        return PadicScalar(self, tuple(int(c) for c in vec), scale, aprec)

    def pi(self, aprec):
        if self.e == 1:
            return self.scalar(self.p, aprec)
        vec = [0] * self.d
        vec[1] = 1
        return PadicScalar(self, tuple(vec), 0, aprec)

    def gen_w(self, aprec):
        if self.f == 1:
            return self.one(aprec)
        vec = [0] * self.d
        vec[self.e] = 1
        return PadicScalar(self, tuple(vec), 0, aprec)

    def pi_pow(self, n, aprec):
        key = (n, aprec)
        if key not in self._pi_pow_cache:
            if n >= 0:
                self._pi_pow_cache[key] = self.pi(aprec) ** n
            else:
                self._pi_pow_cache[key] = (self.pi(aprec) ** (-n)).inverse()
        return self._pi_pow_cache[key]

    def inv2(self, aprec):
        if self._inv2 is None or self._inv2.aprec < aprec:
            self._inv2 = self.scalar(2, aprec).inverse()
        return self._inv2

    # -- residue field helpers ----------------------------------------------

    def residue_vec(self, x):
        """Residue of a valuation-zero element as an f-vector over F_p."""
        p, e, f = self.p, self.e, self.f
        return tuple(x.mants[i * e] % p for i in range(f))

    def _res_mul(self, a, b):
        return tuple(
            c % self.p
            for c in _fp_polmulmod(list(a), list(b), [c % self.p for c in self.fpoly], self.p)
        )

    def _res_pow(self, a, n):
        return tuple(
            c % self.p
            for c in _fp_powmod(list(a), n, [c % self.p for c in self.fpoly], self.p)
        )

    def res_inverse(self, a):
        if not any(a):
            raise ZeroDivisionError("residue inverse of zero")
        return self._res_pow(a, self.p**self.f - 2)

    def res_elements(self):
        """Iterate all residue-field elements as f-vectors."""
        p, f = self.p, self.f
        for n in range(p**f):
            vec = []
            m = n
            for _ in range(f):
                vec.append(m % p)
                m //= p
            yield tuple(vec)

    def lift_res(self, rvec, aprec):
        vec = [0] * self.d
        for i in range(self.f):
            vec[i * self.e] = rvec[i]
        return PadicScalar(self, tuple(vec), 0, aprec)


class PadicScalar:
    """Element of a FieldDescriptor field.

    value = p^scale * sum_b mants[b] * w^(b//e) * pi^(b%e),
    known modulo pi^aprec (absolute precision in pi-units).
    """

    __slots__ = ("F", "mants", "scale", "aprec", "_val")

    def __init__(self, F, mants, scale, aprec, _normalize=True):
        self.F = F
        self.scale = scale
        self.aprec = aprec
        self._val = None
        if _normalize:
            e = F.e
            k = max(0, -(-(aprec - e * scale) // e))
            q = F.p**k
            self.mants = tuple(m % q for m in mants)
        else:
            self.mants = tuple(mants)

    # -- basics ---------------------------------------------------------------

    def val_pi(self):
        """Valuation in pi-units, clamped at the absolute precision."""
        if self._val is None:
            raw = self.F.vec_val(self.mants)
            if raw is None:
                self._val = self.aprec
            else:
                self._val = min(raw + self.F.e * self.scale, self.aprec)
        return self._val

    def vp(self):
        return Fraction(self.val_pi(), self.F.e)

    def is_zero(self):
        return self.val_pi() >= self.aprec

    def dist_pi(self, other):
        return (self - other).val_pi()

    # -- ring operations -------------------------------------------------------

    def _aligned(self, other):
        if self.scale == other.scale:
            return self.mants, other.mants, self.scale
        s = min(self.scale, other.scale)
        p = self.F.p
        a = self.mants
        b = other.mants
        if self.scale > s:
            shift = p ** (self.scale - s)
            a = tuple(m * shift for m in a)
        if other.scale > s:
            shift = p ** (other.scale - s)
            b = tuple(m * shift for m in b)
        return a, b, s

    def __add__(self, other):
        a, b, s = self._aligned(other)
        return PadicScalar(
            self.F,
            tuple(x + y for x, y in zip(a, b)),
            s,
            min(self.aprec, other.aprec),
        )

    def __sub__(self, other):
        a, b, s = self._aligned(other)
        return PadicScalar(
            self.F,
            tuple(x - y for x, y in zip(a, b)),
            s,
            min(self.aprec, other.aprec),
        )

    def __neg__(self):
        return PadicScalar(self.F, tuple(-m for m in self.mants), self.scale, self.aprec, False)

    def __mul__(self, other):
        F = self.F
        va, vb = self.val_pi(), other.val_pi()
        aprec = min(self.aprec + vb, other.aprec + va)
        vec = F.vec_mul(self.mants, other.mants)
        return PadicScalar(F, vec, self.scale + other.scale, aprec)

    def mul_int(self, n):
        return PadicScalar(
            self.F, tuple(m * n for m in self.mants), self.scale, self.aprec
        )

    def shift_p(self, k):
        """Multiply by p^k exactly."""
        return PadicScalar(
            self.F, self.mants, self.scale + k, self.aprec + k * self.F.e, False
        )

    def with_prec(self, aprec):
        return PadicScalar(self.F, self.mants, self.scale, min(aprec, self.aprec))

    def content_normalized(self):
        """Move the p-content of the mantissa vector into the scale."""
        g = None
        for m in self.mants:
            if m:
                v = vp_int(m, self.F.p)
                if g is None or v < g:
                    g = v
                if g == 0:
                    return self
        if g is None:
            return self
        q = self.F.p**g
        return PadicScalar(
            self.F, tuple(m // q for m in self.mants), self.scale + g, self.aprec
        )

    def __pow__(self, n):
        if n < 0:
            return (self ** (-n)).inverse()
        if n == 0:
            return self.F.one(self.aprec)
        out = None
        cur = self
        while n:
            if n & 1:
                out = cur if out is None else out * cur
            n >>= 1
            if n:
                cur = cur * cur
        return out

    # -- inversion and roots ----------------------------------------------------

    def inverse(self):
        F = self.F
        v = self.val_pi()
        if v >= self.aprec:
            raise PrecisionExhausted("inverting a scalar that is zero to precision")
        e = F.e
        r = (-v) % e
        k = (v + r) // e
        # u = x * pi^r * p^-k is a unit, and x^-1 = u^-1 * pi^r * p^-k
        u = (self * F.pi(self.aprec) ** r if r else self).shift_p(-k)
        u = u.content_normalized()
        rv = F.residue_vec(u)
        y = F.lift_res(F.res_inverse(rv), u.aprec)
        two = F.scalar(2, u.aprec + e)
        correct = 1
        steps = 0
        while correct < u.aprec:
            y = y * (two - u * y)
            correct *= 2
            steps += 1
            if steps > 64:
                raise PrecisionExhausted("inverse iteration did not stabilize")
        y = y.with_prec(u.aprec)
        out = y * F.pi(y.aprec + r) ** r if r else y
        return out.shift_p(-k)

    def sqrt(self):
        """Canonical square root; raises RootsNotInField when absent."""
        F = self.F
        v = self.val_pi()
        if v >= self.aprec:
            raise PrecisionExhausted("square root of a scalar that is zero to precision")
        if v % 2 != 0:
            raise RootsNotInField("element of odd valuation has no square root here")
        unit = (self * F.pi_pow(-v, self.aprec)).content_normalized()
        rv = F.residue_vec(unit)
        seed = None
        for cand in F.res_elements():
            if F._res_mul(cand, cand) == rv:
                seed = cand
                break
        if seed is None:
            raise RootsNotInField("residue is not a square")
        # inverse-free iteration for 1/sqrt(unit), then multiply back
        z = F.lift_res(F.res_inverse(seed), unit.aprec)
        three = F.scalar(3, unit.aprec + F.e)
        inv2 = F.inv2(unit.aprec + F.e)
        correct = 1
        steps = 0
        while correct < unit.aprec + F.e:
            z = z * (three - unit * z * z) * inv2
            correct *= 2
            steps += 1
            if steps > 64:
                raise PrecisionExhausted("sqrt iteration did not stabilize")
        root = (unit * z).with_prec(unit.aprec)
        root = root * F.pi_pow(v // 2, self.aprec)
        return _canonical_sign(root)

    def teichmuller(self):
        """The Teichmuller representative of the residue of a unit."""
        F = self.F
        if self.val_pi() != 0:
            raise InvalidInput("teichmuller needs a unit")
        y = self.content_normalized()
        q = F.p**F.f
        for _ in range(self.aprec + F.e):
            y2 = y**q
            if (y2 - y).val_pi() >= y.aprec:
                return y2
            y = y2
        return y

    # -- misc -------------------------------------------------------------------

    def __repr__(self):
        return f"PadicScalar({self.mants}, scale={self.scale}, aprec={self.aprec})"


def _canonical_sign(x):
    """Normalize a sign choice: first nonzero coordinate gets a low digit."""
    p = x.F.p
    for b, m in enumerate(x.mants):
        if m:
            digit = (m // p ** vp_int(m, p)) % p
            if digit > p // 2:
                return -x
            return x
    return x


# ---------------------------------------------------------------------------
# field construction


def qp_field(p):
    return FieldDescriptor(p, (-1, 1), None, label=f"Q{p}")


def unram_fpoly(p, f):
    """A monic degree-f integer polynomial irreducible mod p."""
    if f == 1:
        return (-1, 1)
    if f == 2:
        for s in range(2, p):
            if not is_qr(s, p):
                return (-s, 0, 1)
        raise UnsupportedField("no quadratic nonresidue found")
    for b in range(1, p):
        for a in range(p):
            cand = (b, a) + (0,) * (f - 2) + (1,)
            if _is_irreducible_fp(list(cand), p):
                return cand
    raise UnsupportedField(f"no sparse irreducible polynomial of degree {f} mod {p}")


def unramified_field(p, f):
    return FieldDescriptor(p, unram_fpoly(p, f), None, label=f"Q{p}^ur{f}")


def cyclotomic_epoly(p, k):
    """Coefficients of ((1+Y)^(p^k) - 1)/((1+Y)^(p^(k-1)) - 1) in Y."""
    from math import comb

    num = [comb(p**k, i) for i in range(1, p**k + 1)]  # ((1+Y)^{p^k}-1)/Y
    den = [comb(p ** (k - 1), i) for i in range(1, p ** (k - 1) + 1)]
    # exact division num/den in Z[Y], both with constant terms p^k / p^(k-1)
    q = [0] * (len(num) - len(den) + 1)
    rem = list(num)
    for i in range(len(q) - 1, -1, -1):
        c = rem[i + len(den) - 1]
        q[i] = c
        if c:
            for j in range(len(den)):
                rem[i + j] -= c * den[j]
    if any(rem):
        raise AssertionError("cyclotomic division was not exact")
    return tuple(q)


def cyclotomic_field(p, k, f=1):
    fp = unram_fpoly(p, f)
    ep = cyclotomic_epoly(p, k)
    deg = len(ep) - 1
    epoly = tuple((int(ep[j]),) + (0,) * (f - 1) for j in range(deg))
    return FieldDescriptor(p, fp, epoly, zeta_order=k, label=f"Q{p}(zeta_{p**k};f={f})")


def ram_quad_field(p, u0, f=1):
    """The field Q_p(sqrt(p*u0)) with optional unramified part."""
    fp = unram_fpoly(p, f)
    epoly = ((-p * u0,) + (0,) * (f - 1), (0,) * f)
    return FieldDescriptor(p, fp, epoly, label=f"Q{p}(sqrt({p * u0});f={f})")


def build_field(p, poly=None):
    """Construct a field from a monic integer polynomial.

    Supported shapes: None (Q_p itself), Eisenstein polynomials (totally
    ramified), and polynomials irreducible mod p (unramified).  Mixed
    polynomials are out of scope and raise UnsupportedField; composite
    fields are built internally from discriminant data instead.
    """
    if p == 2:
        raise EvenPrime("p = 2 is not supported")
    if poly is None:
        return qp_field(p)
    poly = [int(c) for c in poly]
    if len(poly) < 2 or poly[-1] != 1:
        raise InvalidInput("need a monic polynomial of positive degree")
    deg = len(poly) - 1
    if deg == 1:
        return qp_field(p)
    if poly[0] % p == 0:
        if poly[0] % (p * p) != 0 and all(c % p == 0 for c in poly[:-1]):
            epoly = tuple((int(c),) for c in poly[:-1])
            return FieldDescriptor(p, (-1, 1), epoly, label=f"eis(deg {deg})")
        raise UnsupportedField(
            "ramified polynomial is not Eisenstein; factor it and retry"
        )
    if _is_irreducible_fp(poly, p):
        return FieldDescriptor(p, tuple(poly), None, label=f"unram(deg {deg})")
    raise UnsupportedField("polynomial is reducible mod p and not Eisenstein")


def quad_requirement(p, disc):
    """Classify the quadratic extension Q_p(sqrt(disc)).

    Returns ("split", u0), ("unram", u0) or ("ram", u0) with
    u0 = disc / p^{v(disc)}.
    """
    if disc == 0:
        raise EqualRoots("zero discriminant")
    v = vp_int(disc, p)
    u0 = disc // p**v
    if v % 2 == 0:
        return ("split" if is_qr(u0, p) else "unram", u0)
    return ("ram", u0)


class FieldEmbedding:
    """Embedding of a small field into a bigger one, w -> w_img, pi -> pi_img."""

    def __init__(self, src, dst, w_img, pi_img):
        self.src = src
        self.dst = dst
        self.w_img = w_img
        self.pi_img = pi_img
        self._wp = [dst.one(w_img.aprec)]
        for _ in range(src.f - 1):
            self._wp.append(self._wp[-1] * w_img)
        self._pp = [dst.one(pi_img.aprec)]
        for _ in range(src.e - 1):
            self._pp.append(self._pp[-1] * pi_img)

    def apply(self, x):
        # precisions convert between pi-unit conventions of the two fields
        ratio, rem = divmod(self.dst.e, self.src.e)
        if rem:
            raise UnsupportedField("ramification does not divide in the embedding")
        out = None
        e = self.src.e
        for b, m in enumerate(x.mants):
            if m:
                term = (self._wp[b // e] * self._pp[b % e]).mul_int(m)
                out = term if out is None else out + term
        if out is None:
            return self.dst.zero(x.aprec * ratio)
        out = out.shift_p(x.scale)
        return out.with_prec(x.aprec * ratio)


def embed_field(src, dst, aprec):
    """Find an embedding src -> dst by locating generator images."""
    w_img = _root_of_int_poly(dst, src.fpoly, aprec)
    if src.e == 1:
        pi_img = dst.one(aprec)
    else:
        if src.e != 2:
            raise UnsupportedField("only quadratic ramified parts are embedded")
        c0 = src.epoly[0]
        c1 = src.epoly[1]
        if any(c1) or any(c0[1:]):
            raise UnsupportedField("ramified part is not of the form x^2 - c")
        target = dst.scalar(-c0[0], aprec)
        pi_img = target.sqrt()
    return FieldEmbedding(src, dst, w_img, pi_img)


def _root_of_int_poly(F, poly, aprec):
    """A root of a monic integer polynomial with simple reduction mod p."""
    deg = len(poly) - 1
    if deg == 1:
        return F.scalar(-poly[0], aprec)
    best = None
    for rv in F.res_elements():
        acc = (0,) * F.f
        for c in reversed(poly):
            acc = F._res_mul(acc, rv)
            acc = tuple((a + (c if i == 0 else 0)) % F.p for i, a in enumerate(acc))
        if not any(acc):
            best = rv
            break
    if best is None:
        raise RootsNotInField("polynomial has no residue root in the target field")
    x = F.lift_res(best, aprec)
    one = F.one(aprec)
    for _ in range(64):
        fx = _eval_int_poly(F, poly, x)
        if fx.is_zero():
            return x
        dfx = _eval_int_poly(F, _int_poly_derivative(poly), x)
        x = x - fx * dfx.inverse()
    fx = _eval_int_poly(F, poly, x)
    if fx.is_zero():
        return x
    raise PrecisionExhausted("Newton iteration for a polynomial root stalled")


def _eval_int_poly(F, poly, x):
    acc = F.zero(x.aprec + 4 * F.e)
    for c in reversed(poly):
        acc = acc * x + F.scalar(c, x.aprec)
    return acc


def _int_poly_derivative(poly):
    return [i * c for i, c in enumerate(poly)][1:]


def hecke_roots(F, ap, k, eps, aprec):
    """Roots of x^2 - ap x + eps p^(k+1), smaller valuation first.

    Requires positive slope (non-ordinary) and distinct roots inside F.
    """
    p = F.p
    if eps not in (1, -1):
        raise InvalidInput("nebentypus value at p must be +1 or -1 here")
    if ap != 0 and vp_int(ap, p) == 0:
        raise OrdinaryForm("unit root present: a_p is prime to p")
    disc = ap * ap - 4 * eps * p ** (k + 1)
    if disc == 0:
        raise EqualRoots("Hecke polynomial has a double root")
    delta = F.scalar(disc, aprec * 2 + 8 * F.e).sqrt()
    inv2 = F.inv2(delta.aprec)
    apx = F.scalar(ap, delta.aprec)
    r1 = (apx + delta) * inv2
    r2 = (apx - delta) * inv2
    if r1.val_pi() > r2.val_pi():
        r1, r2 = r2, r1
    return r1.with_prec(aprec), r2.with_prec(aprec)


def field_for_forms(p, kf, kg, apf, apg, epsf, epsg, aprec):
    """Smallest supported field splitting both Hecke polynomials.

    Returns (field, (alpha_f, beta_f), (alpha_g, beta_g)).
    """
    reqs = []
    for ap, k, eps in ((apf, kf, epsf), (apg, kg, epsg)):
        if eps not in (1, -1):
            raise InvalidInput("nebentypus value at p must be +1 or -1 here")
        if ap != 0 and vp_int(ap, p) == 0:
            raise OrdinaryForm("unit root present: a_p is prime to p")
        disc = ap * ap - 4 * eps * p ** (k + 1)
        reqs.append(quad_requirement(p, disc))
    rams = [u0 for kind, u0 in reqs if kind == "ram"]
    unram_needed = any(kind == "unram" for kind, _ in reqs)
    if len(rams) == 2 and not is_qr(rams[0] * rams[1], p):
        unram_needed = True
    f = 2 if unram_needed else 1
    if rams:
        F = ram_quad_field(p, rams[0], f=f)
    elif f == 2:
        F = unramified_field(p, 2)
    else:
        F = qp_field(p)
    roots_f = hecke_roots(F, apf, kf, epsf, aprec)
    roots_g = hecke_roots(F, apg, kg, epsg, aprec)
    return F, roots_f, roots_g


def extend_cyclotomic(E, level, aprec):
    """A field containing E and the p^level-th roots of unity.

    Returns (T, embedding E -> T).  level = 0 returns E itself.
    """
    if level == 0:
        return E, FieldEmbedding(E, E, E.gen_w(aprec), E.pi(aprec))
    p = E.p
    for f in (E.f, 2 * E.f):
        T = cyclotomic_field(p, level, f=f)
        try:
            return T, embed_field(E, T, aprec)
        except RootsNotInField:
            continue
    raise UnsupportedField("could not embed the coefficient field cyclotomically")


def root_of_unity(F, order, aprec):
    """A root of unity of exact multiplicative order `order`."""
    p = F.p
    a = 0
    m = order
    while m % p == 0:
        m //= p
        a += 1
    out = F.one(aprec)
    if a > 0:
        if F.zeta_order < a:
            raise InvalidInput(
                f"field carries p^{F.zeta_order}-th roots of unity, need p^{a}"
            )
        zeta = (F.one(aprec) + F.pi(aprec)) ** (p ** (F.zeta_order - a))
        out = out * zeta
    if m > 1:
        q = p**F.f - 1
        if q % m != 0:
            raise InvalidInput(f"no root of unity of order {m} in the residue field")
        gen = None
        for rv in F.res_elements():
            if not any(rv):
                continue
            if _res_order(F, rv) == m:
                gen = rv
                break
        if gen is None:
            raise InvalidInput("no residue element of the requested order")
        out = out * F.lift_res(gen, aprec).teichmuller()
    return out


def _res_order(F, rv):
    one = tuple([1] + [0] * (F.f - 1))
    cur = rv
    for n in range(1, F.p**F.f):
        if cur == one:
            return n
        cur = F._res_mul(cur, rv)
    return 0


def teichmuller_int(F, a, aprec):
    """Teichmuller lift of the integer a (prime to p)."""
    return F.scalar(a, aprec).teichmuller()


def solve_linear(rows, rhs):
    """Solve a small square linear system over a p-adic field.

    rows: list of lists of PadicScalar; rhs: list of PadicScalar.
    Gaussian elimination with minimal-valuation pivoting.  Precision loss
    is whatever the scalar arithmetic reports; a pivot that is zero to
    working precision raises PrecisionExhausted.
    """
    n = len(rows)
    A = [list(r) + [b] for r, b in zip(rows, rhs)]
    perm = list(range(n))
    for col in range(n):
        piv, pval = None, None
        for r in range(col, n):
            v = A[r][col].val_pi()
            if pval is None or v < pval:
                piv, pval = r, v
        if pval >= A[piv][col].aprec:
            raise PrecisionExhausted("singular to working precision")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inverse()
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col:
                c = A[r][col]
                if not c.is_zero():
                    A[r] = [x - c * y for x, y in zip(A[r], A[col])]
    del perm
    return [A[i][n] for i in range(n)]
