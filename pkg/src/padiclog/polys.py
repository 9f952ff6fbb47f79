"""Dense polynomials over a p-adic field, with packed convolution.

A PolyVec carries d parallel coefficient lists of nonnegative integers
reduced modulo p^K, where K tracks the declared absolute precision the
same way PadicScalar does, plus one shared power-of-p scale.  Long
multiplications pack each coordinate list into a single big integer
(byte-aligned Kronecker substitution) so CPython's subquadratic integer
multiplication performs the convolution; field structure constants then
recombine the d*d coordinate products.

Divisions are top-down synthetic divisions by polynomials with unit
leading coefficient given as plain modular integer lists; they act on
each coordinate independently and lose no precision.
"""

from __future__ import annotations

from math import comb

from .errors import InvalidInput, LevelMismatch
from .padics import PadicScalar


def conv_int(xs, ys, pK):
    """Linear convolution of two nonnegative int lists, reduced mod pK."""
    if not xs or not ys:
        return []
    m = pK - 1
    cap = min(len(xs), len(ys)) * m * m
    nb = cap.bit_length() // 8 + 1
    bx = b"".join(c.to_bytes(nb, "little") for c in xs)
    by = b"".join(c.to_bytes(nb, "little") for c in ys)
    prod = int.from_bytes(bx, "little") * int.from_bytes(by, "little")
    out_len = len(xs) + len(ys) - 1
    pb = prod.to_bytes(out_len * nb + nb, "little")
    return [
        int.from_bytes(pb[i * nb : (i + 1) * nb], "little") % pK
        for i in range(out_len)
    ]


def poly_mulmod_int(xs, ys, pK):
    """Product of two plain int polynomials mod pK (no reduction)."""
    return conv_int([x % pK for x in xs], [y % pK for y in ys], pK)


def poly_divmod_int(xs, div, pK):
    """Synthetic division of int polynomial xs by unit-leading div, mod pK."""
    dv = [c % pK for c in div]
    while len(dv) > 1 and dv[-1] == 0:
        dv.pop()
    try:
        linv = pow(dv[-1], -1, pK)
    except ValueError:
        raise InvalidInput("divisor leading coefficient is not a unit") from None
    dd = len(dv) - 1
    work = [c % pK for c in xs]
    n = len(work)
    if n <= dd:
        return [], work
    q = [0] * (n - dd)
    for t in range(n - 1, dd - 1, -1):
        c = work[t]
        if c:
            qc = c * linv % pK
            q[t - dd] = qc
            for j in range(dd):
                if dv[j]:
                    work[t - dd + j] = (work[t - dd + j] - qc * dv[j]) % pK
            work[t] = 0
    return q, work[:dd]


def poly_affine_int(xs, a, b, pK):
    """Substitute X -> a*X + b into an int polynomial, mod pK."""
    out = [0]
    for c in reversed(xs):
        # out = out * (aX + b) + c
        nxt = [0] * (len(out) + 1)
        for i, ci in enumerate(out):
            if ci:
                nxt[i] = (nxt[i] + ci * b) % pK
                nxt[i + 1] = (nxt[i + 1] + ci * a) % pK
        nxt[0] = (nxt[0] + c) % pK
        out = nxt
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


class PolyVec:
    """Dense polynomial over a FieldDescriptor field."""

    __slots__ = ("F", "coords", "scale", "aprec")

    def __init__(self, F, coords, scale, aprec, normalize=True):
        self.F = F
        self.scale = scale
        self.aprec = aprec
        if normalize:
            pK = self.pK()
            self.coords = [[c % pK for c in lane] for lane in coords]
        else:
            self.coords = [list(lane) for lane in coords]
        n = len(self.coords[0])
        for lane in self.coords:
            if len(lane) != n:
                raise InvalidInput("coordinate lanes of unequal length")

    # -- context ---------------------------------------------------------------

    def K(self):
        e = self.F.e
        return max(0, -(-(self.aprec - e * self.scale) // e))

    def pK(self):
        return self.F.p ** self.K()

    @property
    def length(self):
        return len(self.coords[0])

    def degree(self):
        for i in range(self.length - 1, -1, -1):
            if any(lane[i] for lane in self.coords):
                return i
        return None

    # -- constructors ------------------------------------------------------------

    @classmethod
    def from_int_coeffs(cls, F, ints, aprec, scale=0):
        d = F.d
        n = max(1, len(ints))
        coords = [[0] * n for _ in range(d)]
        for i, c in enumerate(ints):
            coords[0][i] = c
        return cls(F, coords, scale, aprec)

    @classmethod
    def from_scalars(cls, scalars):
        F = scalars[0].F
        aprec = min(s.aprec for s in scalars)
        scale = min(s.scale for s in scalars)
        d = F.d
        p = F.p
        coords = [[0] * len(scalars) for _ in range(d)]
        for i, s in enumerate(scalars):
            shift = p ** (s.scale - scale)
            for b in range(d):
                coords[b][i] = s.mants[b] * shift
        return cls(F, coords, scale, aprec)

    @classmethod
    def zero(cls, F, aprec):
        return cls(F, [[0] for _ in range(F.d)], 0, aprec)

    @classmethod
    def one(cls, F, aprec):
        return cls.from_int_coeffs(F, [1], aprec)

    @classmethod
    def xvar(cls, F, aprec):
        return cls.from_int_coeffs(F, [0, 1], aprec)

    def coeff(self, i):
        if i >= self.length:
            return self.F.zero(self.aprec)
        return self.F.from_vec(
            tuple(lane[i] for lane in self.coords), self.scale, self.aprec
        )

    def coeffs(self):
        return [self.coeff(i) for i in range(self.length)]

    # -- arithmetic ---------------------------------------------------------------

    def _aligned(self, other):
        if self.F is not other.F:
            raise LevelMismatch("polynomials over different fields")
        s = min(self.scale, other.scale)
        n = max(self.length, other.length)
        p = self.F.p

        def conv(poly):
            shift = p ** (poly.scale - s)
            out = []
            for lane in poly.coords:
                xl = [c * shift for c in lane] if shift != 1 else list(lane)
                xl.extend([0] * (n - len(xl)))
                out.append(xl)
            return out

        return conv(self), conv(other), s, n

    def __add__(self, other):
        a, b, s, n = self._aligned(other)
        aprec = min(self.aprec, other.aprec)
        coords = [[x + y for x, y in zip(la, lb)] for la, lb in zip(a, b)]
        return PolyVec(self.F, coords, s, aprec)

    def __sub__(self, other):
        a, b, s, n = self._aligned(other)
        aprec = min(self.aprec, other.aprec)
        coords = [[x - y for x, y in zip(la, lb)] for la, lb in zip(a, b)]
        return PolyVec(self.F, coords, s, aprec)

    def __neg__(self):
        return PolyVec(
            self.F, [[-c for c in lane] for lane in self.coords], self.scale, self.aprec
        )

    def __mul__(self, other):
        F = self.F
        if F is not other.F:
            raise LevelMismatch("polynomials over different fields")
        d = F.d
        e = F.e
        aprec = min(self.aprec + e * other.scale, other.aprec + e * self.scale)
        scale = self.scale + other.scale
        kk = max(
            0, -(-(aprec - e * scale) // e)
        )  # output window; inputs are stored at >= this
        pK = F.p**kk
        n_out = self.length + other.length - 1
        acc = [[0] * n_out for _ in range(d)]
        struct = F.struct
        for b1 in range(d):
            lane1 = [c % pK for c in self.coords[b1]]
            if not any(lane1):
                continue
            for b2 in range(d):
                lane2 = [c % pK for c in other.coords[b2]]
                if not any(lane2):
                    continue
                cv = conv_int(lane1, lane2, pK)
                sv = struct[b1][b2]
                for t in range(d):
                    w = sv[t]
                    if w:
                        at = acc[t]
                        for i, c in enumerate(cv):
                            if c:
                                at[i] += w * c
        return PolyVec(F, acc, scale, aprec)

    def mul_scalar(self, s):
        sp = PolyVec(self.F, [[m] for m in s.mants], s.scale, s.aprec)
        return self * sp

    def mul_int(self, n):
        return PolyVec(
            self.F,
            [[c * n for c in lane] for lane in self.coords],
            self.scale,
            self.aprec,
        )

    def shift_p(self, k):
        return PolyVec(
            self.F, self.coords, self.scale + k, self.aprec + k * self.F.e, False
        )

    def with_prec(self, aprec):
        return PolyVec(self.F, self.coords, self.scale, min(aprec, self.aprec))

    def shift_x(self, k):
        """Multiply by X^k."""
        if k == 0:
            return self
        coords = [[0] * k + lane for lane in self.coords]
        return PolyVec(self.F, coords, self.scale, self.aprec, False)

    # -- calculus and substitution ---------------------------------------------

    def derivative_theta(self):
        """The operator (1+X) d/dX."""
        n = self.length
        coords = []
        for lane in self.coords:
            out = [0] * n
            for i in range(1, n):
                c = lane[i]
                if c:
                    out[i - 1] += i * c
                    out[i] += i * c
            coords.append(out)
        return PolyVec(self.F, coords, self.scale, self.aprec)

    def substitute_affine(self, a, b):
        """Substitute X -> a*X + b with integer (or modular int) a, b."""
        pK = self.pK()
        coords = [poly_affine_int(lane, a, b, pK) for lane in self.coords]
        n = max(len(lane) for lane in coords)
        coords = [lane + [0] * (n - len(lane)) for lane in coords]
        return PolyVec(self.F, coords, self.scale, self.aprec, False)

    def divmod_intpoly(self, div):
        """Divide by a unit-leading plain-int polynomial; returns (q, r)."""
        pK = self.pK()
        qs, rs = [], []
        for lane in self.coords:
            q, r = poly_divmod_int(lane, div, pK)
            qs.append(q)
            rs.append(r)
        nq = max(1, max(len(q) for q in qs))
        nr = max(1, max(len(r) for r in rs))
        qs = [q + [0] * (nq - len(q)) for q in qs]
        rs = [r + [0] * (nr - len(r)) for r in rs]
        return (
            PolyVec(self.F, qs, self.scale, self.aprec, False),
            PolyVec(self.F, rs, self.scale, self.aprec, False),
        )

    def rem_intpoly(self, div):
        return self.divmod_intpoly(div)[1]

    # -- evaluation ---------------------------------------------------------------

    def evaluate(self, x):
        acc = x.F.zero(x.aprec + 8 * x.F.e)
        for i in range(self.length - 1, -1, -1):
            acc = acc * x + self.coeff(i)
        return acc

    def evaluate_embedded(self, emb, powers):
        """Evaluate at a point of a bigger field given precomputed powers."""
        if self.length > len(powers):
            raise InvalidInput("not enough precomputed powers")
        out = None
        for i in range(self.length):
            c = self.coeff(i)
            if c.is_zero():
                continue
            term = emb.apply(c) * powers[i]
            out = term if out is None else out + term
        if out is None:
            return emb.dst.zero(powers[0].aprec)
        return out

    def max_coeff_val(self):
        """Minimum valuation over coefficients (content), clamped at aprec."""
        best = self.aprec
        for i in range(self.length):
            v = self.coeff(i).val_pi()
            if v < best:
                best = v
        return best

    def is_zero(self):
        return self.max_coeff_val() >= self.aprec

    def __repr__(self):
        return f"PolyVec(deg={self.degree()}, scale={self.scale}, aprec={self.aprec})"


# -- jets -----------------------------------------------------------------------


def jet_promote(poly, m):
    """Jet (f, Tf, T^2 f/..., up to order m-1) of an honest polynomial.

    T is the derivation (1+X) d/dX; entries are plain iterated images,
    not divided by factorials.
    """
    jets = [poly]
    for _ in range(m - 1):
        jets.append(jets[-1].derivative_theta())
    return jets


def jet_mul(j1, j2, m):
    """Leibniz product of two jets, truncated to order m."""
    out = []
    for s in range(min(m, len(j1) + len(j2) - 1)):
        acc = None
        for a in range(s + 1):
            b = s - a
            if a < len(j1) and b < len(j2):
                term = (j1[a] * j2[b]).mul_int(comb(s, a))
                acc = term if acc is None else acc + term
        out.append(acc)
    return out


def jet_add(j1, j2):
    n = max(len(j1), len(j2))
    out = []
    for s in range(n):
        if s < len(j1) and s < len(j2):
            out.append(j1[s] + j2[s])
        elif s < len(j1):
            out.append(j1[s])
        else:
            out.append(j2[s])
    return out


def pascal_row_table(n, pK):
    """Binomial table C(i, j) mod pK for 0 <= j <= i < n."""
    rows = [[1]]
    for i in range(1, n):
        prev = rows[-1]
        row = [1] + [(prev[j] + prev[j + 1]) % pK for j in range(i - 1)] + [1]
        rows.append(row)
    return rows
