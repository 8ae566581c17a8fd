"""Exact arithmetic in real quadratic fields K = Q(sqrt(D)).

Covers the number-theoretic bookkeeping the construction rests on:
fundamental units by continued fractions, the dimension towers d = n^2 + 3,
prime splitting, class numbers by reduced-form enumeration, and the degree
of the small ray class field.  Everything in this module is exact; the only
floating point is in the explicit embedding helpers, which exist so other
modules can render elements at a stated precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
from gmpy2 import mpq, mpz

from .errors import ComputationalError, UnsupportedError

_CF_PERIOD_CAP = 10**6

# D values already verified square-free, to keep QuadElem construction cheap.
_checked_D: set = set()


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond desk scale."""
    n = int(n)
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def squarefree_part(n: int) -> int:
    """Largest square-free divisor class: n divided by its largest square factor."""
    n = int(n)
    if n < 1:
        raise ValueError("squarefree_part needs a positive integer")
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2:
                out *= p
        p += 1 if p == 2 else 2
    return out * n


def _require_valid_D(D: int) -> int:
    D = int(D)
    if D not in _checked_D:
        if D < 2 or squarefree_part(D) != D:
            raise ValueError(f"D = {D} is not a square-free integer >= 2")
        _checked_D.add(D)
    return D


class QuadElem:
    """Element a + b*sqrt(D) of K = Q(sqrt(D)), with exact rational a, b."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b, D):
        self.a = mpq(a)
        self.b = mpq(b)
        self.D = _require_valid_D(D)

    @classmethod
    def from_rational(cls, a, D) -> "QuadElem":
        return cls(a, 0, D)

    def _coerce(self, other):
        if isinstance(other, QuadElem):
            if other.D != self.D:
                raise ValueError(f"mixed fields: sqrt({self.D}) vs sqrt({other.D})")
            return other
        if isinstance(other, (int, mpz)) or type(other) is mpq:
            return QuadElem(other, 0, self.D)
        try:
            return QuadElem(mpq(other), 0, self.D)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.D)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadElem(
            self.a * o.a + self.D * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.D,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero element of K")
        return QuadElem(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int) -> "QuadElem":
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadElem(1, 0, self.D)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.D))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def tau(self) -> "QuadElem":
        """Conjugate under sqrt(D) -> -sqrt(D)."""
        return QuadElem(self.a, -self.b, self.D)

    def norm(self) -> mpq:
        return self.a * self.a - self.D * self.b * self.b

    def trace(self) -> mpq:
        return 2 * self.a

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign_j(self) -> int:
        """Exact sign under the embedding j with sqrt(D) > 0."""
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        big_a = a * a > self.D * b * b
        if a > 0:  # b < 0
            return 1 if big_a else -1
        return -1 if big_a else 1

    def signature(self) -> tuple:
        return (self.sign_j(), self.tau().sign_j())

    def is_totally_positive(self) -> bool:
        return self.signature() == (1, 1)

    def embed(self, dps: int) -> mp.mpf:
        """Real image under j: sqrt(D) -> +sqrt(D), at dps decimal digits."""
        with mp.workdps(dps + 5):
            val = _mpq_to_mpf(self.a) + _mpq_to_mpf(self.b) * mp.sqrt(self.D)
        return val

    def embed_tau(self, dps: int) -> mp.mpf:
        return self.tau().embed(dps)

    def __repr__(self):
        return f"QuadElem({self.a}, {self.b}, D={self.D})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*sqrt({self.D})"


def _mpq_to_mpf(q) -> mp.mpf:
    return mp.mpf(int(q.numerator)) / mp.mpf(int(q.denominator))


def fundamental_unit(D: int) -> QuadElem:
    """Fundamental unit u_K of Z_K with j(u_K) > 1, by continued fractions.

    The expansion of sqrt(D) yields the fundamental unit of the order
    Z[sqrt(D)].  For D = 5 mod 8 the maximal order can be strictly larger;
    the true fundamental unit is then a cube root, which we detect
    numerically and verify exactly.
    """
    D = _require_valid_D(D)
    a0 = math.isqrt(D)
    # Continued fraction of sqrt(D): alpha_i = (P_i + sqrt(D)) / Q_i.
    P, Q = 0, 1
    a = a0
    p_prev, p_cur = 1, a0
    q_prev, q_cur = 0, 1
    k = 0
    while True:
        k += 1
        if k > _CF_PERIOD_CAP:
            raise ComputationalError(f"continued fraction period cap hit for D={D}")
        P = a * Q - P
        Q = (D - P * P) // Q
        a = (a0 + P) // Q
        if Q == 1 and a == 2 * a0:
            break
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    u0 = QuadElem(p_cur, q_cur, D)
    assert abs(u0.norm()) == 1
    if D % 8 == 5:
        u = _try_cube_root(u0)
        if u is not None:
            return u
    return u0


def _try_cube_root(u0: QuadElem):
    """Exact cube root of a unit in Z_K, if one exists (half-integer form)."""
    nu = int(u0.norm())  # cube root has the same norm
    digits = len(str(int(u0.a))) // 3 + 30
    with mp.workdps(digits):
        uj = u0.embed(digits)
        c = mp.cbrt(uj)
        x = mp.nint(c + nu / c)
        y = mp.nint((c - nu / c) / mp.sqrt(u0.D))
    cand = QuadElem(mpq(int(x), 2), mpq(int(y), 2), u0.D)
    if cand ** 3 == u0:
        return cand
    return None


def prime_splitting(q: int, D: int) -> str:
    """Splitting type of the rational prime q in Q(sqrt(D))."""
    D = _require_valid_D(D)
    q = int(q)
    if not _is_prime(q):
        raise ValueError(f"{q} is not prime")
    if q == 2:
        if D % 8 == 1:
            return "split"
        if D % 4 in (2, 3):
            return "ramified"
        return "inert"  # D = 5 mod 8
    if D % q == 0:
        return "ramified"
    ls = pow(D % q, (q - 1) // 2, q)
    return "split" if ls == 1 else "inert"


def class_number(D: int) -> int:
    """Class number of Q(sqrt(D)) by enumerating cycles of reduced forms.

    Counts reduced indefinite binary quadratic forms of the fundamental
    discriminant and partitions them into reduction cycles; the cycle count
    is the narrow class number h+, with h = h+ unless the fundamental unit
    is totally positive (then h = h+/2).
    """
    D = _require_valid_D(D)
    disc = D if D % 4 == 1 else 4 * D
    s = math.isqrt(disc)
    forms = set()
    for b in range(1 if disc % 2 else 2, s + 1, 2):
        n4 = disc - b * b
        if n4 <= 0:
            break
        n = n4 // 4
        for a_abs in _divisors(n):
            # reduced: |sqrt(disc) - 2a| < b < sqrt(disc)
            lo = 2 * a_abs - b
            if lo >= 0 and lo * lo >= disc:
                continue
            hi = 2 * a_abs + b
            if hi * hi <= disc:
                continue
            c_abs = n // a_abs
            forms.add((a_abs, b, -c_abs))
            forms.add((-a_abs, b, c_abs))
    cycles = 0
    seen = set()
    for f in sorted(forms):
        if f in seen:
            continue
        cycles += 1
        g = f
        while True:
            seen.add(g)
            g = _rho(g, disc, s)
            if g == f:
                break
            assert g in forms, "reduction left the reduced-form set"
    h_narrow = cycles
    u = fundamental_unit(D)
    if u.norm() == -1:
        return h_narrow
    assert h_narrow % 2 == 0
    return h_narrow // 2


def _divisors(n: int):
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return sorted(out)


def _rho(form, disc: int, s: int):
    """One step of the reduction operator on indefinite forms."""
    _, b, c = form
    c_abs = abs(c)
    r0 = (-b) % (2 * c_abs)
    if c_abs > s:
        r = r0 if r0 <= c_abs else r0 - 2 * c_abs
    else:
        r = s - ((s - r0) % (2 * c_abs))
    c_new = (r * r - disc) // (4 * c)
    return (c, r, c_new)


@dataclass(frozen=True)
class DimensionInfo:
    """Invariants of a dimension d = n^2 + 3 in the tower of its base field."""

    d: int
    n: int
    D: int
    ell: int
    h: int
    m: int  # cyclic degree of the small ray class field over H_K: phi(d)/(3 ell)

    @property
    def g(self) -> int:
        """Integer with sqrt(d+1) = g*sqrt(D)."""
        g = math.isqrt((self.d + 1) // self.D)
        assert g * g * self.D == self.d + 1
        return g

    def sqrt_dp1(self) -> QuadElem:
        """sqrt(d+1) as the exact element g*sqrt(D) of K."""
        return QuadElem(0, self.g, self.D)

    def unit(self) -> QuadElem:
        return fundamental_unit(self.D)

    def x0(self) -> QuadElem:
        """Zeroth fiducial component -2 - sqrt(d+1)."""
        return QuadElem(-2, -self.g, self.D)

    def partial_ideal(self) -> "PartialIdeal":
        dee = QuadElem(1, self.g, self.D)
        return PartialIdeal(dee=dee, dee_tau=dee.tau(), d=self.d)

    @property
    def is_prime(self) -> bool:
        return _is_prime(self.d)


@dataclass(frozen=True)
class PartialIdeal:
    """The pair of principal ideals generated by 1 +- sqrt(d+1), with (dee)(dee_tau) = (d)."""

    dee: QuadElem
    dee_tau: QuadElem
    d: int

    def __post_init__(self):
        assert self.dee + self.dee_tau == QuadElem(2, 0, self.dee.D)
        assert self.dee * self.dee_tau == QuadElem(-self.d, 0, self.dee.D)


def _euler_phi(n: int) -> int:
    n = int(n)
    out = n
    p = 2
    while p * p <= n:
        if n % p == 0:
            out -= out // p
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out -= out // n
    return out


def dimension_tower(D: int, count: int) -> list:
    """First `count` dimensions d_k = u_K^{2k} + u_K^{-2k} + 1 for Q(sqrt(D)).

    Exact unit powers, cross-checked against the shifted-Chebyshev recursion
    d_k = T*_k(d_1).
    """
    D = _require_valid_D(D)
    u = fundamental_unit(D)
    if u.norm() != -1:
        raise UnsupportedError(f"D={D} has a totally positive fundamental unit; "
                               "no dimensions of the form n^2+3 arise")
    u2 = u * u
    out = []
    power = QuadElem(1, 0, D)
    for _ in range(count):
        power = power * u2
        dk = power.trace() + 1  # u^{2k} + u^{-2k} = trace since norm(u^{2k}) = 1
        assert dk.denominator == 1
        out.append(int(dk))
    # cross-check: T*_k(d_1) reproduces the list
    if out:
        from .polyfield import ExactPoly  # local import: polyfield depends on us

        for k, dk in enumerate(out, start=1):
            tk = chebyshev_shifted(k)
            assert tk.evaluate(mpq(out[0])) == dk, "Chebyshev cross-check failed"
    return out


def chebyshev_shifted(k: int):
    """Shifted Chebyshev polynomial T*_k with T*_k(u^2 + u^-2 + 1) = u^2k + u^-2k + 1."""
    from .polyfield import ExactPoly, RING_Q

    if k < 0:
        raise ValueError("k must be >= 0")
    polys = [
        ExactPoly([mpq(3)], RING_Q),
        ExactPoly([mpq(0), mpq(1)], RING_Q),
        ExactPoly([mpq(0), mpq(-2), mpq(1)], RING_Q),
    ]
    if k < 3:
        return polys[k]
    x = polys[1]
    for _ in range(3, k + 1):
        nxt = x * polys[-1] - x * polys[-2] + polys[-3]
        polys = [polys[-2], polys[-1], nxt]
    return polys[-1]


def classify_dimension(d: int) -> DimensionInfo:
    """Locate d = n^2 + 3 in the dimension tower of its base field."""
    d = int(d)
    if d < 4:
        raise ValueError("d must be >= 4")
    n = math.isqrt(d - 3)
    if n * n + 3 != d:
        raise ValueError(f"d = {d} is not of the form n^2 + 3")
    D = squarefree_part(d + 1)
    assert D == squarefree_part((d + 1) * (d - 3))
    u = fundamental_unit(D)
    assert u.norm() == -1, "norm +1 cannot occur for d = n^2 + 3"
    u2 = u * u
    ell = None
    power = u2  # u^{2*1}
    step = u2 * u2  # advance by u^4 to stay on odd indices
    idx = 1
    while True:
        dk = int(power.trace() + 1)
        if dk == d:
            ell = idx
            break
        if dk > d:
            raise ComputationalError(
                f"d = {d} not found in the tower for D = {D} (internal inconsistency)")
        power = power * step
        idx += 2
    # Corollary: u^ell has minimal polynomial X^2 - n X - 1
    u_ell = u ** ell
    assert u_ell.trace() == n and u_ell.norm() == -1
    h = class_number(D)
    if d % 2 == 0:
        # even d = 4 * odd: the small ray class field degree uses phi(d/4)/ell
        phi, div = _euler_phi(d // 4), ell
    else:
        phi, div = (d - 1 if _is_prime(d) else _euler_phi(d)), 3 * ell
    if phi % div != 0:
        raise ComputationalError(f"phi-based degree is not divisible by {div} for d={d}")
    m = phi // div
    return DimensionInfo(d=d, n=n, D=D, ell=ell, h=h, m=m)


def unit_order_mod(d: int) -> int:
    """Multiplicative order of u_K in (Z_K / d Z_K)^x; must equal 6*ell."""
    info = classify_dimension(d)
    D = info.D
    u = fundamental_unit(D)
    # integral coordinates of u in the Z-basis (1, w) of Z_K
    if D % 4 == 1:
        # w = (1 + sqrt(D))/2, u = a + b sqrt(D) -> (a - b, 2b)
        x0, y0 = u.a - u.b, 2 * u.b
        mul = lambda x, y, xx, yy: (
            (x * xx + y * yy * ((D - 1) // 4)) % d,
            (x * yy + xx * y + y * yy) % d,
        )
    else:
        x0, y0 = u.a, u.b
        mul = lambda x, y, xx, yy: (
            (x * xx + D * y * yy) % d,
            (x * yy + xx * y) % d,
        )
    assert x0.denominator == 1 and y0.denominator == 1
    x0, y0 = int(x0) % d, int(y0) % d
    x, y = x0, y0
    order = 1
    cap = 12 * info.ell + 4
    while (x, y) != (1, 0):
        x, y = mul(x, y, x0, y0)
        order += 1
        if order > cap:
            raise ComputationalError(f"unit order mod {d} exceeds cap {cap}")
    if order != 6 * info.ell:
        raise ComputationalError(
            f"order of u_K mod {d} is {order}, expected 6*ell = {6 * info.ell}")
    return order


def degree_small_rcf(info: DimensionInfo) -> int:
    """Degree h*m of the small ray class field over K (absolute degree 2*h*m)."""
    if not info.is_prime:
        raise UnsupportedError("degree formula is implemented for prime d only")
    assert info.m * 3 * info.ell == info.d - 1
    return info.h * info.m


def absolute_degree_factored(info: DimensionInfo) -> dict:
    """Prime factorization {p: e} of the absolute degree 2*h*m over Q."""
    n = 2 * degree_small_rcf(info)
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out
