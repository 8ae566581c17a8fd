"""Numerical Stark units from ray class zeta functions, for small dimensions.

For prime d the ray class group of modulus (1+sqrt(d+1)) times the ramified
real place is realized concretely as ((Z/d)^x x {+-1}) modulo the image of
the global units; it is cyclic of order m = (d-1)/(3 ell) when h = 1.  The
derivatives L'(0, chi) of the odd characters are computed by the smoothed
approximate functional equation (the gamma factor for one ramified real
place collapses to 2 (2 pi)^-s Gamma(s), so the kernel is an exponential
integral), the partial zeta derivatives follow by finite Fourier inversion
over the odd characters, and the Stark units are their exponentials.

This module carries acceptance obligations only for d = 7 and d = 19; the
same code runs d = 199 in seconds, and larger dimensions are expected to be
ingested from files (the published large-dimension L-function runs took CPU-months).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
from gmpy2 import mpq

from .errors import ComputationalError, CutoffError, UnsupportedError
from .numerics import BigComplex, reconstruct_or_raise
from .polyfield import ExactPoly, QuadRing
from .quadfield import (DimensionInfo, QuadElem, _is_prime, _mpq_to_mpf,
                        classify_dimension, fundamental_unit, prime_splitting)


def _primitive_root(p: int) -> int:
    fac = []
    n = p - 1
    q = 2
    while q * q <= n:
        if n % q == 0:
            fac.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        fac.append(n)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in fac):
            return g
    raise ComputationalError(f"no primitive root mod {p}")


@dataclass
class RayClassGroup:
    """Concrete model of the ray class group of modulus (dee) * j, h = 1, prime d."""

    d: int
    D: int
    ell: int
    modulus: object  # PartialIdeal
    order: int  # = m
    generators: list  # [("sigma_m", m)]
    discrete_log: dict  # small split primes q -> sorted indices of the primes above q
    gamma0: int = 0
    sqrtD_res: int = 0
    _dlog: dict = field(default_factory=dict, repr=False)

    def residue(self, alpha: QuadElem) -> int:
        """Image of alpha in Z_K/(dee) = F_d, via sqrt(D) -> sqrtD_res."""
        p = self.d
        num = (int(alpha.a.numerator) * pow(int(alpha.a.denominator), -1, p)
               + int(alpha.b.numerator) * pow(int(alpha.b.denominator), -1, p)
               * self.sqrtD_res) % p
        return num

    def class_index(self, alpha: QuadElem) -> int:
        """Ray class of the principal ideal (alpha) as an exponent of sigma_m."""
        s = alpha.sign_j()
        if s == 0:
            raise ValueError("zero element")
        v = self.residue(alpha)
        if s < 0:
            v = (-v) % self.d
        if v == 0:
            raise ValueError("element is not coprime to the modulus")
        return self._dlog[v] % self.order

    @property
    def sigma_T_index(self) -> int:
        return self.order // 2


def ray_class_group(info: DimensionInfo) -> RayClassGroup:
    """Ray class group of modulus (1+sqrt(d+1)) * j for prime d with h = 1."""
    if not info.is_prime:
        raise UnsupportedError("ray class group model needs prime d")
    if info.h != 1:
        raise UnsupportedError(
            f"h = {info.h}: the concrete (Z/d)^x model covers h = 1 only; "
            "use ingested Stark data")
    p, m = info.d, info.m
    gamma0 = _primitive_root(p)
    dlog, val = {}, 1
    for e in range(p - 1):
        dlog[val] = e
        val = val * gamma0 % p
    # dee = 1 + g*sqrt(D) = 0 in the residue field, so sqrt(D) = -1/g
    g = info.g
    sqrtD_res = (-pow(g, -1, p)) % p
    G = RayClassGroup(d=p, D=info.D, ell=info.ell, modulus=info.partial_ideal(),
                      order=m, generators=[("sigma_m", m)], discrete_log={},
                      gamma0=gamma0, sqrtD_res=sqrtD_res, _dlog=dlog)
    u = info.unit()
    ubar = G.residue(u)
    ord_u = 1
    v = ubar
    while v != 1:
        v = v * ubar % p
        ord_u += 1
    if ord_u != 3 * info.ell:
        raise ComputationalError(
            f"order of u_K mod dee is {ord_u}, expected 3*ell = {3 * info.ell}")
    if G.class_index(u) != 0 or G.class_index(QuadElem(-1, 0, info.D)) != 0:
        raise ComputationalError("unit image is not trivial in the class model")
    # sigma_T: class of a j-negative generator congruent to 1 mod dee
    sT = (G._dlog[p - 1]) % m
    if m % 2 == 0 and sT != m // 2:
        raise ComputationalError("sigma_T is not the half-period power of sigma_m")
    for q in (2, 3, 5, 7, 11, 13):
        if q != p and prime_splitting(q, info.D) == "split":
            try:
                alpha = principal_generator_of_norm(q, info)
            except ComputationalError:
                continue
            G.discrete_log[q] = tuple(sorted(
                (G.class_index(alpha), G.class_index(alpha.tau()))))
    return G


@dataclass
class RayClassChar:
    """Character chi_k of the cyclic ray class group, valued in m-th roots of unity."""

    k: int
    order: int  # group order m

    @property
    def is_odd(self) -> bool:
        # chi(sigma_T) = (-1)^k for the half-period element
        return self.k % 2 == 1

    def value_index(self, class_idx: int) -> int:
        return (self.k * class_idx) % self.order

    def value(self, class_idx: int) -> mp.mpc:
        return mp.expjpi(mp.mpf(2 * self.value_index(class_idx)) / self.order)

    def conjugate(self) -> "RayClassChar":
        return RayClassChar((-self.k) % self.order, self.order)


def characters(G: RayClassGroup) -> list:
    """All characters of G; chi_k is odd exactly when k is odd."""
    return [RayClassChar(k, G.order) for k in range(G.order)]


def principal_generator_of_norm(q: int, info: DimensionInfo) -> QuadElem:
    """alpha = (a + b sqrt(D))/2 with |Norm(alpha)| = q, normalized j-positive.

    Solves a^2 - D b^2 = +-4q by scanning b below the unit-size bound; this
    is the desk-scale route (the fundamental unit of the base fields that
    carry Stark acceptance runs is tiny).
    """
    D = info.D
    u_emb = float(fundamental_unit(D).embed(30))
    bmax = int(2 * u_emb * math.isqrt(4 * q) / math.sqrt(D)) + 2
    if bmax > 2 * 10**6:
        raise ComputationalError(
            f"generator search bound {bmax} for norm {q} exceeds desk scale")
    for b in range(1, bmax + 1):
        t = D * b * b
        for s in (4 * q, -4 * q):
            a2 = t + s
            if a2 <= 0:
                continue
            a = math.isqrt(a2)
            if a * a == a2 and (a - b) % 2 == 0:
                alpha = QuadElem(mpq(a, 2), mpq(b, 2), D)
                assert abs(alpha.norm()) == q
                if alpha.sign_j() < 0:
                    alpha = -alpha
                return alpha
    raise ComputationalError(f"no principal generator of norm {q} found (D={D})")


@dataclass
class PrimeIdealData:
    q: int
    kind: str  # split | inert | ramified | split-at-d
    indices: tuple  # ray class indices of the primes above q that are coprime to dee


def ideal_class_table(G: RayClassGroup, info: DimensionInfo, cutoff: int) -> dict:
    """Ray class indices of all prime ideals of norm <= cutoff, coprime to dee."""
    table = {}
    for q in _primes_up_to(cutoff):
        if q == info.d:
            # dee itself is excluded; -dee^tau = sqrt(d+1) - 1 is the
            # j-positive generator of the other factor
            idx = G.class_index(QuadElem(-1, info.g, info.D))
            table[q] = PrimeIdealData(q, "split-at-d", (idx,))
            continue
        kind = prime_splitting(q, info.D)
        if kind == "split":
            alpha = principal_generator_of_norm(q, info)
            i1, i2 = G.class_index(alpha), G.class_index(alpha.tau())
            assert (i1 + i2 - G._dlog[q % info.d]) % G.order == 0, \
                "split pair classes do not multiply to the class of (q)"
            table[q] = PrimeIdealData(q, "split", (i1, i2))
        elif kind == "inert":
            if q * q <= cutoff:
                table[q] = PrimeIdealData(q, "inert",
                                          (G._dlog[q % info.d] % G.order,))
        else:
            alpha = principal_generator_of_norm(q, info)
            i1 = G.class_index(alpha)
            assert (2 * i1 - G._dlog[q % info.d]) % G.order == 0
            table[q] = PrimeIdealData(q, "ramified", (i1,))
    return table


def _primes_up_to(n: int) -> list:
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = b"\x00" * len(sieve[i * i::i])
    return [i for i in range(2, n + 1) if sieve[i]]


def dirichlet_coefficients(table: dict, chi: RayClassChar, cutoff: int, dps: int):
    """a_n = sum over ideals of norm n of chi([ideal]), multiplicatively."""
    m = chi.order
    with mp.workdps(dps):
        zeta_pow = [mp.expjpi(mp.mpf(2 * t) / m) for t in range(m)]

        def chival(idx, e=1):
            return zeta_pow[(chi.k * idx * e) % m]

        local = {}
        for q, data in table.items():
            emax = int(math.log(cutoff) / math.log(q)) + 1
            vals = [mp.mpc(1)]
            if data.kind in ("ramified", "split-at-d"):
                for e in range(1, emax + 1):
                    vals.append(chival(data.indices[0], e))
            elif data.kind == "inert":
                for e in range(1, emax + 1):
                    vals.append(mp.mpc(0) if e % 2 else chival(data.indices[0], e // 2))
            else:
                i1, i2 = data.indices
                for e in range(1, emax + 1):
                    vals.append(sum(zeta_pow[(chi.k * (i1 * i + i2 * (e - i))) % m]
                                    for i in range(e + 1)))
            local[q] = vals
        a = [mp.mpc(0), mp.mpc(1)] + [mp.mpc(0)] * (cutoff - 1)
        spf = _smallest_prime_factor(cutoff)
        for n in range(2, cutoff + 1):
            q = spf[n]
            e, rest = 0, n
            while rest % q == 0:
                rest //= q
                e += 1
            if q in local:
                a[n] = a[rest] * local[q][e]
            else:
                # inert prime with norm above the cutoff divides no counted ideal
                a[n] = mp.mpc(0)
    return a


def _smallest_prime_factor(n: int):
    spf = list(range(n + 1))
    for i in range(2, math.isqrt(n) + 1):
        if spf[i] == i:
            for j in range(i * i, n + 1, i):
                if spf[j] == j:
                    spf[j] = i
    return spf


def _completed_constant(info: DimensionInfo, dps: int) -> mp.mpf:
    """C = sqrt(|disc K| * Norm(dee)) / (2 pi) for the collapsed gamma factor."""
    disc = info.D if info.D % 4 == 1 else 4 * info.D
    with mp.workdps(dps):
        return mp.sqrt(disc * info.d) / (2 * mp.pi)


def required_cutoff(info: DimensionInfo, precision: int) -> int:
    dps = precision + 15
    with mp.workdps(30):
        C = _completed_constant(info, 30)
        n = int(C * (dps * mp.log(10) + mp.log(4 * (C + 2) ** 2) + 10)) + 50
        # tail of sum n * exp(-n/C) must clear the working precision
        while 4 * (C + 2) * (n + 1) * mp.e ** (-n / C) > mp.mpf(10) ** (-dps):
            n = int(1.2 * n) + 10
    return n


@dataclass
class LFunctionContext:
    """Shared per-dimension data for all characters: ideal table and kernels."""

    info: DimensionInfo
    G: RayClassGroup
    precision: int
    cutoff: int
    dps: int
    C: mp.mpf
    e1_kernel: list  # E1(n/C)
    exp_kernel: list  # (C/n) exp(-n/C)
    half_kernels: dict  # x -> (list Gamma(1/2, n x / C), list Gamma(1/2, n/(x C)))


def build_context(info: DimensionInfo, precision: int, cutoff: int = None) -> LFunctionContext:
    need = required_cutoff(info, precision)
    if cutoff is None:
        cutoff = need
    elif cutoff < need:
        raise CutoffError(
            f"cutoff {cutoff} leaves a series tail above 10^-{precision + 15}",
            suggested_cutoff=need)
    dps = precision + 20 + int(math.log10(cutoff)) + 5
    G = ray_class_group(info)
    table = ideal_class_table(G, info, cutoff)
    with mp.workdps(dps):
        C = _completed_constant(info, dps)
        e1 = [None] + [mp.e1(n / C) for n in range(1, cutoff + 1)]
        ek = [None] + [(C / n) * mp.e ** (-n / C) for n in range(1, cutoff + 1)]
        half = {}
        for x in (mpq(2, 3), mpq(3, 2)):
            xf = _mpq_to_mpf(x)
            up = [None] + [mp.gammainc(mp.mpf("0.5"), n * xf / C)
                           for n in range(1, cutoff + 1)]
            dn = [None] + [mp.gammainc(mp.mpf("0.5"), n / (xf * C))
                           for n in range(1, cutoff + 1)]
            half[x] = (up, dn)
    ctx = LFunctionContext(info=info, G=G, precision=precision, cutoff=cutoff,
                           dps=dps, C=C, e1_kernel=e1, exp_kernel=ek,
                           half_kernels=half)
    ctx.table = table
    return ctx


def root_number(ctx: LFunctionContext, a) -> mp.mpc:
    """W(chi) solved from the functional equation at two split points."""
    with mp.workdps(ctx.dps):
        C = ctx.C
        sq = [None] + [mp.sqrt(C / n) for n in range(1, ctx.cutoff + 1)]
        F, Gv = {}, {}
        for x, (up, dn) in ctx.half_kernels.items():
            F[x] = 2 * mp.fsum(a[n] * sq[n] * up[n] for n in range(1, ctx.cutoff + 1))
            Gv[x] = 2 * mp.fsum(mp.conj(a[n]) * sq[n] * dn[n]
                                for n in range(1, ctx.cutoff + 1))
        xs = list(ctx.half_kernels)
        denom = Gv[xs[1]] - Gv[xs[0]]
        if abs(denom) < mp.mpf(10) ** (-ctx.dps + 10):
            raise ComputationalError("degenerate split points for the root number")
        W = (F[xs[0]] - F[xs[1]]) / denom
        if abs(abs(W) - 1) > mp.mpf(10) ** (-(ctx.precision // 2)):
            raise ComputationalError(
                f"root number fails |W| = 1 by {mp.nstr(abs(abs(W) - 1), 5)}; "
                "Dirichlet data or gamma factors are inconsistent")
    return W


def lfunction_deriv0(chi: RayClassChar, ctx: LFunctionContext) -> mp.mpc:
    """L'(0, chi) for an odd character of conductor dee * j.

    The completed function A^s Gamma_R(s) Gamma_R(s+1) L(s) collapses by the
    duplication formula to 2 C^s Gamma(s) L(s) with C = A/(2 pi),
    A = sqrt(|disc K| N(dee)).  Splitting the Mellin integral and applying
    the functional equation term by term gives, at s = 0,
    L'(0) = sum a_n E1(n/C) + W(chi) sum conj(a_n) (C/n) e^(-n/C),
    both sums truncated at the context cutoff.  Even characters vanish to
    second order at s = 0, so their derivative is returned as exact zero.
    """
    if not chi.is_odd:
        return mp.mpc(0)
    a = dirichlet_coefficients(ctx.table, chi, ctx.cutoff, ctx.dps)
    with mp.workdps(ctx.dps):
        W = root_number(ctx, a)
        main = mp.fsum(a[n] * ctx.e1_kernel[n] for n in range(1, ctx.cutoff + 1))
        dual = mp.fsum(mp.conj(a[n]) * ctx.exp_kernel[n]
                       for n in range(1, ctx.cutoff + 1))
        return main + W * dual


@dataclass
class StarkUnitSet:
    """Real Stark units epsilon_j = exp(delta'(0, sigma_m^j)), pi_m-ordered."""

    values: list  # mpf, ordered by powers of sigma_m
    ordering: list  # index map j -> group exponent (identity here)
    precision: int
    sigma_T_index: int
    info: DimensionInfo = None

    def __len__(self):
        return len(self.values)


def stark_units(info: DimensionInfo, precision: int, cutoff: int = None) -> StarkUnitSet:
    """Stark units for K^(dee j)/K by Fourier inversion over the odd characters."""
    ctx = build_context(info, precision, cutoff)
    m = ctx.G.order
    odd_ks = [k for k in range(m) if k % 2 == 1]
    derivs = {}
    with mp.workdps(ctx.dps):
        for k in odd_ks:
            if (m - k) % m in derivs:
                derivs[k] = mp.conj(derivs[(m - k) % m])  # conjugate pair shortcut
                continue
            derivs[k] = lfunction_deriv0(RayClassChar(k, m), ctx)
    values = []
    with mp.workdps(ctx.dps):
        tol = mp.mpf(10) ** (-(precision // 2))
        for i in range(m):
            acc = mp.fsum(mp.expjpi(mp.mpf(-2 * k * i) / m) * derivs[k]
                          for k in odd_ks)
            acc = acc * 2 / m
            if abs(acc.imag) > tol * (1 + abs(acc)):
                raise ComputationalError(
                    f"partial zeta derivative at sigma^({i}) is not real: {acc}")
            values.append(mp.e ** acc.real)
        for i in range(m // 2):
            if abs(values[i] * values[i + m // 2] - 1) > tol:
                raise ComputationalError("Stark units fail the inverse-pair symmetry")
        if any(v <= 0 for v in values):
            raise ComputationalError("Stark units must be positive")
    return StarkUnitSet(values=values, ordering=list(range(m)),
                        precision=precision, sigma_T_index=m // 2, info=info)


def minpoly_stark(units: StarkUnitSet, info: DimensionInfo) -> ExactPoly:
    """Exact minimal polynomial p1 of the Stark units over K.

    Numeric expansion of prod(t - eps_j), then coefficientwise integer
    relation over (1, u_K); every unit is verified to be a root of the
    reconstructed polynomial at working tolerance.
    """
    prec = units.precision
    u = info.unit()
    # u = (a + b sqrt(D))/2-form; coefficients over (1, u) can pick up the
    # denominator of the sqrt(D)-coordinate of u, so allow it in the relation
    den_bound = 2 * int(u.b.denominator) * max(1, abs(int(u.b.numerator)))
    ring = QuadRing(info.D)
    with mp.workdps(prec + 15):
        coeffs_num = [mp.mpf(1)]
        for v in units.values:
            nxt = [mp.mpf(0)] * (len(coeffs_num) + 1)
            for i, c in enumerate(coeffs_num):
                nxt[i] -= c * v
                nxt[i + 1] += c
            coeffs_num = nxt
        coeffs_num.reverse()  # ascending
        basis = [mp.mpf(1), u.embed(prec + 15)]
        one = QuadElem(1, 0, info.D)
        out = []
        for c in coeffs_num[:-1]:
            c0, c1 = reconstruct_or_raise(
                c, basis, prec, denominator_bound=den_bound,
                what="Stark minimal polynomial coefficient")
            out.append(one * c0 + u * c1)
        out.append(one)
    p1 = ExactPoly(out, ring)
    with mp.workdps(prec + 10):
        tol = mp.mpf(10) ** (-(prec // 2))
        scale = max(mp.mpf(1), max(abs(c) for c in p1.embed_coeffs(prec + 10)))
        for v in units.values:
            if abs(p1.eval_numeric(v, prec + 10)) > tol * scale:
                raise ComputationalError("a Stark unit is not a root of the "
                                         "reconstructed minimal polynomial")
    return p1
