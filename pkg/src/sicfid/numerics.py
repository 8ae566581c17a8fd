"""Arbitrary-precision complex arithmetic, root finding, and integer relations.

Precision is always explicit, in decimal digits.  Root finding initializes
with a library solver at a few times the coefficient height and then
polishes every root by Newton iteration against the exact polynomial, so
the final accuracy is auditable.  Exact coefficients are recovered from
numerical data by LLL on the standard relation lattice.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
from gmpy2 import mpq

from .errors import ComputationalError, PrecisionError


class BigComplex:
    """Complex number with explicit working precision in decimal digits.

    Operations propagate the minimum precision of their operands; plain
    Python/mpmath numbers are treated as exact.
    """

    __slots__ = ("re", "im", "precision")

    def __init__(self, re, im=0, precision=None):
        if precision is None:
            raise ValueError("BigComplex requires an explicit precision")
        self.precision = int(precision)
        with mp.workdps(self.precision):
            self.re = mp.mpf(re)
            self.im = mp.mpf(im)

    @classmethod
    def from_mpc(cls, z, precision) -> "BigComplex":
        with mp.workdps(int(precision) + 5):
            z = mp.mpc(z)
            return cls(z.real, z.imag, precision)

    def to_mpc(self) -> mp.mpc:
        with mp.workdps(self.precision + 5):
            return mp.mpc(self.re, self.im)

    def _other(self, other):
        if isinstance(other, BigComplex):
            return other.to_mpc(), other.precision
        with mp.workdps(self.precision + 5):
            return mp.mpc(other), self.precision

    def _wrap(self, fn, other):
        z, prec = self._other(other)
        out_prec = min(self.precision, prec)
        with mp.workdps(out_prec):
            w = fn(self.to_mpc(), z)
        return BigComplex.from_mpc(w, out_prec)

    def __add__(self, other):
        return self._wrap(lambda a, b: a + b, other)

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(lambda a, b: a - b, other)

    def __rsub__(self, other):
        return self._wrap(lambda a, b: b - a, other)

    def __mul__(self, other):
        return self._wrap(lambda a, b: a * b, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(lambda a, b: a / b, other)

    def __rtruediv__(self, other):
        return self._wrap(lambda a, b: b / a, other)

    def __neg__(self):
        return BigComplex(-self.re, -self.im, self.precision)

    def conjugate(self) -> "BigComplex":
        return BigComplex(self.re, -self.im, self.precision)

    def __abs__(self) -> mp.mpf:
        with mp.workdps(self.precision):
            return abs(self.to_mpc())

    def __eq__(self, other):
        z, _ = self._other(other)
        return self.re == z.real and self.im == z.imag

    def __repr__(self):
        return f"BigComplex({self.re}, {self.im}, precision={self.precision})"


def to_mpc(value) -> mp.mpc:
    """Coerce a BigComplex or plain number to mpc in the current context."""
    if isinstance(value, BigComplex):
        return value.to_mpc()
    return mp.mpc(value)


def _coeff_height_digits(poly, dps=30) -> int:
    with mp.workdps(dps):
        h = max(abs(c) for c in poly.embed_coeffs(dps))
        if h < 1:
            return 1
        return int(mp.log10(h)) + 1


def find_roots(poly, precision: int, guard: int = 10) -> list:
    """All roots of a square-free exact polynomial, each |p(root)| < 10^(guard - precision).

    Roots are returned in deterministic (re, im) lexicographic order; any
    Galois ordering is applied later by the caller.
    """
    if poly.degree() < 1:
        raise ValueError("polynomial must have degree >= 1")
    if not poly.is_squarefree():
        raise ValueError("polynomial is not square-free")
    init_dps = max(50, 3 * _coeff_height_digits(poly), precision // 2)
    with mp.workdps(init_dps):
        coeffs = poly.embed_coeffs(init_dps)
        try:
            raw = mp.polyroots([mp.mpc(c) for c in reversed(coeffs)],
                               maxsteps=200, extraprec=80)
        except mp.libmp.libhyper.NoConvergence as exc:  # pragma: no cover
            raise ComputationalError(f"root initialization failed: {exc}") from exc
    roots = [newton_polish(poly, BigComplex.from_mpc(r, init_dps), precision)
             for r in raw]
    with mp.workdps(precision + guard):
        bound = mp.mpf(10) ** (guard - precision)
        acoeffs = [abs(c) for c in poly.embed_coeffs(precision + guard)]
        for r in roots:
            z = r.to_mpc()
            resid = abs(poly.eval_numeric(z, precision + guard)) / _eval_scale(acoeffs, z)
            if resid > bound:
                raise ComputationalError(
                    f"root residual {mp.nstr(resid, 5)} above bound {mp.nstr(bound, 5)}")
        roots.sort(key=lambda r: (r.re, r.im))
    return roots


def _eval_scale(abs_coeffs, z) -> mp.mpf:
    """Backward-error scale sum |c_k| |z|^k; |p(z)| below ulp of this is a root."""
    az = abs(z)
    total = mp.mpf(0)
    power = mp.mpf(1)
    for c in abs_coeffs:
        total += c * power
        power *= az
    return max(total, mp.mpf(1))


def newton_polish(poly, x0, target_precision: int, residual_trace=None):
    """Polish x0 onto a root of the exact polynomial to target_precision digits.

    Precision doubles per level; evaluations use exact coefficients rendered
    at the working precision, so convergence is quadratic until the floor.
    A residual increasing for three consecutive steps raises an error
    carrying the best value found.
    """
    if isinstance(x0, BigComplex):
        start = max(20, x0.precision)
        z = x0.to_mpc()
    else:
        start = 20
        with mp.workdps(60):
            z = mp.mpc(x0)
    dps = start
    deriv = poly.derivative()
    best = z
    best_resid = None
    bad_steps = 0
    total_steps = 0
    while True:
        dps = min(2 * dps, target_precision + 10)
        with mp.workdps(dps):
            z = mp.mpc(z)
            acoeffs = [abs(c) for c in poly.embed_coeffs(dps)]
            for _ in range(4):
                total_steps += 1
                if total_steps > 400:
                    raise ComputationalError("newton_polish iteration cap hit")
                pv = poly.eval_numeric(z, dps)
                resid = abs(pv)
                if residual_trace is not None:
                    residual_trace.append((dps, resid))
                floor = mp.mpf(10) ** (12 - dps) * _eval_scale(acoeffs, z)
                if best_resid is None or resid < best_resid:
                    best, best_resid, bad_steps = z, resid, 0
                elif resid > best_resid * 4 and resid > floor:
                    # jitter at the precision floor is not divergence
                    bad_steps += 1
                    if bad_steps >= 3:
                        raise ComputationalError(
                            f"newton_polish diverging; best residual {mp.nstr(best_resid, 5)}")
                if resid == 0:
                    break
                dv = deriv.eval_numeric(z, dps)
                if dv == 0:
                    raise ComputationalError("derivative vanished during polishing")
                z = z - pv / dv
            done = (dps >= target_precision + 10
                    and abs(poly.eval_numeric(z, dps))
                    < mp.mpf(10) ** (8 - dps) * _eval_scale(acoeffs, z))
        if done:
            return BigComplex.from_mpc(z, target_precision)


def _poly_scale(poly, dps):
    return max(mp.mpf(1), max(abs(c) for c in poly.embed_coeffs(dps)))


def minpoly_from_roots(roots) -> list:
    """Coefficients (ascending, monic) of prod(t - root_j) by iterated convolution."""
    if not roots:
        raise ValueError("need at least one root")
    prec = min(r.precision for r in roots if isinstance(r, BigComplex)) \
        if any(isinstance(r, BigComplex) for r in roots) else mp.mp.dps
    with mp.workdps(prec + 10):
        coeffs = [mp.mpc(1)]
        for r in roots:
            z = to_mpc(r)
            nxt = [mp.mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i] -= c * z
                nxt[i + 1] += c
            coeffs = nxt
    return [BigComplex.from_mpc(c, prec) for c in coeffs]


def lll_reduce(rows, delta=mpq(99, 100)):
    """LLL reduction of an integer lattice basis given as a list of rows."""
    basis = [[int(x) for x in row] for row in rows]
    n = len(basis)

    def gso():
        ortho, mu = [], [[mpq(0)] * n for _ in range(n)]
        norms = []
        for i in range(n):
            vec = [mpq(x) for x in basis[i]]
            for j in range(i):
                if norms[j] == 0:
                    mu[i][j] = mpq(0)
                    continue
                mu[i][j] = sum(mpq(a) * b for a, b in zip(basis[i], ortho[j])) / norms[j]
                vec = [x - mu[i][j] * y for x, y in zip(vec, ortho[j])]
            ortho.append(vec)
            norms.append(sum(x * x for x in vec))
        return ortho, mu, norms

    ortho, mu, norms = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            if abs(mu[k][j]) > mpq(1, 2):
                q = int(round(mu[k][j]))
                basis[k] = [a - q * b for a, b in zip(basis[k], basis[j])]
                ortho, mu, norms = gso()
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            ortho, mu, norms = gso()
            k = max(k - 1, 1)
    return basis


@dataclass
class IntegerRelationResult:
    coefficients: list  # exact rationals c_i with sum(c_i * basis_i) ~ target
    residual: object  # mpf relative residual at re-evaluation
    basis_size: int
    verdict: str  # "accepted" | "rejected"


def integer_relation(target, basis, precision: int,
                     denominator_bound: int = 1) -> IntegerRelationResult:
    """Express target as an exact rational combination of the basis values.

    LLL on the standard relation lattice with scaling 10^precision.  The
    verdict is accepted only when re-evaluation at full precision leaves a
    relative residual below 10^(-precision/2); otherwise the caller should
    raise the working precision.
    """
    k = len(basis) + 1
    work = precision + 15
    with mp.workdps(work):
        values = [mp.mpf(v) if not isinstance(v, BigComplex) else v.re for v in basis]
        tval = mp.mpf(target) if not isinstance(target, BigComplex) else target.re
        allv = values + [tval]
        scale = max(abs(v) for v in allv)
        if scale == 0:
            return IntegerRelationResult([mpq(0)] * len(basis), mp.mpf(0), len(basis), "accepted")
        big = mp.mpf(10) ** precision
        rows = []
        for i, v in enumerate(allv):
            row = [0] * k + [int(mp.nint(v / scale * big))]
            row[i] = 1
            rows.append(row)
        reduced = lll_reduce(rows)
        reduced.sort(key=lambda r: sum(x * x for x in r))
        for row in reduced:
            c_t = row[k - 1]
            if c_t == 0 or abs(c_t) > denominator_bound:
                continue
            coeffs = [mpq(-row[i], c_t) for i in range(len(basis))]
            resid = abs(sum(_mpqf(c) * v for c, v in zip(coeffs, values)) - tval)
            resid /= max(mp.mpf(1), abs(tval))
            if resid < mp.mpf(10) ** (-precision // 2):
                return IntegerRelationResult(coeffs, resid, len(basis), "accepted")
        return IntegerRelationResult([], mp.mpf("inf"), len(basis), "rejected")


def _mpqf(q) -> mp.mpf:
    return mp.mpf(int(q.numerator)) / mp.mpf(int(q.denominator))


def reconstruct_or_raise(target, basis, precision, denominator_bound=1,
                         what="coefficient"):
    """integer_relation wrapper that raises PrecisionError on rejection."""
    res = integer_relation(target, basis, precision, denominator_bound)
    if res.verdict != "accepted":
        raise PrecisionError(
            f"integer relation for {what} rejected at {precision} digits; "
            "raise the working precision (heuristic: more than twice the "
            "coefficient height)", suggested_precision=2 * precision)
    return res.coefficients
