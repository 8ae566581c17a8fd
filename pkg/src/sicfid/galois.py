"""Galois polynomials: interpolation from ordered roots and cyclic-action checks.

A Galois polynomial g realizes the generator sigma_m of the cyclic group on
the roots of a fixed polynomial: g(root_j) = root_{j+1} within each cycle.
We interpolate numerically (barycentric-style Lagrange, O(m^2)), reconstruct
exact coefficients by integer relations, and never build an abstract Galois
group; the action exists only through g and the cycle structure.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp

from .errors import ComputationalError, PrecisionError
from .numerics import BigComplex, newton_polish, to_mpc
from .polyfield import ExactPoly, reconstruct_real_coefficient


@dataclass
class GaloisPoly:
    """Exact polynomial permuting the roots of modulus_poly in an m-cycle."""

    g: ExactPoly
    order: int  # cycle length m
    modulus_poly: ExactPoly
    block_count: int = 1

    def eval_numeric(self, z, dps):
        return self.g.eval_numeric(z, dps)


def interpolate_galois(roots, target_ring, precision: int, block_count: int = 1,
                       modulus_poly: ExactPoly = None,
                       denominator_bound: int = None) -> GaloisPoly:
    """Interpolate g(root_j) = root_{j+1 mod cycle} and reconstruct it exactly.

    The root list must be ordered so that index +1 is the sigma_m successor
    within each of the block_count cycles (cycle b occupies indices
    [b*m, (b+1)*m)).  Coefficients are recovered over target_ring by integer
    relations; rejection raises a precision-increase error, since Galois
    coefficient heights can be enormous.
    """
    n = len(roots)
    if n == 0 or n % block_count:
        raise ValueError("root count must be a positive multiple of block_count")
    m = n // block_count
    if m == 1:
        # identity permutation: any representative works; use t itself
        return GaloisPoly(g=ExactPoly.variable(target_ring), order=1,
                          modulus_poly=modulus_poly, block_count=block_count)
    node_prec = min((r.precision for r in roots if isinstance(r, BigComplex)),
                    default=precision)
    if node_prec < precision:
        # reconstructing coefficients beyond the node accuracy silently locks
        # onto false relations (they surface as garbage tau-conjugates)
        raise PrecisionError(
            f"nodes carry {node_prec} digits but {precision} were requested; "
            "polish the roots against the exact modulus first",
            suggested_precision=precision)
    if denominator_bound is None:
        denominator_bound = 10 ** max(6, precision // 3)
    work = precision + 20
    with mp.workdps(work):
        xs = [to_mpc(r) for r in roots]
        fs = [xs[b * m + (j + 1) % m] for b in range(block_count) for j in range(m)]
        cs = _lagrange(xs, fs)
        tol = mp.mpf(10) ** (30 - precision)
        coeffs = []
        for c in cs:
            if abs(c.imag) > tol * (1 + abs(c)):
                raise ComputationalError("interpolated coefficient is not real")
            coeffs.append(reconstruct_real_coefficient(
                c.real, target_ring, precision, denominator_bound))
    g = ExactPoly(coeffs, target_ring)
    gp = GaloisPoly(g=g, order=m, modulus_poly=modulus_poly, block_count=block_count)
    _check_successors(gp, xs, fs, precision)
    return gp


def _lagrange(xs, fs):
    """Dense Lagrange interpolation through (xs, fs); returns ascending coeffs."""
    n = len(xs)
    master = [mp.mpc(1)]
    for x in xs:
        nxt = [mp.mpc(0)] * (len(master) + 1)
        for i, c in enumerate(master):
            nxt[i] -= c * x
            nxt[i + 1] += c
        master = nxt
    out = [mp.mpc(0)] * n
    for x, f in zip(xs, fs):
        quot = _deflate(master, x)
        w = f / _horner(quot, x)
        for i in range(n):
            out[i] += w * quot[i]
    return out


def _deflate(coeffs, x):
    """Divide an ascending coefficient list by (t - x), discarding the remainder."""
    n = len(coeffs) - 1
    quot = [mp.mpc(0)] * n
    carry = coeffs[n]
    for i in range(n - 1, -1, -1):
        quot[i] = carry
        carry = coeffs[i] + carry * x
    return quot


def _horner(coeffs, x):
    acc = mp.mpc(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _check_successors(gp: GaloisPoly, xs, fs, precision):
    bound = mp.mpf(10) ** (-(precision // 2))
    with mp.workdps(precision + 10):
        scale = max(mp.mpf(1), max(abs(x) for x in xs))
        for j, (x, f) in enumerate(zip(xs, fs)):
            resid = abs(gp.g.eval_numeric(x, precision + 10) - f) / scale
            if resid > bound:
                raise ComputationalError(
                    f"reconstructed Galois polynomial misses successor {j}: "
                    f"residual {mp.nstr(resid, 5)}")


def order_roots(p3: ExactPoly, g2, seed_root, precision: int,
                expect_unit_modulus=None) -> list:
    """The m roots of p3 in cyclic Galois order, from one seed via y -> g2(y).

    Each Galois step is followed by a Newton polish against p3 to stop
    precision loss from accumulating.  Asserts each iterate is a fresh root
    (and on the unit circle when expected); a step that fails to polish onto
    a new root signals a wrong g2, insufficient precision, or a failed
    conjecture, and the error says which check tripped.
    """
    m = p3.degree()
    g = g2.g if isinstance(g2, GaloisPoly) else g2
    seed = newton_polish(p3, seed_root if isinstance(seed_root, BigComplex)
                         else BigComplex.from_mpc(seed_root, precision), precision)
    if expect_unit_modulus is None:
        expect_unit_modulus = bool(abs(abs(seed) - 1) < mp.mpf(10) ** (-precision // 2))
    out = [seed]
    with mp.workdps(precision + 10):
        tol = mp.mpf(10) ** (-(precision // 2))
        for j in range(1, m):
            img = g.eval_numeric(out[-1].to_mpc(), precision + 10)
            try:
                nxt = newton_polish(p3, BigComplex.from_mpc(img, precision), precision)
            except ComputationalError as exc:
                raise ComputationalError(
                    f"g2 image of root {j - 1} failed to polish onto a root of p3 "
                    f"(wrong Galois polynomial or insufficient precision): {exc}") from exc
            if any(abs(nxt.to_mpc() - r.to_mpc()) < tol for r in out):
                raise ComputationalError(
                    f"g2 image at step {j} landed on an already-visited root; "
                    "the ordering does not close an m-cycle")
            if expect_unit_modulus and abs(abs(nxt) - 1) > tol:
                raise ComputationalError(
                    f"root {j} left the unit circle by {mp.nstr(abs(abs(nxt)) - 1, 5)}")
            out.append(nxt)
        closing = g.eval_numeric(out[-1].to_mpc(), precision + 10)
        if abs(closing - out[0].to_mpc()) > tol * max(1, abs(out[0].to_mpc())):
            raise ComputationalError("Galois cycle fails to close after m steps")
    return out


@dataclass
class GaloisActionReport:
    order: int
    cycle_closes: bool
    max_successor_residual: object
    half_period_conjugation: bool = None
    max_half_period_residual: object = None
    real_positive: bool = None
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures


def verify_galois_action(g4, p4: ExactPoly, precision: int,
                         require_real_positive: bool = False) -> GaloisActionReport:
    """Verify the cyclic action of g4 on the roots of p4 numerically.

    Checks that g maps the root set to itself, that the m-fold composition
    is the identity, and for even m that the half-period power realizes the
    distinguished involution: complex conjugation on complex roots (for the
    square roots this is z -> -x0/z, inversion composed with the real
    scaling; at the phase-unit level it is exact inversion), and algebraic
    inversion on real Stark units.
    """
    from .numerics import find_roots

    g = g4.g if isinstance(g4, GaloisPoly) else g4
    roots = find_roots(p4, precision)
    m = p4.degree()
    failures = []
    with mp.workdps(precision + 10):
        vals = [r.to_mpc() for r in roots]
        scale = max(mp.mpf(1), max(abs(v) for v in vals))
        tol = mp.mpf(10) ** (-(precision // 2))
        all_real = all(abs(v.imag) < tol * scale for v in vals)
        p4_scale = max(mp.mpf(1), max(abs(c) for c in p4.embed_coeffs(precision + 10)))
        # walk the cycle from each root and take residual of the m-step return
        max_succ = mp.mpf(0)
        max_half = mp.mpf(0)
        cur = list(vals)
        visited = [[v] for v in vals]
        for step in range(m):
            imgs = [g.eval_numeric(v, precision + 10) for v in cur]
            for j, v in enumerate(imgs):
                resid = abs(p4.eval_numeric(v, precision + 10)) / p4_scale
                if resid > tol:
                    failures.append(("image-not-a-root", (j, step), resid))
            if failures:
                break
            cur = [newton_polish(p4, BigComplex.from_mpc(v, precision),
                                 precision).to_mpc() for v in imgs]
            for lst, v in zip(visited, cur):
                lst.append(v)
        if not failures:
            for j, (v0, lst) in enumerate(zip(vals, visited)):
                resid = abs(lst[m] - v0) / scale
                max_succ = max(max_succ, resid)
                if resid > tol:
                    failures.append(("identity", j, resid))
        half_ok = None
        if m % 2 == 0 and not failures:
            half_ok = True
            for j, (v0, lst) in enumerate(zip(vals, visited)):
                # real Stark units pair into inverses; complex roots conjugate
                want = 1 / v0 if all_real else v0.conjugate()
                resid = abs(lst[m // 2] - want) / scale
                max_half = max(max_half, resid)
                if resid > tol:
                    half_ok = False
                    failures.append(("half-period-involution", j, resid))
        real_pos = None
        if require_real_positive:
            real_pos = all(abs(v.imag) < tol * scale and v.real > 0 for v in vals)
            if not real_pos:
                failures.append(("real-positive-roots", -1, None))
    report = GaloisActionReport(order=m, cycle_closes=max_succ <= tol,
                                max_successor_residual=max_succ,
                                half_period_conjugation=half_ok,
                                max_half_period_residual=max_half,
                                real_positive=real_pos, failures=failures)
    if failures:
        raise ComputationalError(f"Galois action verification failed: {failures[:4]}")
    return report
