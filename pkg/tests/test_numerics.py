import mpmath as mp
import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from sicfid.errors import ComputationalError
from sicfid.numerics import (BigComplex, find_roots, integer_relation, lll_reduce,
                             minpoly_from_roots, newton_polish)
from sicfid.polyfield import ExactPoly, QuadRing, RING_Q, tau_conjugate
from sicfid.quadfield import QuadElem

K2 = QuadRing(2)
ONE = QuadElem(1, 0, 2)
S2 = QuadElem(0, 1, 2)
P1_D7 = ExactPoly([ONE, -(ONE + S2), ONE], K2)
P2_D7 = tau_conjugate(P1_D7)


def _quadratic_roots(b, c, dps):
    # oracle: quadratic formula for t^2 + b t + c
    with mp.workdps(dps):
        disc = mp.mpc(b) ** 2 - 4 * mp.mpc(c)
        r1 = (-mp.mpc(b) + mp.sqrt(disc)) / 2
        r2 = (-mp.mpc(b) - mp.sqrt(disc)) / 2
    return sorted([r1, r2], key=lambda z: (z.real, z.imag))


def test_bigcomplex_precision_propagation():
    a = BigComplex(1, 2, precision=80)
    b = BigComplex(3, -1, precision=40)
    assert (a * b).precision == 40
    assert (a + 5).precision == 80
    assert a.conjugate().im == -a.im
    with pytest.raises(ValueError):
        BigComplex(1, 0)


def test_find_roots_p2_d7():
    roots = find_roots(P2_D7, 40)
    # p2 = t^2 - (1 - sqrt2) t + 1, so the linear coefficient is sqrt2 - 1
    with mp.workdps(60):
        oracle = _quadratic_roots(mp.sqrt(2) - 1, 1, 60)
    with mp.workdps(50):
        for r, o in zip(roots, oracle):
            assert abs(r.to_mpc() - o) < mp.mpf(10) ** -38
            assert abs(abs(r) - 1) < mp.mpf(10) ** -38
        # both unit-modulus with real part -0.2071..., imag +-0.9783...
        assert abs(roots[0].re - mp.mpf("-0.2071067811865475244")) < mp.mpf("1e-18")
        assert abs(abs(roots[0].im) - mp.mpf("0.9783183434785159564")) < mp.mpf("1e-18")


def test_find_roots_p1_d7():
    roots = find_roots(P1_D7, 40)
    with mp.workdps(50):
        assert abs(roots[0].to_mpc() - mp.mpf("0.53101005645956918463")) < mp.mpf("1e-19")
        assert abs(roots[1].to_mpc() - mp.mpf("1.8832035059135258642")) < mp.mpf("1e-18")


def test_find_roots_linear():
    p = ExactPoly([mpq(-1), mpq(1)], RING_Q)
    roots = find_roots(p, 30)
    assert len(roots) == 1 and abs(roots[0].to_mpc() - 1) < mp.mpf("1e-29")


def test_find_roots_rejects_non_squarefree():
    p = ExactPoly([mpq(1), mpq(-2), mpq(1)], RING_Q)  # (t-1)^2
    with pytest.raises(ValueError):
        find_roots(p, 30)


def test_newton_polish_sqrt2():
    p = ExactPoly([mpq(-2), mpq(0), mpq(1)], RING_Q)
    r = newton_polish(p, BigComplex(1.4, 0, precision=10), 50)
    with mp.workdps(60):
        assert abs(r.to_mpc() - mp.sqrt(2)) < mp.mpf(10) ** -50


def test_newton_polish_p1_to_100_digits():
    trace = []
    r = newton_polish(P1_D7, BigComplex(1.88, 0, precision=10), 100,
                      residual_trace=trace)
    with mp.workdps(110):
        assert abs(P1_D7.eval_numeric(r.to_mpc(), 110)) < mp.mpf(10) ** -98


def test_newton_quadratic_convergence():
    trace = []
    newton_polish(P1_D7, BigComplex(1.9, 0, precision=10), 120,
                  residual_trace=trace)
    # mid-run: successive log-residuals improve by a factor >= 1.8
    logs = [-mp.log10(r) for _, r in trace if 0 < r < mp.mpf("1e-4")]
    logs = [v for v in logs if v < 100]  # ignore the precision floor
    ratios = [b / a for a, b in zip(logs, logs[1:]) if b > a]
    assert any(r >= mp.mpf("1.8") for r in ratios)


def test_minpoly_round_trip():
    roots = find_roots(P1_D7, 60)
    coeffs = minpoly_from_roots(roots)
    with mp.workdps(70):
        want = P1_D7.embed_coeffs(70)
        for got, exact in zip(coeffs, want):
            assert abs(got.to_mpc() - exact) < mp.mpf(10) ** -30


def test_minpoly_single_root():
    out = minpoly_from_roots([BigComplex(1, 0, precision=30)])
    assert abs(out[0].to_mpc() + 1) < mp.mpf("1e-25")  # constant -1
    assert abs(out[1].to_mpc() - 1) < mp.mpf("1e-25")  # leading 1


def test_minpoly_round_trip_d199(p1_199):
    p2 = tau_conjugate(p1_199)
    roots = find_roots(p2, 120)
    assert len(roots) == 22
    got = minpoly_from_roots(roots)
    with mp.workdps(130):
        want = p2.embed_coeffs(130)
        scale = max(abs(c) for c in want)
        for g, w in zip(got, want):
            assert abs(g.to_mpc() - w) / scale < mp.mpf(10) ** -(120 - 30)


def test_integer_relation_examples():
    with mp.workdps(60):
        res = integer_relation(1 + mp.sqrt(2), [mp.mpf(1), mp.sqrt(2)], 40)
        assert res.verdict == "accepted" and res.coefficients == [mpq(1), mpq(1)]
        res = integer_relation(-(1 + mp.sqrt(2)), [mp.mpf(1), mp.sqrt(2)], 40)
        assert res.coefficients == [mpq(-1), mpq(-1)]
        res = integer_relation(mp.mpf(1) / 3, [mp.mpf(1), mp.sqrt(2)], 40,
                               denominator_bound=10)
        assert res.verdict == "accepted"
        assert res.coefficients == [mpq(1, 3), mpq(0)]


def test_integer_relation_rejects():
    with mp.workdps(40):
        res = integer_relation(mp.pi, [mp.mpf(1), mp.sqrt(2)], 30)
    assert res.verdict == "rejected"


@given(st.fractions(min_value="1/7", max_value=50, max_denominator=9))
def test_integer_relation_scale_consistency(scale):
    with mp.workdps(60):
        c = mp.mpf(scale.numerator) / scale.denominator
        target = 3 - 2 * mp.sqrt(2)
        base = [mp.mpf(1), mp.sqrt(2)]
        r1 = integer_relation(target, base, 40)
        r2 = integer_relation(c * target, [c * b for b in base], 40)
    assert r1.verdict == r2.verdict == "accepted"
    assert r1.coefficients == r2.coefficients


def test_lll_finds_relation():
    rows = [
        [1, 0, 0, 1010 * 10**8],
        [0, 1, 0, 1001 * 10**8],
        [0, 0, 1, 2011 * 10**8],
    ]
    red = lll_reduce(rows)
    assert [1, 1, -1, 0] in red or [-1, -1, 1, 0] in red


def test_lll_preserves_lattice_rank():
    rows = [[3, 1, 7], [2, 8, 1], [9, 4, 4]]
    red = lll_reduce(rows)
    det = lambda m: (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                     - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                     + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    assert abs(det(red)) == abs(det(rows))


def test_newton_polish_d199_root_30_to_300():
    from sicfid.fileio import load_fixtures

    p4 = load_fixtures(199)["p4"]
    coarse = find_roots(p4, 30)[0]
    fine = newton_polish(p4, coarse, 300)
    with mp.workdps(310):
        scale = max(abs(c) for c in p4.embed_coeffs(310))
        assert abs(p4.eval_numeric(fine.to_mpc(), 310)) / scale < mp.mpf(10) ** -295
