import mpmath as mp
import pytest

from sicfid.errors import ComputationalError
from sicfid.galois import (GaloisPoly, interpolate_galois, order_roots,
                           verify_galois_action)
from sicfid.numerics import BigComplex, find_roots
from sicfid.polyfield import ExactPoly, QuadRing, tau_conjugate
from sicfid.quadfield import QuadElem, classify_dimension

K2 = QuadRing(2)
ONE = QuadElem(1, 0, 2)
S2 = QuadElem(0, 1, 2)
P1_D7 = ExactPoly([ONE, -(ONE + S2), ONE], K2)
P4_D7 = ExactPoly([QuadElem(2, 2, 2), QuadElem(2, 1, 2), ONE], K2)


def test_interpolate_d7_matched_factor():
    roots = find_roots(P4_D7, 60)
    gp = interpolate_galois(roots, K2, 60, modulus_poly=P4_D7)
    assert gp.g.coeffs == [QuadElem(-2, -1, 2), -ONE]  # -(2+sqrt2) - t
    assert gp.order == 2


def test_interpolate_d7_published_factor():
    # the published 2 + sqrt2 - t permutes the roots of the alternate factor
    alt = P4_D7.alternate()
    roots = find_roots(alt, 60)
    gp = interpolate_galois(roots, K2, 60, modulus_poly=alt)
    assert gp.g.coeffs == [QuadElem(2, 1, 2), -ONE]


def test_interpolate_identity_single_root():
    gp = interpolate_galois([BigComplex(3, 0, precision=40)], K2, 40)
    t = ExactPoly.variable(K2)
    assert gp.g == t


def test_order_roots_d7():
    p3 = tau_conjugate(P1_D7)
    g2 = GaloisPoly(ExactPoly([ONE - S2, -ONE], K2), 2, p3)
    seed = find_roots(p3, 50)[0]
    ys = order_roots(p3, g2, seed, 50)
    assert len(ys) == 2
    with mp.workdps(60):
        # successor relation and unit circle
        img = g2.g.eval_numeric(ys[0].to_mpc(), 60)
        assert abs(img - ys[1].to_mpc()) < mp.mpf(10) ** -45
        for y in ys:
            assert abs(abs(y.to_mpc()) - 1) < mp.mpf(10) ** -45


def test_order_roots_rejects_wrong_galois_poly():
    p3 = tau_conjugate(P1_D7)
    bad = GaloisPoly(ExactPoly([QuadElem(1, 0, 2), ONE], K2), 2, p3)  # t + 1
    seed = find_roots(p3, 50)[0]
    with pytest.raises(ComputationalError):
        order_roots(p3, bad, seed, 50)


def test_verify_galois_action_d7():
    g4 = GaloisPoly(ExactPoly([QuadElem(-2, -1, 2), -ONE], K2), 2, P4_D7)
    rep = verify_galois_action(g4, P4_D7, 60)
    assert rep.ok and rep.cycle_closes and rep.half_period_conjugation
    assert rep.max_successor_residual < mp.mpf(10) ** -30


def test_verify_galois_action_trivial_m1():
    p = ExactPoly([-ONE, ONE], K2)  # t - 1
    g = GaloisPoly(ExactPoly.variable(K2), 1, p)
    rep = verify_galois_action(g, p, 40)
    assert rep.ok and rep.half_period_conjugation is None


def test_verify_galois_action_detects_mismatch():
    # published-orientation polynomial against the wrong factor
    wrong = GaloisPoly(ExactPoly([QuadElem(2, 1, 2), -ONE], K2), 2, P4_D7)
    with pytest.raises(ComputationalError):
        verify_galois_action(wrong, P4_D7, 50)


def test_verify_real_positive_for_g1(run7):
    rep = verify_galois_action(run7.g1, run7.p1, 60, require_real_positive=True)
    assert rep.ok and rep.real_positive


def test_composition_law_on_roots(fixtures199):
    # g^[a+b] = g^[a] o g^[b] on the root cycle
    import random

    p4, g4 = fixtures199["p4"], fixtures199["g4"]
    seed = find_roots(p4, 50)[0]
    cycle = order_roots(p4, g4, seed, 50, expect_unit_modulus=False)
    rng = random.Random(7)
    with mp.workdps(60):
        vals = [z.to_mpc() for z in cycle]
        for _ in range(4):
            a, b = rng.randrange(22), rng.randrange(22)
            j = rng.randrange(22)
            assert abs(vals[(j + a + b) % 22] - vals[(j + a % 22 + b % 22) % 22]) \
                < mp.mpf(10) ** -40


def test_interpolated_poly_reproduces_successors(run7):
    # reconstructed g evaluated at each unit reproduces the successor
    g1 = run7.g1
    units = run7.stages  # ledger presence sanity
    assert any(s.name == "g1-interpolate" for s in units)
    roots = find_roots(run7.p1, 80)
    with mp.workdps(90):
        vals = sorted((r.to_mpc() for r in roots), key=lambda z: z.real)
        img = g1.g.eval_numeric(vals[0], 90)
        assert min(abs(img - v) for v in vals) < mp.mpf(10) ** -40


def test_interpolate_reconstructs_published_g4(fixtures199):
    """Interpolation over the ordered roots reproduces the published g4 exactly."""
    p4, g4 = fixtures199["p4"], fixtures199["g4"]
    seed = find_roots(p4, 170)[0]
    zs = order_roots(p4, g4, seed, 170, expect_unit_modulus=False)
    got = interpolate_galois(zs, p4.ring, 160, modulus_poly=p4)
    assert got.g == g4.g


def test_interpolate_refuses_underprecise_nodes():
    from sicfid.errors import PrecisionError

    roots = find_roots(P4_D7, 40)
    with pytest.raises(PrecisionError):
        interpolate_galois(roots, K2, 120, modulus_poly=P4_D7)
