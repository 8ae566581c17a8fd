import random

import mpmath as mp
import pytest

from sicfid.errors import ComputationalError
from sicfid.heisenberg import (FiducialVector, displacement_apply,
                               displacement_completeness, flatness_and_norm,
                               fourier_real, gik, gik_exact_is_target, overlap,
                               overlap_phase_check, shift_overlap_row, sic_verify,
                               symmetry_check)
from sicfid.numerics import BigComplex


def _random_vector(d, seed, conj_symmetric=False, dps=40):
    rng = random.Random(seed)
    with mp.workdps(dps):
        vals = [mp.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(d)]
        if conj_symmetric:
            vals[0] = mp.mpc(vals[0].real, 0)
            for r in range(1, d // 2 + 1):
                vals[-r % d] = vals[r].conjugate()
        return vals


def test_displacement_identity_and_shift():
    v = _random_vector(7, 1)
    with mp.workdps(45):
        out = displacement_apply(7, 0, 0, v, 40)
        assert max(abs(a - b) for a, b in zip(out, v)) < mp.mpf(10) ** -35
        shifted = displacement_apply(7, 1, 0, v, 40)
        # X|r> = |r+1>: component r of Xv is v_(r-1)
        assert max(abs(shifted[r] - v[(r - 1) % 7]) for r in range(7)) \
            < mp.mpf(10) ** -35


def test_weyl_commutation_on_random_vectors():
    d = 7
    for seed in range(3):
        v = _random_vector(d, seed)
        with mp.workdps(45):
            omega = mp.expjpi(mp.mpf(2) / d)
            zx = displacement_apply(d, 0, 1, displacement_apply(d, 1, 0, v, 40), 40)
            xz = displacement_apply(d, 1, 0, displacement_apply(d, 0, 1, v, 40), 40)
            dev = max(abs(a - omega * b) for a, b in zip(zx, xz))
            assert dev < mp.mpf(10) ** -34


def test_parity_via_double_fourier():
    # U_F^2 sends component r to component -r
    d = 7
    v = _random_vector(d, 5)
    with mp.workdps(45):
        omega = [mp.expjpi(mp.mpf(2 * t) / d) for t in range(d)]

        def fourier(w):
            return [mp.fsum(omega[(r * s) % d] * w[s] for s in range(d))
                    / mp.sqrt(-mp.mpf(d)) for r in range(d)]

        twice = fourier(fourier(v))
        # global phase: U_F^2 = (1/-d) * d * P = -P with this root convention
        ref = [v[(-r) % d] for r in range(d)]
        phase = twice[0] / ref[0]
        assert abs(abs(phase) - 1) < mp.mpf(10) ** -30
        dev = max(abs(a - phase * b) for a, b in zip(twice, ref))
        assert dev < mp.mpf(10) ** -30


def test_overlap_on_fiducial(run7):
    psi = run7.fiducial
    with mp.workdps(60):
        ov0 = overlap(psi, 0, 0, 50)
        assert abs(ov0.to_mpc() - 1) < mp.mpf(10) ** -40
        for (a, b) in ((1, 0), (0, 1), (2, 3), (6, 6), (5, 1)):
            ov = overlap(psi, a, b, 50)
            assert abs(abs(ov.to_mpc()) ** 2 - mp.mpf(1) / 8) < mp.mpf(10) ** -40


def test_gik_values_on_fiducial(run7):
    psi = run7.fiducial
    with mp.workdps(60):
        g00 = gik(psi, 0, 0, precision=50)
        assert abs(g00.to_mpc() - mp.mpf(2) / 8) < mp.mpf(10) ** -40
        g12 = gik(psi, 1, 2, precision=50)
        assert abs(g12.to_mpc()) < mp.mpf(10) ** -40


def test_gik_flat_vector_counterexample():
    # flat non-SIC vector at d = 5: G(1,1) = 1/5 by direct summation
    d = 5
    with mp.workdps(40):
        comps = [BigComplex(1 / mp.sqrt(d), 0, 30) for _ in range(d)]
    psi = FiducialVector(d=d, components=comps, mode="numeric", precision=30)
    val = gik(psi, 1, 1, precision=30)
    with mp.workdps(40):
        assert abs(val.to_mpc() - mp.mpf(1) / 5) < mp.mpf(10) ** -25


def test_gik_symmetries_random_conjugate_symmetric():
    d = 7
    vals = _random_vector(d, 9, conj_symmetric=True)
    with mp.workdps(50):
        for (i, k) in ((1, 2), (2, 3), (3, 1)):
            ref = gik(vals, i, k, precision=40).to_mpc()
            for (ii, kk) in ((-i, k), (i, -k), (-i, -k), (k, i)):
                other = gik(vals, ii % d, kk % d, precision=40).to_mpc()
                assert abs(ref - other) < mp.mpf(10) ** -30


def test_sic_verify_exact_full_d7(run7):
    rep = sic_verify(run7.fiducial_exact, subset="full")
    assert rep.passed and rep.exact_zero_count == 49 and rep.pairs_checked == 49


def test_sic_verify_detects_perturbation(run7):
    psi = run7.fiducial
    comps = list(psi.components)
    with mp.workdps(60):
        comps[1] = BigComplex.from_mpc(comps[1].to_mpc() + mp.mpf("1e-5"), 50)
    bad = FiducialVector(d=7, components=comps, mode="numeric", x0=psi.x0,
                         theta=psi.theta, sign=psi.sign, precision=50)
    rep = sic_verify(bad, subset="reduced", tolerance=mp.mpf("1e-8"))
    assert not rep.passed
    assert mp.mpf("1e-7") < rep.max_deviation < mp.mpf("1e-3")


def test_exact_gik_is_target_spot(run19):
    psi = run19.fiducial_exact
    assert gik_exact_is_target(psi, 0, 0)
    assert gik_exact_is_target(psi, 1, 1)
    assert gik_exact_is_target(psi, 0, 3)
    assert not gik_exact_is_target(FiducialVector(
        d=psi.d, components=[psi.components[0]] * psi.d, mode="exact",
        x0=psi.x0, norm_sq=psi.norm_sq), 1, 1)


def test_flatness_and_norm(run7):
    rep = flatness_and_norm(run7.fiducial, 60)
    assert rep.passed
    rep_exact = flatness_and_norm(run7.fiducial_exact)
    assert rep_exact.passed and rep_exact.exact_flat and rep_exact.exact_norm


def test_flatness_counterexample():
    d = 7
    with mp.workdps(40):
        comps = [BigComplex(1 + 0.3 * r, 0.1, 30) for r in range(d)]
    psi = FiducialVector(d=d, components=comps, mode="numeric", precision=30)
    rep = flatness_and_norm(psi, 30)
    assert not rep.passed


def test_fourier_real_d7(run7):
    reals, rep = fourier_real(run7.fiducial, 60)
    assert rep["passed"]
    assert len(reals) == 7
    with mp.workdps(70):
        # autocorrelations at i != 0 all equal 1/sqrt(8)
        vals = [r.to_mpc().real for r in reals]
        for i in range(1, 7):
            ac = mp.fsum(vals[r] * vals[(r - i) % 7] for r in range(7))
            assert abs(ac - 1 / mp.sqrt(8)) < mp.mpf(10) ** -40


def test_fourier_real_d19(run19):
    reals, rep = fourier_real(run19.fiducial, 60)
    assert rep["passed"]
    with mp.workdps(70):
        vals = [r.to_mpc().real for r in reals]
        acs = [mp.fsum(vals[r] * vals[(r - i) % 19] for r in range(19))
               for i in range(1, 19)]
        assert all(a > 0 for a in acs)
        assert max(abs(a - acs[0]) for a in acs) < mp.mpf(10) ** -40


def test_symmetry_check_d7(run7):
    rep = symmetry_check(run7.fiducial, ell=1, precision=60)
    assert rep.passed and rep.alpha in (2, 4)
    assert rep.distinct_values == 2 and rep.expected_multiplicity == 3
    # orbit equalities: components at {1,2,4} equal; at {3,6,5} equal
    with mp.workdps(60):
        vals = run7.fiducial.numeric_components(50)
        for grp in ((1, 2, 4), (3, 6, 5)):
            base = vals[grp[0]]
            assert all(abs(vals[g] - base) < mp.mpf(10) ** -40 for g in grp)
    rep_exact = symmetry_check(run7.fiducial_exact, ell=1)
    assert rep_exact.passed


def test_completeness_identity_fiducial(run7):
    total = displacement_completeness(run7.fiducial, 40)
    with mp.workdps(50):
        assert abs(total - 7) < mp.mpf(10) ** -30


def test_completeness_identity_random_vector():
    d = 5
    vals = _random_vector(d, 3)
    psi = FiducialVector(d=d, components=vals, mode="numeric", precision=35)
    total = displacement_completeness(psi, 35)
    with mp.workdps(45):
        assert abs(total - d) < mp.mpf(10) ** -25


def test_overlap_phase_check_pass_and_scrambled(run7):
    rep = overlap_phase_check(run7.fiducial, run7.ordered_roots, 60)
    assert rep["passed"] and rep["multiplicity"] == 3
    # scrambled fiducial: swap two components from different orbits
    comps = list(run7.fiducial.components)
    comps[1], comps[3] = comps[3], comps[1]
    bad = FiducialVector(d=7, components=comps, mode="numeric",
                         x0=run7.fiducial.x0, precision=run7.fiducial.precision)
    rep_bad = overlap_phase_check(bad, run7.ordered_roots, 60)
    assert not rep_bad["passed"]


def test_shift_row_matches_overlap(run7):
    with mp.workdps(60):
        row = shift_overlap_row(run7.fiducial, 50)
        ov = overlap(run7.fiducial, 1, 0, 50)
        assert abs(row[1] - ov.to_mpc()) < mp.mpf(10) ** -40


def test_even_dimension_rejected():
    with pytest.raises(ComputationalError):
        displacement_apply(6, 1, 1, [1] * 6, 30)


def test_overlap_modulus_d199(run199):
    with mp.workdps(120):
        ov = overlap(run199.fiducial, 3, 5, 100)
        assert abs(abs(ov.to_mpc()) ** 2 - mp.mpf(1) / 200) < mp.mpf(10) ** -30
