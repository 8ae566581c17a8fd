import json

import mpmath as mp
import pytest
from gmpy2 import mpq

from sicfid.cli import main as cli_main
from sicfid.errors import ComputationalError
from sicfid.fileio import (ParseError, emit_report, fiducial_from_dict,
                           fiducial_to_dict, galois_from_dict, galois_to_dict,
                           load_fixtures, load_table1, parse_poly, parse_rational,
                           poly_from_dict, poly_to_dict, stark_from_dict,
                           stark_to_dict, verify_fixture_galois, write_fiducial,
                           write_poly)
from sicfid.galois import GaloisPoly
from sicfid.polyfield import ExactPoly, HKRing, QuadRing, RING_Q
from sicfid.quadfield import QuadElem

K2 = QuadRing(2)


def test_rational_round_trip():
    q = mpq(-355, 113)
    assert parse_rational([str(q.numerator), str(q.denominator)]) == q
    with pytest.raises(ParseError):
        parse_rational(["x", "1"])


@pytest.mark.parametrize("ring,coeffs", [
    (RING_Q, [mpq(1, 2), mpq(-3), mpq(7, 5)]),
    (K2, [QuadElem(1, 2, 2), QuadElem(mpq(-1, 2), mpq(3, 4), 2)]),
    (HKRing(5, 2), None),
])
def test_poly_round_trip(ring, coeffs):
    if coeffs is None:
        coeffs = [ring.from_coords([1, mpq(1, 2), -3, mpq(2, 7)]), ring.one()]
    p = ExactPoly(coeffs, ring)
    assert poly_from_dict(poly_to_dict(p)) == p


def test_poly_file_round_trip(tmp_path):
    p = ExactPoly([QuadElem(2, 2, 2), QuadElem(2, 1, 2), QuadElem(1, 0, 2)], K2)
    path = tmp_path / "p.json"
    write_poly(path, p)
    assert parse_poly(path) == p


def test_parse_poly_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json\n  at line 1")
    with pytest.raises(ParseError) as err:
        parse_poly(bad)
    assert "line" in str(err.value)
    worse = tmp_path / "worse.json"
    worse.write_text(json.dumps({"ring": "Z", "coeffs": []}))
    with pytest.raises(ParseError):
        parse_poly(worse)


def test_empty_coeff_list_is_zero_poly():
    p = poly_from_dict({"ring": "Q", "coeffs": []})
    assert p.is_zero


def test_bundled_d7_p1():
    fx = load_fixtures(7)
    one = QuadElem(1, 0, 2)
    assert fx["p1"] == ExactPoly([one, QuadElem(-1, -1, 2), one], K2)
    assert fx["meta"]["theta_set"] == [3, 5]


def test_bundled_d199_g4_constant_term():
    fx = load_fixtures(199)
    den = 2**10 * 7**20 * 97 * 137 * 353 * 11777
    pref = 2**10 * 7**20
    want = QuadElem(mpq(pref * -17078833449878756, den),
                    mpq(pref * 12080287801165569, den), 2)
    assert fx["g4"].g.coeffs[0] == want
    assert fx["g4"].order == 22
    assert fx["g4"].g.degree() == 21


def test_fixture_checksum_detects_tampering():
    fx = load_fixtures(199)
    g = fx["g4"].g
    bad_coeffs = list(g.coeffs)
    bad_coeffs[5] = bad_coeffs[5] + QuadElem(mpq(1, 10**6), 0, 2)
    bad = GaloisPoly(ExactPoly(bad_coeffs, g.ring), 22, fx["p4"])
    with pytest.raises(ComputationalError):
        verify_fixture_galois(fx["p4"], bad)


def test_galois_round_trip():
    fx = load_fixtures(7)
    d = galois_to_dict(fx["g4"])
    back = galois_from_dict(d, fx["p4"])
    assert back.g == fx["g4"].g and back.order == fx["g4"].order


def test_stark_round_trip():
    from sicfid.quadfield import classify_dimension
    from sicfid.zeta import stark_units

    su = stark_units(classify_dimension(7), 40)
    data = stark_to_dict(su)
    back = stark_from_dict(data)
    assert back.precision == su.precision
    assert back.sigma_T_index == su.sigma_T_index
    with mp.workdps(50):
        for a, b in zip(back.values, su.values):
            assert abs(a - b) < mp.mpf(10) ** -38


def test_fiducial_round_trips(tmp_path, run7):
    # numeric
    d = fiducial_to_dict(run7.fiducial)
    back = fiducial_from_dict(d)
    with mp.workdps(run7.fiducial.precision + 5):
        for a, b in zip(back.components, run7.fiducial.components):
            assert abs(a.to_mpc() - b.to_mpc()) < mp.mpf(10) ** \
                (8 - run7.fiducial.precision)
    # exact: bit-exact
    path = tmp_path / "fid.json"
    write_fiducial(path, run7.fiducial_exact)
    from sicfid.fileio import parse_fiducial

    back = parse_fiducial(path)
    assert back.norm_sq == run7.fiducial_exact.norm_sq
    for a, b in zip(back.components, run7.fiducial_exact.components):
        assert a.rep == b.rep
    # and it still verifies exactly
    from sicfid.heisenberg import sic_verify

    assert sic_verify(back, subset="reduced").passed


def test_table1_contents():
    t = load_table1()
    assert t[7]["degree_factored"] == {"2": 2}
    assert t[103]["h"] == 2
    assert t[199]["degree_factored"] == {"2": 2, "11": 1}


def test_machine_report_byte_stable():
    from sicfid.pipeline import RunConfig, run_recipe

    cfg = RunConfig(precision=40, verify="reduced", exact=False)
    r1 = run_recipe(7, source="zeta", config=cfg)
    r2 = run_recipe(7, source="zeta", config=cfg)
    assert emit_report(r1, "machine") == emit_report(r2, "machine")


def test_human_report_mentions_exact_verification(run7):
    text = emit_report(run7, "human")
    assert "exact verification: PASS" in text
    assert "verdict: PASS" in text


def test_cli_classify(capsys):
    assert cli_main(["classify", "--d", "199"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["m"] == 22 and out["ell"] == 3 and out["h"] == 1


def test_cli_run_and_verify(tmp_path, capsys):
    fid = tmp_path / "fid.json"
    rep = tmp_path / "report.json"
    code = cli_main(["run", "--d", "7", "--precision", "40",
                     "--out-fiducial", str(fid), "--report", str(rep)])
    assert code == 0
    capsys.readouterr()
    assert json.loads(rep.read_text())["verdict"] == "pass"
    assert cli_main(["verify", "--fiducial", str(fid), "--precision", "40"]) == 0
    capsys.readouterr()


def test_cli_conjecture_failure_exit_code(tmp_path, capsys):
    # a consistent but SIC-unrelated pair: p4' = t^2 + t + 1, g4' = -1 - t
    one = QuadElem(1, 0, 2)
    p4 = ExactPoly([one, one, one], K2)
    g4 = GaloisPoly(ExactPoly([QuadElem(-1, 0, 2), -one], K2), 2, p4)
    write_poly(tmp_path / "p4.json", p4)
    with open(tmp_path / "g4.json", "w") as fh:
        json.dump(galois_to_dict(g4), fh)
    code = cli_main(["run", "--d", "7", "--source", str(tmp_path),
                     "--precision", "40"])
    capsys.readouterr()
    assert code == 2


def test_cli_stark(capsys):
    assert cli_main(["stark", "--d", "7", "--precision", "30"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["d"] == 7 and len(data["values"]) == 2


def test_report_lists_d199_thetas(run199):
    text = emit_report(run199, "human")
    assert "[41, 75, 134, 167, 189, 190]" in text and "-1" in text


def test_bundled_files_round_trip_bit_exact():
    from sicfid.fileio import data_dir

    for d in (7, 199):
        base = data_dir().joinpath(f"d{d}")
        for f in base.iterdir():
            if f.name in ("meta.json",):
                continue
            raw = json.loads(f.read_text())
            if "cycle_length" in raw:
                obj = galois_from_dict(raw)
                extra = {k: raw[k] for k in ("provenance",) if k in raw}
                again = galois_to_dict(obj, **extra)
            else:
                obj = poly_from_dict(raw)
                extra = {k: raw[k] for k in ("provenance",) if k in raw}
                again = poly_to_dict(obj, **extra)
            assert json.dumps(again, indent=1, sort_keys=True) + "\n" == f.read_text()


def test_report_on_conjecture_failure():
    from sicfid.errors import ConjectureFailure
    from sicfid.pipeline import RunConfig, run_recipe

    one = QuadElem(1, 0, 2)
    p4 = ExactPoly([one, one, one], K2)  # t^2 + t + 1: valid cycle, not a SIC
    g4 = GaloisPoly(ExactPoly([QuadElem(-1, 0, 2), -one], K2), 2, p4)
    with pytest.raises(ConjectureFailure) as err:
        run_recipe(7, source="ingested", config=RunConfig(precision=40),
                   ingested={"p4": p4, "g4": g4})
    failed = err.value.run
    assert failed.verdict == "conjecture-fail"
    text = emit_report(failed, "human")
    assert "CONJECTURE-FAIL" in text
