"""File formats, bundled reference data, and report emission.

All exact numbers are serialized as decimal-free numerator/denominator
strings, so every file round-trips bit-exactly.  Machine reports are
canonical JSON with no timestamps; given identical inputs and precision
they are byte-stable.
"""
from __future__ import annotations

import json
from importlib import resources

import mpmath as mp
from gmpy2 import mpq

from .errors import ComputationalError
from .galois import GaloisPoly
from .heisenberg import FiducialVector
from .numerics import BigComplex
from .polyfield import ExactPoly, HKRing, QuadRing, RING_Q, ResidueElem
from .quadfield import QuadElem
from .zeta import StarkUnitSet


class ParseError(ComputationalError):
    def __init__(self, message, path=None, fieldname=None):
        loc = f"{path}" + (f" field {fieldname!r}" if fieldname else "")
        super().__init__(f"{message} ({loc})" if loc else message)
        self.path = path
        self.fieldname = fieldname


def serialize_rational(q) -> list:
    return [str(q.numerator), str(q.denominator)]


def parse_rational(pair, path=None, fieldname=None) -> mpq:
    try:
        num, den = pair
        return mpq(int(num), int(den))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad rational {pair!r}: {exc}", path, fieldname) from exc


def _serialize_coeff(c, ring):
    if ring.kind == "Q":
        return serialize_rational(c)
    if ring.kind == "K":
        return [serialize_rational(c.a), serialize_rational(c.b)]
    return [[serialize_rational(c.x.a), serialize_rational(c.x.b)],
            [serialize_rational(c.y.a), serialize_rational(c.y.b)]]


def _parse_coeff(raw, ring, path=None, fieldname=None):
    if ring.kind == "Q":
        return parse_rational(raw, path, fieldname)
    if ring.kind == "K":
        a, b = raw
        return QuadElem(parse_rational(a, path, fieldname),
                        parse_rational(b, path, fieldname), ring.D)
    (xa, xb), (ya, yb) = raw
    return ring.from_coords([parse_rational(v, path, fieldname)
                             for v in (xa, xb, ya, yb)])


def _ring_from_dict(data, path=None):
    kind = data.get("ring")
    if kind == "Q":
        return RING_Q
    if kind == "K":
        return QuadRing(int(data["D"]))
    if kind == "HK":
        gen = data.get("hk_generator")
        if gen is None:
            raise ParseError("HK polynomial needs hk_generator", path, "hk_generator")
        D = int(data["D"])
        r = QuadElem(parse_rational(gen[0], path, "hk_generator"),
                     parse_rational(gen[1], path, "hk_generator"), D)
        return HKRing(D, r)
    raise ParseError(f"unknown ring tag {kind!r}", path, "ring")


def poly_to_dict(p: ExactPoly, **extra) -> dict:
    out = {"format": "sicfid-poly-v1", "ring": p.ring.kind}
    if p.ring.kind in ("K", "HK"):
        out["D"] = p.ring.D
    if p.ring.kind == "HK":
        out["hk_generator"] = [serialize_rational(p.ring.r.a),
                               serialize_rational(p.ring.r.b)]
    out["coeffs"] = [_serialize_coeff(c, p.ring) for c in p.coeffs]
    out.update(extra)
    return out


def poly_from_dict(data: dict, path=None) -> ExactPoly:
    ring = _ring_from_dict(data, path)
    coeffs = [_parse_coeff(raw, ring, path, f"coeffs[{i}]")
              for i, raw in enumerate(data.get("coeffs", []))]
    return ExactPoly(coeffs, ring)


def parse_poly(path) -> ExactPoly:
    """Exact polynomial from a JSON file; malformed input carries line/field."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} col {exc.colno}",
                         path) from exc
    return poly_from_dict(data, path)


def write_poly(path, p: ExactPoly, **extra):
    with open(path, "w") as fh:
        json.dump(poly_to_dict(p, **extra), fh, indent=1, sort_keys=True)
        fh.write("\n")


def galois_to_dict(gp: GaloisPoly, **extra) -> dict:
    return poly_to_dict(gp.g, cycle_length=gp.order,
                        block_count=gp.block_count, **extra)


def galois_from_dict(data: dict, modulus_poly=None, path=None) -> GaloisPoly:
    g = poly_from_dict(data, path)
    return GaloisPoly(g=g, order=int(data.get("cycle_length", 0)),
                      modulus_poly=modulus_poly,
                      block_count=int(data.get("block_count", 1)))


def parse_galois(path, modulus_poly=None) -> GaloisPoly:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} col {exc.colno}",
                         path) from exc
    return galois_from_dict(data, modulus_poly, path)


def stark_to_dict(units: StarkUnitSet) -> dict:
    info = units.info
    return {
        "format": "sicfid-stark-v1",
        "d": info.d if info else None,
        "D": info.D if info else None,
        "ell": info.ell if info else None,
        "precision": units.precision,
        "generator_label": "sigma_m",
        "sigma_T_index": units.sigma_T_index,
        "values": [mp.nstr(v, units.precision, strip_zeros=False)
                   for v in units.values],
    }


def stark_from_dict(data: dict, path=None) -> StarkUnitSet:
    prec = int(data["precision"])
    with mp.workdps(prec + 10):
        values = [mp.mpf(s) for s in data["values"]]
    return StarkUnitSet(values=values, ordering=list(range(len(values))),
                        precision=prec, sigma_T_index=int(data["sigma_T_index"]))


def write_stark(path, units: StarkUnitSet):
    with open(path, "w") as fh:
        json.dump(stark_to_dict(units), fh, indent=1, sort_keys=True)
        fh.write("\n")


def parse_stark(path) -> StarkUnitSet:
    with open(path) as fh:
        return stark_from_dict(json.load(fh), path)


def fiducial_to_dict(fv: FiducialVector) -> dict:
    out = {
        "format": "sicfid-fiducial-v1",
        "d": fv.d, "D": fv.D, "ell": fv.ell,
        "theta": fv.theta, "sign": fv.sign, "mode": fv.mode,
    }
    if fv.mode == "numeric":
        out["precision"] = fv.precision
        out["components"] = [[mp.nstr(c.re, fv.precision, strip_zeros=False),
                              mp.nstr(c.im, fv.precision, strip_zeros=False)]
                             for c in fv.components]
    else:
        mod = fv.components[0].modulus
        out["modulus"] = poly_to_dict(mod)
        out["components"] = [[_serialize_coeff(c, mod.ring)
                              for c in comp.rep.coeffs]
                             for comp in fv.components]
        out["norm_sq"] = [serialize_rational(fv.norm_sq.a),
                          serialize_rational(fv.norm_sq.b)]
        if fv.gamma_value is not None:
            gp = fv.gamma_value.precision
            out["gamma_value"] = [mp.nstr(fv.gamma_value.re, gp, strip_zeros=False),
                                  mp.nstr(fv.gamma_value.im, gp, strip_zeros=False),
                                  gp]
    return out


def fiducial_from_dict(data: dict, path=None) -> FiducialVector:
    d = int(data["d"])
    D = data.get("D")
    mode = data["mode"]
    x0 = None
    if D is not None:
        from .quadfield import classify_dimension

        x0 = classify_dimension(d).x0()
    if mode == "numeric":
        prec = int(data["precision"])
        with mp.workdps(prec + 10):
            comps = [BigComplex(mp.mpf(re), mp.mpf(im), prec)
                     for re, im in data["components"]]
        return FiducialVector(d=d, components=comps, mode="numeric", x0=x0,
                              theta=data.get("theta"), sign=data.get("sign"),
                              ell=data.get("ell"), D=D, precision=prec)
    mod = poly_from_dict(data["modulus"], path)
    ring = mod.ring
    comps = [ResidueElem(ExactPoly([_parse_coeff(c, ring, path) for c in raw],
                                   ring), mod)
             for raw in data["components"]]
    norm_sq = QuadElem(parse_rational(data["norm_sq"][0], path, "norm_sq"),
                       parse_rational(data["norm_sq"][1], path, "norm_sq"),
                       ring.D)
    gv = None
    if "gamma_value" in data:
        re, im, gp = data["gamma_value"]
        with mp.workdps(int(gp) + 10):
            gv = BigComplex(mp.mpf(re), mp.mpf(im), int(gp))
    return FiducialVector(d=d, components=comps, mode="exact", x0=x0,
                          theta=data.get("theta"), sign=data.get("sign"),
                          norm_sq=norm_sq, ell=data.get("ell"), D=D,
                          gamma_value=gv)


def parse_fiducial(path) -> FiducialVector:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} col {exc.colno}",
                         path) from exc
    return fiducial_from_dict(data, path)


def write_fiducial(path, fv: FiducialVector):
    with open(path, "w") as fh:
        json.dump(fiducial_to_dict(fv), fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# bundled reference data


def data_dir():
    return resources.files("sicfid").joinpath("data")


def fixture_dir(d: int):
    p = data_dir().joinpath(f"d{d}")
    if not p.is_dir():
        raise FileNotFoundError(f"no bundled data for d = {d}")
    return p


def load_fixtures(d: int, verify: bool = True) -> dict:
    """Bundled polynomials and metadata for a dimension, checksum-verified.

    The checksum recomputes the Galois polynomial's defining property on
    numeric roots (a transcription error in any coefficient breaks it).
    """
    base = fixture_dir(d)
    out = {}
    for name in ("p1", "p2", "p4"):
        f = base.joinpath(f"{name}.json")
        if f.is_file():
            out[name] = poly_from_dict(json.loads(f.read_text()), str(f))
    g4f = base.joinpath("g4.json")
    if g4f.is_file():
        out["g4"] = galois_from_dict(json.loads(g4f.read_text()),
                                     out.get("p4"), str(g4f))
    meta = base.joinpath("meta.json")
    if meta.is_file():
        out["meta"] = json.loads(meta.read_text())
    if verify and "g4" in out and "p4" in out:
        verify_fixture_galois(out["p4"], out["g4"])
    return out


def verify_fixture_galois(p4: ExactPoly, g4: GaloisPoly, precision: int = 60):
    """Transcription checksum: g4 must permute the numeric roots of p4."""
    from .numerics import find_roots

    roots = find_roots(p4, precision)
    with mp.workdps(precision + 10):
        vals = [r.to_mpc() for r in roots]
        tol = mp.mpf(10) ** (-(precision // 2))
        scale = max(abs(v) for v in vals)
        for v in vals:
            img = g4.g.eval_numeric(v, precision + 10)
            if min(abs(img - w) for w in vals) > tol * scale:
                raise ComputationalError(
                    "bundled Galois polynomial does not permute the roots of "
                    "its modulus: transcription is corrupt")


def load_table1() -> dict:
    f = data_dir().joinpath("table1.json")
    return {int(k): v for k, v in json.loads(f.read_text()).items()}


# ---------------------------------------------------------------------------
# reports


def _report_payload(run) -> dict:
    checks = {}
    for name, rep in run.checks.items():
        if hasattr(rep, "passed"):
            entry = {"passed": bool(rep.passed)}
            for attr in ("max_deviation", "pairs_checked", "exact_zero_count",
                         "tolerance", "precision", "subset", "mode"):
                v = getattr(rep, attr, None)
                if v is not None:
                    entry[attr] = mp.nstr(v, 6) if isinstance(v, mp.mpf) else v
        elif isinstance(rep, dict):
            entry = {k: (mp.nstr(v, 6) if isinstance(v, mp.mpf) else
                         bool(v) if isinstance(v, bool) else v)
                     for k, v in rep.items()}
        else:
            entry = {"passed": True}
        checks[name] = entry
    return {
        "format": "sicfid-report-v1",
        "d": run.info.d,
        "D": run.info.D,
        "ell": run.info.ell,
        "h": run.info.h,
        "m": run.info.m,
        "source": run.source,
        "precision": run.config.precision,
        "verdict": run.verdict,
        "theta_set": run.theta_set,
        "sign": run.sign,
        "stages": [{
            "name": s.name, "input_hash": s.input_hash,
            "precision_in": s.precision_in, "precision_out": s.precision_out,
            "guard": s.guard, "residual": s.residual, "status": s.status,
            "note": s.note,
        } for s in run.stages],
        "checks": checks,
    }


def emit_report(run, format: str = "human") -> str:
    """Deterministic run report; machine format is canonical JSON."""
    payload = _report_payload(run)
    if format == "machine":
        return json.dumps(payload, indent=1, sort_keys=True) + "\n"
    lines = [
        f"dimension d = {payload['d']} (D = {payload['D']}, ell = {payload['ell']}, "
        f"h = {payload['h']}, m = {payload['m']})",
        f"source: {payload['source']}   precision: {payload['precision']} digits",
        f"theta candidates: {payload['theta_set']}   sign: "
        f"{payload['sign']:+d}" if payload['sign'] is not None else "theta: (none)",
        "stages:",
    ]
    for s in payload["stages"]:
        extra = f"  [{s['note']}]" if s["note"] else ""
        resid = f"  residual={s['residual']}" if s["residual"] else ""
        lines.append(f"  {s['name']:<24} prec {s['precision_in']}->"
                     f"{s['precision_out']} (guard {s['guard']}){resid}{extra}")
    lines.append("checks:")
    for name, entry in payload["checks"].items():
        status = "PASS" if entry.get("passed") else "FAIL"
        detail = ", ".join(f"{k}={v}" for k, v in entry.items() if k != "passed")
        lines.append(f"  {name:<20} {status}   {detail}")
    exact = payload["checks"].get("sic-exact")
    if exact:
        lines.append(f"exact verification: {'PASS' if exact.get('passed') else 'FAIL'}")
    verdict = payload["verdict"]
    lines.append(f"verdict: {'CONJECTURE-FAIL' if verdict == 'conjecture-fail' else verdict.upper()}")
    return "\n".join(lines) + "\n"


def write_report(run, path, format: str = "machine"):
    with open(path, "w") as fh:
        fh.write(emit_report(run, format))
