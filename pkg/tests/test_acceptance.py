"""One test per acceptance criterion; each records a PASS/FAIL line for the summary."""

import io
import json
import math
import random
import time
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction
from math import comb

import numpy as np

from l2h import cli
from l2h.complexes import fox_identity_holds, laplacian, presentation_complex
from l2h.construction import is_cycle
from l2h.groups import free_group
from l2h.grouprings import GroupRingElement, GroupRingMatrix, mat_mul
from l2h.hopf import hopf_check
from l2h.quotients import ExplicitModule, diagonal_cyclic, luck_estimate, regular_quotient
from l2h.spectral import (
    CERTIFIED,
    ZERO_EVIDENCE,
    Budget,
    certify_gap,
    finite_model_equivalence_test,
    radial_power,
    radial_profile,
)
from l2h.truncation import truncation_extremes

from conftest import CORPUS, from_text, load, record_criterion
from test_hopf import _unimodular


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_criterion_01_fox_soundness():
    start = time.perf_counter()
    ok = True
    for name in CORPUS:
        P, g = load(name)
        C = presentation_complex(P, g)
        ok &= all(fox_identity_holds(r, g, P.ngens) for r in P.relators)
        if C.dimension >= 2:
            ok &= mat_mul(C.boundaries[1], C.boundaries[2]).is_zero()
    elapsed = time.perf_counter() - start
    record_criterion(1, ok and elapsed < 1, f"Fox identity and b1 b2 = 0 on corpus, {elapsed:.2f}s")
    assert ok and elapsed < 1


def test_criterion_02_circle_traces():
    Z = free_group(1)
    t = GroupRingElement.word(Z, (1,))
    D = 2 - t - t.star()
    P = GroupRingElement.one(Z)
    D2 = D * D
    got, ref, conv = [], [], []
    poly = np.array([1], dtype=object)
    for n in range(1, 6):
        P = P * D2
        got.append(P.coefficient_at())
        ref.append(comb(4 * n, 2 * n))
        # second route: dense polynomial convolution of the Laurent coefficients
        poly = np.convolve(np.convolve(poly, np.array([-1, 2, -1], dtype=object)), np.array([-1, 2, -1], dtype=object))
        conv.append(int(poly[len(poly) // 2]))
    ok = got == ref == conv == [6, 70, 924, 12870, 184756]
    record_criterion(2, ok, f"coefficients {got}")
    assert ok


def test_criterion_03_tree_walks():
    F = free_group(2)
    A = sum((GroupRingElement.word(F, (x,)) for x in F.alphabet()), GroupRingElement.zero(F))
    P = GroupRingElement.one(F)
    ok = True
    for n in range(1, 13):
        P = P * A
        ok &= radial_profile(P) == radial_power(F, n)
    ok &= radial_power(F, 2)[0] == 4 and radial_power(F, 4)[0] == 28
    record_criterion(3, ok, "radial and convolution powers agree through n = 12")
    assert ok


def test_criterion_04_free_group_gap():
    start = time.perf_counter()
    code, out, _ = run_cli("certify", "examples/f2.grp", "--degrees", "0", "--method", "rd")
    elapsed = time.perf_counter() - start
    cert = json.loads(out)["certificates"][0]
    gap = Fraction(int(cert["gap_lower"]["num"]), int(cert["gap_lower"]["den"]))
    ok = code == 0 and cert["status"] == CERTIFIED and Fraction(1, 5) <= gap <= 4 - 2 * math.sqrt(3) and elapsed < 60
    record_criterion(4, ok, f"gap_lower = {float(gap):.6f}, {elapsed:.1f}s")
    assert ok


def test_criterion_05_triple_product_gap():
    P, g = load("f2cubed")
    C = presentation_complex(P, g)
    start = time.perf_counter()
    cert = certify_gap(laplacian(C, 0), "subadditive", Budget(), degree=0)
    elapsed = time.perf_counter() - start
    gap = cert.gap_lower
    ok = cert.status == CERTIFIED and Fraction(1, 2) <= gap <= 12 - 6 * math.sqrt(3) and elapsed < 300
    record_criterion(5, ok, f"gap_lower = {float(gap or 0):.6f}, {elapsed:.1f}s")
    assert ok


def test_criterion_06_integers_zero_evidence():
    Z = free_group(1)
    t = GroupRingElement.word(Z, (1,))
    D = GroupRingMatrix(Z, 1, 1, {(0, 0): 2 - t - t.star()})
    tr = truncation_extremes(D, 300)
    exact = 2 - 2 * math.cos(math.pi / 602)
    cert = certify_gap(D, "auto", Budget(), degree=0)
    ok = abs(float(tr.lambda_min_upper) - exact) < 1e-4 and cert.status == ZERO_EVIDENCE and cert.R == 300
    record_criterion(6, ok, f"lambda_min {float(tr.lambda_min_upper):.6e} vs {exact:.6e}")
    assert ok


def test_criterion_07_luck_estimates():
    P, g = load("f2")
    C = presentation_complex(P, g)
    orders = [2, 4, 8, 16, 32, 64]
    e0 = [luck_estimate(C, diagonal_cyclic(g, N), 0) for N in orders]
    e1 = [luck_estimate(C, diagonal_cyclic(g, N), 1) for N in orders]
    exact = e0 == [Fraction(1, N) for N in orders] and e1 == [Fraction(N + 1, N) for N in orders]
    trend = all(b < a for a, b in zip(e0, e0[1:])) and all(abs(b - 1) < abs(a - 1) for a, b in zip(e1, e1[1:]))
    record_criterion(7, exact and trend, "estimates (1/N, (N+1)/N) for N = 2..64")
    assert exact and trend


def test_criterion_08_hopf():
    P, g = load("rp2")
    rep = hopf_check(P, g, regular_quotient(g), kind="regular")
    ok = (rep["dim_image"], rep["dim_H2_G"], rep["dim_H2_Z"]) == (1, 0, 1) and rep["holds"]
    Pf, gf = from_text('group "x" { generators a, b; relators [a,b][b,a]; }')
    for trial in range(10):
        rng = random.Random(100 + trial)
        d = rng.randint(1, 4)
        mats, invs = {}, {}
        for x in gf.gens:
            mats[x], invs[x] = _unimodular(rng, d)
        V = ExplicitModule(gf, mats, invs)
        r = hopf_check(Pf, gf, V)
        ok &= r["holds"] and r["dim_H2_G"] == 0 and r["dim_image"] == r["dim_H2_Z"]
    record_criterion(8, ok, "projective plane (1, 0, 1); surjectivity on 10 random modules")
    assert ok


def test_criterion_09_finite_model():
    ok, failures = finite_model_equivalence_test(seed=0, trials=500)
    record_criterion(9, ok, f"500 trials, {len(failures)} failures")
    assert ok


def test_criterion_10_construction(f2cubed_record):
    rec = f2cubed_record
    X = rec.complex
    v = rec.verification
    a = v["certificates"][0]["status"] == CERTIFIED
    table = v["quotient_table"]
    b = len(table) >= 3
    for k in (1, 2, 3):
        vals = [Fraction(int(r["normalized"][k]["num"]), int(r["normalized"][k]["den"])) for r in table]
        b &= all(x <= Fraction(1, 5) for x in vals)
        b &= all(y <= x for x, y in zip(vals, vals[1:]))
    c = mat_mul(X.boundaries[2], X.boundaries[3]).is_zero() and v["low_degrees_unchanged"]
    c &= all(is_cycle(X, z.entries) for z in rec.cycles)
    fast = rec.elapsed < 1800
    ok = a and b and c and fast
    orders = [r["order"] for r in table]
    record_criterion(10, ok, f"ranks {X.ranks}, quotients {orders}, (a,b,c)=({a},{b},{c}), {rec.elapsed:.0f}s")
    assert ok


def test_criterion_11_negative_controls():
    code_z, out_z, err_z = run_cli("construct", "examples/circle.grp")
    code_f, out_f, err_f = run_cli("construct", "examples/f2.grp")
    hz = json.loads(out_z)["hypothesis"]
    hf = json.loads(out_f)["hypothesis"]
    ok = code_z == 3 and code_f == 3 and hz["failing_degree"] == 0 and hf["failing_degree"] == 1
    ok &= "degree 0" in err_z and "degree 1" in err_f
    record_criterion(11, ok, f"exit codes {code_z}, {code_f}; failing degrees {hz['failing_degree']}, {hf['failing_degree']}")
    assert ok


def test_criterion_12_determinism(f2cubed_record):
    ok = True
    for name in CORPUS:
        for cmd in (["parse"], ["complex"], ["betti", "--quotients", "3"], ["hopf"], ["certify", "--degrees", "0"]):
            first = run_cli(cmd[0], f"examples/{name}.grp", *cmd[1:])
            second = run_cli(cmd[0], f"examples/{name}.grp", *cmd[1:])
            ok &= first[1] == second[1]
    code, out, _ = run_cli("construct", "examples/f2cubed.grp")
    rec = json.loads(out)["record"]
    ok &= code == 0
    ok &= json.dumps(rec, sort_keys=True) == json.dumps(json.loads(json.dumps(f2cubed_record.to_json())), sort_keys=True)
    record_criterion(12, ok, "byte-identical reruns for every corpus command")
    assert ok
