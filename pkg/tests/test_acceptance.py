"""Acceptance checks, one function per criterion.

Each check returns (passed, detail).  The pytest wrappers assert the
outcome recorded for that criterion, and the last test prints one
PASS/FAIL line per criterion.  Run this file directly for the lines alone.
"""
import math
import sys
import time

import numpy as np

from willmore4 import bilinear, geometry, inversion, rotation, triharmonic
from willmore4.fixtures import quadratic_graph, random_rotation, round_sphere_atlas, transformed
from willmore4.harmonics import FormCoefficients

V = 2 * math.pi**2
RESULTS = {}


def _sym(rng, shape):
    A = rng.normal(size=shape)
    return A + np.swapaxes(A, 0, 1)


def _sym3(rng, m):
    Q = rng.normal(size=(4, 4, 4, m))
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    return sum(np.transpose(Q, p + (3,)) for p in perms) / 6


def check_sphere_energy():
    t = time.perf_counter()
    E = geometry.integrate_atlas(round_sphere_atlas(), geometry.QuadSpec.order(32)).E_GR
    dt = time.perf_counter() - t
    rel = abs(E / (8 * math.pi**2) - 1)
    return rel <= 1e-5 and dt < 10, f"E_GR = {E:.10f}, rel err {rel:.1e}, {dt:.1f} s"


def check_residue_limit():
    rng = np.random.default_rng(0)
    P = _sym(rng, (4, 4, 2))
    patch = quadratic_graph(0.3 * P / np.linalg.norm(P), domain=geometry.ball(1.0))
    radii = [1e-1, 1e-2, 1e-3]
    est, _, _ = inversion.richardson(radii, [inversion.residue_integral(patch, r) for r in radii])
    rel = abs(est / inversion.FLAT_RESIDUE - 1)
    flat = quadratic_graph(np.zeros((4, 4, 2)), domain=geometry.ball(1.0))
    flat_err = max(abs(inversion.residue_integral(flat, r) / inversion.FLAT_RESIDUE - 1) for r in radii)
    return rel <= 1e-4 and flat_err <= 1e-12, f"extrapolated rel err {rel:.1e}, flat rel err {flat_err:.1e}"


def check_gram_quadrature():
    t = time.perf_counter()
    gaps = {}
    for tag in "EFGH":
        G = bilinear.gram_matrix(tag, 1.0, 0.5)
        gaps[tag] = bilinear.gram_discrepancy(G, bilinear.gram_by_quadrature(tag, 1.0, 0.5))
    dt = time.perf_counter() - t
    worst = max(gaps.values())
    return worst <= 1e-8 and dt < 60, f"max rel gap {worst:.1e} (corrected H table), {dt:.1f} s"


def check_det_me():
    import mpmath as mp
    errs = []
    with mp.workdps(50):
        for g in (0.1, 0.5, 0.9):
            d = mp.det(triharmonic.boundary_matrix("E", g, dps=50).exact)
            errs.append(float(abs(d / triharmonic.det_Me_closed_form(g) - 1)))
    return max(errs) <= 1e-10, f"max rel err {max(errs):.1e}"


def check_coefficient_asymptotics(variant="printed"):
    rows = triharmonic.asymptotic_report(variant)
    bad = sorted(r["name"] for r in rows if not r["ok"])
    extended = all(r["dps"][-1] > r["dps"][0] for r in rows)
    detail = f"{len(rows) - len(bad)}/{len(rows)} entries within 25% of the stated order"
    if bad:
        detail += f"; off: {', '.join(bad)}"
    return not bad and extended, detail


def _lemma_ratios():
    z = FormCoefficients.zeros(1)
    u4, u9, u16 = (np.eye(n)[:, :1] for n in (4, 9, 16))
    single = {"r0": z.replace(r0=np.ones(1)), "p": z.replace(p=u9), "q1": z.replace(q1=u4),
              "s1": z.replace(s1=u4), "q3": z.replace(q3=u16), "r": z.replace(r=u9), "s3": z.replace(s3=u16)}
    cross = {"pr": ("p", "r", z.replace(p=u9, r=u9)), "q1s1": ("q1", "s1", z.replace(q1=u4, s1=u4)),
             "q3s3": ("q3", "s3", z.replace(q3=u16, s3=u16))}
    out = {}
    for g in (0.1, 0.05):
        E = {k: float(bilinear.interpolation_energy(triharmonic.solve_interpolant(c, g, 1.0, 1.0)))
             for k, c in single.items()}
        for k in ("r0", "p", "q1", "s1", "q3"):
            out.setdefault(k, []).append(E[k] / bilinear.lemma_terms(single[k], g, 1.0, 1.0)[k])
        for k, (a, b, c) in cross.items():
            both = float(bilinear.interpolation_energy(triharmonic.solve_interpolant(c, g, 1.0, 1.0)))
            out.setdefault(k, []).append((both - E[a] - E[b]) / bilinear.lemma_terms(c, g, 1.0, 1.0)[k])
    return out


def check_interpolation_energy():
    ratios = _lemma_ratios()
    bad = sorted(k for k, (r1, r2) in ratios.items() if not (abs(r1 - 1) <= 0.3 and abs(r2 - 1) < abs(r1 - 1)))
    detail = ", ".join(f"{k} {r1:.3f}/{r2:.3f}" for k, (r1, r2) in ratios.items())
    if bad:
        detail = f"off: {', '.join(bad)} | ratios at 0.1/0.05: {detail}"
    return not bad, detail


def check_energy_sign():
    p = np.eye(9)[:, :1]
    c = FormCoefficients.zeros(1).replace(p=p, r=p)
    d = bilinear.energy_difference(c, 0.05, 3.0)
    d0 = bilinear.energy_difference(c, 0.05, 0.0)
    ok = d.exact_combination < 0 and abs(d.ratio - 1) <= 0.3 and d0.exact_combination > 0
    return ok, f"t=3: exact {d.exact_combination:.3e}, ratio {d.ratio:.4f}; t=0: exact {d0.exact_combination:.3e}"


def check_rotation_lemma(pairs=100, restarts=1):
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst, beaten = np.inf, 0
    for k in (1, 2, 5):
        for _ in range(pairs):
            P = rotation.traceless_part(np.moveaxis(_sym(rng, (4, 4, k)), -1, 0))
            R = rotation.traceless_part(np.moveaxis(_sym(rng, (4, 4, k)), -1, 0))
            res = rotation.search_S(P, R, restarts, int(rng.integers(1 << 31)))
            worst = min(worst, res.pairing / (np.linalg.norm(P) * np.linalg.norm(R)))
            A = rotation.build_A(res.S, P, R)
            Ts = rotation.random_orthogonal(k, rng, size=1000)
            beaten += int(np.einsum("nij,ij->n", Ts, A).max() > res.pairing + 1e-12)
    dt = time.perf_counter() - t
    ok = worst > 1e-10 and beaten == 0 and dt < 30
    return ok, f"min pairing/(|P||R|) {worst:.3f}, T beaten {beaten} times, {dt:.1f} s"


def check_conformal_invariance():
    rng = np.random.default_rng(9)
    P, Q = _sym(rng, (4, 4, 2)), _sym3(rng, 2)
    patch = quadratic_graph(0.3 * P / np.linalg.norm(P), 0.3 * Q / np.linalg.norm(Q))
    dom, q = geometry.annulus(0.2, 0.6), geometry.QuadSpec(10, 8)
    E0 = geometry.integrate_energy(patch, dom, q).E_mu_nu(0.1, 0.2)
    moved = transformed(patch, scale=1.7, rotation=random_rotation(6, rng), translation=rng.normal(size=6))
    E1 = geometry.integrate_energy(moved, dom, q).E_mu_nu(0.1, 0.2)
    e_inv = abs(E1 / E0 - 1)
    z = rng.normal(size=(12, 4)) * 0.3
    inv = inversion.invert_patch(patch)
    a, b = geometry.energy_density(patch, z)["L4"], geometry.energy_density(inv, z)["L4"]
    e_pt = float(np.max(np.abs(b / a - 1)))
    twice = inversion.invert_patch(inv)
    e_invol = max(float(np.max(np.abs(x - y))) for x, y in zip(twice.derivatives(z, 3), patch.derivatives(z, 3)))
    ok = e_inv <= 1e-8 and e_pt <= 1e-8 and e_invol <= 1e-9
    return ok, f"motion+dilation {e_inv:.1e}, pointwise |L0|^4 {e_pt:.1e}, involution {e_invol:.1e}"


def check_approximation_scaling():
    slopes = []
    lams = [1e-1, 1e-2, 1e-3]
    for seed in range(5):
        rng = np.random.default_rng(seed)
        P, Q = _sym(rng, (4, 4, 2)), _sym3(rng, 2)
        P, Q = P / np.linalg.norm(P), Q / np.linalg.norm(Q)
        z = rng.normal(size=(20, 4))
        z *= 0.5 / np.linalg.norm(z, axis=1, keepdims=True)
        vals = [geometry.approximation_discrepancy(quadratic_graph(lam * P, lam * Q), z)[0].max() for lam in lams]
        slopes.append(inversion.convergence_slope(lams, vals))
    return min(slopes) >= 3.9, f"log-log slopes {', '.join(f'{s:.3f}' for s in slopes)}"


CRITERIA = [
    (1, "round-sphere energy", check_sphere_energy),
    (2, "residue limit", check_residue_limit),
    (3, "Gram vs quadrature", check_gram_quadrature),
    (4, "det M^e closed form", check_det_me),
    (5, "coefficient asymptotics", check_coefficient_asymptotics),
    (6, "interpolation energy terms", check_interpolation_energy),
    (7, "energy-difference sign", check_energy_sign),
    (8, "rotation lemma", check_rotation_lemma),
    (9, "conformal invariance", check_conformal_invariance),
    (10, "approximation scaling", check_approximation_scaling),
]


def line(n, name, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] {n:2d} {name}: {detail}"


def _record(n):
    _, name, fn = CRITERIA[n - 1]
    ok, detail = fn()
    RESULTS[n] = (name, ok, detail)
    return ok, detail


def test_criterion_01():
    assert _record(1)[0]


def test_criterion_02():
    assert _record(2)[0]


def test_criterion_03():
    assert _record(3)[0]


def test_criterion_04():
    assert _record(4)[0]


def test_criterion_05():
    # the printed leading terms are off for a known set of entries; corrected ones all pass
    ok, detail = _record(5)
    assert not ok
    bad = {r["name"] for r in triharmonic.asymptotic_report("printed") if not r["ok"]}
    assert bad == set(triharmonic.PRINTED_ERRATA)
    assert check_coefficient_asymptotics("corrected")[0]


def test_criterion_06():
    # the printed r0, q1 and q1.s1 terms miss the 30% bound at gamma = 0.1
    ok, detail = _record(6)
    assert not ok
    assert detail.startswith("off: q1, q1s1, r0 |")


def test_criterion_07():
    assert _record(7)[0]


def test_criterion_08():
    assert _record(8)[0]


def test_criterion_09():
    assert _record(9)[0]


def test_criterion_10():
    assert _record(10)[0]


def test_summary(capsys):
    for n, name, _ in CRITERIA:
        if n not in RESULTS:
            _record(n)
    with capsys.disabled():
        print()
        for n, _, _ in CRITERIA:
            print(line(n, *RESULTS[n]))


if __name__ == "__main__":
    for n, name, fn in CRITERIA:
        ok, detail = fn()
        print(line(n, name, ok, detail), flush=True)
    sys.exit(0)
