import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from willmore4.bilinear import (FAMILY_CONSTANT, NonIntegrable, bilinear_quadrature, energy_difference,
                                energy_savings, gram_by_quadrature, gram_discrepancy, gram_entry, gram_matrix,
                                gram_table, interpolation_energy, interpolation_energy_quadrature,
                                member_field, savings_formula)
from willmore4.geometry import QuadSpec
from willmore4.harmonics import FormCoefficients, form_coefficients
from willmore4.triharmonic import solve_interpolant

from conftest import sym, sym3

V = 2 * math.pi**2


def random_coeffs(seed, m=1, scale=1.0):
    rng = np.random.default_rng(seed)
    return form_coefficients(*(scale * x for x in (sym(rng, (4, 4, m)), sym3(rng, m), sym(rng, (4, 4, m)), sym3(rng, m))))


def test_gram_examples():
    assert math.isclose(float(gram_entry("G", 1, 1, 1.0, 0.5)), 32256 * math.pi**2, rel_tol=1e-14)
    for g in (0.1, 0.37):
        assert math.isclose(float(gram_entry("G", 2, 2, "inf", g)), 384 * V / g**2, rel_tol=1e-14)
    M = gram_matrix("E", 1.0, 0.5).M
    assert not M[:2].any() and not M[:, :2].any()
    assert FAMILY_CONSTANT == {"E": 16, "F": 16, "G": 128, "H": 48}


def test_non_integrable():
    with pytest.raises(NonIntegrable, match="non-integrable pairing"):
        gram_entry("E", 2, 2, 1.0, 0.0)
    with pytest.raises(NonIntegrable):
        gram_entry("G", 5, 5, "inf", 0.5)
    G = gram_matrix("H", "inf", 0.2)
    assert np.isnan(G.M[5, 5]) and not G.finite[5, 5] and G.finite[1, 1]
    with pytest.raises(NonIntegrable):
        gram_matrix("H", "inf", 0.2, strict=True)
    with pytest.raises(ValueError):
        gram_matrix("E", 0.5, 0.7)


@pytest.mark.parametrize("variant", ["printed", "corrected"])
@pytest.mark.parametrize("tag", "EFGH")
def test_tables_symmetric(tag, variant):
    tab = gram_table(tag, variant)
    assert all(tab[i][j] == tab[j][i] for i in range(6) for j in range(6))


def test_h66_correction():
    assert gram_table("H", "printed")[5][5] == ((240, 12, 0),)
    assert gram_table("H")[5][5] == ((160, 12, 0),)
    with pytest.raises(ValueError):
        gram_table("E", "other")


@pytest.mark.parametrize("tag,i", [("E", 5), ("F", 1), ("G", 4), ("H", 2), ("E", 4), ("G", 1)])
def test_single_entries_by_quadrature(tag, i):
    f = member_field(tag, i)
    q = bilinear_quadrature(f, f, 1.0, 0.4, QuadSpec(40, 10))
    assert math.isclose(q, float(gram_entry(tag, i, i, 1.0, 0.4)), rel_tol=1e-9)


def test_constant_and_harmonic_fields_have_zero_energy():
    const = lambda zj: zj[0] * 0 + 1.0
    lin = lambda zj: zj[0] * zj[0] - zj[1] * zj[1]
    assert abs(bilinear_quadrature(const, const, 1.0, 0.3)) < 1e-20
    assert abs(bilinear_quadrature(lin, lin, 1.0, 0.3)) < 1e-20


def test_cross_pairing_vanishes():
    # distinct harmonics and distinct families are orthogonal under B
    fields = [member_field("E", 5), member_field("F", 4, 0), member_field("F", 4, 2),
              member_field("G", 5, 3), member_field("H", 3, 7)]
    for a in range(len(fields)):
        for b in range(a + 1, len(fields)):
            assert abs(bilinear_quadrature(fields[a], fields[b], 1.0, 0.3, QuadSpec(12, 10), tol=None)) < 1e-9


@pytest.mark.parametrize("tag", "EFGH")
def test_corrected_matrices_against_quadrature(tag):
    G = gram_matrix(tag, 1.0, 0.5)
    assert gram_discrepancy(G, gram_by_quadrature(tag, 1.0, 0.5, QuadSpec(24, 10))) < 1e-9


def test_printed_h_matrix_fails_quadrature():
    G = gram_matrix("H", 1.0, 0.5, "printed")
    assert gram_discrepancy(G, gram_by_quadrature("H", 1.0, 0.5, QuadSpec(24, 10))) > 0.1


def test_raw_and_printed_f_agree_on_brackets():
    for s, t in ((1.0, 0.3), (2.0, 0.5), ("inf", 0.7)):
        a = gram_matrix("F", s, t, "raw").M
        b = gram_matrix("F", s, t, "printed").M
        ok = np.isfinite(b)
        assert np.allclose(a[ok], b[ok], rtol=1e-14, atol=1e-10)


def test_savings_examples():
    c = FormCoefficients.zeros(1)
    a, b, g = 1e-3, 2e-3, 0.1
    p = np.zeros((9, 1)); p[0] = 1
    end, disk = energy_savings(c.replace(p=p), a, b, g)
    assert math.isclose(float(end), 96 * V * a**2 / g**2, rel_tol=1e-13) and disk == 0
    s1 = np.zeros((4, 1)); s1[2] = 1
    end, disk = energy_savings(c.replace(s1=s1), a, b, g)
    assert end == 0 and math.isclose(float(disk), 4 * V * b**4, rel_tol=1e-13)
    end, disk = energy_savings(c, a, b, g)
    assert end == 0 and disk == 0


@given(st.integers(0, 10_000), st.floats(0.05, 0.5))
def test_savings_formula_matches_gram_route(seed, g):
    c = random_coeffs(seed, m=2)
    a, b = g**2, 2 * g**2
    e1, d1 = energy_savings(c, a, b, g)
    e2, d2 = savings_formula(c, a, b, g)
    assert math.isclose(float(e1), e2, rel_tol=1e-12)
    # r0 and r pieces of the disk are harmonic up to a constant Laplacian: no energy
    assert math.isclose(float(d1), d2, rel_tol=1e-12, abs_tol=1e-300)


def test_interpolation_energy_against_quadrature():
    c = random_coeffs(3)
    it = solve_interpolant(c, 0.4, 0.05, 0.08)
    exact = float(interpolation_energy(it))
    quad = interpolation_energy_quadrature(it, QuadSpec(40, 12), tol=None)
    assert math.isclose(exact, quad, rel_tol=1e-7)


def test_energy_difference_examples():
    c = FormCoefficients.zeros(1)
    p = np.zeros((9, 1)); p[4] = 1.0
    d = energy_difference(c.replace(p=p), 0.05, 2.0)
    assert d.alpha == 0.05**8 and d.beta == 2 * 0.05**8
    assert math.isclose(d.leading, 18 * V * 0.05**16, rel_tol=1e-14)
    assert 0.8 < d.ratio < 1.2
    d = energy_difference(c, 0.1, 1.0)
    assert d.leading == 0 and abs(d.exact_combination) == 0 and np.isnan(d.ratio)
    with pytest.raises(ValueError):
        energy_difference(c, 0.1, -1.0)


def test_ratio_converges_on_grid():
    c = random_coeffs(7)
    pr = float(np.sum(c.p * c.r))
    t = 3 * float(np.sum(c.p**2)) / pr if pr > 0 else 0.0
    devs = [abs(energy_difference(c, g, t).ratio - 1) for g in (0.2, 0.1, 0.05)]
    assert devs[0] > devs[1] > devs[2]


def test_collar_energy_order():
    c = random_coeffs(2)
    ratios = []
    for g in (0.1, 0.05, 0.025):
        col = energy_difference(c, g, 1.0, with_collars=True).collars
        assert float(col["inner"]) >= 0 and float(col["outer"]) >= 0
        ratios.append(float(col["inner"] + col["outer"]) / col["predicted_order"])
    assert max(ratios) / min(ratios) < 1.1


def test_q1_and_q1s1_leading_terms_from_exact_energy():
    # exact q1 block is (4/3) V alpha^4 gamma^-4 without log corrections; q1.s1 cross term is (32/3) V alpha^2 beta^2
    z = FormCoefficients.zeros(1)
    u4 = np.eye(4)[:, :1]
    E = lambda c, g: float(interpolation_energy(solve_interpolant(c, g, 1.0, 1.0)))
    devs_q, devs_x = [], []
    for g in (0.1, 0.05, 0.02):
        q, s, both = E(z.replace(q1=u4), g), E(z.replace(s1=u4), g), E(z.replace(q1=u4, s1=u4), g)
        devs_q.append(abs(q / (4 / 3 * V * g**-4) - 1))
        devs_x.append(abs((both - q - s) / (32 / 3 * V) - 1))
    assert devs_q[-1] < 1e-5 and devs_x[-1] < 1e-3
    assert devs_q == sorted(devs_q, reverse=True) and devs_x == sorted(devs_x, reverse=True)
