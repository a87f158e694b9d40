"""Annular bilinear form B(u, v) = int <grad Delta_0 u, grad Delta_0 v> and the energy ledger.

Gram matrices are stored as antiderivatives in r: each entry is a list of
terms (c, k, l) meaning c r^k (ln r)^l, and B on (tau, sigma) is the
bracket [.]_tau^sigma times the family constant times Vol(S^3).
"""
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .geometry import QuadratureError, QuadSpec, annulus, domain_rule
from .harmonics import VOL_S3
from .jets import Jet
from .triharmonic import FAMILIES, member_jet, solve_interpolant, w_jet, working_dps

FAMILY_CONSTANT = {"E": 16, "F": 16, "G": 128, "H": 48}


def _t(*terms):
    return tuple(terms)


Z = ()
_PRINTED = {
    "E": [[Z] * 6, [Z] * 6,
          [Z, Z, _t((-0.5, -2, 0)), Z, _t((-2, 0, 1)), _t((-6, 2, 0))],
          [Z] * 6,
          [Z, Z, _t((-2, 0, 1)), Z, _t((2, 2, 0)), _t((6, 4, 0))],
          [Z, Z, _t((-6, 2, 0)), Z, _t((6, 4, 0)), _t((24, 6, 0))]],
    "F": [[Z] * 6,
          [Z, _t((-3, -4, 0)), Z, _t((3, -2, 0)), Z, _t((24, 2, 0))],
          [Z] * 6,
          [Z, _t((3, -2, 0)), Z, _t((4, 0, 1)), _t((3, 2, 0)), Z],
          [Z, Z, Z, _t((3, 2, 0)), _t((9, 4, 0)), _t((24, 6, 0))],
          [Z, _t((24, 2, 0)), Z, Z, _t((24, 6, 0)), _t((96, 8, 0))]],
    "G": [[Z] * 6,
          [Z, _t((-2, -6, 0)), _t((-2, -4, 0)), Z, Z, _t((10, 2, 0))],
          [Z, _t((-2, -4, 0)), _t((-3, -2, 0)), Z, _t((-2, 2, 0)), Z],
          [Z] * 6,
          [Z, Z, _t((-2, 2, 0)), Z, _t((4, 6, 0)), _t((10, 8, 0))],
          [Z, _t((10, 2, 0)), Z, Z, _t((10, 8, 0)), _t((30, 10, 0))]],
    "H": [[Z] * 6,
          [Z, _t((-15, -8, 0)), _t((-20, -6, 0)), Z, Z, _t((60, 2, 0))],
          [Z, _t((-20, -6, 0)), _t((-32, -4, 0)), Z, _t((-20, 2, 0)), Z],
          [Z] * 6,
          [Z, Z, _t((-20, 2, 0)), Z, _t((25, 8, 0)), _t((60, 10, 0))],
          [Z, _t((60, 2, 0)), Z, Z, _t((60, 10, 0)), _t((240, 12, 0))]],
}


def gram_table(family, variant="corrected"):
    """Antiderivative table for a family.

    ``printed``: as displayed; ``corrected``: H(6,6) bracket 160 r^12 in place
    of 240 r^12; ``raw``: corrected plus the constant boundary terms that the
    displayed F matrix drops (they cancel in every bracket).
    """
    tab = [list(row) for row in _PRINTED[family]]
    if variant in ("corrected", "raw") and family == "H":
        tab[5][5] = _t((160, 12, 0))
    if variant == "raw" and family == "F":
        tab[1][4] = _t((-3, 0, 0))
        tab[4][1] = _t((9, 0, 0))
    elif variant not in ("printed", "corrected", "raw"):
        raise ValueError("unknown Gram variant")
    return tab


class NonIntegrable(ValueError):
    pass


def _value(terms, r):
    """Antiderivative at r; r may be 0 or inf, in which case the limit is taken (or None if divergent)."""
    if r == mp.inf:
        if any(k > 0 or (k == 0 and l > 0) for c, k, l in terms if c):
            return None
        return mp.mpf(sum(c for c, k, l in terms if k == 0 and l == 0))
    if r == 0:
        if any(k < 0 or (k == 0 and l > 0) for c, k, l in terms if c):
            return None
        return mp.mpf(sum(c for c, k, l in terms if k == 0 and l == 0))
    r = mp.mpf(r)
    return sum((mp.mpf(c) * r**k * mp.log(r) ** l for c, k, l in terms), mp.mpf(0))


def gram_entry(family, i, j, sigma, tau, variant="corrected"):
    """Exact B(member_i Y, member_j Y) on tau < r < sigma for a unit harmonic (mpf)."""
    terms = gram_table(family, variant)[i][j]
    hi, lo = _value(terms, _endpoint(sigma)), _value(terms, _endpoint(tau))
    if hi is None or lo is None:
        raise NonIntegrable("non-integrable pairing")
    return FAMILY_CONSTANT[family] * 2 * mp.pi**2 * (hi - lo)


def _endpoint(x):
    if isinstance(x, str) or x == np.inf or x == mp.inf:
        return mp.inf
    return mp.mpf(x)


@dataclass
class GramMatrix:
    tag: str
    sigma: float
    tau: float
    M: np.ndarray  # float, NaN where divergent
    finite: np.ndarray
    exact: object = None

    def quadratic(self, c):
        return float(c @ self.M @ c)


def gram_matrix(family, sigma, tau, variant="corrected", strict=False, dps=30):
    """All 36 entries; divergent ones are NaN (or an error with ``strict``)."""
    if not 0 <= tau < (np.inf if sigma in ("inf", np.inf) else sigma):
        raise ValueError("need 0 <= tau < sigma")
    with mp.workdps(dps):
        ex = mp.matrix(6, 6)
        finite = np.ones((6, 6), dtype=bool)
        for i in range(6):
            for j in range(6):
                try:
                    ex[i, j] = gram_entry(family, i, j, sigma, tau, variant)
                except NonIntegrable:
                    if strict:
                        raise
                    finite[i, j] = False
                    ex[i, j] = mp.nan
        M = np.array([[float(ex[i, j]) for j in range(6)] for i in range(6)])
    return GramMatrix(family, float(sigma) if sigma != "inf" else np.inf, float(tau), M, finite, ex)


# quadrature route ---------------------------------------------------------------

def grad_laplacian(field, z):
    """Flat grad Delta_0 of a scalar field given as a jet map; returns (..., N, 4)."""
    j = field(Jet.variables(z, 3))
    T = j.tensor(3)
    return np.einsum("...aac->...c", T)


def bilinear_quadrature(u, v, sigma, tau, quad=QuadSpec(40, 10), tol=1e-9):
    """4D quadrature of <grad Delta_0 u, grad Delta_0 v> over tau < |z| < sigma.

    ``u`` and ``v`` map coordinate jets (4, N) to scalar jets (N,).  The
    result is compared with a coarser rule and an error is raised if they
    disagree beyond ``tol`` (relative).
    """
    def run(q):
        pts, wts = domain_rule(annulus(tau, sigma), q)
        gu = grad_laplacian(u, pts)
        gv = gu if v is u else grad_laplacian(v, pts)
        return float(np.sum(wts * np.einsum("...c,...c->...", gu, gv)))

    fine = run(quad)
    if tol is not None:
        coarse = run(QuadSpec(max(quad.radial - 8, 4), quad.angular, quad.chunk))
        if abs(fine - coarse) > tol * max(abs(fine), 1e-300) and abs(fine - coarse) > 1e-13:
            raise QuadratureError(coarse, fine)
    return fine


def member_field(family, index, harmonic=0):
    return lambda zj: member_jet(family, index, zj, harmonic)


def gram_by_quadrature(family, sigma, tau, quad=QuadSpec(40, 10), harmonic=0):
    """Full 6x6 Gram matrix by quadrature (one harmonic, shared nodes)."""
    pts, wts = domain_rule(annulus(tau, sigma), quad)
    G = np.stack([grad_laplacian(member_field(family, l, harmonic), pts) for l in range(6)])
    return np.einsum("n,ina,jna->ij", wts, G, G)


def gram_discrepancy(closed, quad):
    """Largest entrywise gap over finite entries, relative to max(|M_ij|, sqrt|M_ii M_jj|).

    Members with grad Delta_0 = 0 give identically zero rows; there the gap
    is measured against the largest entry of the matrix instead.
    """
    M, F = closed.M, closed.finite
    d = np.sqrt(np.abs(np.where(F, M, 0).diagonal()))
    scale = np.maximum(np.abs(np.where(F, M, 0)), np.outer(d, d))
    scale = np.where(scale > 0, scale, np.abs(M[F]).max())
    return float((np.abs(quad - np.where(F, M, 0)) / scale)[F].max())


# energy ledger -----------------------------------------------------------------

def _V():
    return 2 * mp.pi**2


def _sq(x):
    return float(np.sum(np.asarray(x, dtype=float) ** 2))


def energy_savings(coeffs, alpha, beta, gamma, variant="corrected"):
    """(end, disk): B over |z| > gamma of the end data and over the unit ball of the disk data.

    Both are assembled from single Gram entries: the end data is
    alpha/2 p.Y (profile r^0), alpha^2/6 r^-1 (q1.X + q3.W); the disk data is
    beta/2 r^2 (r0 + r.Y) + beta^2/6 r^3 (s1.X + s3.W).
    """
    with mp.workdps(30):
        a, b = mp.mpf(alpha), mp.mpf(beta)
        end = (gram_entry("G", 2, 2, "inf", gamma, variant) * (a / 2) ** 2 * _sq(coeffs.p)
               + gram_entry("F", 1, 1, "inf", gamma, variant) * (a**2 / 6) ** 2 * _sq(coeffs.q1)
               + gram_entry("H", 2, 2, "inf", gamma, variant) * (a**2 / 6) ** 2 * _sq(coeffs.q3))
        disk = (gram_entry("E", 3, 3, 1, 0, variant) * (b / 2) ** 2 * _sq(coeffs.r0)
                + gram_entry("G", 3, 3, 1, 0, variant) * (b / 2) ** 2 * _sq(coeffs.r)
                + gram_entry("F", 4, 4, 1, 0, variant) * (b**2 / 6) ** 2 * _sq(coeffs.s1)
                + gram_entry("H", 3, 3, 1, 0, variant) * (b**2 / 6) ** 2 * _sq(coeffs.s3))
    return end, disk


def savings_formula(coeffs, alpha, beta, gamma):
    """The closed savings expressions in terms of harmonic coefficients."""
    V = 2 * np.pi**2
    end = alpha**2 / gamma**2 * V * (96 * _sq(coeffs.p) + 4 * alpha**2 / (3 * gamma**2) * _sq(coeffs.q1)
                                     + 128 * alpha**2 / (3 * gamma**2) * _sq(coeffs.q3))
    disk = 4 * V * beta**4 * _sq(coeffs.s1)
    return end, disk


def block_energy(interp, sigma=1.0, tau=None, variant="corrected", exact=True, by_block=False):
    """sum over harmonic blocks of c^T Gram c, in extended precision when available."""
    tau = interp.gamma if tau is None else tau
    out = {}
    with mp.workdps(working_dps(interp.gamma) if exact else 30):
        blocks = interp.blocks(exact=exact)
        for tag, blk in blocks.items():
            G = gram_matrix(tag, sigma, tau, variant, strict=True, dps=mp.mp.dps).exact
            tot = mp.mpf(0)
            for h in range(blk.shape[0]):
                for k in range(blk.shape[2]):
                    c = [mp.mpf(blk[h, l, k]) for l in range(6)]
                    tot += sum(c[i] * G[i, j] * c[j] for i in range(6) for j in range(6))
            out[tag] = tot
        total = sum(out.values(), mp.mpf(0))
    return (total, out) if by_block else total


def interpolation_energy(interp, variant="corrected", exact=True):
    """B over gamma < |z| < 1 of the interpolant w."""
    return block_energy(interp, 1.0, interp.gamma, variant, exact)


def interpolation_energy_quadrature(interp, quad=QuadSpec(40, 10), tol=1e-9):
    total = 0.0
    for k in range(interp.m):
        f = lambda zj, k=k: w_jet(interp, zj)[k]
        total += bilinear_quadrature(f, f, 1.0, interp.gamma, quad, tol)
    return total


def collar_energies(interp, alpha, variant="corrected"):
    """Energies of w on gamma - sqrt(alpha) < |z| < gamma and 1 < |z| < 1 + sqrt(alpha)."""
    s = float(np.sqrt(alpha))
    inner = block_energy(interp, interp.gamma, interp.gamma - s, variant)
    outer = block_energy(interp, 1 + s, 1.0, variant)
    return dict(inner=inner, outer=outer, predicted_order=alpha**2.5 / interp.gamma**3)


def lemma_terms(coeffs, gamma, alpha, beta):
    """Individual leading terms of the interpolation energy, keyed by name (floats)."""
    V = 2 * np.pi**2
    g, a, b = gamma, alpha, beta
    L = np.log(g)
    pr = float(np.sum(coeffs.p * coeffs.r))
    qs1 = float(np.sum(coeffs.q1 * coeffs.s1))
    qs3 = float(np.sum(coeffs.q3 * coeffs.s3))
    return {
        "r0": 32 * V * b**2 * _sq(coeffs.r0) * g**2,
        "q1": 3 * V * a**4 / g**4 * _sq(coeffs.q1) * (2 / 3 - 3 / (2 * L**2)) ** 2,
        "s1": 4 * V * b**4 * _sq(coeffs.s1),
        "q1s1": 8 / 3 * V * a**2 * b**2 * qs1,
        "p": 96 * V * a**2 * (g**-2 + 3) * _sq(coeffs.p),
        "pr": -192 * V * a * b * pr,
        "q3": 128 / 3 * V * a**4 / g**4 * _sq(coeffs.q3) + 2368 / 3 * V * a**4 * _sq(coeffs.q3),
        "q3s3": -256 / 3 * V * a**2 * b**2 * qs3,
    }


@dataclass
class EnergyDifference:
    gamma: float
    t: float
    alpha: float
    beta: float
    interp: object
    end: object
    disk: object
    exact_combination: float
    leading: float
    collars: dict

    @property
    def ratio(self):
        return self.exact_combination / self.leading if self.leading else np.nan


def difference_leading(coeffs, gamma, t):
    V = 2 * np.pi**2
    return 18 * V * gamma**16 * _sq(coeffs.p) - 12 * t * V * gamma**16 * float(np.sum(coeffs.p * coeffs.r))


def energy_difference(coeffs, gamma, t, variant="corrected", with_collars=False):
    """(interp - end - disk) / 16 with alpha = gamma^8 and beta = t alpha, against its gamma^16 leading term."""
    alpha = gamma**8
    beta = t * alpha
    interp = solve_interpolant(coeffs, gamma, alpha, max(beta, 0.0)) if beta >= 0 else None
    if interp is None:
        raise ValueError("t must be non-negative")
    with mp.workdps(working_dps(gamma)):
        E_w = interpolation_energy(interp, variant)
        end, disk = energy_savings(coeffs, alpha, beta, gamma, variant)
        exact = float((E_w - end - disk) / 16)
    collars = collar_energies(interp, alpha, variant) if with_collars else {}
    return EnergyDifference(gamma, t, alpha, beta, interp, end, disk, exact,
                            difference_leading(coeffs, gamma, t), collars)
