"""Sphere inversion of patches, the boundary residue and the expansion at infinity."""
from dataclasses import dataclass

import numpy as np

from .geometry import (ImmersionPatch, QuadSpec, annulus, fundamental_data,
                       integrate_energy, laplace_beltrami_jet, metric_jet)
from .harmonics import sphere_quadrature
from .jets import Jet

FLAT_RESIDUE = -16 * np.pi**2


class InversionSingularity(ValueError):
    pass


class InvertedPatch(ImmersionPatch):
    def __init__(self, base):
        self.base = base

        def func(z):
            phi = base.func(z)
            r2 = (phi * phi).sum(0)
            if np.any(r2.value == 0):
                raise InversionSingularity("inversion singularity")
            return phi * r2.reciprocal()[None]

        super().__init__(func, base.n, base.jet_order, base.domain, name=f"inv({base.name})")


def invert_patch(patch):
    return InvertedPatch(patch)


def _shell(r, angular):
    sq = sphere_quadrature(angular)
    return sq.nodes, r * sq.nodes, sq.weights


def _flux(sqrt_det, g_inv, grad, u, r, w):
    # integral over |z| = r of <eta, V>_g dA_g with V^a = g^ab grad_b
    V = np.einsum("nab,nb->na", g_inv, grad)
    return float(np.sum(w * sqrt_det * np.einsum("na,na->n", u, V)) * r**3)


def residue_integral(patch, r, angular=24, parts=False):
    """Boundary integral of <eta, grad Delta_g f + T grad f> with f = ln|Phi|^2 over |z| = r."""
    if patch.domain is not None and patch.domain.outer < r:
        raise ValueError("radius outside the patch domain")
    if r <= 0:
        raise ValueError("radius must be positive")
    u, z, w = _shell(r, angular)
    phi = patch.jet(z, 3)
    f = (phi * phi).sum(0).log()
    g = metric_jet(phi)
    lap = laplace_beltrami_jet(g, f)
    dlap = np.stack([lap.deriv(c).value for c in range(4)], axis=-1)
    df = np.stack([f.deriv(c).value for c in range(4)], axis=-1)
    fd = fundamental_data(patch, z)
    Hv, Lv, gm, gi = fd.ambient["Hv"], fd.ambient["Lv"], fd.g, fd.g_inv
    h = np.einsum("ni,nabi->nab", Hv, Lv)
    T = 4 * h - 6 * np.einsum("ni,ni->n", Hv, Hv)[:, None, None] * gm
    Tdf = np.einsum("nab,nbc,nc->na", T, gi, df)
    lap_part = _flux(fd.sqrt_det_g, gi, dlap, u, r, w)
    t_part = _flux(fd.sqrt_det_g, gi, Tdf, u, r, w)
    if parts:
        return lap_part + t_part, lap_part, t_part
    return lap_part + t_part


def mean_curvature_flux(patch, r, angular=24):
    """Flux of grad_g |H|^2 through |z| = r."""
    u, z, w = _shell(r, angular)
    fd = fundamental_data(patch, z)
    Hv, dHv = fd.ambient["Hv"], fd.ambient["dHv"]
    grad = 2 * np.einsum("ni,nxi->nx", Hv, dHv)
    return _flux(fd.sqrt_det_g, fd.g_inv, grad, u, r, w)


def richardson(radii, values):
    """Extrapolate values(r) -> r=0 for a geometric radius sequence assuming c r^p error."""
    radii = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(v) < 3:
        return v[-1], np.nan, abs(v[-1] - v[-2]) if len(v) > 1 else np.nan
    d1, d2 = v[-2] - v[-3], v[-1] - v[-2]
    q = radii[-2] / radii[-1]
    if d1 == 0 or d2 == 0 or d1 * d2 < 0:
        return v[-1], np.nan, abs(d2)
    p = np.log(d1 / d2) / np.log(q)
    est = v[-1] + d2 / (q**p - 1)
    return est, p, abs(est - v[-1])


def convergence_slope(radii, errors):
    x = np.log(np.asarray(radii, dtype=float))
    y = np.log(np.abs(np.asarray(errors, dtype=float)))
    return np.polyfit(x, y, 1)[0]


def verify_energy_identity(patch, mu=0.0, nu=0.0, radii=(0.1, 0.01), outer=None, quad=None, angular=24):
    """Check the annulus form of the inversion identity for r < |z| < outer.

    E(Phi^, A) - E(Phi, A) = (Res(r) - Res(R)) / 2 + [F^(R) - F^(r)] - [F(R) - F(r)]
    where F is the flux of grad|H|^2; as r -> 0 the loss tends to -8 pi^2.
    """
    quad = quad or QuadSpec(24, 20, radial_map="log")
    if outer is None:
        outer = 0.5 if patch.domain is None or not np.isfinite(patch.domain.outer) else patch.domain.outer
    inv = invert_patch(patch)
    res_R = residue_integral(patch, outer, angular)
    F_R = mean_curvature_flux(patch, outer, angular)
    Fh_R = mean_curvature_flux(inv, outer, angular)
    rows = []
    for r in radii:
        A = annulus(r, outer)
        E = integrate_energy(patch, A, quad)
        Eh = integrate_energy(inv, A, quad)
        lhs = Eh.E_mu_nu(mu, nu) - E.E_mu_nu(mu, nu)
        res_r = residue_integral(patch, r, angular)
        F_r = mean_curvature_flux(patch, r, angular)
        Fh_r = mean_curvature_flux(inv, r, angular)
        rhs = 0.5 * (res_r - res_R) + (Fh_R - Fh_r) - (F_R - F_r)
        loss = lhs - (-0.5 * res_R + Fh_R - F_R)
        rows.append(dict(r=r, E=E.E_mu_nu(mu, nu), E_inv=Eh.E_mu_nu(mu, nu), lhs=lhs, rhs=rhs,
                         residual=lhs - rhs, residue=res_r, loss=loss,
                         L4=E.I_L4, L4_inv=Eh.I_L4, L2sq=E.I_L2sq, L2sq_inv=Eh.I_L2sq))
    return rows


# expansion at infinity --------------------------------------------------------

def _horizontal(patch, z):
    phi = patch.func(z)
    r2 = (phi * phi).sum(0)
    inv = r2.reciprocal()
    return phi[:4] * inv[None], phi[4:] * inv[None]


def regraph(patch, zeta, order=3, tol=1e-14, maxiter=60):
    """Jet in zeta of the inverted graph u^(zeta) = phi(z)/|Phi(z)|^2, where z/|Phi(z)|^2 = zeta."""
    zeta = np.atleast_2d(np.asarray(zeta, dtype=float))
    z = zeta / np.sum(zeta**2, axis=1, keepdims=True)
    for _ in range(maxiter):
        h, _ = _horizontal(patch, Jet.variables(z, 1))
        F = h.value.T - zeta
        J = np.moveaxis(h.tensor(1), 1, 0)
        try:
            step = np.linalg.solve(J, F[..., None])[..., 0]
        except np.linalg.LinAlgError:
            raise ValueError("not graphical at this zeta")
        z = z - step
        if not np.all(np.isfinite(z)):
            raise ValueError("not graphical at this zeta")
        if np.max(np.abs(step) / np.max(np.abs(z), axis=1, keepdims=True)) < tol:
            break
    else:
        raise ValueError("not graphical at this zeta")
    h, _ = _horizontal(patch, Jet.variables(z, 1))
    # a converged step is not enough: the horizontal map must actually hit zeta
    if not np.allclose(h.value.T, zeta, rtol=1e-10, atol=0):
        raise ValueError("not graphical at this zeta")
    Jinv = np.linalg.inv(np.moveaxis(h.tensor(1), 1, 0))  # (N, 4, 4)
    zeta_j = Jet.variables(zeta, order)
    zj = Jet.constant(z.T, order)
    # fixed-point iteration on jets; each pass fixes one more Taylor degree
    for _ in range(order + 1):
        hj, _ = _horizontal(patch, zj)
        res = hj - zeta_j
        corr = Jet.stack([sum((res[b] * Jinv[:, a, b] for b in range(4)), Jet.constant(np.zeros(len(z)), order))
                          for a in range(4)])
        zj = zj - corr
    _, u = _horizontal(patch, zj)
    return u, z


@dataclass
class InfinityExpansion:
    P: np.ndarray
    Q: np.ndarray
    patch: ImmersionPatch

    def leading(self, zeta_jet):
        r = (zeta_jet * zeta_jet).sum(0).sqrt()
        e = zeta_jet * r.reciprocal()
        ee = e[:, None] * e[None, :]
        out = ee.contract(0.5 * self.P, 2)
        if np.any(self.Q):
            out = out + (ee[:, :, None] * e[None, None, :] * r.reciprocal()).contract(self.Q / 6.0, 3)
        return out

    def remainder(self, zeta, order=3):
        """Derivative tensors [D^0 .. D^order] of the remainder at points zeta (point axis first)."""
        u, _ = regraph(self.patch, zeta, order)
        rem = u - self.leading(Jet.variables(np.atleast_2d(zeta), order))
        return [np.moveaxis(rem.tensor(i), 1, 0) for i in range(order + 1)]

    def decay_exponents(self, radii=(10.0, 100.0, 1000.0), direction=None, order=3):
        direction = np.array([0.6, 0.0, 0.8, 0.0]) if direction is None else np.asarray(direction, float)
        direction = direction / np.linalg.norm(direction)
        pts = np.array([rho * direction for rho in radii])
        tens = self.remainder(pts, order)
        norms = np.array([[np.linalg.norm(t[k]) for t in tens] for k in range(len(radii))])
        slopes = [convergence_slope(radii, norms[:, i]) for i in range(order + 1)]
        return np.array(slopes), norms


def expansion_at_infinity(patch):
    if not patch.is_graph:
        raise ValueError("patch is not a graph")
    d = patch.graph_derivatives(np.zeros((1, 4)), 3)
    if np.max(np.abs(d[0])) > 1e-12 or np.max(np.abs(d[1])) > 1e-12:
        raise ValueError("need phi(0) = 0 and D phi(0) = 0")
    P = np.moveaxis(d[2][0], 0, -1)
    Q = np.moveaxis(d[3][0], 0, -1)
    return InfinityExpansion(P, Q, patch)
