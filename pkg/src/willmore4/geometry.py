"""Extrinsic geometry of immersed 4-dimensional patches in R^n.

Pointwise quantities come from derivative tensors of the immersion at a
batch of points: A = D Phi, B = D^2 Phi, C = D^3 Phi with shapes
(N, n, 4), (N, n, 4, 4), (N, n, 4, 4, 4).
"""
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .harmonics import sphere_quadrature
from .jets import Jet, jet_det4, jet_inv


def _es(*args):
    return np.einsum(*args, optimize=True)


class NotImmersion(ValueError):
    pass


class QuadratureError(RuntimeError):
    def __init__(self, coarse, fine):
        super().__init__(f"quadrature not converged: {coarse!r} vs {fine!r}")
        self.coarse = coarse
        self.fine = fine


# domains -------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    kind: str  # "ball", "annulus", "exterior"
    inner: float = 0.0
    outer: float = np.inf

    def contains(self, z):
        r = np.linalg.norm(np.atleast_2d(z), axis=-1)
        return (r >= self.inner) & (r <= self.outer)


def ball(rho):
    return Domain("ball", 0.0, float(rho))


def annulus(tau, sigma):
    if not 0 <= tau < sigma:
        raise ValueError("need 0 <= tau < sigma")
    return Domain("annulus", float(tau), float(sigma))


def exterior(rho):
    return Domain("exterior", float(rho), np.inf)


def parse_domain(text):
    kind, _, args = text.partition(":")
    vals = [float(v) for v in args.split(",")] if args else []
    return {"ball": ball, "annulus": annulus, "exterior": exterior}[kind](*vals)


@dataclass(frozen=True)
class QuadSpec:
    radial: int = 32
    angular: int = 16
    chunk: int = 20000
    radial_map: str = "linear"  # "log" puts Gauss nodes in ln r, for thin inner radii

    @classmethod
    def order(cls, q, **kw):
        """Quadrature of order q: q radial nodes, S^3 rule exact to degree q/2."""
        return cls(radial=int(q), angular=int(q) // 2, **kw)


def radial_rule(domain, n, radial_map="linear"):
    """Nodes and weights for the radial integral with measure r^3 dr."""
    x, w = leggauss(n)
    if radial_map == "log" and domain.kind != "exterior" and domain.inner > 0:
        la, lb = np.log(domain.inner), np.log(domain.outer)
        r = np.exp(la + 0.5 * (lb - la) * (x + 1))
        return r, 0.5 * (lb - la) * w * r**4
    if domain.kind == "exterior":
        s = 0.5 * (x + 1)
        r = domain.inner / s
        return r, 0.5 * w * domain.inner**4 * s**-5
    a, b = domain.inner, domain.outer
    r = a + 0.5 * (b - a) * (x + 1)
    return r, 0.5 * (b - a) * w * r**3


def domain_rule(domain, quad):
    r, wr = radial_rule(domain, quad.radial, quad.radial_map)
    sq = sphere_quadrature(quad.angular)
    pts = (r[:, None, None] * sq.nodes[None]).reshape(-1, 4)
    wts = (wr[:, None] * sq.weights[None]).reshape(-1)
    return pts, wts


# patches -------------------------------------------------------------------

class ImmersionPatch:
    """A parametrised patch z -> Phi(z) in R^n with exact Taylor jets.

    ``func`` maps a coordinate jet of shape (4, N) to a jet of shape (n, N);
    it must be written with jet arithmetic so composition stays exact.
    For graphs ``graph_map`` holds z -> phi(z) and ``func`` is (z, phi(z)).
    """

    def __init__(self, func, ambient_dim, jet_order=3, domain=None, graph_map=None, name="patch"):
        self.func = func
        self.n = int(ambient_dim)
        if self.n < 5:
            raise ValueError("ambient dimension must be at least 5")
        self.jet_order = int(jet_order)
        self.domain = domain
        self.graph_map = graph_map
        self.name = name

    @property
    def codim(self):
        return self.n - 4

    @property
    def is_graph(self):
        return self.graph_map is not None

    def jet(self, z, order=None):
        order = self.jet_order if order is None else order
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return self.func(Jet.variables(z, order))

    def __call__(self, z):
        return self.jet(z, 0).value.T

    def derivatives(self, z, k=None):
        """[Phi, D Phi, ..., D^k Phi] with the point axis first."""
        k = self.jet_order if k is None else k
        j = self.jet(z, k)
        return [np.moveaxis(j.tensor(i), 1, 0) for i in range(k + 1)]

    def graph_derivatives(self, z, k=3):
        if not self.is_graph:
            raise ValueError("patch is not a graph")
        j = self.graph_map(Jet.variables(np.atleast_2d(z), k))
        return [np.moveaxis(j.tensor(i), 1, 0) for i in range(k + 1)]


def graph_patch(phi, codim, jet_order=3, domain=None, name="graph"):
    def func(z):
        return Jet.stack([z[i] for i in range(4)] + [phi(z)[j] for j in range(codim)])
    return ImmersionPatch(func, 4 + codim, jet_order, domain, graph_map=phi, name=name)


# pointwise geometry --------------------------------------------------------

@dataclass
class FundamentalData:
    g: np.ndarray
    g_inv: np.ndarray
    sqrt_det_g: np.ndarray
    normal_frame: np.ndarray  # (N, n, m), orthonormal columns
    L: np.ndarray  # (N, 4, 4, m) frame components
    H: np.ndarray  # (N, m)
    nabla_perp_H: np.ndarray  # (N, 4, m)
    L_traceless: np.ndarray  # (N, 4, 4, m)
    ambient: dict = field(default_factory=dict, repr=False)


def _normal_frame(A, graph):
    N, n, _ = A.shape
    m = n - 4
    if graph:
        M = np.concatenate([-np.swapaxes(A[:, 4:, :], 1, 2), np.broadcast_to(np.eye(m), (N, m, m))], axis=1)
        Q, R = np.linalg.qr(M)
        sign = np.sign(np.diagonal(R, axis1=1, axis2=2))
        sign[sign == 0] = 1.0
        return Q * sign[:, None, :]
    Q, _ = np.linalg.qr(A, mode="complete")
    return Q[:, :, 4:]


def tensor_geometry(A, B, C, graph=False):
    """Ambient-vector geometry from derivative tensors (batched).

    Index convention: point N, ambient i, coordinates a, b and x for the
    derivative direction.
    """
    N, n, _ = A.shape
    AT = np.swapaxes(A, 1, 2)
    g = AT @ A
    det = np.linalg.det(g)
    if np.any(det <= 0) or not np.all(np.isfinite(det)):
        raise NotImmersion("not an immersion at point")
    ginv = np.linalg.inv(g)
    PT = A @ ginv @ AT
    PN = np.eye(n) - PT
    B16 = B.reshape(N, n, 16)
    Lv16 = PN @ B16
    Hv = 0.25 * (Lv16 @ ginv.reshape(N, 16, 1))[..., 0]
    # d_x g_ab = <B_ax, A_b> + <A_a, B_bx>
    dg = (np.swapaxes(B16, 1, 2) @ A).reshape(N, 4, 4, 4)  # (a, x, b)
    dg = np.transpose(dg, (0, 1, 3, 2))
    dg = dg + np.swapaxes(dg, 1, 2)  # (a, b, x)
    dgx = np.transpose(dg, (0, 3, 1, 2))  # (x, a, b)
    dginv = -(ginv[:, None] @ dgx @ ginv[:, None])  # (x, a, b)
    Bx = np.transpose(B, (0, 3, 1, 2))  # (x, i, a)
    BgA = Bx @ ginv[:, None] @ AT[:, None]
    dPT = BgA + np.swapaxes(BgA, 2, 3) + A[:, None] @ dginv @ AT[:, None]  # (x, i, j)
    Cx = np.transpose(C.reshape(N, n, 16, 4), (0, 3, 1, 2))  # (x, i, ab)
    dLv = -(dPT @ B16[:, None]) + PN[:, None] @ Cx  # (x, i, ab)
    dHv = 0.25 * ((Lv16[:, None] @ dginv.reshape(N, 4, 16, 1))[..., 0]
                  + (dLv @ ginv.reshape(N, 1, 16, 1))[..., 0])  # (x, i)
    DH = (PN[:, None] @ dHv[..., None])[..., 0]
    Lv = np.moveaxis(Lv16, 1, 2).reshape(N, 4, 4, n)
    frame = _normal_frame(A, graph)
    return dict(g=g, g_inv=ginv, det=det, PN=PN, Lv=Lv, Hv=Hv, dHv=dHv, DH=DH, frame=frame, dg=dg)


def fundamental_data(patch, z):
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if patch.jet_order < 3:
        raise ValueError("jet order 3 required")
    _, A, B, C = patch.derivatives(z, 3)
    t = tensor_geometry(A, B, C, graph=patch.is_graph)
    nu = t["frame"]
    L = _es("nim,nabi->nabm", nu, t["Lv"])
    H = _es("nim,ni->nm", nu, t["Hv"])
    DH = _es("nim,nxi->nxm", nu, t["DH"])
    Lo = L - t["g"][..., None] * H[:, None, None, :]
    return FundamentalData(t["g"], t["g_inv"], np.sqrt(t["det"]), nu, L, H, DH, Lo, ambient=t)


DENSITY_KEYS = ("gradH", "HL", "H4", "L4", "L2sq")


def densities(g, g_inv, L, H, DH):
    """The five energy integrands (without the volume factor) from frame components."""
    gradH = _es("nab,nam,nbm->n", g_inv, DH, DH)
    h = _es("nm,nabm->nab", H, L)
    HL = _es("nac,nbd,nab,ncd->n", g_inv, g_inv, h, h)
    H2 = _es("nm,nm->n", H, H)
    Lo = L - g[..., None] * H[:, None, None, :]
    Lo2 = _es("nac,nbd,nabm,ncdm->n", g_inv, g_inv, Lo, Lo)
    Lsq = _es("ncd,nacm,ndbm->nab", g_inv, Lo, Lo)
    L2sq = _es("nae,nbf,nab,nef->n", g_inv, g_inv, Lsq, Lsq)
    return dict(gradH=gradH, HL=HL, H4=H2**2, L4=Lo2**2, L2sq=L2sq)


def energy_density(patch, z, mu=0.0, nu=0.0):
    """Energy integrands times sqrt(det g), plus the assembled E_GR and E^(mu,nu) densities."""
    fd = fundamental_data(patch, z)
    d = densities(fd.g, fd.g_inv, fd.L, fd.H, fd.nabla_perp_H)
    out = {k: v * fd.sqrt_det_g for k, v in d.items()}
    out["E_GR"] = out["gradH"] - out["HL"] + 7 * out["H4"]
    out["E_mu_nu"] = out["E_GR"] + mu * out["L4"] + nu * out["L2sq"]
    return out


def q4_density(fd):
    """Q_4 modulo the divergence -2 Delta|H|^2, times sqrt(det g)."""
    L, H, g, gi = fd.L, fd.H, fd.g, fd.g_inv
    H2 = _es("nm,nm->n", H, H)
    t = _es("nm,nabm->nab", H, L) - 0.5 * H2[:, None, None] * g
    t2 = _es("nac,nbd,nab,ncd->n", gi, gi, t, t)
    grad = _es("nab,nam,nbm->n", gi, fd.nabla_perp_H, fd.nabla_perp_H)
    return (-2 * t2 + 2 * grad + 8 * H2**2) * fd.sqrt_det_g


@dataclass(frozen=True)
class EnergyBreakdown:
    I_gradH: float
    I_HL: float
    I_H4: float
    I_L4: float
    I_L2sq: float

    @property
    def E_GR(self):
        return self.I_gradH - self.I_HL + 7 * self.I_H4

    def E_mu_nu(self, mu, nu):
        return self.E_GR + mu * self.I_L4 + nu * self.I_L2sq

    def __add__(self, other):
        return EnergyBreakdown(*(getattr(self, k) + getattr(other, k) for k in self.__dataclass_fields__))

    def as_dict(self, mu=0.0, nu=0.0):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["E_GR"] = self.E_GR
        d["E_mu_nu"] = self.E_mu_nu(mu, nu)
        d["mu"], d["nu"] = mu, nu
        return d


def _integrate(patch, domain, quad, fn):
    pts, wts = domain_rule(domain, quad)
    total = None
    for s in range(0, len(pts), quad.chunk):
        vals = fn(patch, pts[s:s + quad.chunk])
        part = {k: float(np.sum(wts[s:s + quad.chunk] * v)) for k, v in vals.items()}
        total = part if total is None else {k: total[k] + part[k] for k in total}
    return total


def integrate_energy(patch, domain=None, quad=QuadSpec(), tol=None):
    """Integrate the five energy terms over ``domain`` (defaults to the patch domain).

    With ``tol`` the integral is repeated on a coarser rule and a
    :class:`QuadratureError` is raised when the two disagree.
    """
    domain = domain or patch.domain

    def fn(p, z):
        d = energy_density(p, z)
        return {k: d[k] for k in DENSITY_KEYS}

    tot = _integrate(patch, domain, quad, fn)
    out = EnergyBreakdown(*(tot[k] for k in DENSITY_KEYS))
    if tol is not None:
        coarse_q = QuadSpec(max(quad.radial * 2 // 3, 2), max(quad.angular - 4, 2), quad.chunk)
        tc = _integrate(patch, domain, coarse_q, fn)
        coarse = EnergyBreakdown(*(tc[k] for k in DENSITY_KEYS))
        scale = max(abs(out.E_GR), abs(out.I_L4), 1.0)
        if any(abs(getattr(out, k) - getattr(coarse, k)) > tol * scale for k in out.__dataclass_fields__):
            raise QuadratureError(coarse, out)
    return out


def integrate_atlas(atlas, quad=QuadSpec()):
    total = None
    for patch in atlas:
        e = integrate_energy(patch, patch.domain, quad)
        total = e if total is None else total + e
    return total


def verify_q4_identity(atlas, quad=QuadSpec(), tol=1e-6, closed=True):
    """Compare the integral of Q_4 (modulo divergence) with 2 E_GR over a closed atlas."""
    if not closed or not atlas:
        raise ValueError("atlas does not cover a closed manifold")
    q4 = 0.0
    egr = 0.0
    for patch in atlas:
        def fn(p, z):
            fd = fundamental_data(p, z)
            d = densities(fd.g, fd.g_inv, fd.L, fd.H, fd.nabla_perp_H)
            e = (d["gradH"] - d["HL"] + 7 * d["H4"]) * fd.sqrt_det_g
            return {"q4": q4_density(fd), "egr": e}
        t = _integrate(patch, patch.domain, quad, fn)
        q4 += t["q4"]
        egr += t["egr"]
    return {"int_Q4": q4, "two_E_GR": 2 * egr, "difference": q4 - 2 * egr, "ok": abs(q4 - 2 * egr) <= tol * max(1.0, abs(q4))}


# jet-level geometry ---------------------------------------------------------

def metric_jet(phi_jet):
    """Induced metric (4, 4, N) as a jet one order below the immersion jet."""
    D = [phi_jet.deriv(a) for a in range(4)]
    rows = [Jet.stack([(D[a] * D[b]).sum(0) for b in range(4)]) for a in range(4)]
    return Jet.stack(rows)


def laplace_beltrami_jet(g, f):
    """Delta_g f = (1/sqrt g) d_a (sqrt g g^ab d_b f); loses two orders."""
    k = min(g.order, f.order - 1)
    g = g.truncate(k)
    gi = jet_inv(g)
    sg = jet_det4(g).sqrt()
    df = [f.deriv(b).truncate(k) for b in range(4)]
    out = None
    for a in range(4):
        flux = None
        for b in range(4):
            t = gi[a, b] * df[b]
            flux = t if flux is None else flux + t
        term = (sg * flux).deriv(a)
        out = term if out is None else out + term
    return out / sg.truncate(k - 1)


def mean_curvature_jet(patch, z, order=None):
    """H = (1/4) Delta_g Phi computed entirely in jet arithmetic."""
    order = patch.jet_order if order is None else order
    phi = patch.jet(z, order)
    g = metric_jet(phi)
    comps = [laplace_beltrami_jet(g, phi[i]) for i in range(patch.n)]
    return Jet.stack(comps) * 0.25, g


def q4_full_density(patch, z):
    """Pointwise Q_4 including -2 Delta_g |H|^2 (needs order-4 jets), times sqrt(det g)."""
    H, g = mean_curvature_jet(patch, z, 4)
    H2 = (H * H).sum(0)
    lap = laplace_beltrami_jet(g, H2)
    fd = fundamental_data(patch, z)
    return q4_density(fd) - 2 * lap.value * fd.sqrt_det_g


# approximation lemma -------------------------------------------------------

def approximation_discrepancy(patch, z):
    """(| |grad^perp H|^2 sqrt det G - |grad Delta phi|^2 / 16 |, |Dphi|^2 |D^3phi|^2 + |D^2phi|^4)."""
    z = np.atleast_2d(z)
    _, D1, D2, D3 = patch.graph_derivatives(z, 3)
    if np.any(np.sqrt(np.sum(D1**2, axis=(1, 2))) > 1):
        raise ValueError("hypothesis violated: |Dphi| > 1")
    fd = fundamental_data(patch, z)
    grad2 = _es("nab,nam,nbm->n", fd.g_inv, fd.nabla_perp_H, fd.nabla_perp_H)
    gdl = _es("nmaac->nmc", D3)
    lhs = np.abs(grad2 * fd.sqrt_det_g - np.sum(gdl**2, axis=(1, 2)) / 16)
    n1 = np.sum(D1**2, axis=(1, 2))
    n2 = np.sum(D2**2, axis=(1, 2, 3))
    n3 = np.sum(D3**2, axis=(1, 2, 3, 4))
    return lhs, n1 * n3 + n2**2
