"""Immersion fixtures written in jet arithmetic."""
import json

import numpy as np

from .geometry import ImmersionPatch, ball, graph_patch
from .jets import Jet


def polynomial_graph(terms, codim, jet_order=3, domain=None, name="polynomial"):
    """Graph of phi(z) = sum_k coeff_k z^{multi_index_k}, coeff_k in R^codim."""
    terms = [(tuple(int(i) for i in t["multi_index"]), np.asarray(t["coeff"], dtype=float)) for t in terms]
    for mi, c in terms:
        if len(mi) != 4 or c.shape != (codim,):
            raise ValueError("bad polynomial term")

    def phi(z):
        out = None
        for mi, c in terms:
            mono = None
            for i, e in enumerate(mi):
                if e:
                    f = z[i] ** e
                    mono = f if mono is None else mono * f
            if mono is None:
                mono = z[0] * 0.0 + 1.0
            term = Jet.stack([mono * c[j] for j in range(codim)])
            out = term if out is None else out + term
        if out is None:
            out = Jet.stack([z[0] * 0.0 for _ in range(codim)])
        return out

    return graph_patch(phi, codim, jet_order, domain, name)


def load_immersion(path_or_dict, jet_order=3, domain=None):
    spec = path_or_dict
    if not isinstance(spec, dict):
        with open(spec) as fh:
            spec = json.load(fh)
    return polynomial_graph(spec["terms"], int(spec["codim"]), jet_order, domain, spec.get("name", "polynomial"))


def quadratic_graph(P, Q=None, jet_order=3, domain=None):
    """phi(z) = P(z,z)/2 + Q(z,z,z)/6 for forms with a trailing codomain axis."""
    P = np.asarray(P, dtype=float)
    if P.ndim == 2:
        P = P[..., None]
    m = P.shape[-1]
    Q = np.zeros((4, 4, 4, m)) if Q is None else np.asarray(Q, dtype=float).reshape(4, 4, 4, m)

    def phi(z):
        # nested contraction: z_a z_b (P_ab/2 + Q_abc z_c/6)
        M = z.contract(np.moveaxis(Q, 2, 0) / 6.0, 1) + 0.5 * P[..., None]
        K = (z[None, :, None] * M).sum(1)
        return (z[:, None] * K).sum(0)

    return graph_patch(phi, m, jet_order, domain, "quadratic")


def flat_patch(codim=1, domain=None, jet_order=3):
    return graph_patch(lambda z: Jet.stack([z[0] * 0.0 for _ in range(codim)]), codim, jet_order, domain, "flat")


def sphere_germ(radius=1.0, domain=None, jet_order=3):
    """Graph of the sphere of given radius through 0, tangent to R^4 x {0}: phi = R - sqrt(R^2 - |z|^2)."""
    R = float(radius)

    def phi(z):
        r2 = (z * z).sum(0)
        return Jet.stack([R - (R * R - r2).sqrt()])

    return graph_patch(phi, 1, jet_order, domain or ball(0.5 * R), "sphere_germ")


def stereographic_chart(sign=1, jet_order=3):
    """Unit-ball chart of the round S^4 in R^5: (2z, sign*(1-|z|^2)) / (1+|z|^2)."""
    def func(z):
        r2 = (z * z).sum(0)
        inv = (r2 + 1.0).reciprocal()
        comps = [z[i] * inv * 2.0 for i in range(4)] + [(1.0 - r2) * inv * float(sign)]
        return Jet.stack(comps)

    return ImmersionPatch(func, 5, jet_order, ball(1.0), name=f"stereo{'+' if sign > 0 else '-'}")


def round_sphere_atlas(jet_order=3, radius=1.0):
    atlas = [stereographic_chart(+1, jet_order), stereographic_chart(-1, jet_order)]
    if radius != 1.0:
        atlas = [transformed(p, scale=radius) for p in atlas]
    return atlas


def plane_patch(height=1.0, codim=1, domain=None, jet_order=3):
    """The affine plane z -> (z, height, 0, ...)."""
    def func(z):
        zero = z[0] * 0.0
        return Jet.stack([z[i] for i in range(4)] + [zero + height] + [zero for _ in range(codim - 1)])

    return ImmersionPatch(func, 4 + codim, jet_order, domain, name="plane")


def transformed(patch, scale=1.0, rotation=None, translation=None):
    """Compose a patch with x -> scale * rotation @ x + translation."""
    n = patch.n
    Rm = np.eye(n) if rotation is None else np.asarray(rotation, dtype=float)
    t = np.zeros(n) if translation is None else np.asarray(translation, dtype=float)

    def func(z):
        phi = patch.func(z)
        comps = []
        for i in range(n):
            acc = None
            for j in range(n):
                if Rm[i, j]:
                    term = phi[j] * (scale * Rm[i, j])
                    acc = term if acc is None else acc + term
            acc = phi[0] * 0.0 if acc is None else acc
            comps.append(acc + t[i])
        return Jet.stack(comps)

    return ImmersionPatch(func, n, patch.jet_order, patch.domain, name=f"{patch.name}*")


def random_rotation(n, rng):
    Q, R = np.linalg.qr(rng.normal(size=(n, n)))
    return Q * np.sign(np.diag(R))
