"""Real spherical harmonics of degree 1-3 on S^3 and quadrature on S^3.

Basis members are normalised so that the integral of Y^2 over S^3 equals
Vol(S^3) = 2 pi^2; the Gram constants of the annular bilinear forms are
stated in that convention.
"""
import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import roots_chebyu, roots_legendre

VOL_S3 = 2 * math.pi**2
SIZES = {1: 4, 2: 9, 3: 16}


def _dfact(n):
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def sphere_moment(alpha):
    """Integral of x^alpha over S^3 divided by Vol(S^3), as an exact fraction."""
    if any(a % 2 for a in alpha):
        return Fraction(0)
    half = sum(alpha) // 2
    num = math.prod(_dfact(a - 1) for a in alpha)
    return Fraction(num, 2**half * math.factorial(half + 1))


def _laplacian(poly):
    out = {}
    for a, c in poly.items():
        for i in range(4):
            if a[i] >= 2:
                b = list(a)
                b[i] -= 2
                b = tuple(b)
                out[b] = out.get(b, 0) + c * a[i] * (a[i] - 1)
    return {k: v for k, v in out.items() if v != 0}


def _mul(p, q):
    out = {}
    for a, c in p.items():
        for b, d in q.items():
            k = tuple(x + y for x, y in zip(a, b))
            out[k] = out.get(k, 0) + c * d
    return {k: v for k, v in out.items() if v != 0}


def _inner(p, q):
    return sum((c * sphere_moment(k) for k, c in _mul(p, q).items()), Fraction(0))


_R2 = {tuple(2 * (i == j) for j in range(4)): Fraction(1) for i in range(4)}


def _harmonic_part(poly, h):
    lap = _laplacian(poly)
    if not lap:
        return dict(poly)
    shift = _mul(_R2, lap)
    out = dict(poly)
    for k, v in shift.items():
        out[k] = out.get(k, 0) - v / (4 * h)
    return {k: v for k, v in out.items() if v != 0}


@functools.lru_cache(maxsize=None)
def _exact_basis(degree):
    # graded-lex monomials of the given degree, harmonic projection, Gram-Schmidt
    polys = []
    for combo in itertools.combinations_with_replacement(range(4), degree):
        a = [0] * 4
        for i in combo:
            a[i] += 1
        p = _harmonic_part({tuple(a): Fraction(1)}, degree)
        for q, nq in polys:
            c = _inner(p, q) / nq
            if c:
                p = {k: p.get(k, 0) - c * q.get(k, 0) for k in set(p) | set(q)}
                p = {k: v for k, v in p.items() if v != 0}
        if p:
            polys.append((p, _inner(p, p)))
    return tuple(polys)


@dataclass(frozen=True)
class HarmonicBasis:
    degree: int
    size: int
    exponents: np.ndarray  # (n_monomials, 4)
    coeffs: np.ndarray  # (size, n_monomials)
    exact: tuple  # rational orthogonal polynomials with their squared norms / Vol

    def __call__(self, x):
        """Evaluate all members at points ``x`` of shape (..., 4); returns (..., size)."""
        x = np.asarray(x, dtype=float)
        mon = np.prod(x[..., None, :] ** self.exponents, axis=-1)
        return mon @ self.coeffs.T

    def polynomial(self, i):
        return {tuple(int(e) for e in self.exponents[k]): float(self.coeffs[i, k])
                for k in range(len(self.exponents)) if self.coeffs[i, k] != 0}


@functools.lru_cache(maxsize=None)
def build_basis(degree):
    if degree not in SIZES:
        raise ValueError("degree out of range")
    exact = _exact_basis(degree)
    exps = sorted({k for p, _ in exact for k in p}, reverse=True)
    coeffs = np.zeros((len(exact), len(exps)))
    for i, (p, n2) in enumerate(exact):
        scale = 1.0 / math.sqrt(n2)
        for j, e in enumerate(exps):
            coeffs[i, j] = float(p.get(e, 0)) * scale
    assert len(exact) == SIZES[degree]
    return HarmonicBasis(degree, len(exact), np.array(exps, dtype=int), coeffs, exact)


@dataclass(frozen=True)
class SphereQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    exactness: int

    def integrate(self, values):
        """Integrate samples with leading axis over nodes."""
        return np.tensordot(self.weights, values, axes=(0, 0))


@functools.lru_cache(maxsize=None)
def sphere_quadrature(exactness_degree):
    """Product rule in hyperspherical angles, exact for polynomials up to the given degree.

    Gauss-Chebyshev (second kind) in cos(psi) absorbs sin^2(psi),
    Gauss-Legendre in cos(theta) absorbs sin(theta), trapezoid in phi.
    """
    d = max(int(exactness_degree), 0)
    n = (d + 2) // 2
    t1, w1 = roots_chebyu(n)
    t2, w2 = roots_legendre(n)
    m = d + 1
    phi = 2 * np.pi * np.arange(m) / m
    w3 = np.full(m, 2 * np.pi / m)
    T1, T2, P = np.meshgrid(t1, t2, phi, indexing="ij")
    s1 = np.sqrt(1 - T1**2)
    s2 = np.sqrt(1 - T2**2)
    nodes = np.stack([T1, s1 * T2, s1 * s2 * np.cos(P), s1 * s2 * np.sin(P)], axis=-1).reshape(-1, 4)
    weights = (w1[:, None, None] * w2[None, :, None] * w3[None, None, :]).reshape(-1)
    return SphereQuadrature(nodes, weights, d)


def _check_symmetric(T, k, tol=1e-12):
    T = np.asarray(T, dtype=float)
    for perm in itertools.permutations(range(k)):
        axes = list(perm) + list(range(k, T.ndim))
        if not np.allclose(np.transpose(T, axes), T, atol=tol, rtol=0):
            raise ValueError("form is not symmetric")
    return T


def _as_vector_form(T, rank):
    T = np.asarray(T, dtype=float)
    if T.ndim == rank:
        T = T[..., None]
    if T.shape[:rank] != (4,) * rank or T.ndim != rank + 1:
        raise ValueError("form has wrong shape")
    return T


def project_quadratic(B):
    """Split B(u,u) on S^3 as trace part plus degree-2 harmonics.

    Returns ``(tr B, coeffs)`` with ``B(u,u) = tr B / 4 + sum_i coeffs_i Y_i``.
    ``B`` may be 4x4 or 4x4xm.
    """
    B = _check_symmetric(_as_vector_form(B, 2), 2)
    quad = sphere_quadrature(6)
    u = quad.nodes
    vals = np.einsum("na,nb,abm->nm", u, u, B)
    Y = build_basis(2)(u)
    coeffs = quad.integrate(Y[:, :, None] * vals[:, None, :]) / VOL_S3
    return np.einsum("aam->m", B), coeffs


def project_cubic(C):
    """Split C(u,u,u) on S^3 into degree-1 and degree-3 harmonic parts."""
    C = _check_symmetric(_as_vector_form(C, 3), 3)
    quad = sphere_quadrature(6)
    u = quad.nodes
    vals = np.einsum("na,nb,nc,abcm->nm", u, u, u, C)
    X = build_basis(1)(u)
    W = build_basis(3)(u)
    deg1 = quad.integrate(X[:, :, None] * vals[:, None, :]) / VOL_S3
    deg3 = quad.integrate(W[:, :, None] * vals[:, None, :]) / VOL_S3
    return deg1, deg3


@dataclass(frozen=True)
class FormCoefficients:
    m: int
    r0: np.ndarray
    p: np.ndarray
    r: np.ndarray
    q1: np.ndarray
    s1: np.ndarray
    q3: np.ndarray
    s3: np.ndarray

    @classmethod
    def zeros(cls, m):
        z = np.zeros
        return cls(m, z(m), z((9, m)), z((9, m)), z((4, m)), z((4, m)), z((16, m)), z((16, m)))

    def replace(self, **kw):
        d = {k: getattr(self, k) for k in ("m", "r0", "p", "r", "q1", "s1", "q3", "s3")}
        d.update({k: np.asarray(v, dtype=float) for k, v in kw.items()})
        return FormCoefficients(**d)

    def reconstruct(self, u):
        """Values of (P0(u,u), Q(u,u,u), R(u,u), S(u,u,u)) on unit vectors ``u``."""
        X, Y, W = build_basis(1)(u), build_basis(2)(u), build_basis(3)(u)
        P0 = Y @ self.p
        Q = X @ self.q1 + W @ self.q3
        R = self.r0 + Y @ self.r
        S = X @ self.s1 + W @ self.s3
        return P0, Q, R, S


def form_coefficients(P, Q, R, S):
    """Harmonic coefficients of the four boundary forms.

    ``P`` has its trace removed (only the traceless part enters); ``R``
    keeps its trace in ``r0 = tr R / 4``.
    """
    _, p = project_quadratic(P)
    q1, q3 = project_cubic(Q)
    trR, r = project_quadratic(R)
    s1, s3 = project_cubic(S)
    return FormCoefficients(p.shape[1], trR / 4.0, p, r, q1, s1, q3, s3)
