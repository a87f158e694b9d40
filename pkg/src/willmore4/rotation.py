"""Aligning two tuples of traceless symmetric forms by S in O(4) and T in O(k).

For fixed S the best T is the polar factor of A(S), and the optimal value
is the trace norm of A(S); the search over S is numerical.
"""
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

NONZERO = 1e-12
REFLECTION = np.diag([1.0, 1.0, 1.0, -1.0])


def as_form_tuple(F, tol=1e-12):
    """Validate and return an array of shape (k, 4, 4)."""
    F = np.asarray(F, dtype=float)
    if F.ndim == 2:
        F = F[None]
    if F.ndim != 3 or F.shape[1:] != (4, 4):
        raise ValueError("forms must have shape (k, 4, 4)")
    scale = max(1.0, np.abs(F).max(initial=0.0))
    if np.abs(F - np.swapaxes(F, 1, 2)).max(initial=0.0) > tol * scale:
        raise ValueError("form is not symmetric")
    if np.abs(np.trace(F, axis1=1, axis2=2)).max(initial=0.0) > tol * scale:
        raise ValueError("form is not traceless")
    return F


def traceless_part(F):
    F = np.asarray(F, dtype=float)
    return F - np.trace(F, axis1=-2, axis2=-1)[..., None, None] * np.eye(4) / 4


def build_A(S, P, R):
    """A_ij = Tr(S P_j S^T R_i)."""
    P, R = np.asarray(P, float), np.asarray(R, float)
    if P.shape != R.shape or P.shape[1:] != (4, 4):
        raise ValueError("dimension mismatch")
    k = P.shape[0]
    SP = S @ P @ S.T
    return np.swapaxes(R, 1, 2).reshape(k, 16) @ SP.reshape(k, 16).T


def optimal_T(A):
    """argmax over O(k) of Tr(T^T A) and the maximum, which is the trace norm."""
    try:
        U, s, Vt = np.linalg.svd(np.asarray(A, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("SVD failed") from exc
    return U @ Vt, float(s.sum())


def pairing(S, T, P, R):
    """sum_ij T_ij Tr(S P_j S^T R_i) = Tr(T^T A(S))."""
    return float(np.sum(T * build_A(S, P, R)))


def _quat_left(a):
    w, x, y, z = a
    return np.array([[w, -x, -y, -z], [x, w, -z, y], [y, z, w, -x], [z, -y, x, w]])


def _quat_right(b):
    w, x, y, z = b
    return np.array([[w, -x, -y, -z], [x, w, z, -y], [y, -z, w, x], [z, y, -x, w]])


def so4_from_quaternions(a, b):
    """x -> a x conj(b) as a 4x4 rotation."""
    a = np.asarray(a, float) / np.linalg.norm(a)
    b = np.asarray(b, float) / np.linalg.norm(b)
    b = b * np.array([1, -1, -1, -1])
    return _quat_left(a) @ _quat_right(b)


_SKEW_IDX = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _skew(theta):
    K = np.zeros((4, 4))
    for t, (i, j) in zip(theta, _SKEW_IDX):
        K[i, j], K[j, i] = t, -t
    return K


@dataclass
class RotationResult:
    S: np.ndarray
    T: np.ndarray
    pairing: float
    trace_norm: float
    evaluations: int = 0


def _refine(S0, P, R, tol):
    def f(theta):
        return -np.linalg.svd(build_A(expm(_skew(theta)) @ S0, P, R), compute_uv=False).sum()

    # fatol relative to the objective scale; an absolute 1e-14 never triggers
    fatol = 1e-12 * max(1.0, abs(f(np.zeros(6))))
    res = minimize(f, np.zeros(6), method="Nelder-Mead",
                   options=dict(xatol=tol, fatol=fatol, maxiter=2000, initial_simplex=0.3 * np.vstack([np.zeros(6), np.eye(6)])))
    return expm(_skew(res.x)) @ S0, -res.fun, res.nfev


def _frame(F):
    """Eigenbasis of a generic combination of the forms; moves with F under conjugation."""
    w = 1.0 + np.arange(len(F)) / np.sqrt(2.0)
    return np.linalg.eigh(np.einsum("j,jab->ab", w, F))[1]


# diagonal sign patterns modulo -I: the eigenframe is only defined up to these
_SIGNS = [np.diag([1.0, *s]) for s in itertools.product((1.0, -1.0), repeat=3)]


def _start_pool(P, R, restarts, rng, screen=16):
    """Candidate starts, expressed in P's own frame so the pool is conjugation covariant."""
    V = _frame(P)
    pool = []
    for i in range(screen * restarts):
        Q = np.eye(4) if i == 0 else so4_from_quaternions(rng.normal(size=4), rng.normal(size=4))
        if i % 2 == 1:
            Q = Q @ REFLECTION
        pool += [Q @ D @ V.T for D in _SIGNS]
    # eigenbasis alignments of each P_j onto each R_i, in both orders
    for Pj in P:
        VP = np.linalg.eigh(Pj)[1]
        for Ri in R:
            VR = np.linalg.eigh(Ri)[1]
            pool += [W @ D @ VP.T for W in (VR, VR[:, ::-1]) for D in _SIGNS]
    return pool


def search_S(P, R, restarts=8, seed=0, tol=1e-9):
    """Maximise the trace norm of A(S) over O(4).

    A pool of starts is screened by trace norm and the best ``restarts`` of
    them are refined.  Starts are built in an eigenframe of P, so conjugating
    P by a fixed orthogonal matrix only relabels the pool.
    """
    P, R = as_form_tuple(P), as_form_tuple(R)
    if P.shape != R.shape:
        raise ValueError("dimension mismatch")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    k = P.shape[0]
    if np.linalg.norm(P) <= NONZERO and np.linalg.norm(R) <= NONZERO:
        return RotationResult(np.eye(4), np.eye(k), 0.0, 0.0)
    pool = _start_pool(P, R, restarts, np.random.default_rng(np.random.SeedSequence(seed)))
    scores = [np.linalg.svd(build_A(S0, P, R), compute_uv=False).sum() for S0 in pool]
    best, nfev = None, len(pool)
    for i in np.argsort(scores)[::-1][:restarts]:
        S, val, n = _refine(pool[i], P, R, tol)
        nfev += n
        if best is None or val > best[1]:
            best = (S, val)
    S = best[0]
    # re-orthonormalise against drift from expm products
    U, _, Vt = np.linalg.svd(S)
    S = U @ Vt
    A = build_A(S, P, R)
    T, tn = optimal_T(A)
    return RotationResult(S, T, pairing(S, T, P, R), tn, nfev)


def signed_permutations(proper_only=False):
    """All 4x4 signed permutation matrices (384), optionally only det +1."""
    out = []
    for perm in itertools.permutations(range(4)):
        for signs in itertools.product((1, -1), repeat=4):
            M = np.zeros((4, 4))
            for i, (j, s) in enumerate(zip(perm, signs)):
                M[i, j] = s
            if proper_only and np.linalg.det(M) < 0:
                continue
            out.append(M)
    return out


def random_orthogonal(k, rng, size=None):
    n = 1 if size is None else size
    G = rng.normal(size=(n, k, k))
    Q, Rr = np.linalg.qr(G)
    Q = Q * np.sign(np.diagonal(Rr, axis1=1, axis2=2))[:, None, :]
    return Q[0] if size is None else Q
