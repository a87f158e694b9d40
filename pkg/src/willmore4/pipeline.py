"""Connected-sum experiment: germ data in, local energy ledger and verdict out."""
from dataclasses import dataclass, field

import numpy as np

from . import bilinear, harmonics, rotation

MIN_GAMMA = 1e-2
DEFAULT_GRID = (0.2, 0.1, 0.05)
# exact energy lost by inverting at a preimage of the origin; enters the verdict symbolically
INVERSION_LOSS = -8 * np.pi**2


class PipelineError(RuntimeError):
    def __init__(self, stage, exc):
        self.stage = stage
        super().__init__(f"[{stage}] {exc}")


def _as_tables(P, Q, m=None):
    P = np.asarray(P, dtype=float)
    if P.ndim == 2:
        P = P[..., None]
    m = P.shape[-1] if m is None else m
    Q = np.zeros((4, 4, 4, m)) if Q is None else np.asarray(Q, dtype=float)
    if Q.ndim == 3:
        Q = Q[..., None]
    if P.shape != (4, 4, m) or Q.shape != (4, 4, 4, m):
        raise ValueError("germ tables must be (4,4,m) and (4,4,4,m)")
    return P, Q


@dataclass
class ConnectedSumSpec:
    germ1: tuple
    germ2: tuple
    gamma_grid: tuple = DEFAULT_GRID
    t: object = "auto"
    mu: float = 0.0
    nu: float = 0.0
    rotate: object = "auto"
    restarts: int = 8
    seed: int = 0
    variant: str = "corrected"

    def __post_init__(self):
        P, Q = _as_tables(*self.germ1)
        R, S = _as_tables(*self.germ2, m=P.shape[-1])
        self.germ1, self.germ2 = (P, Q), (R, S)
        if self.t == "auto" and np.linalg.norm(rotation.traceless_part(np.moveaxis(P, -1, 0))) <= rotation.NONZERO:
            raise ValueError("automatic t needs a germ1 with nonzero traceless second derivative")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        g1, g2 = d.pop("germ1"), d.pop("germ2")
        return cls((g1["P"], g1.get("Q")), (g2["P"] if "P" in g2 else g2["R"], g2.get("Q", g2.get("S"))), **d)


@dataclass
class MarginRow:
    gamma: float
    alpha: float
    beta: float
    exact_combination: float
    leading: float
    ratio: float
    sign: int


@dataclass
class MarginReport:
    rows: list
    t: float
    reduction_achieved: bool
    pairing: float
    rotation: object = None
    inversion_loss: float = INVERSION_LOSS
    extras: dict = field(default_factory=dict)

    def as_dict(self):
        return dict(t=self.t, reduction_achieved=self.reduction_achieved, pairing=self.pairing,
                    inversion_loss=self.inversion_loss,
                    rows=[vars(r) for r in self.rows],
                    rotation=None if self.rotation is None else dict(
                        S=self.rotation.S.tolist(), T=self.rotation.T.tolist(), pairing=self.rotation.pairing))


def extract_germ_data(patch, tol=1e-12):
    """(D^2 phi(0), D^3 phi(0), whether a nonzero trace gets shifted off P)."""
    if not patch.is_graph:
        raise ValueError("patch is not a graph")
    d = patch.graph_derivatives(np.zeros((1, 4)), 3)
    if np.max(np.abs(d[0])) > tol or np.max(np.abs(d[1])) > tol:
        raise ValueError("need phi(0) = 0 and D phi(0) = 0")
    P = np.moveaxis(d[2][0], 0, -1)
    Q = np.moveaxis(d[3][0], 0, -1)
    trace = np.einsum("aam->m", P)
    return P, Q, bool(np.any(np.abs(trace) > tol))


def choose_t(coeffs):
    pp = float(np.sum(coeffs.p**2))
    pr = float(np.sum(coeffs.p * coeffs.r))
    if np.sqrt(pp) <= rotation.NONZERO:
        raise ValueError("traceless data vanishes; nothing drives a reduction")
    if pr <= 0:
        raise ValueError("nonpositive pairing: apply rotation module first")
    return 3 * pp / pr


def rotate_germ(R, S, rot):
    """Germ2 seen through x -> S x on the domain and T on the normal index."""
    M, T = rot.S, rot.T
    R2 = np.einsum("abi,aA,bB,ij->ABj", R, M, M, T)
    S2 = np.einsum("abci,aA,bB,cC,ij->ABCj", S, M, M, M, T)
    return R2, S2


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


def run_connected_sum(spec):
    grid = tuple(float(g) for g in spec.gamma_grid)
    for g in grid:
        if g < MIN_GAMMA:
            raise PipelineError("spec", ValueError(
                f"gamma {g:g} below {MIN_GAMMA:g}: alpha = gamma^8 is past useful precision"))
    (P, Q), (R, S) = spec.germ1, spec.germ2
    coeffs = _stage("harmonics", harmonics.form_coefficients, P, Q, R, S)
    rot = None
    pairing = float(np.sum(coeffs.p * coeffs.r))
    # with automatic t, alignment maximises the pairing and so keeps t small
    need = spec.rotate is True or (spec.rotate == "auto" and spec.t == "auto")
    if need:
        rot = _stage("rotation", rotation.search_S, rotation.traceless_part(np.moveaxis(P, -1, 0)),
                     rotation.traceless_part(np.moveaxis(R, -1, 0)), spec.restarts, spec.seed)
        R, S = rotate_germ(R, S, rot)
        coeffs = _stage("harmonics", harmonics.form_coefficients, P, Q, R, S)
        pairing = float(np.sum(coeffs.p * coeffs.r))
    t = _stage("choose_t", choose_t, coeffs) if spec.t == "auto" else float(spec.t)
    rows = []
    for g in grid:
        d = _stage("energy", bilinear.energy_difference, coeffs, g, t, spec.variant)
        ratio = d.exact_combination / d.leading if d.leading != 0 else float("nan")
        rows.append(MarginRow(g, d.alpha, d.beta, d.exact_combination, d.leading, ratio,
                              int(np.sign(d.exact_combination))))
    last = min(rows, key=lambda r: r.gamma)
    verdict = bool(last.leading < 0 and last.exact_combination < 0)
    return MarginReport(rows, t, verdict, pairing, rot, extras=dict(coeffs=coeffs))


def ratio_deviations(report):
    rows = sorted(report.rows, key=lambda r: -r.gamma)
    return [(r.gamma, abs(r.ratio - 1)) for r in rows]
