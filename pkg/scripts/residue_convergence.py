"""Boundary residue at shrinking radii, with Richardson extrapolation."""
from dataclasses import dataclass

import numpy as np

from _config import parse
from willmore4.fixtures import quadratic_graph
from willmore4.geometry import ball
from willmore4.inversion import FLAT_RESIDUE, convergence_slope, residue_integral, richardson


@dataclass
class Config:
    seed: int = 0
    scale: float = 0.3
    codim: int = 2
    radii: tuple = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
    angular: int = 24


def main(cfg):
    rng = np.random.default_rng(cfg.seed)
    P = rng.normal(size=(4, 4, cfg.codim))
    P = P + P.transpose(1, 0, 2)
    patch = quadratic_graph(cfg.scale * P / np.linalg.norm(P), domain=ball(1.0))
    vals = [residue_integral(patch, r, cfg.angular) for r in cfg.radii]
    print("r,value,value_plus_16pi2")
    for r, v in zip(cfg.radii, vals):
        print(f"{r:g},{v:.15g},{v - FLAT_RESIDUE:.6e}")
    est, order, err = richardson(cfg.radii[-3:], vals[-3:])
    print(f"# richardson: {est:.15g} (order {order:.3f}, rel err {abs(est / FLAT_RESIDUE - 1):.2e})")
    print(f"# slope of the error: {convergence_slope(cfg.radii, [v - FLAT_RESIDUE for v in vals]):.3f}")


if __name__ == "__main__":
    main(parse(Config))
