"""Pairing achieved by the rotation search on random traceless tuples."""
import time
from dataclasses import dataclass

import numpy as np

from _config import parse
from willmore4.rotation import build_A, random_orthogonal, search_S, traceless_part


@dataclass
class Config:
    ks: tuple = (1, 2, 5)
    pairs: int = 100
    restarts: int = 1
    draws: int = 1000
    seed: int = 0


def main(cfg):
    rng = np.random.default_rng(cfg.seed)
    print("k,min_normalised_pairing,median,T_beaten,seconds")
    for k in cfg.ks:
        t = time.perf_counter()
        vals, beaten = [], 0
        for _ in range(cfg.pairs):
            P, R = (traceless_part(np.moveaxis(x + x.transpose(1, 0, 2), -1, 0))
                    for x in rng.normal(size=(2, 4, 4, k)))
            res = search_S(P, R, cfg.restarts, int(rng.integers(1 << 31)))
            vals.append(res.pairing / (np.linalg.norm(P) * np.linalg.norm(R)))
            A = build_A(res.S, P, R)
            beaten += int(np.einsum("nij,ij->n", random_orthogonal(k, rng, cfg.draws), A).max() > res.pairing + 1e-12)
        print(f"{k},{min(vals):.4f},{np.median(vals):.4f},{beaten},{time.perf_counter() - t:.1f}")


if __name__ == "__main__":
    main(parse(Config))
