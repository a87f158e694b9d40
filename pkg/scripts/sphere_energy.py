"""Energy of the round S^4 against quadrature order."""
import math
import time
from dataclasses import dataclass

from _config import parse
from willmore4.fixtures import round_sphere_atlas
from willmore4.geometry import QuadSpec, integrate_atlas


@dataclass
class Config:
    orders: tuple = (8, 12, 16, 24, 32)
    radius: float = 1.0


def main(cfg):
    atlas = round_sphere_atlas(radius=cfg.radius)
    print("order,E_GR,rel_err,seconds")
    for q in cfg.orders:
        t = time.perf_counter()
        E = integrate_atlas(atlas, QuadSpec.order(q)).E_GR
        print(f"{q},{E:.15g},{abs(E / (8 * math.pi**2) - 1):.3e},{time.perf_counter() - t:.2f}")


if __name__ == "__main__":
    main(parse(Config))
