"""Each leading term of the interpolation energy, isolated on a single coefficient."""
from dataclasses import dataclass

import numpy as np

from _config import parse
from willmore4.bilinear import interpolation_energy, lemma_terms
from willmore4.harmonics import FormCoefficients
from willmore4.triharmonic import solve_interpolant


@dataclass
class Config:
    gammas: tuple = (0.2, 0.1, 0.05, 0.02)


def main(cfg):
    z = FormCoefficients.zeros(1)
    u4, u9, u16 = (np.eye(n)[:, :1] for n in (4, 9, 16))
    single = {"r0": z.replace(r0=np.ones(1)), "p": z.replace(p=u9), "q1": z.replace(q1=u4),
              "s1": z.replace(s1=u4), "q3": z.replace(q3=u16), "r": z.replace(r=u9), "s3": z.replace(s3=u16)}
    cross = {"pr": ("p", "r"), "q1s1": ("q1", "s1"), "q3s3": ("q3", "s3")}
    names = ["r0", "p", "q1", "s1", "q3", *cross]
    print("gamma," + ",".join(names))
    for g in cfg.gammas:
        E = {k: float(interpolation_energy(solve_interpolant(c, g, 1.0, 1.0))) for k, c in single.items()}
        ratio = {k: E[k] / lemma_terms(single[k], g, 1.0, 1.0)[k] for k in names[:5]}
        for k, (a, b) in cross.items():
            c = single[a].replace(**{b: getattr(single[b], b)})
            both = float(interpolation_energy(solve_interpolant(c, g, 1.0, 1.0)))
            ratio[k] = (both - E[a] - E[b]) / lemma_terms(c, g, 1.0, 1.0)[k]
        print(f"{g:g}," + ",".join(f"{ratio[k]:.6f}" for k in names))


if __name__ == "__main__":
    main(parse(Config))
