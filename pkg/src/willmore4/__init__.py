"""Fourth-order Willmore energies of 4-dimensional graph patches and the numerics of gluing two of them.

Modules: jets (Taylor jets), harmonics (spherical harmonics on S^3),
geometry (fundamental forms and energy densities), inversion (energy
identity under inversion), triharmonic (annulus interpolant), bilinear
(Gram matrices and the energy ledger), rotation (alignment of traceless
forms), pipeline (end-to-end connected-sum margin report).
"""
__version__ = "0.1.0"
