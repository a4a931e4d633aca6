"""
Minimising an integral functional pointwise
===========================================

Loads integrand specs from ``specs/`` and compares the smallest cost over
a family of cadlag selections with the integral of the pointwise infimum.
"""

import os

import numpy as np

from cadselect.integral import integrand_grid, verify_interchange
from cadselect.io import parse_integrand
from cadselect.selection import projection_selection

here = os.path.join(os.path.dirname(os.path.abspath(__file__)), "specs")

for name in ("linear_sliding.yaml", "tracking_step_atom.yaml"):
    with open(os.path.join(here, name)) as fh:
        h, mu = parse_integrand(fh.read(), here)
    grid = integrand_grid(h, mu, 1000)
    S = h.domain
    # a few nearest-point selections as candidates
    family = [projection_selection(S, np.full(S.dimension, x), grid) for x in (-1.0, 0.5, 3.0)]
    rep = verify_interchange(h, mu, family, grid)
    print(f"{name}: lhs={rep.lhs:.6f} rhs={rep.rhs:.6f} gap={rep.gap:.2e} passed={rep.passed}")
