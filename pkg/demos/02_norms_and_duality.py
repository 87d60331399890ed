"""Morrey-Campanato norms, the dyadic dual norm, and their duality.

The a priori estimates trade a local-mass norm |||g||| (sup over radii
of averaged shell mass) against a dyadic shell norm N(f) on the datum;
the pairing inequality |int f conj(g)| <= |||g||| N(f) is what makes the
right-hand side of the estimate finite for physically reasonable data.
"""

import numpy as np

from morcam.grids import RadialGrid, ScalarField
from morcam.norms import duality_gap, dyadic_dual, morrey_campanato

rng = np.random.default_rng(1)
grid = RadialGrid(3, 8.0, 0.25)


def random_smooth(seed):
    r = np.random.default_rng(seed)
    vals = np.zeros(grid.shape, complex)
    for _ in range(3):
        c = r.uniform(-2, 2, 3)
        w = r.uniform(0.5, 1.5)
        amp = r.standard_normal() + 1j * r.standard_normal()
        vals += amp * np.exp(-np.sum((grid.points - c) ** 2, axis=-1) / w ** 2)
    return ScalarField(grid, vals)


u = random_smooth(10)
mc, rstar = morrey_campanato(u)
nf, tail = dyadic_dual(u)
print("a random smooth field:")
print("  |||u||| = %.4f  (maximizing radius %.2f)" % (mc, rstar))
print("  N(u)    = %.4f  (truncation tail %.1e)" % (nf, tail))

print("duality check on 10 random pairs:")
worst = 0.0
for k in range(10):
    f, g = random_smooth(2 * k), random_smooth(2 * k + 1)
    lhs, rhs = duality_gap(f, g)
    worst = max(worst, lhs / rhs)
    print("  |int f conj(g)| = %8.4f  <=  |||g||| N(f) = %8.4f   (quotient %.3f)"
          % (lhs, rhs, lhs / rhs))
print("worst quotient: %.4f (always <= 1)" % worst)
