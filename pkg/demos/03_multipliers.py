"""The radial multiplier and its distributional calculus.

The estimates are driven by a piecewise radial weight phi whose
derivative jumps in slope at a scale R: phi' grows linearly inside,
saturates outside. Its bilaplacian is a measure with a smooth part, a
sphere layer at R, and (in 3D) a point mass at the origin. This script
prints the profile and checks the distributional pairing numerically.
"""

import math

import numpy as np

from morcam.multipliers import make_phi, make_varphi, sphere_area

n, R, M = 3, 1.0, 0.5
mult = make_phi(n, R, M)

print("phi' profile (n=%d, R=%.1f, M=%.1f):" % (n, R, M))
for r in (0.25, 0.5, 0.99, 1.01, 2.0, 8.0):
    print("  r=%5.2f  phi'=%.4f  phi''=%.4f  lap=%.4f"
          % (r, mult.dphi(r), mult.d2phi(r), mult.lap_phi(r)))
print("bounds: M <= phi' <= M + 1/2, continuous at R with value M + (n-1)/(2n)")

print("bilaplacian atoms:")
print("  origin mass  %.4f  (= -8 pi M in 3D)" % mult.origin_atom.mass)
print("  sphere layer %.4f  (density at |x| = R)" % mult.sphere_atom.density)

# Pair the bilaplacian measure with a radial test function two ways:
# through the atoms, and through int lap(phi) * lap(psi). The gap decays
# at second order in the radial step.
a, b = 1.0, 0.8


def pairing_gap(h):
    omega = sphere_area(n, 1.0)
    r = np.arange(h / 2, 40.0, h)
    psi = np.exp(-a * (r - b) ** 2)
    dpsi = -2 * a * (r - b) * psi
    d2psi = (-2 * a + 4 * a * a * (r - b) ** 2) * psi
    w = omega * r ** (n - 1) * h
    rhs = float(np.sum(mult.lap_phi(r) * (d2psi + (n - 1) * dpsi / r) * w))
    lhs = float(np.sum(mult.bilap_smooth(r) * psi * w))
    lhs += mult.origin_atom.mass * math.exp(-a * b ** 2)
    lhs += mult.sphere_atom.pair_radial(math.exp(-a * (R - b) ** 2), n)
    return abs(lhs - rhs)


g1, g2 = pairing_gap(R / 200), pairing_gap(R / 400)
print("pairing gap: %.2e at h=R/200, %.2e at h=R/400 (factor %.2f, second order)"
      % (g1, g2, g1 / g2))

w = make_varphi(3, R, 0.1)
print("symmetric weight varphi: %.3f inside, %.3f at r=2, layer density %.3f"
      % (w.value(0.5), w.value(2.0), w.sphere_atom.density))
