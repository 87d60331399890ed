"""Scaled radial multiplier families and the symmetric radial weight.

The multiplier phi_R is piecewise smooth with an explicit first and
second radial derivative and Laplacian; its bilaplacian is a genuine
distribution, stored as a smooth two-piece density plus point/surface
atoms.  Atoms are kept as first-class data (location + mass or surface
density) and are never smeared onto a grid here; pairing them with
fields is the verifier's job.

Note on the origin atom in three dimensions: the inner Laplacian is
1/R + 2M/r, whose distributional Laplacian carries the point mass
-8*pi*M at the origin (Delta(1/r) = -4*pi*delta in 3D); the
distributional-consistency tests pin this value down numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError

__all__ = ["Multiplier", "SymmetricWeight", "make_phi", "make_varphi", "hessian_split"]


@dataclass(frozen=True)
class SphereAtom:
    """Surface-delta component: density * delta_{|x| = radius}."""

    radius: float
    density: float

    def pair_radial(self, psi_at_radius: float, n: int) -> float:
        """Pairing with a radial test function: density * area(S_R) * psi(R)."""
        return self.density * sphere_area(n, self.radius) * psi_at_radius


@dataclass(frozen=True)
class PointAtom:
    """Point mass at the origin: mass * delta_0."""

    mass: float


def sphere_area(n: int, R: float) -> float:
    """Surface area of the sphere |x| = R in R^n."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2) * R ** (n - 1)


@dataclass(frozen=True)
class Multiplier:
    """Radial multiplier: phi', phi'', Delta phi as functions of r, plus
    the smooth part and atoms of the distributional bilaplacian."""

    n: int
    R: float
    M: float
    dphi: Callable = field(repr=False)          # phi'(r)
    d2phi: Callable = field(repr=False)         # phi''(r)
    lap_phi: Callable = field(repr=False)       # Delta phi (r)
    bilap_smooth: Callable = field(repr=False)  # smooth density of Delta^2 phi
    origin_atom: PointAtom | None = None
    sphere_atom: SphereAtom | None = None

    def atoms(self):
        out = []
        if self.origin_atom is not None:
            out.append(self.origin_atom)
        if self.sphere_atom is not None:
            out.append(self.sphere_atom)
        return out


@dataclass(frozen=True)
class SymmetricWeight:
    """Zeroth-order radial weight: beta/R inside, beta/r outside, with
    the smooth part and sphere atom of its distributional Laplacian."""

    n: int
    R: float
    beta: float
    value: Callable = field(repr=False)       # varphi(r)
    lap_smooth: Callable = field(repr=False)  # smooth density of Delta varphi
    sphere_atom: SphereAtom = None

    def sandwich_constants(self, r_lo: float, r_hi: float, R_lo: float | None = None,
                           R_hi: float | None = None, samples: int = 2048):
        """Report (C0, C) with C0 <x>^-1 <= varphi_R <= C <x>^-1 for r in
        [r_lo, r_hi] and scale R in [R_lo, R_hi] (defaults: this R only).

        A single pair valid for all R > 0 does not exist at fixed beta, so
        the bracket is explicit.
        """
        if R_lo is None:
            R_lo = R_hi = self.R
        r = np.linspace(r_lo, r_hi, samples)
        bracket = np.linspace(R_lo, R_hi, 16)
        lo, hi = np.inf, 0.0
        for R in bracket:
            v = np.where(r <= R, self.beta / R, self.beta / r)
            ratio = v * np.sqrt(1 + r ** 2)
            lo = min(lo, float(ratio.min()))
            hi = max(hi, float(ratio.max()))
        return lo, hi


def make_phi(n: int, R: float, M: float) -> Multiplier:
    """Build the scaled radial multiplier.

    Inside r <= R: phi' = M + (n-1)/(2n) * r/R; outside:
    phi' = M + 1/2 - R^(n-1)/(2n r^(n-1)).  For n = 3 these reduce to
    M + r/(3R) and M + 1/2 - R^2/(6 r^2).  The bilaplacian has surface
    atom -(n-1)/(2 R^2) on |x| = R, the two-piece smooth density
    -M(n-1)(n-3)/r^3 inside and -(M + 1/2)(n-1)(n-3)/r^3 outside
    (identically zero for n = 3), and for n = 3 the origin point mass
    -8*pi*M.
    """
    if R <= 0:
        raise ParameterError(f"scale R must be positive, got {R}")
    if M < 0:
        raise ParameterError(f"M must be >= 0, got {M}")
    if n < 3:
        raise ParameterError(f"dimension must be >= 3, got {n}")
    c = (n - 1) / (2 * n)

    def dphi(r):
        r = np.asarray(r, float)
        return np.where(r <= R, M + c * r / R, M + 0.5 - (R / np.maximum(r, 1e-300)) ** (n - 1) / (2 * n))

    def d2phi(r):
        r = np.asarray(r, float)
        return np.where(r <= R, c / R, c * R ** (n - 1) / np.maximum(r, 1e-300) ** n)

    def lap_phi(r):
        r = np.asarray(r, float)
        rs = np.maximum(r, 1e-300)
        return np.where(
            r <= R,
            (n - 1) / (2 * R) + M * (n - 1) / rs,
            (2 * M + 1) * (n - 1) / (2 * rs),
        )

    def bilap_smooth(r):
        r = np.asarray(r, float)
        if n == 3:
            return np.zeros_like(r)
        rs = np.maximum(r, 1e-300)
        return np.where(
            r <= R,
            -M * (n - 1) * (n - 3) / rs ** 3,
            -(M + 0.5) * (n - 1) * (n - 3) / rs ** 3,
        )

    origin = PointAtom(mass=-8 * math.pi * M) if n == 3 else None
    sphere = SphereAtom(radius=R, density=-(n - 1) / (2 * R ** 2))
    return Multiplier(n=n, R=R, M=M, dphi=dphi, d2phi=d2phi, lap_phi=lap_phi,
                      bilap_smooth=bilap_smooth, origin_atom=origin,
                      sphere_atom=sphere)


def make_varphi(n: int, R: float, beta: float) -> SymmetricWeight:
    """Build the symmetric radial weight beta/max(r, R).

    beta must lie in (0, (n-1)/(2n)); its Laplacian is the sphere atom
    -beta/R^2 on |x| = R plus the smooth tail -beta(n-3)/r^3 outside
    (zero for n = 3).
    """
    if R <= 0:
        raise ParameterError(f"scale R must be positive, got {R}")
    beta_max = (n - 1) / (2 * n)
    if not (0 < beta < beta_max):
        raise ParameterError(
            f"beta={beta} outside (0, {beta_max}) for n={n}"
        )

    def value(r):
        r = np.asarray(r, float)
        return beta / np.maximum(r, R)

    def lap_smooth(r):
        r = np.asarray(r, float)
        if n == 3:
            return np.zeros_like(r)
        rs = np.maximum(r, 1e-300)
        return np.where(r > R, -beta * (n - 3) / rs ** 3, 0.0)

    return SymmetricWeight(n=n, R=R, beta=beta, value=value, lap_smooth=lap_smooth,
                           sphere_atom=SphereAtom(radius=R, density=-beta / R ** 2))


def hessian_split(mult: Multiplier, x: np.ndarray, g: np.ndarray):
    """Quadratic form g^H D^2 phi(x) g via the radial/tangential split:
    phi''(|x|)|g_r|^2 + phi'(|x|)/|x| |g_tau|^2.

    Vectorized over leading axes; g may be complex.
    """
    x = np.asarray(x, float)
    g = np.asarray(g, complex)
    r = np.sqrt(np.sum(x ** 2, axis=-1))
    if np.any(r < 1e-14):
        raise ParameterError("hessian_split is undefined at x = 0")
    xhat = x / r[..., None]
    gr = np.einsum("...i,...i->...", g, xhat)
    g2 = np.sum(np.abs(g) ** 2, axis=-1)
    gr2 = np.abs(gr) ** 2
    gtau2 = np.maximum(g2 - gr2, 0.0)
    return mult.d2phi(r) * gr2 + mult.dphi(r) / r * gtau2
