"""Smallness constants of the electromagnetic field and the
admissibility verdicts gating the a priori estimates.

In 3D the condition is min over M > 0 of
g(M) = (M + 1/2)^2/M C1^2 + 2(M + 1/2) C2 < 1; the minimizer has the
closed form M* = C1 / (2 sqrt(C1^2 + 2 C2)) with minimum
C1 sqrt(C1^2 + 2 C2) + C1^2 + C2 (validated against a dense log-grid
search in the test suite before being used as the fast path).  For
n >= 4 the condition is C1^2 + 2 C2 < (n-1)(n-3), the optimum sitting in
the limit M -> infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .fields import PotentialPair, radial_derivative_parts, trapping_component
from .norms import RadialQuad, mixed_radial_norm, weighted_sup_norm

__all__ = [
    "AdmissibilityReport",
    "compute_constants",
    "condition_value_3d",
    "check_condition_3d",
    "check_condition_nd",
    "dense_grid_minimum",
    "admissibility_report",
]


@dataclass
class AdmissibilityReport:
    n: int
    C1: float
    C2: float
    C3: float = math.nan
    value: float = math.inf
    threshold: float = 1.0
    optimal_M: float | None = None
    admissible: bool = False
    notes: list = field(default_factory=list)

    @property
    def margin(self) -> float:
        return self.threshold - self.value

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "C1": self.C1,
            "C2": self.C2,
            "C3": self.C3,
            "value": self.value,
            "threshold": self.threshold,
            "margin": self.margin,
            "optimal_M": self.optimal_M,
            "admissible": self.admissible,
            "notes": list(self.notes),
        }


def _btau_mag(pp: PotentialPair):
    # Cancellation noise in B_tau scales with the full field magnitude;
    # left in, it mimics a divergent integrand for non-trapping fields.
    def w(X):
        from .fields import magnetic_matrix
        B = magnetic_matrix(pp, X)
        r = np.asarray(X, float)
        xhat = r / np.maximum(np.linalg.norm(r, axis=-1, keepdims=True), 1e-300)
        bt = np.einsum("...i,...ij->...j", xhat, B)
        mag = np.sqrt(np.sum(bt ** 2, axis=-1))
        scale = np.sqrt(np.sum(B ** 2, axis=(-2, -1)))
        return np.where(mag > 1e-9 * scale, mag, 0.0)
    return w


def _drv_plus(pp: PotentialPair):
    def w(X):
        return radial_derivative_parts(pp, X)[1]
    return w


def _v_plus_screened(pp: PotentialPair):
    def w(X):
        vplus = radial_derivative_parts(pp, X)[3]
        r2 = np.sum(np.asarray(X, float) ** 2, axis=-1)
        return vplus / np.sqrt(1 + r2)
    return w


def compute_constants(pp: PotentialPair, n: int | None = None,
                      quad: RadialQuad = RadialQuad()):
    """(C1, C2, C3) for the given potential pair.

    n = 3: mixed radial norms of |B_tau|, (d_r V)_+, <x>^-1 V_+ with
    exponents (3/2, p=2), (2, p=1), (2, p=1).  n >= 4: weighted sup norms
    with exponents 2, 3, 3.  +inf propagates as a value.
    """
    n = pp.n if n is None else n
    if n != pp.n:
        raise ParameterError("requested dimension differs from the potential's")
    if n == 3:
        C1 = 0.0 if pp.A is None else mixed_radial_norm(_btau_mag(pp), 2, 1.5, n=3, quad=quad)
        C2 = 0.0 if pp.V is None else mixed_radial_norm(_drv_plus(pp), 1, 2.0, n=3, quad=quad)
        C3 = 0.0 if pp.V is None else mixed_radial_norm(_v_plus_screened(pp), 1, 2.0, n=3, quad=quad)
    else:
        C1 = 0.0 if pp.A is None else weighted_sup_norm(_btau_mag(pp), 2.0, n, quad=quad)
        C2 = 0.0 if pp.V is None else weighted_sup_norm(_drv_plus(pp), 3.0, n, quad=quad)
        C3 = 0.0 if pp.V is None else weighted_sup_norm(_v_plus_screened(pp), 3.0, n, quad=quad)
    return C1, C2, C3


def condition_value_3d(M, C1: float, C2: float):
    """g(M) = (M + 1/2)^2 / M * C1^2 + 2 (M + 1/2) * C2."""
    M = np.asarray(M, float)
    return (M + 0.5) ** 2 / M * C1 ** 2 + 2 * (M + 0.5) * C2


def dense_grid_minimum(C1: float, C2: float, lo: float = 1e-6, hi: float = 1e6,
                       points: int = 100_000):
    """Minimize g(M) by a dense log-spaced scan plus one local refinement
    pass (independent of the closed form; used as the test oracle)."""
    grid = np.logspace(math.log10(lo), math.log10(hi), points)
    vals = condition_value_3d(grid, C1, C2)
    k = int(np.argmin(vals))
    a = grid[max(k - 2, 0)]
    b = grid[min(k + 2, points - 1)]
    fine = np.linspace(a, b, 40_000)
    fvals = condition_value_3d(fine, C1, C2)
    j = int(np.argmin(fvals))
    return float(fvals[j]), float(fine[j])


def check_condition_3d(C1: float, C2: float, C3: float = math.nan) -> AdmissibilityReport:
    """Optimize the free parameter M in the 3D smallness condition and
    report the verdict.  M = 0 is the limiting optimizer when C1 = 0 (the
    condition then reads C2 < 1); for C2 = 0 it reads C1^2 < 1/2."""
    if C1 < 0 or C2 < 0:
        raise ParameterError("C1, C2 must be nonnegative")
    rep = AdmissibilityReport(n=3, C1=C1, C2=C2, C3=C3, threshold=1.0)
    if not (math.isfinite(C1) and math.isfinite(C2)):
        rep.value = math.inf
        rep.admissible = False
        rep.notes.append("a constant is infinite: not admissible")
        return rep
    if C1 == 0.0:
        rep.value = C2
        rep.optimal_M = 0.0
        rep.notes.append("C1 = 0: optimum at the limit M -> 0")
    else:
        s = math.sqrt(C1 ** 2 + 2 * C2)
        rep.optimal_M = C1 / (2 * s)
        rep.value = C1 * s + C1 ** 2 + C2
    finite_c3 = math.isfinite(C3) if not math.isnan(C3) else True
    rep.admissible = rep.value < rep.threshold and finite_c3
    if not finite_c3:
        rep.notes.append("C3 infinite: not admissible (its size is otherwise irrelevant)")
    return rep


def check_condition_nd(C1: float, C2: float, n: int, C3: float = math.nan) -> AdmissibilityReport:
    """Higher-dimensional verdict C1^2 + 2 C2 < (n-1)(n-3)."""
    if n < 4:
        raise ParameterError(
            "check_condition_nd needs n >= 4 (the 3D threshold degenerates)")
    if C1 < 0 or C2 < 0:
        raise ParameterError("C1, C2 must be nonnegative")
    rep = AdmissibilityReport(n=n, C1=C1, C2=C2, C3=C3,
                              threshold=float((n - 1) * (n - 3)))
    rep.value = C1 ** 2 + 2 * C2
    rep.optimal_M = math.inf
    rep.notes.append("optimal-M limit is M -> infinity")
    finite_c3 = math.isfinite(C3) if not math.isnan(C3) else True
    rep.admissible = math.isfinite(rep.value) and rep.value < rep.threshold and finite_c3
    return rep


def admissibility_report(pp: PotentialPair, n: int | None = None,
                         quad: RadialQuad = RadialQuad()) -> AdmissibilityReport:
    """Constants plus verdict in one step."""
    n = pp.n if n is None else n
    C1, C2, C3 = compute_constants(pp, n, quad=quad)
    if n == 3:
        return check_condition_3d(C1, C2, C3)
    return check_condition_nd(C1, C2, n, C3)
