"""Term-by-term evaluation of the multiplier identity on discrete
solutions, assembly of the a priori estimate, epsilon sweeps, and the
zero-resonance diagnostics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .admissibility import AdmissibilityReport, admissibility_report
from .errors import MorcamError, SolverError
from .fields import PotentialPair, radial_derivative_parts, trapping_component
from .grids import RadialGrid, ScalarField
from .multipliers import Multiplier, SymmetricWeight, make_phi, make_varphi
from .norms import NormReport, theorem_lhs, theorem_rhs
from .resolvent import (ResolventProblem, covariant_gradient, make_datum,
                        radial_tangential_split, solve)

__all__ = [
    "IdentityReport",
    "SweepReport",
    "identity_residual",
    "identity_scan",
    "manufactured_identity",
    "estimate_report",
    "epsilon_sweep",
    "resonance_functionals",
]


@dataclass
class IdentityReport:
    """Per-term values of the multiplier identity; lhs_total and
    rhs_total are plain sums of their listed terms."""

    lhs_terms: dict
    rhs_terms: dict
    h: float
    R: float

    @property
    def lhs_total(self) -> float:
        return sum(self.lhs_terms.values())

    @property
    def rhs_total(self) -> float:
        return sum(self.rhs_terms.values())

    @property
    def residual_abs(self) -> float:
        return abs(self.lhs_total - self.rhs_total)

    @property
    def residual_rel(self) -> float:
        scale = sum(abs(v) for v in self.lhs_terms.values()) \
            + sum(abs(v) for v in self.rhs_terms.values())
        return self.residual_abs / max(scale, 1e-300)

    def to_json(self) -> dict:
        return {
            "lhs_terms": {k: float(v) for k, v in self.lhs_terms.items()},
            "rhs_terms": {k: float(v) for k, v in self.rhs_terms.items()},
            "lhs_total": float(self.lhs_total),
            "rhs_total": float(self.rhs_total),
            "residual_abs": float(self.residual_abs),
            "residual_rel": float(self.residual_rel),
            "h": self.h,
            "R": self.R,
        }


def identity_residual(u: ScalarField, f: ScalarField, pp: PotentialPair,
                      lam: float, eps: float, mult: Multiplier,
                      weight: SymmetricWeight,
                      include_btau: bool = True) -> IdentityReport:
    """Evaluate both sides of the multiplier identity on (u, f).

    Smooth densities are paired by midpoint quadrature; the bilaplacian
    atoms pair with |u|^2 through origin interpolation and shell-averaged
    surface integrals.  eps carries the sign of the absorption.
    """
    if u.grid != f.grid:
        raise MorcamError("u and f must share a grid")
    grid = u.grid
    n, h, r = grid.n, grid.h, grid.radii
    u2 = u.abs2()

    g = covariant_gradient(u, pp)
    g_r, g_tau = radial_tangential_split(g, grid)
    g2 = np.sum(np.abs(g) ** 2, axis=-1)

    lhs = {}
    # Hessian quadratic form via the radial/tangential split
    lhs["hessian"] = float(grid.integrate(
        mult.d2phi(r) * np.abs(g_r) ** 2 + mult.dphi(r) / r * g_tau ** 2))
    lhs["weight_gradient"] = -float(grid.integrate(weight.value(r) * g2))

    # -(1/4 Delta^2 phi - 1/2 Delta varphi) paired with |u|^2
    bilap = float(grid.integrate(mult.bilap_smooth(r) * u2))
    if mult.origin_atom is not None:
        bilap += mult.origin_atom.mass * abs(grid.interpolate_origin(u.values)) ** 2
    if mult.sphere_atom is not None:
        bilap += mult.sphere_atom.density * grid.surface_integral(u2, mult.sphere_atom.radius)
    lapw = float(grid.integrate(weight.lap_smooth(r) * u2))
    lapw += weight.sphere_atom.density * grid.surface_integral(u2, weight.sphere_atom.radius)
    lhs["bilaplacian"] = -0.25 * bilap + 0.5 * lapw

    drv = radial_derivative_parts(pp, grid.points)[0]
    V = pp.eval_V(grid.points)
    lhs["potential"] = -float(grid.integrate(
        (0.5 * mult.dphi(r) * drv + weight.value(r) * V) * u2))

    if include_btau and pp.A is not None:
        btau = trapping_component(pp, grid.points)
        bdotg = np.einsum("...i,...i->...", btau, np.conj(g))
        lhs["trapping"] = float(grid.integrate(
            np.imag(mult.dphi(r) * u.values * bdotg)))
    else:
        lhs["trapping"] = 0.0

    lhs["energy_weight"] = lam * float(grid.integrate(weight.value(r) * u2))

    xhat = grid.points / r[..., None]
    grad_phi_dot = mult.dphi(r) * np.einsum("...i,...i->...", xhat, np.conj(g))
    rhs = {}
    # The commutator multiplier is (1/2)[H, phi]u = -(phi' xhat . grad_A u
    # + (1/2) Delta phi u); pairing f against it flips the sign of the
    # gradient and absorption terms relative to the weight term.
    rhs["datum_gradient"] = -float(grid.integrate(np.real(
        f.values * (grad_phi_dot + 0.5 * mult.lap_phi(r) * np.conj(u.values)))))
    rhs["datum_weight"] = float(grid.integrate(np.real(
        f.values * weight.value(r) * np.conj(u.values))))
    rhs["absorption"] = -eps * float(grid.integrate(np.imag(
        u.values * grad_phi_dot)))

    return IdentityReport(lhs_terms=lhs, rhs_terms=rhs, h=h, R=mult.R)


def identity_scan(u: ScalarField, f: ScalarField, pp: PotentialPair,
                  lam: float, eps: float, M: float = 1.0,
                  beta: float = 1e-3, R_list=None):
    """Evaluate the identity at several multiplier scales and return the
    worst-residual report (the identity holds for every R)."""
    grid = u.grid
    if R_list is None:
        R_list = [grid.L / 8, grid.L / 4, grid.L / 2]
    worst = None
    for R in R_list:
        mult = make_phi(grid.n, R, M)
        weight = make_varphi(grid.n, R, beta)
        rep = identity_residual(u, f, pp, lam, eps, mult, weight)
        if worst is None or rep.residual_rel > worst.residual_rel:
            worst = rep
    return worst


def manufactured_identity(pp: PotentialPair, grid: RadialGrid, u_fn,
                          lam: float, eps: float, M: float = 1.0,
                          beta: float = 1e-3, R_list=None):
    """Sample a prescribed smooth u, manufacture f = -H^h u + (lam+i eps)u
    with the discrete operator, and scan the identity."""
    from .resolvent import DiscreteOperator

    u = ScalarField.from_callable(grid, u_fn)
    op = DiscreteOperator(grid, pp, lam, eps)
    f = ScalarField(grid, -op.apply(u.values))
    return identity_scan(u, f, pp, lam, eps, M=M, beta=beta, R_list=R_list)


# ---------------------------------------------------------------------------
# Estimate assembly and sweeps
# ---------------------------------------------------------------------------


def _pick_delta(adm: AdmissibilityReport) -> float:
    """delta = min(margin/4, 0.1): any positive value below the
    positivity budget works; tying it to the margin keeps runs
    reproducible."""
    if adm.admissible and math.isfinite(adm.margin):
        return min(adm.margin / 4, 0.1)
    return 0.1


def estimate_report(u: ScalarField, f: ScalarField, pp: PotentialPair,
                    lam: float, eps: float, M: float | None = None,
                    delta: float | None = None,
                    adm: AdmissibilityReport | None = None):
    """(lhs NormReport, rhs NormReport, ratio) for the a priori estimate.

    Inadmissible configurations are still evaluated (with a warning
    note); such runs are diagnostic.
    """
    n = u.grid.n
    notes = []
    if adm is None and (M is None or delta is None):
        adm = admissibility_report(pp, n)
    if adm is not None and not adm.admissible:
        notes.append("configuration not admissible; estimate run is diagnostic")
    if M is None:
        if n == 3:
            M = adm.optimal_M if adm.optimal_M else 0.0
        else:
            M = 2.0  # stand-in for the M -> infinity optimum
    if delta is None:
        delta = _pick_delta(adm)
    lhs = theorem_lhs(u, pp, lam, M, delta)
    rhs = theorem_rhs(f, lam, eps)
    lhs.notes.extend(notes)
    if rhs.total > 0:
        ratio = lhs.total / rhs.total
    else:
        ratio = 0.0 if lhs.total == 0 else math.inf
    return lhs, rhs, ratio


@dataclass
class SweepReport:
    """(eps, lhs, rhs, ratio) rows sorted by decreasing eps, with the
    blow-up flag raised when the ratio grows faster than 2x per decade of
    eps over the whole sweep."""

    entries: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)

    def add(self, eps, lhs, rhs, ratio):
        self.entries.append({"eps": float(eps), "lhs": float(lhs),
                             "rhs": float(rhs), "ratio": float(ratio)})
        self.entries.sort(key=lambda e: -e["eps"])

    @property
    def ratios(self):
        return [e["ratio"] for e in self.entries]

    @property
    def max_ratio(self):
        return max(self.ratios) if self.entries else 0.0

    @property
    def min_ratio(self):
        return min(self.ratios) if self.entries else 0.0

    @property
    def blow_up(self) -> bool:
        if len(self.entries) < 2:
            return False
        first, last = self.entries[0], self.entries[-1]
        if first["ratio"] <= 0:
            return not math.isfinite(last["ratio"])
        decades = math.log10(first["eps"] / last["eps"])
        return last["ratio"] / first["ratio"] > 2.0 ** decades

    def to_json(self) -> dict:
        return {
            "entries": self.entries,
            "errors": {str(k): v for k, v in self.errors.items()},
            "max_ratio": self.max_ratio,
            "min_ratio": self.min_ratio,
            "blow_up": self.blow_up,
        }

    def to_csv(self) -> str:
        lines = ["eps,lhs,rhs,ratio"]
        for e in self.entries:
            lines.append(f"{e['eps']!r},{e['lhs']!r},{e['rhs']!r},{e['ratio']!r}")
        return "\n".join(lines) + "\n"


def epsilon_sweep(pp: PotentialPair, lam: float, f_spec, eps_list,
                  grid: RadialGrid, M: float | None = None,
                  delta: float | None = None, tol: float = 1e-10) -> SweepReport:
    """Solve the resolvent problem for each eps and collect estimate
    ratios.  Solver failures are recorded per entry and the sweep
    continues."""
    from .resolvent import epsilon_floor

    eps_list = list(eps_list)
    if any(e <= 0 for e in eps_list):
        raise MorcamError("eps values must be positive (sign handled separately)")
    floor = epsilon_floor(grid.L)
    for e in eps_list:
        if e < floor:
            warnings.warn(
                f"eps={e} below the truncation floor {floor:.3g} for L={grid.L}; "
                "box truncation error may dominate", stacklevel=2)
    f = f_spec if isinstance(f_spec, ScalarField) else make_datum(grid, f_spec)
    adm = admissibility_report(pp, grid.n)
    report = SweepReport()
    for eps in sorted(eps_list, reverse=True):
        try:
            prob = ResolventProblem(pp=pp, lam=lam, eps=eps, f=f)
            u = solve(prob, tol=tol)
            lhs, rhs, ratio = estimate_report(u, f, pp, lam, eps, M=M,
                                              delta=delta, adm=adm)
            report.add(eps, lhs.total, rhs.total, ratio)
        except SolverError as exc:
            report.errors[eps] = str(exc)
    return report


def resonance_functionals(u: ScalarField, pp: PotentialPair, R_list=None) -> dict:
    """Zero-resonance diagnostics: sup and largest-R value of
    (1/R) int_{|x|<=R} [|V| + <x>^-2] |u|^2, plus int |V| |u|^2."""
    grid = u.grid
    if R_list is None:
        R_list = [R for R in (2.0, 4.0, grid.L / 2, grid.L) if R > 1]
    if not R_list or min(R_list) <= 1 or max(R_list) > grid.L * math.sqrt(grid.n):
        raise MorcamError("R_list must lie in (1, sqrt(n) L]")
    r = grid.radii
    Vabs = np.abs(pp.eval_V(grid.points))
    dens = (Vabs + 1.0 / (1 + r ** 2)) * u.abs2()
    out_vals = {}
    for R in sorted(R_list):
        mass = float(np.sum(dens[r <= R]) * grid.cell_volume)
        out_vals[R] = mass / R
    largest = max(out_vals)
    return {
        "sup": max(out_vals.values()),
        "at_largest_R": out_vals[largest],
        "largest_R": largest,
        "per_R": out_vals,
        "V_mass": float(grid.integrate(Vabs * u.abs2())),
    }
