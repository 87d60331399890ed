"""Electromagnetic potentials and derived field quantities.

A potential pair bundles a magnetic potential A : R^n -> R^n and an
electric potential V : R^n -> R.  All callables are vectorized: they
accept point arrays of shape (..., n) and return shape (..., n) for A,
(...) for V.  The magnetic field matrix is the antisymmetrized Jacobian
B = DA - (DA)^t, and its trapping component is the tangential vector
B_tau(x) = (x/|x|) B(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import AccuracyError, DomainError, ParameterError

__all__ = [
    "PotentialPair",
    "magnetic_matrix",
    "trapping_component",
    "radial_derivative_parts",
    "biot_savart",
    "BallQuad",
    "example_field",
    "make_potential_pair",
    "BUILTIN_POTENTIALS",
]

_ORIGIN_TOL = 1e-14


@dataclass
class PotentialPair:
    """Magnetic potential A and electric potential V with optional
    analytic derivatives.

    A_jac, when supplied, returns the Jacobian J[..., i, j] = dA^i/dx_j.
    dV_r returns the radial derivative grad V . x/|x|.  domain_check may
    raise DomainError for points where the potentials are singular.
    """

    n: int
    A: Optional[Callable] = None
    V: Optional[Callable] = None
    A_jac: Optional[Callable] = None
    dV_r: Optional[Callable] = None
    domain_check: Optional[Callable] = None
    name: str = "custom"

    def __post_init__(self):
        if self.n < 3:
            raise ParameterError(f"dimension must be >= 3, got {self.n}")

    def eval_A(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, float)
        if self.A is None:
            return np.zeros_like(x)
        return np.asarray(self.A(x), float)

    def eval_V(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, float)
        if self.V is None:
            return np.zeros(x.shape[:-1])
        return np.asarray(self.V(x), float)


def _check_points(pp: PotentialPair, x: np.ndarray, require_nonzero=False) -> np.ndarray:
    x = np.asarray(x, float)
    if x.shape[-1] != pp.n:
        raise DomainError(f"points have dimension {x.shape[-1]}, potential has {pp.n}")
    if require_nonzero:
        r = np.sqrt(np.sum(x ** 2, axis=-1))
        if np.any(r < _ORIGIN_TOL):
            raise DomainError("evaluation at x = 0 is not defined")
    if pp.domain_check is not None:
        pp.domain_check(x)
    return x


def jacobian_fd(A: Callable, x: np.ndarray, step: float | None = None) -> np.ndarray:
    """Central-difference Jacobian J[..., i, j] = dA^i/dx_j.

    Default step is 1e-5 * max(1, |x|) per point.
    """
    x = np.asarray(x, float)
    n = x.shape[-1]
    r = np.sqrt(np.sum(x ** 2, axis=-1))
    if step is None:
        h = 1e-5 * np.maximum(1.0, r)[..., None]
    else:
        h = np.full(x.shape[:-1], float(step))[..., None]
    cols = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        xp = x + h * e
        xm = x - h * e
        cols.append((np.asarray(A(xp), float) - np.asarray(A(xm), float)) / (2 * h))
    # cols[j][..., i] = dA^i/dx_j
    return np.stack(cols, axis=-1)


def magnetic_matrix(pp: PotentialPair, x: np.ndarray, step: float | None = None) -> np.ndarray:
    """Field matrix B(x) = DA - (DA)^t, shape (..., n, n).

    Antisymmetric by construction.  Uses the analytic Jacobian when
    available, central differences otherwise.
    """
    x = _check_points(pp, x)
    if pp.A is None:
        return np.zeros(x.shape + (pp.n,))
    if pp.A_jac is not None and step is None:
        J = np.asarray(pp.A_jac(x), float)
    else:
        J = jacobian_fd(pp.eval_A, x, step=step)
    return J - np.swapaxes(J, -1, -2)


def trapping_component(pp: PotentialPair, x: np.ndarray, step: float | None = None) -> np.ndarray:
    """Trapping (tangential) component B_tau(x) = (x/|x|) B(x).

    In three dimensions this equals (x/|x|) x curl A.  B_tau . x = 0 by
    antisymmetry of B.
    """
    x = _check_points(pp, x, require_nonzero=True)
    B = magnetic_matrix(pp, x, step=step)
    r = np.sqrt(np.sum(x ** 2, axis=-1))[..., None]
    xhat = x / r
    # (x/|x|) B, row vector times matrix: result_j = sum_i xhat_i B_ij
    return np.einsum("...i,...ij->...j", xhat, B)


def radial_derivative_parts(pp: PotentialPair, x: np.ndarray, step: float = 1e-6):
    """Split V and its radial derivative into positive/negative parts.

    Returns (dV_r, dV_r_plus, dV_r_minus, V_plus, V_minus) with
    f = f_plus - f_minus and f_plus * f_minus = 0 pointwise.
    """
    x = _check_points(pp, x, require_nonzero=True)
    V = pp.eval_V(x)
    if pp.dV_r is not None:
        dvr = np.asarray(pp.dV_r(x), float)
    elif pp.V is None:
        dvr = np.zeros(x.shape[:-1])
    else:
        r = np.sqrt(np.sum(x ** 2, axis=-1))[..., None]
        xhat = x / r
        dvr = (pp.eval_V(x + step * xhat) - pp.eval_V(x - step * xhat)) / (2 * step)
    return (
        dvr,
        np.maximum(dvr, 0.0),
        np.maximum(-dvr, 0.0),
        np.maximum(V, 0.0),
        np.maximum(-V, 0.0),
    )


# ---------------------------------------------------------------------------
# Biot-Savart quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BallQuad:
    """Quadrature spec for the Biot-Savart integral: tensor-product
    midpoint rule on the ball |y| <= R, singularity excised in a ball of
    radius 2 * cell diameter around the evaluation point; refinement
    doubles the cell count per axis until two levels agree to rtol."""

    R: float = 6.0
    base_cells: int = 48
    rtol: float = 1e-3
    max_levels: int = 3


def _biot_savart_level(B_fn, x, R, m):
    h = 2 * R / m
    c = -R + (np.arange(m) + 0.5) * h
    Y = np.stack(np.meshgrid(c, c, c, indexing="ij"), axis=-1).reshape(-1, 3)
    r2 = np.sum(Y ** 2, axis=1)
    mask = r2 <= R * R
    d = Y - x
    dist2 = np.sum(d ** 2, axis=1)
    r_cut = 2.0 * h * math.sqrt(3.0)
    mask &= dist2 >= r_cut * r_cut
    Y = Y[mask]
    d = d[mask]
    dist = np.sqrt(dist2[mask])
    Bv = np.asarray(B_fn(Y), float)
    kern = -d / dist[:, None] ** 3  # (x - y)/|x - y|^3
    integrand = np.cross(kern, Bv)
    return integrand.sum(axis=0) * h ** 3 / (4 * math.pi)


def biot_savart(B_fn: Callable, x, quad: BallQuad = BallQuad()) -> np.ndarray:
    """Vector potential A(x) = (1/4 pi) int (x-y)/|x-y|^3 x B(y) dy.

    B_fn must be vectorized over point arrays (..., 3) -> (..., 3) and
    decay fast enough that the truncated ball captures the integral.
    Raises AccuracyError when two successive refinements disagree by more
    than quad.rtol (relative to max(1, |A|)).
    """
    x = np.asarray(x, float)
    if x.shape != (3,):
        raise DomainError("biot_savart evaluates at a single 3D point")
    prev = None
    m = quad.base_cells
    for _ in range(quad.max_levels):
        cur = _biot_savart_level(B_fn, x, quad.R, m)
        if prev is not None:
            scale = max(1.0, float(np.linalg.norm(cur)))
            if np.linalg.norm(cur - prev) <= quad.rtol * scale:
                return cur
        prev = cur
        m *= 2
    raise AccuracyError(
        f"Biot-Savart quadrature did not converge to rtol={quad.rtol} "
        f"within {quad.max_levels} refinement levels"
    )


# ---------------------------------------------------------------------------
# Built-in potentials
# ---------------------------------------------------------------------------


def _ex13_A(x):
    x = np.asarray(x, float)
    r2 = np.sum(x ** 2, axis=-1)[..., None]
    out = np.empty_like(x)
    out[..., 0] = (-x[..., 1] / r2[..., 0])
    out[..., 1] = (x[..., 0] / r2[..., 0])
    out[..., 2] = 0.0
    return out


def _ex13_jac(x):
    x = np.asarray(x, float)
    X, Y, Z = x[..., 0], x[..., 1], x[..., 2]
    r2 = X * X + Y * Y + Z * Z
    r4 = r2 * r2
    J = np.zeros(x.shape + (3,))
    # A1 = -y/r^2
    J[..., 0, 0] = 2 * X * Y / r4
    J[..., 0, 1] = -1.0 / r2 + 2 * Y * Y / r4
    J[..., 0, 2] = 2 * Y * Z / r4
    # A2 = x/r^2
    J[..., 1, 0] = 1.0 / r2 - 2 * X * X / r4
    J[..., 1, 1] = -2 * X * Y / r4
    J[..., 1, 2] = -2 * X * Z / r4
    return J


def _ex13_check(x):
    r2 = np.sum(np.asarray(x, float) ** 2, axis=-1)
    if np.any(r2 < _ORIGIN_TOL ** 2):
        raise DomainError("ex13 potential is singular at the origin")


def _ex14_A(x):
    x = np.asarray(x, float)
    rho2 = x[..., 0] ** 2 + x[..., 1] ** 2
    out = np.empty_like(x)
    out[..., 0] = -x[..., 1] / rho2
    out[..., 1] = x[..., 0] / rho2
    out[..., 2] = 0.0
    return out


def _ex14_jac(x):
    x = np.asarray(x, float)
    X, Y = x[..., 0], x[..., 1]
    rho2 = X * X + Y * Y
    rho4 = rho2 * rho2
    J = np.zeros(x.shape + (3,))
    J[..., 0, 0] = 2 * X * Y / rho4
    J[..., 0, 1] = -1.0 / rho2 + 2 * Y * Y / rho4
    J[..., 1, 0] = 1.0 / rho2 - 2 * X * X / rho4
    J[..., 1, 1] = -2 * X * Y / rho4
    return J


def _ex14_check(x):
    x = np.asarray(x, float)
    rho2 = x[..., 0] ** 2 + x[..., 1] ** 2
    if np.any(rho2 < 1e-24):
        raise DomainError("this potential is singular on the z-axis")


def example_field(kind: str, *, h=None, omega=None, alpha=None,
                  quad: BallQuad | None = None) -> PotentialPair:
    """Closed-form non-trapping magnetic potentials.

    kind "ex13": A = (-y, x, 0)/(x^2+y^2+z^2), divergence-free with
    B_tau = 0.  kind "ex14_singular": A = (-y, x, 0)/(x^2+y^2), a pure
    gauge away from the z-axis (its field matrix is zero there; the field
    carries a line singularity that is not differentiated numerically).
    kind "ex14_family": A is evaluated by Biot-Savart quadrature of the
    axially modulated field B(y) = h(y/|y| . omega) |y|^(-alpha) y/|y|.
    """
    if kind == "ex13":
        return PotentialPair(3, A=_ex13_A, A_jac=_ex13_jac,
                             domain_check=_ex13_check, name="ex13")
    if kind == "ex14_singular":
        return PotentialPair(3, A=_ex14_A, A_jac=_ex14_jac,
                             domain_check=_ex14_check, name="ex14")
    if kind == "ex14_family":
        if h is None or omega is None or alpha is None:
            raise ParameterError("ex14_family needs h, omega, alpha")
        if not (1.0 < alpha < 4.0):
            raise ParameterError(
                f"alpha={alpha} outside (1, 4): the defining integral diverges"
            )
        omega = np.asarray(omega, float)
        omega = omega / np.linalg.norm(omega)
        q = quad or BallQuad()

        def B_dir(Y):
            Y = np.asarray(Y, float)
            r = np.sqrt(np.sum(Y ** 2, axis=-1))
            r = np.where(r < 1e-300, 1e-300, r)
            yhat = Y / r[..., None]
            g = np.asarray(h(yhat @ omega), float) * r ** (-alpha)
            return g[..., None] * yhat

        def A_fn(X):
            X = np.asarray(X, float)
            flat = X.reshape(-1, 3)
            out = np.array([biot_savart(B_dir, p, q) for p in flat])
            return out.reshape(X.shape)

        return PotentialPair(3, A=A_fn, name="ex14_family")
    raise ParameterError(f"unknown example field kind: {kind}")


# --- electric built-ins -----------------------------------------------------


def _radial_V(fV, fdV):
    def V(x):
        r = np.sqrt(np.sum(np.asarray(x, float) ** 2, axis=-1))
        return fV(r)

    def dVr(x):
        r = np.sqrt(np.sum(np.asarray(x, float) ** 2, axis=-1))
        return fdV(r)

    return V, dVr


def _make_coulomb(c=-1.0):
    return _radial_V(lambda r: c / r, lambda r: -c / r ** 2)


def _make_inverse_square(c=1.0):
    return _radial_V(lambda r: c / r ** 2, lambda r: -2 * c / r ** 3)


def _make_gaussian(amplitude=-1.0, width=1.0):
    return _radial_V(
        lambda r: amplitude * np.exp(-(r / width) ** 2),
        lambda r: amplitude * np.exp(-(r / width) ** 2) * (-2 * r / width ** 2),
    )


def _make_exp_screened(amplitude=1.0):
    # V = a exp(-r)/<r>, <r> = sqrt(1 + r^2)
    def fV(r):
        return amplitude * np.exp(-r) / np.sqrt(1 + r ** 2)

    def fdV(r):
        br = np.sqrt(1 + r ** 2)
        return amplitude * np.exp(-r) * (-1.0 / br - r / br ** 3)

    return _radial_V(fV, fdV)


BUILTIN_POTENTIALS = {
    "zero": {"kind": "both", "params": {}, "doc": "A = 0 or V = 0"},
    "ex13": {"kind": "A", "params": {},
             "doc": "A = (-y, x, 0)/(x^2+y^2+z^2); non-trapping, div-free"},
    "ex14": {"kind": "A", "params": {},
             "doc": "A = (-y, x, 0)/(x^2+y^2); field matrix zero off the z-axis"},
    "coulomb": {"kind": "V", "params": {"c": -1.0}, "doc": "V = c/|x|"},
    "inverse_square": {"kind": "V", "params": {"c": 1.0}, "doc": "V = c/|x|^2"},
    "gaussian": {"kind": "V", "params": {"amplitude": -1.0, "width": 1.0},
                 "doc": "V = amplitude * exp(-|x|^2/width^2)"},
    "exp_screened": {"kind": "V", "params": {"amplitude": 1.0},
                     "doc": "V = amplitude * exp(-|x|)/<x>"},
}


def make_potential_pair(n: int, A_spec=None, V_spec=None) -> PotentialPair:
    """Assemble a PotentialPair from named built-ins.

    A_spec/V_spec are dicts {"name": ..., **params} or None.
    """

    def norm(spec):
        if spec is None:
            return "zero", {}
        if isinstance(spec, str):
            return spec, {}
        spec = dict(spec)
        return spec.pop("name"), spec

    a_name, a_par = norm(A_spec)
    v_name, v_par = norm(V_spec)

    A = A_jac = domain_check = None
    if a_name == "zero":
        pass
    elif a_name in ("ex13", "ex14"):
        if n != 3:
            raise ParameterError(f"{a_name} is a 3D potential, got n={n}")
        pp = example_field("ex13" if a_name == "ex13" else "ex14_singular")
        A, A_jac, domain_check = pp.A, pp.A_jac, pp.domain_check
    else:
        raise ParameterError(f"unknown magnetic built-in: {a_name}")

    V = dV_r = None
    if v_name == "zero":
        pass
    elif v_name == "coulomb":
        V, dV_r = _make_coulomb(**v_par)
    elif v_name == "inverse_square":
        V, dV_r = _make_inverse_square(**v_par)
    elif v_name == "gaussian":
        V, dV_r = _make_gaussian(**v_par)
    elif v_name == "exp_screened":
        V, dV_r = _make_exp_screened(**v_par)
    else:
        raise ParameterError(f"unknown electric built-in: {v_name}")

    return PotentialPair(n, A=A, V=V, A_jac=A_jac, dV_r=dV_r,
                         domain_check=domain_check,
                         name=f"A:{a_name}|V:{v_name}")
