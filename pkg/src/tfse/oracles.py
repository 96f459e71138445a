"""Independent cross-checks for the Mittag-Leffler evaluators.

Nothing here calls the main evaluators; shared code is limited to complex
arithmetic.  The centerpiece inverts the transform s**(nu-1)/(s**nu -
sigma*i**nu) numerically along a parabolic contour that wraps the negative
real axis: the pole sits strictly to the right of the path, so its residue
is added explicitly and the quadrature only sees the branch-cut part.  The
module also carries a from-scratch complementary error function (series plus
continued fraction) and an arbitrary-precision power-series reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import ContourClash, QuadratureFailure
from .specfun import FractionalOrder


@dataclass(frozen=True)
class InversionSpec:
    """Transform parameters and contour controls for one inversion."""

    sigma: float
    order: FractionalOrder
    n_nodes: int = 64
    scale: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.n_nodes < 16:
            raise ValueError("need at least 16 contour nodes")
        if self.scale <= 0:
            raise ValueError("contour scale must be positive")


def residue_term(sigma: float, order: FractionalOrder, t: float) -> complex:
    """Residue contribution exp(i sigma**(1/nu) t) / nu at the principal pole."""
    nu = order.nu
    return np.exp(1j * sigma ** (1.0 / nu) * t) / nu


def _contour_integral(spec: InversionSpec, t: float, n: int,
                      pole: complex, mu: float) -> complex:
    # Parabola s(w) = mu*(i*w + 1)**2; apex at s = mu > 0, arms wrapping the
    # cut with Im s = 2*mu*w never zero away from the apex.
    trunc = math.sqrt(1.0 + 45.0 / max(mu * t, 1e-12))
    w = np.linspace(-trunc, trunc, n)
    s = mu * (1j * w + 1.0) ** 2
    ds = 2j * mu * (1j * w + 1.0)
    if np.min(np.abs(s - pole)) < 0.05 * abs(pole):
        raise ContourClash(
            f"pole {pole:.4g} within safety margin of the contour")
    nu = spec.order.nu
    g = s ** (nu - 1.0) / (s ** nu - pole ** nu)
    vals = np.exp(s * t) * g * ds
    h = w[1] - w[0]
    return complex(np.sum(vals) * h / (2j * math.pi))


def laplace_invert_ml(spec: InversionSpec, t: float,
                      target: float = 1e-7) -> complex:
    """A(t)/A0 for D**nu A = sigma i**nu A by direct contour quadrature.

    Deforms the Bromwich path past the principal pole (residue picked up
    explicitly) onto a parabola hugging the branch cut, then doubles the
    trapezoid node count until two successive results agree to `target`.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    nu = spec.order.nu
    root = spec.sigma ** (1.0 / nu)
    pole = root * 1j
    # Keep the contour apex below root/2 so the pole stays to its right.
    mu = spec.scale * min(0.4 * root, max(4.0 / t, 0.4 * root * 1e-3))
    if mu <= 0:
        mu = 0.4 * root
    n = spec.n_nodes
    prev = _contour_integral(spec, t, n, pole, mu)
    for _ in range(12):
        n *= 2
        cur = _contour_integral(spec, t, n, pole, mu)
        if abs(cur - prev) < target:
            return residue_term(spec.sigma, spec.order, t) + cur
        prev = cur
    raise QuadratureFailure(
        f"contour quadrature did not stabilize to {target:g} "
        f"(sigma={spec.sigma}, nu={nu}, t={t})")


def branch_cut_term(spec: InversionSpec, t: float,
                    target: float = 1e-7) -> complex:
    """The inversion minus its residue: the pure branch-cut contribution."""
    return laplace_invert_ml(spec, t, target) \
        - residue_term(spec.sigma, spec.order, t)


_SQRT_PI = math.sqrt(math.pi)


def erfc_closed_form(z: float) -> float:
    """Complementary error function for |z| <= 6, to about 1e-12.

    Maclaurin series of erf below |z| = 2.5, Lentz-evaluated continued
    fraction above; built from bare arithmetic so it can arbitrate
    library-backed special functions.
    """
    if abs(z) > 6.0:
        raise ValueError("erfc oracle valid for |z| <= 6")
    if z < 0.0:
        return 2.0 - erfc_closed_form(-z)
    if z == 0.0:
        return 1.0
    if z <= 2.5:
        # erf(z) = 2/sqrt(pi) * sum (-1)^n z^(2n+1) / (n! (2n+1))
        term = z
        total = z
        for n in range(1, 200):
            term *= -z * z / n
            contrib = term / (2 * n + 1)
            total += contrib
            if abs(contrib) < 1e-17 * abs(total):
                break
        return 1.0 - 2.0 / _SQRT_PI * total
    # Continued fraction erfc(z) = exp(-z^2)/sqrt(pi) *
    #   1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), evaluated backward.
    f = 0.0
    for k in range(120, 0, -1):
        f = (k / 2.0) / (z + f)
    return math.exp(-z * z) / _SQRT_PI / (z + f)


def ml_series_reference(sigma: float, sign: int, order: FractionalOrder,
                        t: float, dps: int = 50) -> complex:
    """E_nu(sigma*(+-i)**nu * t**nu) by arbitrary-precision summation.

    `sign` is +1 or -1 for the two rays.  Works where float64 summation
    cancels catastrophically; used to arbitrate the decomposition at large
    arguments.
    """
    with mpmath.workdps(dps):
        nu = mpmath.mpf(order.nu)
        z = mpmath.mpc(sigma) * mpmath.exp(sign * 1j * mpmath.pi * nu / 2) \
            * mpmath.mpf(t) ** nu
        total = mpmath.mpc(0)
        term = mpmath.mpc(1)
        zn = mpmath.mpc(1)
        for n in range(1, 2001):
            total += term
            zn *= z
            term = zn / mpmath.gamma(nu * n + 1)
            if abs(term) < mpmath.mpf(10) ** (-dps) * max(abs(total), 1):
                total += term
                break
        return complex(total)
