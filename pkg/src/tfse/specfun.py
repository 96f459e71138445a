"""Mittag-Leffler evaluation on the rays sigma*(+-i)**nu.

The one-parameter Mittag-Leffler function E_nu generalizes the exponential.
For the complex arguments that arise from Caputo-order evolution it splits
into a unit-frequency oscillation divided by nu and a monotone decay kernel

    E_nu(sigma * (+-i)**nu * t**nu)
        = exp(+-i sigma**(1/nu) t) / nu - F(rho, t),   rho = sigma*(+-i)**nu,

where F is a semi-infinite branch-cut integral.  This module evaluates the
power series, the decay kernel, the decomposition and the two-initial-condition
solution for orders in (1, 2].

Branch conventions (fixed throughout the package): i**nu = exp(i*pi*nu/2),
(-i)**nu = exp(-i*pi*nu/2), and sigma**(1/nu) is the positive real root.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from .errors import (
    DenominatorSingularity,
    InvalidOrder,
    NonConvergence,
    QuadratureFailure,
)

DEFAULT_TOL = 1e-10
SERIES_TERM_CAP = 200

# Angular margin (radians) around the positive real axis / branch cut inside
# which kernel quadrature and pole bookkeeping refuse to proceed.  Translates
# to rejecting orders within roughly 0.015 of 4/3.
AXIS_MARGIN = 0.05


class Regime(enum.Enum):
    SUB_UNIT = "sub_unit"      # 0 < nu <= 1
    SUPER_UNIT = "super_unit"  # 1 < nu <= 2


class Sign(enum.Enum):
    """Which of the two rays sigma*(+-i)**nu the argument lies on."""

    PLUS_I = +1
    MINUS_I = -1


@dataclass(frozen=True)
class FractionalOrder:
    """Validated derivative order nu with its regime."""

    nu: float

    def __post_init__(self):
        nu = self.nu
        if not (isinstance(nu, (int, float)) and math.isfinite(nu)):
            raise InvalidOrder(f"order must be a finite real, got {nu!r}")
        if not 0.0 < nu <= 2.0:
            raise InvalidOrder(f"order must lie in (0, 2], got {nu}")

    @property
    def regime(self) -> Regime:
        return Regime.SUB_UNIT if self.nu <= 1.0 else Regime.SUPER_UNIT

    def i_pow(self, sign: Sign = Sign.PLUS_I) -> complex:
        """(+-i)**nu on the principal branch."""
        return np.exp(sign.value * 1j * math.pi * self.nu / 2.0)


@dataclass(frozen=True)
class DecayKernelSpec:
    """Parameters (rho, nu) of the decay kernel integral."""

    rho: complex
    order: FractionalOrder

    def __post_init__(self):
        if not (math.isfinite(self.rho.real if isinstance(self.rho, complex)
                              else self.rho)
                and math.isfinite(self.rho.imag if isinstance(self.rho, complex)
                                  else 0.0)):
            raise ValueError(f"rho must be finite, got {self.rho!r}")


@dataclass(frozen=True)
class MlDecomposition:
    """Oscillatory term, decay term and their difference."""

    oscillatory: complex
    decay: complex
    total: complex


def ml_series(z: complex, order: FractionalOrder, tol: float = DEFAULT_TOL,
              with_bound: bool = False):
    """Evaluate E_nu(z) by its power series sum_n z**n / Gamma(nu*n + 1).

    Truncates once the term magnitude drops below tol times the running sum
    magnitude (two consecutive terms, to ride out parity effects).  Raises
    NonConvergence at the term cap; callers should switch to the
    decomposition path in that case.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    nu = order.nu
    z = complex(z)
    if z == 0:
        return (1.0 + 0j, 0.0) if with_bound else 1.0 + 0j

    logz = np.log(z)
    total = 0.0 + 0j
    below = 0
    term = 1.0 + 0j
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(SERIES_TERM_CAP):
            total += term
            nxt = np.exp((n + 1) * logz - gammaln(nu * (n + 1) + 1.0))
            if not (np.isfinite(total.real) and np.isfinite(total.imag)
                    and np.isfinite(abs(nxt))):
                break
            if abs(nxt) <= tol * max(abs(total), 1e-300):
                below += 1
                if below >= 2:
                    return (total + nxt, abs(nxt)) if with_bound \
                        else total + nxt
            else:
                below = 0
            term = nxt
    raise NonConvergence(
        f"series for E_{nu}(z) with |z|={abs(z):.3g} did not meet "
        f"tol={tol:g} within {SERIES_TERM_CAP} terms")


def _denominator_roots(rho: complex, nu: float) -> tuple[complex, complex]:
    # Roots of w**2 - 2*rho*cos(nu*pi)*w + rho**2 in the substituted variable.
    return rho * np.exp(1j * math.pi * nu), rho * np.exp(-1j * math.pi * nu)


def _check_roots_off_axis(rho: complex, nu: float, margin: float) -> None:
    for w in _denominator_roots(rho, nu):
        if abs(w) == 0.0:
            continue
        if w.real > 0 and abs(w.imag) < margin * abs(w):
            raise DenominatorSingularity(
                f"kernel denominator root {w:.6g} lies within {margin:.3g} rad "
                f"of the positive real axis (nu={nu}, rho={rho:.6g})")


def _axis_crossings(rho: complex, nu: float) -> int:
    # Number of denominator roots whose phase rho*exp(+-i*nu*pi) has wound
    # past the positive real axis.  Nonzero only for |arg rho| + nu*pi >= 2*pi,
    # i.e. orders beyond 4/3 on the rays sigma*(+-i)**nu.
    phi = abs(np.angle(complex(rho)))
    return 1 if phi + nu * math.pi >= 2.0 * math.pi else 0


def _quad_complex(func, upper, points, epsabs):
    pts = sorted({p for p in points if 0.0 < p < upper})
    val = 0.0 + 0j
    err = 0.0
    for part in (np.real, np.imag):
        res = quad(lambda w: part(func(w)), 0.0, upper,
                   points=pts or None, limit=250,
                   epsabs=epsabs, epsrel=1e-13, full_output=1)
        val += complex(res[0]) * (1.0 if part is np.real else 1j)
        err += res[1]
        if len(res) > 3 and res[1] > 10.0 * epsabs:
            raise QuadratureFailure(res[3])
    return val, err


def f_nu(spec: DecayKernelSpec, t: float, tol: float = DEFAULT_TOL,
         axis_margin: float = AXIS_MARGIN) -> complex:
    """Decay kernel F(rho, t): branch-cut integral of the ML decomposition.

    Defined as (rho*sin(nu*pi)/pi) * integral over r in (0, inf) of
    exp(-r*t) * r**(nu-1) / (r**(2 nu) - 2 rho cos(nu pi) r**nu + rho**2).
    Computed after the substitution w = r**nu, which removes the endpoint
    singularity; the integrand is then bounded at the origin.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if tol <= 0:
        raise ValueError("tol must be positive")
    rho = complex(spec.rho)
    nu = spec.order.nu
    if rho == 0:
        return 0.0 + 0j
    sin_nupi = math.sin(math.pi * nu)
    if abs(sin_nupi) < 1e-14:
        # Integer order: the branch cut carries no weight.
        return 0.0 + 0j
    _check_roots_off_axis(rho, nu, axis_margin)

    if t == 0.0:
        # Closed form.  On the principal sheet this is (1-nu)/nu; each
        # denominator root that has wound past the integration ray shifts the
        # literal integral by 1/nu.
        return complex((1.0 - nu) / nu + _axis_crossings(rho, nu) / nu)

    c = math.cos(math.pi * nu)
    prefac = rho * sin_nupi / (nu * math.pi)

    def integrand(w):
        return math.exp(-w ** (1.0 / nu) * t) / (w * w - 2.0 * rho * c * w
                                                 + rho * rho)

    def tail_integrand(u):
        # u = 1/w maps [W, inf) to (0, 1/W]; keeps the range finite at any t.
        if u <= 0.0:
            return 0.0
        expo = u ** (-1.0 / nu) * t
        if expo > 700.0:
            return 0.0
        return math.exp(-expo) / (1.0 - 2.0 * rho * c * u
                                  + rho * rho * u * u)

    split = max(10.0 * abs(rho), 1.0)
    epsabs = min(tol / (2.0 * max(abs(prefac), 1e-12)), 1e-8)
    val, err = _quad_complex(integrand, split, [abs(rho)], epsabs)
    tail, terr = _quad_complex(tail_integrand, 1.0 / split, [], epsabs)
    if abs(prefac) * (err + terr) > 50.0 * tol:
        raise QuadratureFailure(
            f"decay kernel quadrature error {abs(prefac) * (err + terr):.3g} "
            f"exceeds tol={tol:g}")
    return prefac * (val + tail)


def f_nu_time_derivative(spec: DecayKernelSpec, t: float,
                         tol: float = DEFAULT_TOL,
                         axis_margin: float = AXIS_MARGIN) -> complex:
    """d/dt of the decay kernel, by differentiating under the integral.

    The differentiation multiplies the integrand by -r; without the
    exponential factor the integral diverges, so t must be positive.
    """
    from .errors import SingularTime

    if t <= 0:
        raise SingularTime("kernel time derivative is undefined at t = 0")
    rho = complex(spec.rho)
    nu = spec.order.nu
    if rho == 0 or abs(math.sin(math.pi * nu)) < 1e-14:
        return 0.0 + 0j
    _check_roots_off_axis(rho, nu, axis_margin)

    c = math.cos(math.pi * nu)
    prefac = -rho * math.sin(math.pi * nu) / (nu * math.pi)

    def integrand(w):
        r = w ** (1.0 / nu)
        return r * math.exp(-r * t) / (w * w - 2.0 * rho * c * w + rho * rho)

    def tail_integrand(u):
        if u <= 0.0:
            return 0.0
        r = u ** (-1.0 / nu)
        if r * t > 700.0:
            return 0.0
        return r * math.exp(-r * t) / (1.0 - 2.0 * rho * c * u
                                       + rho * rho * u * u)

    split = max(10.0 * abs(rho), 1.0)
    epsabs = min(tol / (2.0 * max(abs(prefac), 1e-12)), 1e-8)
    val, _err = _quad_complex(integrand, split, [abs(rho)], epsabs)
    tail, _terr = _quad_complex(tail_integrand, 1.0 / split, [], epsabs)
    return prefac * (val + tail)


def _poles(sigma: float, order: FractionalOrder, sign: Sign,
           margin: float = AXIS_MARGIN) -> list[complex]:
    """Roots of s**nu = sigma*(+-i)**nu on the principal sheet |arg s| < pi."""
    nu = order.nu
    root = sigma ** (1.0 / nu)
    poles = [root * np.exp(sign.value * 1j * math.pi / 2.0)]
    # A second root enters the sheet for orders beyond 4/3.
    arg2 = sign.value * (math.pi / 2.0 - 2.0 * math.pi / nu)
    if abs(abs(arg2) - math.pi) < margin:
        raise DenominatorSingularity(
            f"secondary pole at arg {arg2:.4f} sits on the branch cut "
            f"(nu={nu})")
    if abs(arg2) < math.pi:
        poles.append(root * np.exp(1j * arg2))
    return poles


def ml_complex_decomposed(sigma: float, sign: Sign, order: FractionalOrder,
                          t: float, tol: float = DEFAULT_TOL) -> MlDecomposition:
    """E_nu(sigma*(+-i)**nu * t**nu) as oscillation minus decay.

    Requires an order in (0, 1].  sigma = 0 collapses the pole onto the
    branch point, so that case bypasses the decomposition and returns the
    series value E_nu(0) = 1.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if order.regime is not Regime.SUB_UNIT:
        raise InvalidOrder("decomposition requires an order in (0, 1]")
    if sigma == 0.0:
        one = ml_series(0.0, order, tol)
        return MlDecomposition(oscillatory=one, decay=0.0 + 0j, total=one)

    nu = order.nu
    osc = np.exp(sign.value * 1j * sigma ** (1.0 / nu) * t) / nu
    rho = sigma * order.i_pow(sign)
    decay = f_nu(DecayKernelSpec(rho, order), t, tol)
    return MlDecomposition(oscillatory=complex(osc), decay=decay,
                           total=complex(osc) - decay)


def _two_ic_coefficients(sigma: float, order: FractionalOrder, t: float,
                         tol: float = DEFAULT_TOL,
                         axis_margin: float = AXIS_MARGIN
                         ) -> tuple[complex, complex]:
    """Coefficients multiplying the two initial values for orders in (1, 2].

    Derived from the inverse Laplace transform of
    (s**(nu-1)*a0 + s**(nu-2)*a1) / (s**nu - sigma*i**nu):
    residues at every pole on the principal sheet plus the branch-cut
    integral, with the a1 branch-cut integrand carrying r**(nu-2).
    """
    nu = order.nu
    rho = sigma * order.i_pow(Sign.PLUS_I)
    poles = _poles(sigma, order, Sign.PLUS_I, axis_margin)

    osc0 = sum(np.exp(s * t) for s in poles) / nu
    osc1 = sum(np.exp(s * t) / s for s in poles) / nu

    sin_nupi = math.sin(math.pi * nu)
    dec0 = f_nu(DecayKernelSpec(rho, order), t, tol, axis_margin)
    if abs(sin_nupi) < 1e-14:
        dec1 = 0.0 + 0j
    else:
        # Branch-cut piece of the a1 term, after u = r**(nu-1):
        # the integrand is bounded at the origin and decays algebraically.
        c = math.cos(math.pi * nu)
        p = nu / (nu - 1.0)

        def integrand(u):
            r = u ** (1.0 / (nu - 1.0))
            return math.exp(-r * t) / (u ** (2 * p) - 2.0 * rho * c * u ** p
                                       + rho * rho)

        prefac = -rho * sin_nupi / ((nu - 1.0) * math.pi)
        u_rho = abs(rho) ** ((nu - 1.0) / nu)
        if t > 0:
            upper = max((math.log(100.0 / tol) / t) ** (nu - 1.0),
                        10.0 * u_rho, 1.0)
        else:
            # Algebraic tail only: u**(-2*p) beyond the cutoff.
            upper = max((1.0 / tol) ** (1.0 / (2.0 * p - 1.0)),
                        10.0 * u_rho, 1.0)
        epsabs = min(tol / (2.0 * max(abs(prefac), 1e-12)), 1e-8)
        val, _ = _quad_complex(integrand, upper, [u_rho], epsabs)
        if t == 0.0:
            tail_res = quad(lambda u: integrand(u).real, upper, np.inf,
                            limit=100, epsabs=epsabs)
            tail_ims = quad(lambda u: integrand(u).imag, upper, np.inf,
                            limit=100, epsabs=epsabs)
            val += tail_res[0] + 1j * tail_ims[0]
        dec1 = prefac * val

    return complex(osc0) - dec0, complex(osc1) - dec1


def ml_two_ic(sigma: float, order: FractionalOrder, a0: complex, a1: complex,
              t: float, tol: float = DEFAULT_TOL) -> complex:
    """Solution of the order-nu Caputo problem with two initial values.

    Solves D**nu A = sigma * i**nu * A with A(0) = a0 and A'(0) = a1 for
    orders in (1, 2].  The exponent sign e^{+i sigma^{1/nu} t} follows the
    residue at the principal pole and is confirmed by the Caputo-residual
    test in the suite; see validate_two_ic_branch for the t = 0 identities.
    """
    if order.regime is not Regime.SUPER_UNIT:
        raise InvalidOrder("two-initial-condition solution needs nu in (1, 2]")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if a0 == 0 and a1 == 0:
        return 0.0 + 0j
    if sigma == 0.0:
        # D**nu annihilates affine functions for nu > 1.
        return complex(a0) + complex(a1) * t
    c0, c1 = _two_ic_coefficients(sigma, order, t, tol)
    return complex(a0) * c0 + complex(a1) * c1


def validate_two_ic_branch(sigma: float, order: FractionalOrder,
                           tol: float = 1e-8) -> None:
    """Assert the t = 0 identities A(0) = a0, coefficient of a1 -> 0.

    Guards the branch conventions before they are trusted for evolution.
    """
    c0, c1 = _two_ic_coefficients(sigma, order, 0.0)
    if abs(c0 - 1.0) > tol or abs(c1) > tol:
        raise AssertionError(
            f"two-IC branch check failed at t=0: a0 coefficient {c0:.3e}, "
            f"a1 coefficient {c1:.3e} (sigma={sigma}, nu={order.nu})")
