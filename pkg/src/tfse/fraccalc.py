"""Caputo and Riemann-Liouville operators on uniformly sampled signals.

Discretizations: product-trapezoidal convolution for the fractional integral
and the L1 scheme (difference-quotient inner derivative, exact kernel panel
integration) for the Caputo derivative.  The L1 scheme natively matches the
integral-after-derivative structure of the Caputo definition and kills
constants algebraically; documented accuracy O(h**(2-nu)) for smooth signals.

Array-level helpers (`rl_integral_values`, `caputo_l1_values`) operate along
axis 0 and accept extra trailing axes, so field histories can be transformed
per spatial node in one call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma

from .errors import InvalidOrder
from .specfun import FractionalOrder, Regime

STARTUP_NODES = 5  # excluded from residual norms; 1/t**(1-nu) blows up at 0


@dataclass(frozen=True)
class SampledSignal:
    """Complex samples on a uniform time grid starting at t = 0."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.ndim != 1 or times.size < 3:
            raise ValueError("need at least 3 time nodes")
        if values.shape[0] != times.size:
            raise ValueError("times/values length mismatch")
        steps = np.diff(times)
        h = steps[0]
        if h <= 0 or np.any(np.abs(steps - h) > 1e-12 * max(abs(h), 1.0)):
            raise ValueError("time grid must be uniform and increasing")
        if abs(times[0]) > 1e-12:
            raise ValueError("grid must start at t = 0")

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])


@dataclass(frozen=True)
class OperatorResidual:
    """Norms of a nodewise residual, startup window excluded."""

    max_abs: float
    l2: float
    per_node: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (np.isfinite(self.max_abs) and np.isfinite(self.l2)):
            raise ValueError("residual norms must be finite")


def _convolve_time_axis(values, kernel):
    kernel = np.asarray(kernel)
    if values.ndim > 1:
        kernel = kernel.reshape(kernel.shape + (1,) * (values.ndim - 1))
    return fftconvolve(values, kernel, axes=0)


def rl_integral_values(values: np.ndarray, h: float, mu: float) -> np.ndarray:
    """Fractional integral of order mu in (0, 1] by product trapezoid.

    The kernel moment over each panel is integrated exactly against the
    linear interpolant of the samples.
    """
    if not 0.0 < mu <= 1.0:
        raise InvalidOrder("integral order must lie in (0, 1]")
    values = np.asarray(values)
    n = values.shape[0]
    m = np.arange(n, dtype=float)
    # Interior convolution weights plus a first-node correction.
    w = np.empty(n)
    w[0] = 1.0
    if n > 1:
        mm = m[1:]
        w[1:] = (mm + 1.0) ** (mu + 1.0) - 2.0 * mm ** (mu + 1.0) \
            + (mm - 1.0) ** (mu + 1.0)
    a0 = np.zeros(n)
    a0[1:] = (m[1:] - 1.0) ** (mu + 1.0) - (m[1:] - 1.0 - mu) * m[1:] ** mu
    out = _convolve_time_axis(values, w)[:n]
    corr = a0 - w
    corr[0] = 0.0
    if values.ndim > 1:
        corr = corr.reshape((n,) + (1,) * (values.ndim - 1))
    out = out + corr * values[0]
    out[0] = 0.0 * values[0]
    return out * h ** mu / gamma(mu + 2.0)


def caputo_l1_values(values: np.ndarray, h: float, nu: float) -> np.ndarray:
    """Caputo derivative of order nu in [0, 1) by the L1 scheme.

    Order 0 returns the samples unchanged.  Exactly zero for constant input.
    """
    if nu == 0.0:
        return np.array(values, copy=True)
    if not 0.0 < nu < 1.0:
        raise InvalidOrder("L1 scheme needs an order in [0, 1)")
    values = np.asarray(values)
    n = values.shape[0]
    df = np.diff(values, axis=0)
    k = np.arange(n - 1, dtype=float)
    c = (k + 1.0) ** (1.0 - nu) - k ** (1.0 - nu)
    out = np.zeros_like(np.asarray(values, dtype=np.result_type(values, float)))
    out[1:] = _convolve_time_axis(df, c)[:n - 1]
    return out * h ** (-nu) / gamma(2.0 - nu)


def rl_integral(sig: SampledSignal, mu: float) -> SampledSignal:
    """Riemann-Liouville fractional integral of order mu in (0, 1]."""
    return SampledSignal(sig.times, rl_integral_values(sig.values, sig.step, mu))


def caputo_derivative(sig: SampledSignal, order: FractionalOrder) -> SampledSignal:
    """Caputo derivative for orders in (0, 1) via the L1 scheme."""
    if order.regime is not Regime.SUB_UNIT or order.nu == 1.0:
        raise InvalidOrder("caputo_derivative covers 0 < nu < 1")
    return SampledSignal(sig.times,
                         caputo_l1_values(sig.values, sig.step, order.nu))


def caputo_derivative_high(sig: SampledSignal,
                           order: FractionalOrder) -> SampledSignal:
    """Caputo derivative for orders in (1, 2].

    Uses the composition D**nu f = D**(nu-1) f' with the inner first
    derivative from centered differences; nu = 2 reduces to forward
    difference quotients of f'.
    """
    if order.regime is not Regime.SUPER_UNIT:
        raise InvalidOrder("caputo_derivative_high covers 1 < nu <= 2")
    h = sig.step
    fp = np.gradient(sig.values, h, axis=0, edge_order=2)
    mu = order.nu - 1.0
    if mu == 1.0:
        vals = np.gradient(fp, h, axis=0, edge_order=2)
    else:
        vals = caputo_l1_values(fp, h, mu)
    return SampledSignal(sig.times, vals)


def rl_derivative(sig: SampledSignal, order: FractionalOrder) -> SampledSignal:
    """Riemann-Liouville derivative: d/dt of the order-(1-nu) integral.

    Provided for the Caputo-vs-RL comparison; nonzero on constants.
    """
    if order.regime is not Regime.SUB_UNIT:
        raise InvalidOrder("rl_derivative covers 0 < nu <= 1")
    integ = rl_integral(sig, 1.0 - order.nu) if order.nu < 1.0 else sig
    vals = np.gradient(integ.values, sig.step, axis=0, edge_order=2)
    return SampledSignal(sig.times, vals)


def _residual(per_node: np.ndarray, h: float,
              startup: int) -> OperatorResidual:
    window = np.abs(per_node[startup:])
    return OperatorResidual(max_abs=float(window.max()),
                            l2=float(np.sqrt(h * np.sum(window ** 2))),
                            per_node=per_node[startup:])


def check_identity_seq11(sig: SampledSignal, order: FractionalOrder,
                         caputo_at_zero: complex | None = None,
                         startup: int = STARTUP_NODES) -> OperatorResidual:
    """Residual of the sub-unit composition identity.

    Checks D**(1-nu) D**nu y against y' - (D**nu y)(0) * t**(nu-1) / Gamma(nu).
    The limit (D**nu y)(0) vanishes for C1 signals.  For signals with a
    t**nu startup (Mittag-Leffler solutions) the continuum identity carries
    the singular memory term, but the composed L1 scheme reproduces plain
    y' directly: its O(1) startup error at the first nodes plays the role
    of the memory term after the second operator spreads it.  Leave
    `caputo_at_zero` at zero for discretized data; the override exists for
    comparing against the analytic form of the identity.
    """
    if order.regime is not Regime.SUB_UNIT or order.nu == 1.0:
        raise InvalidOrder("identity holds for 0 < nu < 1")
    nu = order.nu
    h = sig.step
    dnu = caputo_derivative(sig, order)
    lhs = caputo_l1_values(dnu.values, h, 1.0 - nu)
    yprime = np.gradient(sig.values, h, axis=0, edge_order=2)
    c0 = 0.0 if caputo_at_zero is None else caputo_at_zero
    t = sig.times
    memory = np.zeros_like(lhs)
    memory[1:] = c0 * t[1:] ** (nu - 1.0) / gamma(nu)
    per_node = lhs - (yprime - memory)
    return _residual(per_node, h, startup)


def check_identity_eq65(sig: SampledSignal, order: FractionalOrder,
                        startup: int = STARTUP_NODES) -> OperatorResidual:
    """Residual of the super-unit identity I**(nu-1) D**nu f = f' - f'(0)."""
    if order.regime is not Regime.SUPER_UNIT:
        raise InvalidOrder("identity holds for 1 < nu <= 2")
    h = sig.step
    dnu = caputo_derivative_high(sig, order)
    lhs = rl_integral_values(dnu.values, h, order.nu - 1.0)
    fp = np.gradient(sig.values, h, axis=0, edge_order=2)
    per_node = lhs - (fp - fp[0])
    return _residual(per_node, h, startup)
