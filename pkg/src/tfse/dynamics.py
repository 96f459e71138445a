"""Closed-form evolution for the time-fractional Schrodinger equation.

Covers the free particle (spectral evolution plus inverse transform) and the
infinite potential well (separable modes), together with every diagnostic
built on top of them: total probability, probability current, the
non-conservation source, weighted energy averages, time-dependent energy
levels and the recast first-order-in-time residual.

Units are Planck-normalized throughout: T_p = L_p = hbar = 1, so the only
physical inputs are the mass and potential counts N_m, N_v and the order nu.
Transform convention: forward F(psi) = integral exp(-i lambda x) psi dx, the
inverse carries 1/(2 pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma

from . import fraccalc, specfun
from .errors import InvalidOrder, SingularTime
from .fraccalc import OperatorResidual, SampledSignal
from .specfun import FractionalOrder, Regime, Sign


@dataclass(frozen=True)
class RunConfig:
    """Order and Planck-normalized mass/potential counts for one run."""

    nu: FractionalOrder
    n_m: float
    n_v: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.n_m) and self.n_m > 0):
            raise ValueError("mass count n_m must be positive and finite")
        if not (math.isfinite(self.n_v) and self.n_v >= 0):
            raise ValueError("potential count n_v must be nonnegative")

    @property
    def alpha(self) -> float:
        """Potential coefficient of the recast equation (T_p = 1)."""
        return self.n_v

    @property
    def beta(self) -> float:
        """Kinetic coefficient of the recast equation (L_p = T_p = 1)."""
        return 1.0 / (2.0 * self.n_m)


@dataclass(frozen=True)
class SpectralPacket:
    """Fourier-space amplitudes on a symmetric uniform wavenumber grid.

    After evolution the oscillatory/decay split of the solution is kept
    per node in `amplitudes_s` / `amplitudes_d` (nodewise they sum to
    `amplitudes`).
    """

    wavenumbers: np.ndarray
    amplitudes: np.ndarray
    amplitudes_s: np.ndarray | None = None
    amplitudes_d: np.ndarray | None = None

    def __post_init__(self):
        lam = np.asarray(self.wavenumbers, dtype=float)
        amp = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "wavenumbers", lam)
        object.__setattr__(self, "amplitudes", amp)
        if lam.ndim != 1 or lam.size < 3 or amp.shape != lam.shape:
            raise ValueError("need matching 1-d wavenumber/amplitude arrays")
        steps = np.diff(lam)
        if np.any(np.abs(steps - steps[0]) > 1e-9 * abs(steps[0])):
            raise ValueError("wavenumber grid must be uniform")
        if abs(lam[0] + lam[-1]) > 1e-9 * max(abs(lam[-1]), 1.0):
            raise ValueError("wavenumber grid must be symmetric about 0")
        if not np.isfinite(np.sum(np.abs(amp) ** 2)):
            raise ValueError("amplitudes must have finite energy")

    @property
    def step(self) -> float:
        return float(self.wavenumbers[1] - self.wavenumbers[0])


@dataclass(frozen=True)
class GridField:
    """Complex wave function samples on a uniform spatial grid."""

    positions: np.ndarray
    values: np.ndarray
    domain: str = "line"          # "line" or "box"
    box_width: float | None = None

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "values", v)
        if x.ndim != 1 or x.size < 3 or v.shape != x.shape:
            raise ValueError("need matching 1-d position/value arrays")
        if self.domain not in ("line", "box"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.domain == "box":
            if not (self.box_width and self.box_width > 0):
                raise ValueError("box domain needs a positive width")
            scale = 1.0 + float(np.abs(v).max())
            if abs(v[0]) > 1e-12 * scale or abs(v[-1]) > 1e-12 * scale:
                raise ValueError("box field must vanish at both walls")

    @property
    def step(self) -> float:
        return float(self.positions[1] - self.positions[0])


@dataclass(frozen=True)
class WellMode:
    """Eigenpair of the infinite well of width a."""

    n: int
    a: float
    lambda_n: float
    omega_n: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("mode index must be >= 1")
        if self.a <= 0:
            raise ValueError("box width must be positive")


@dataclass(frozen=True)
class TimeSeries:
    """Labelled scalar samples on an increasing time grid."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", np.asarray(self.values))
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")


# ---------------------------------------------------------------------------
# free particle

def node_frequency(lam: float | np.ndarray, cfg: RunConfig):
    """Kinetic frequency omega(lambda) = lambda**2 / (2 N_m) per node."""
    return np.asarray(lam) ** 2 / (2.0 * cfg.n_m)


def gaussian_packet(wavenumbers: np.ndarray, center: float = 0.0,
                    width: float = 1.0) -> SpectralPacket:
    """Transform of a unit-norm Gaussian centered at `center` of width `width`."""
    lam = np.asarray(wavenumbers, dtype=float)
    amp = (4.0 * math.pi * width ** 2) ** 0.25 \
        * np.exp(-0.5 * width ** 2 * lam ** 2) * np.exp(-1j * lam * center)
    return SpectralPacket(lam, amp)


def free_spectrum_evolve(packet0: SpectralPacket, cfg: RunConfig,
                         t: float, tol: float = specfun.DEFAULT_TOL
                         ) -> SpectralPacket:
    """Evolve a spectral packet for orders in (0, 1].

    Each node is multiplied by the oscillation-minus-decay value at its own
    frequency; the two pieces are kept so the field split is available after
    the inverse transform.
    """
    if cfg.nu.regime is not Regime.SUB_UNIT:
        raise InvalidOrder("sub-unit evolution needs nu in (0, 1]")
    if t < 0:
        raise ValueError("t must be nonnegative")
    omegas = node_frequency(packet0.wavenumbers, cfg)
    osc = np.empty_like(packet0.amplitudes)
    dec = np.empty_like(packet0.amplitudes)
    for i, w in enumerate(omegas):
        d = specfun.ml_complex_decomposed(float(w), Sign.MINUS_I, cfg.nu,
                                          t, tol)
        osc[i] = d.oscillatory
        dec[i] = d.decay
    amp_s = packet0.amplitudes * osc
    amp_d = -packet0.amplitudes * dec
    return SpectralPacket(packet0.wavenumbers, amp_s + amp_d,
                          amplitudes_s=amp_s, amplitudes_d=amp_d)


def free_spectrum_high_order(packet0: SpectralPacket, packet1: SpectralPacket,
                             cfg: RunConfig, t: float,
                             tol: float = specfun.DEFAULT_TOL
                             ) -> SpectralPacket:
    """Evolve with two initial packets for orders in (1, 2]."""
    if cfg.nu.regime is not Regime.SUPER_UNIT:
        raise InvalidOrder("high-order evolution needs nu in (1, 2]")
    if not np.array_equal(packet0.wavenumbers, packet1.wavenumbers):
        raise ValueError("packets must share a wavenumber grid")
    omegas = node_frequency(packet0.wavenumbers, cfg)
    out = np.empty_like(packet0.amplitudes)
    for i, w in enumerate(omegas):
        out[i] = specfun.ml_two_ic(float(w), cfg.nu,
                                   packet0.amplitudes[i],
                                   packet1.amplitudes[i], t, tol)
    return SpectralPacket(packet0.wavenumbers, out)


def _inverse_transform(packet: SpectralPacket, amplitudes: np.ndarray,
                       positions: np.ndarray) -> np.ndarray:
    lam = packet.wavenumbers
    phase = np.exp(1j * np.outer(positions, lam))
    return phase @ amplitudes * packet.step / (2.0 * math.pi)


def default_positions(packet: SpectralPacket) -> np.ndarray:
    """Spatial grid conjugate to the packet's wavenumber grid."""
    n = packet.wavenumbers.size
    half = math.pi / packet.step
    return np.linspace(-half, half, n)


def free_field(packet: SpectralPacket, positions: np.ndarray | None = None
               ) -> tuple[GridField, GridField, GridField]:
    """Inverse transform of the packet and of its two pieces separately.

    Returns (psi, psi_s, psi_d); the pieces add up to psi nodewise.  For a
    packet without a stored split (e.g. an un-evolved initial packet) the
    whole field is reported as the oscillatory piece.
    """
    if positions is None:
        positions = default_positions(packet)
    positions = np.asarray(positions, dtype=float)
    amp_s = packet.amplitudes_s
    amp_d = packet.amplitudes_d
    if amp_s is None or amp_d is None:
        amp_s = packet.amplitudes
        amp_d = np.zeros_like(packet.amplitudes)
    psi_s = _inverse_transform(packet, amp_s, positions)
    psi_d = _inverse_transform(packet, amp_d, positions)
    return (GridField(positions, psi_s + psi_d),
            GridField(positions, psi_s),
            GridField(positions, psi_d))


def spectral_probability(packet: SpectralPacket) -> float:
    """Total probability from Fourier space, via the Parseval identity."""
    return float(np.trapezoid(np.abs(packet.amplitudes) ** 2,
                              packet.wavenumbers) / (2.0 * math.pi))


# ---------------------------------------------------------------------------
# potential well

def well_mode(n: int, a: float, cfg: RunConfig) -> WellMode:
    """Eigenpair of the infinite well: lambda_n = (n pi / a)**2 / (2 N_m)."""
    lam = (n * math.pi / a) ** 2 / (2.0 * cfg.n_m)
    return WellMode(n=n, a=a, lambda_n=lam, omega_n=lam)  # T_p = 1


def well_shape(mode: WellMode, positions: np.ndarray) -> np.ndarray:
    """Normalized spatial eigenfunction sqrt(2/a) sin(n pi x / a)."""
    x = np.asarray(positions, dtype=float)
    return np.sqrt(2.0 / mode.a) * np.sin(mode.n * math.pi * x / mode.a)


def well_amplitude(mode: WellMode, cfg: RunConfig, t: float,
                   tol: float = specfun.DEFAULT_TOL) -> complex:
    """Modal amplitude A(t) with A(0) = 1, for orders in (0, 1]."""
    d = specfun.ml_complex_decomposed(mode.omega_n, Sign.MINUS_I, cfg.nu,
                                      t, tol)
    return d.total


def well_field(mode: WellMode, cfg: RunConfig, t: float,
               n_points: int = 201,
               tol: float = specfun.DEFAULT_TOL) -> GridField:
    """Sampled psi_n(x, t) = A(t) * B_n(x) on [0, a]."""
    x = np.linspace(0.0, mode.a, n_points)
    values = well_amplitude(mode, cfg, t, tol) * well_shape(mode, x)
    values[0] = 0.0
    values[-1] = 0.0
    return GridField(x, values, domain="box", box_width=mode.a)


# ---------------------------------------------------------------------------
# diagnostics

def total_probability(field: GridField) -> float:
    """Integral of |psi|**2 over the field's grid."""
    return float(np.trapezoid(np.abs(field.values) ** 2, field.positions))


def weighted_history(field_history, h: float,
                     order: FractionalOrder) -> GridField:
    """Memory-weighted field D**(1-nu) psi at the final history time.

    `field_history` is a sequence of GridFields sampled with uniform time
    step h starting at t = 0, sharing one spatial grid.  nu = 1 returns the
    final field unchanged (zeroth-order derivative).
    """
    fields = list(field_history)
    if len(fields) < 3:
        raise ValueError("need at least 3 history snapshots")
    first = fields[0]
    if any(f.values.shape != first.values.shape for f in fields):
        raise ValueError("history snapshots must share one grid")
    if order.nu == 1.0:
        return fields[-1]
    stack = np.stack([f.values for f in fields])
    tilde = fraccalc.caputo_l1_values(stack, h, 1.0 - order.nu)[-1]
    return GridField(first.positions, tilde)


def probability_current(field: GridField, weighted: GridField,
                        cfg: RunConfig) -> GridField:
    """Probability current built from the memory-weighted field.

    J = (beta/i**nu) (d_x psi~) psi* + (beta/(-i)**nu) psi (d_x psi~*),
    with centered spatial differences.
    """
    if field.values.shape != weighted.values.shape:
        raise ValueError("fields must share a grid")
    beta = cfg.beta
    ip = cfg.nu.i_pow(Sign.PLUS_I)
    im = cfg.nu.i_pow(Sign.MINUS_I)
    dxw = np.gradient(weighted.values, field.step, edge_order=2)
    j = beta / ip * dxw * np.conj(field.values) \
        + beta / im * field.values * np.conj(dxw)
    return GridField(field.positions, j)


def source_term(field: GridField, weighted: GridField,
                initial_caputo: GridField, cfg: RunConfig,
                t: float) -> GridField:
    """Probability source S(x, t) of the continuity equation.

    Gradient cross terms plus the memory term carrying the initial Caputo
    derivative; the memory term is singular at t = 0 and drops out entirely
    at nu = 1, where the composition identity behind it no longer applies.
    """
    if t <= 0:
        raise SingularTime("source is singular at t = 0")
    nu = cfg.nu.nu
    beta = cfg.beta
    ip = cfg.nu.i_pow(Sign.PLUS_I)
    im = cfg.nu.i_pow(Sign.MINUS_I)
    dxw = np.gradient(weighted.values, field.step, edge_order=2)
    dxf = np.gradient(field.values, field.step, edge_order=2)
    s = beta / ip * dxw * np.conj(dxf) + beta / im * np.conj(dxw) * dxf
    if nu < 1.0:
        mem = (np.conj(field.values) * initial_caputo.values
               + field.values * np.conj(initial_caputo.values))
        s = s + mem / (t ** (1.0 - nu) * gamma(nu))
    return GridField(field.positions, s)


def energy_average(field: GridField, weighted: GridField) -> complex:
    """Weighted time average of the energy: integral psi* psi~ dx."""
    if field.values.shape != weighted.values.shape:
        raise ValueError("fields must share a grid")
    return complex(np.trapezoid(np.conj(field.values) * weighted.values,
                                field.positions))


def energy_level(mode: WellMode, cfg: RunConfig, t: float,
                 tol: float = specfun.DEFAULT_TOL) -> complex:
    """Time-dependent level E_n(t) = i conj(A) dA/dt (hbar = 1).

    dA/dt comes from the analytic decomposition: derivative of the
    oscillatory exponential plus the differentiated decay integral, avoiding
    finite-difference noise.  Singular at t = 0 for nu < 1.
    """
    nu = cfg.nu.nu
    omega = mode.omega_n
    if nu < 1.0 and t <= 0:
        raise SingularTime("energy level diverges like t**(nu-1) at t = 0")
    root = omega ** (1.0 / nu)
    osc = np.exp(-1j * root * t) / nu
    a = specfun.ml_complex_decomposed(omega, Sign.MINUS_I, cfg.nu, t, tol)
    rho = omega * cfg.nu.i_pow(Sign.MINUS_I)
    if nu == 1.0:
        dfdt = 0.0 + 0j
    else:
        dfdt = specfun.f_nu_time_derivative(
            specfun.DecayKernelSpec(rho, cfg.nu), t, tol)
    da = -1j * root * osc - dfdt
    return complex(1j * np.conj(a.total) * da)


def energy_level_limit(mode: WellMode, cfg: RunConfig) -> float:
    """Limiting level lambda_n**(1/nu) / nu**2 as t goes to infinity."""
    nu = cfg.nu.nu
    return mode.lambda_n ** (1.0 / nu) / nu ** 2


def energy_spacing_unit(a: float, cfg: RunConfig) -> float:
    """Base unit of the limiting level spacing (the m,n-independent factor)."""
    nu = cfg.nu.nu
    return (math.pi / a) ** (2.0 / nu) \
        / (nu ** 2 * (2.0 * cfg.n_m) ** (1.0 / nu))


def hamiltonian_recast_residual(history: SampledSignal, sigma: float,
                                cfg: RunConfig,
                                window: tuple[float, float],
                                initial_slope: complex | None = None
                                ) -> OperatorResidual:
    """Residual of the recast first-order-in-time modal equation.

    For orders in (0, 1): dA/dt = (sigma/i**nu) D**(1-nu) A
    + (sigma/i**nu) A(0) t**(nu-1) / Gamma(nu); at nu = 1 the memory term is
    absent.  For orders in (1, 2]: dA/dt = sigma i**nu I**(nu-1) A + A'(0),
    with A'(0) taken from `initial_slope` or a one-sided difference; the
    i**nu factor flips to the numerator because the two-initial-condition
    evolution solves D**nu A = sigma i**nu A on the opposite ray.  sigma is
    the total modal frequency (kinetic eigenvalue plus potential count over
    T_p**nu).
    """
    nu = cfg.nu.nu
    h = history.step
    t = history.times
    a = history.values
    da = np.gradient(a, h, edge_order=2)
    coef = sigma / cfg.nu.i_pow(Sign.PLUS_I)
    if cfg.nu.regime is Regime.SUB_UNIT:
        tilde = (a if nu == 1.0
                 else fraccalc.caputo_l1_values(a, h, 1.0 - nu))
        rhs = coef * tilde
        if nu < 1.0:
            rhs = rhs.astype(complex)
            rhs[1:] = rhs[1:] + coef * a[0] * t[1:] ** (nu - 1.0) / gamma(nu)
    else:
        coef = sigma * cfg.nu.i_pow(Sign.PLUS_I)
        integ = fraccalc.rl_integral_values(a, h, nu - 1.0)
        slope0 = initial_slope
        if slope0 is None:
            slope0 = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h)
        rhs = coef * integ + slope0
    per_node = da - rhs
    mask = (t >= window[0]) & (t <= window[1])
    if not mask.any():
        raise ValueError("window excludes every node")
    windowed = per_node[mask]
    return OperatorResidual(max_abs=float(np.abs(windowed).max()),
                            l2=float(np.sqrt(h * np.sum(np.abs(windowed) ** 2))),
                            per_node=windowed)


def well_amplitude_history(mode: WellMode, cfg: RunConfig, t_max: float,
                           h: float,
                           tol: float = specfun.DEFAULT_TOL) -> SampledSignal:
    """A(t) sampled on the uniform grid [0, t_max] with step h."""
    n = int(round(t_max / h)) + 1
    times = np.linspace(0.0, t_max, n)
    values = np.array([well_amplitude(mode, cfg, float(x), tol)
                       for x in times])
    return SampledSignal(times, values)


def well_continuity_series(mode: WellMode, cfg: RunConfig,
                           sample_times: np.ndarray, h: float = 2.5e-3,
                           n_points: int = 201,
                           tol: float = 1e-9) -> tuple[TimeSeries, TimeSeries]:
    """d/dt of the total probability versus the integrated source.

    Builds the modal history on an internal uniform grid from t = 0, forms
    the memory-weighted field at each requested sample time through the
    field-level operators, and returns the two sides of the integrated
    continuity equation as time series.
    """
    sample_times = np.asarray(sample_times, dtype=float)
    if sample_times.min() <= 0:
        raise SingularTime("continuity samples must be at positive times")
    hist = well_amplitude_history(mode, cfg, float(sample_times.max()), h, tol)
    x = np.linspace(0.0, mode.a, n_points)
    shape = well_shape(mode, x)
    prob = np.abs(hist.values) ** 2  # spatial integral of shape**2 is 1
    dpdt_all = np.gradient(prob, h, edge_order=2)
    nu = cfg.nu.nu
    tilde_all = (hist.values if nu == 1.0
                 else fraccalc.caputo_l1_values(hist.values, h, 1.0 - nu))
    init_cap = GridField(x, mode.lambda_n / cfg.nu.i_pow(Sign.PLUS_I) * shape)

    dpdt = np.empty_like(sample_times)
    int_s = np.empty_like(sample_times)
    for j, ts in enumerate(sample_times):
        k = int(round(ts / h))
        t_k = hist.times[k]
        f = GridField(x, hist.values[k] * shape)
        w = GridField(x, tilde_all[k] * shape)
        s = source_term(f, w, init_cap, cfg, float(t_k))
        dpdt[j] = dpdt_all[k]
        int_s[j] = np.trapezoid(s.values.real, x)
    return (TimeSeries(sample_times, dpdt, label="dP/dt"),
            TimeSeries(sample_times, int_s, label="integrated source"))
