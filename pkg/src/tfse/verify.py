"""Named verification sweeps behind `tfse verify`.

Each check compares an implementation path against an independent route
(oracle inversion, arbitrary-precision series, closed forms, refinement
studies) and reports a scalar metric against its bound.  The quick variants
thin the lattices so the whole table runs in a few seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics, fraccalc, oracles, specfun
from .fraccalc import SampledSignal
from .specfun import FractionalOrder, Sign


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check: metric measured against its bound."""

    name: str
    metric: float
    bound: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.metric) and self.metric <= self.bound


def _check_series_vs_decomposition(quick: bool) -> CheckResult:
    orders = (0.5, 0.9) if quick else (0.3, 0.5, 0.7, 0.9)
    sigmas = (1.0,) if quick else (0.5, 1.0, 2.0)
    times = np.linspace(0.0, 3.0, 8 if quick else 20)
    worst = 0.0
    for nu in orders:
        order = FractionalOrder(nu)
        for sigma in sigmas:
            for t in times:
                dec = specfun.ml_complex_decomposed(sigma, Sign.MINUS_I,
                                                    order, float(t))
                z = sigma * order.i_pow(Sign.MINUS_I) * t ** nu
                try:
                    ref = specfun.ml_series(z, order, tol=1e-12)
                except specfun.NonConvergence:
                    ref = oracles.ml_series_reference(sigma, -1, order,
                                                      float(t))
                worst = max(worst, abs(dec.total - ref))
    return CheckResult("series vs decomposition", worst, 1e-6)


def _check_kernel_special_values(quick: bool) -> CheckResult:
    worst = 0.0
    for nu in (0.25, 0.5, 0.75):
        order = FractionalOrder(nu)
        for rho in (0.5, 1.0, 2.0):
            spec = specfun.DecayKernelSpec(rho, order)
            worst = max(worst,
                        abs(specfun.f_nu(spec, 0.0) - (1.0 - nu) / nu))
            times = np.linspace(0.0, 20.0, 8 if quick else 25)
            vals = np.array([specfun.f_nu(spec, float(t)).real
                             for t in times])
            worst = max(worst, float(np.max(np.diff(vals))), 0.0)
    return CheckResult("decay kernel special values", worst, 1e-10)


def _check_half_order_closed_form(quick: bool) -> CheckResult:
    order = FractionalOrder(0.5)
    zs = np.linspace(-2.0, 2.0, 11 if quick else 41)
    worst = 0.0
    for z in zs:
        ml = specfun.ml_series(complex(z), order, tol=1e-13)
        closed = math.exp(z * z) * oracles.erfc_closed_form(-float(z))
        worst = max(worst, abs(ml - closed))
    return CheckResult("half-order closed form", worst, 1e-8)


def _check_inversion_oracle(quick: bool) -> CheckResult:
    orders = (0.5, 0.75) if quick else (0.4, 0.6, 0.9)
    sigmas = (1.0,) if quick else (0.5, 1.0, 2.0)
    times = np.linspace(0.3, 4.0, 4 if quick else 10)
    worst = 0.0
    for nu in orders:
        order = FractionalOrder(nu)
        for sigma in sigmas:
            spec = oracles.InversionSpec(sigma, order)
            for t in times:
                ora = oracles.laplace_invert_ml(spec, float(t))
                dec = specfun.ml_complex_decomposed(sigma, Sign.PLUS_I,
                                                    order, float(t))
                worst = max(worst, abs(ora - dec.total))
    return CheckResult("inversion oracle agreement", worst, 1e-6)


def _check_two_ic_branch(quick: bool) -> CheckResult:
    worst = 0.0
    for nu in (1.2, 1.5, 1.9, 2.0):
        order = FractionalOrder(nu)
        for sigma in (0.5, 1.0) if quick else (0.5, 1.0, 2.0):
            c0, c1 = specfun._two_ic_coefficients(sigma, order, 0.0)
            worst = max(worst, abs(c0 - 1.0), abs(c1))
    return CheckResult("two-IC initial identities", worst, 1e-8)


def _check_constant_annihilation(quick: bool) -> CheckResult:
    times = np.linspace(0.0, 2.0, 101)
    sig = SampledSignal(times, np.full_like(times, 3.7))
    worst = 0.0
    for nu in (0.3, 0.5, 0.8):
        d = fraccalc.caputo_derivative(sig, FractionalOrder(nu))
        worst = max(worst, float(np.abs(d.values).max()))
    return CheckResult("Caputo annihilates constants", worst, 1e-14)


def _power_rule_order(nu: float, p: int, steps) -> float:
    from scipy.special import gamma as sp_gamma

    errs = []
    for h in steps:
        times = np.arange(0.0, 1.0 + h / 2, h)
        sig = SampledSignal(times, times ** p)
        d = fraccalc.caputo_derivative(sig, FractionalOrder(nu))
        exact = sp_gamma(p + 1.0) / sp_gamma(p + 1.0 - nu) \
            * times ** (p - nu)
        errs.append(float(np.abs(d.values - exact)[1:].max()))
    fit = np.polyfit(np.log(steps), np.log(errs), 1)
    return float(fit[0])


def _check_l1_convergence(quick: bool) -> CheckResult:
    steps = (1e-2, 5e-3) if quick else (1e-2, 5e-3, 2.5e-3)
    worst = 0.0
    for nu in (0.4, 0.7):
        slope = _power_rule_order(nu, 2, steps)
        worst = max(worst, abs(slope - (2.0 - nu)))
    return CheckResult("L1 convergence order", worst, 0.2)


def _check_identity_residuals(quick: bool) -> CheckResult:
    h = 2e-3 if quick else 1e-3
    times = np.arange(0.0, 1.0 + h / 2, h)
    worst = 0.0
    sig = SampledSignal(times, times ** 3)
    for nu in (0.4, 0.6):
        res = fraccalc.check_identity_seq11(sig, FractionalOrder(nu),
                                            startup=20)
        worst = max(worst, res.max_abs)
    for nu in (1.3, 1.7):
        res = fraccalc.check_identity_eq65(sig, FractionalOrder(nu),
                                           startup=20)
        worst = max(worst, res.max_abs)
    return CheckResult("composition identity residuals", worst, 0.05)


def _check_unit_order_reduction(quick: bool) -> CheckResult:
    cfg = dynamics.RunConfig(FractionalOrder(1.0), n_m=0.5)
    mode = dynamics.well_mode(1, math.pi, cfg)
    worst = 0.0
    for t in (0.5, 2.0, 7.0):
        amp = dynamics.well_amplitude(mode, cfg, t)
        worst = max(worst, abs(abs(amp) - 1.0))
        level = dynamics.energy_level(mode, cfg, t)
        worst = max(worst, abs(level - mode.omega_n))
    return CheckResult("unit-order reduction", worst, 1e-8)


def _check_well_limit(quick: bool) -> CheckResult:
    cfg = dynamics.RunConfig(FractionalOrder(0.5), n_m=0.5)
    mode = dynamics.well_mode(1, math.pi, cfg)
    t_far = 1e3 if quick else 1e4
    amp = dynamics.well_amplitude(mode, cfg, t_far)
    gap = abs(abs(amp) ** 2 - 4.0)
    # The tail of the decay kernel scales like t**(-nu).
    bound = 0.05 * (1e4 / t_far) ** 0.5 * 3.0
    return CheckResult("well probability limit", gap, max(bound, 0.05))


def _check_energy_limit(quick: bool) -> CheckResult:
    cfg = dynamics.RunConfig(FractionalOrder(0.5), n_m=0.5)
    mode = dynamics.well_mode(1, math.pi, cfg)
    t_far = 1e3 if quick else 1e4
    level = dynamics.energy_level(mode, cfg, t_far).real
    limit = dynamics.energy_level_limit(mode, cfg)
    rel = abs(level - limit) / limit
    return CheckResult("energy level limit", rel, 0.02 if not quick else 0.07)


def _check_continuity(quick: bool) -> CheckResult:
    cfg = dynamics.RunConfig(FractionalOrder(0.5), n_m=0.5)
    mode = dynamics.well_mode(1, math.pi, cfg)
    samples = np.linspace(0.5, 2.0 if quick else 5.0, 5 if quick else 12)
    h = 5e-3 if quick else 2.5e-3
    dpdt, int_s = dynamics.well_continuity_series(mode, cfg, samples, h=h)
    scale = float(np.abs(dpdt.values).max())
    gap = float(np.abs(dpdt.values - int_s.values).max())
    return CheckResult("continuity with source", gap / scale, 0.02)


def _check_recast_residual(quick: bool) -> CheckResult:
    cfg = dynamics.RunConfig(FractionalOrder(0.5), n_m=0.5)
    mode = dynamics.well_mode(1, math.pi, cfg)
    h = 2e-3 if quick else 1e-3
    hist = dynamics.well_amplitude_history(mode, cfg, 2.0, h)
    res = dynamics.hamiltonian_recast_residual(hist, mode.omega_n, cfg,
                                               window=(0.1, 2.0))
    return CheckResult("recast first-order residual", res.max_abs,
                       5e-3 if not quick else 2e-2)


SUITES = {
    "specfun": (
        _check_series_vs_decomposition,
        _check_kernel_special_values,
        _check_half_order_closed_form,
        _check_inversion_oracle,
        _check_two_ic_branch,
    ),
    "fraccalc": (
        _check_constant_annihilation,
        _check_l1_convergence,
        _check_identity_residuals,
    ),
    "tfse": (
        _check_unit_order_reduction,
        _check_well_limit,
        _check_energy_limit,
        _check_continuity,
        _check_recast_residual,
    ),
}


def run_suite(name: str, quick: bool = False) -> list[CheckResult]:
    """Run one named suite ('specfun', 'fraccalc', 'tfse') or 'all'."""
    if name == "all":
        out = []
        for key in ("specfun", "fraccalc", "tfse"):
            out.extend(run_suite(key, quick))
        return out
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return [check(quick) for check in SUITES[name]]
