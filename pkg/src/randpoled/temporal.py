"""Temporal correlations of the photon pair.

Hong-Ou-Mandel (HOM) coincidence traces, sum-frequency intensity
traces, and spectral-phase extraction/compensation, all in the cw-pump
regime where the two-photon state lives on the slice
omega_i = omega_p0 - omega_s.

For the degenerate same-polarization process the collinear mismatch is
symmetric under exchange of the signal and idler frequencies, so the
cross-correlator entering the HOM trace collapses onto its diagonal,
the mean squared phase-matching function.  This makes the HOM dip a
pure Fourier transform of the spectral density -- the origin of the
nonlocal dispersion-cancellation property checked below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .spectra import (ProcessConfig, SpectralGrid, SpectralSlice, SpectraError,
                      coupling_g, fwhm, mean_f2, two_photon_amplitude)
from .structures import PolingStructure, RandomSource, StructureSpec
from .phasematch import xcorr_rps, xcorr_weak

_TAU_CHUNK = 256
WEIGHT_FLOOR = 1e-3  # fraction of peak |Phi|^2 below which phase is meaningless


class TemporalError(ValueError):
    """Raised for empty spectra, missing dips, or degenerate fits."""


@dataclass(frozen=True)
class TemporalTrace:
    """Real-valued trace on a uniform delay grid."""

    tau: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class PhaseProfile:
    """Unwrapped spectral phase over the high-weight region."""

    omega_s: np.ndarray
    phase: np.ndarray       # nan outside the reported segments
    weights: np.ndarray     # |Phi|^2
    segments: tuple         # (start, stop) index pairs, stop exclusive


def default_tau_grid(n: int = 4096, span: float = 500e-15) -> np.ndarray:
    return np.linspace(-span, span, n)


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.full(x.size, x[1] - x[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _oscillatory_sum(tau: np.ndarray, freq: np.ndarray, amp: np.ndarray):
    """sum_q amp_q exp(-i tau freq_q), chunked over tau.

    Uses explicit pairwise summation so the result is bit-identical
    regardless of BLAS threading.
    """
    out = np.empty(tau.size, dtype=complex)
    for lo in range(0, tau.size, _TAU_CHUNK):
        hi = min(lo + _TAU_CHUNK, tau.size)
        e = np.exp(-1j * np.outer(tau[lo:hi], freq))
        out[lo:hi] = (e * amp).sum(axis=1)
    return out


def _check_symmetric_grid(grid: SpectralGrid, omega_s0: float) -> None:
    mid = 0.5 * (grid.omega_s[0] + grid.omega_s[-1])
    if abs(mid - omega_s0) > 1e-6 * omega_s0:
        raise TemporalError("slice-based traces need a grid symmetric about omega_s0")


def _hom_weights(source, cfg: ProcessConfig, model, grid: SpectralGrid):
    """Spectral weights W(omega_s) whose transform gives the dip."""
    if isinstance(source, SpectralSlice):
        _check_symmetric_grid(source.grid, 0.5 * source.omega_p0)
        omega_s = source.grid.omega_s
        omega_i = source.omega_p0 - omega_s
        phi = source.values
        # exchange omega_s <-> omega_i reverses the symmetric grid
        return omega_s, omega_i, omega_s * omega_i * phi * np.conj(phi[::-1]), \
            omega_s * omega_i * np.abs(phi) ** 2
    omega_s = grid.omega_s
    omega_i = cfg.omega_p0 - omega_s
    g2 = np.abs(coupling_g(omega_s, omega_i, cfg, model)) ** 2
    w = omega_s * omega_i * g2 * abs(cfg.pump_amplitude) ** 2 \
        * mean_f2(source, cfg, model, grid)
    return omega_s, omega_i, w.astype(complex), w


def hom_trace(source, cfg: ProcessConfig, model, grid: SpectralGrid,
              tau: np.ndarray | None = None) -> TemporalTrace:
    """Normalized HOM coincidence rate R_n(tau) = 1 - rho(tau).

    Accepts an explicit structure, an analytic-family spec (ensemble
    average), or a SpectralSlice carrying an arbitrary spectral phase.
    Identical quadrature weights in numerator and denominator make
    R_n(0) vanish exactly for exchange-symmetric amplitudes.
    """
    if tau is None:
        tau = default_tau_grid()
    omega_s, _, interf, base = _hom_weights(source, cfg, model, grid)
    wq = _trapezoid_weights(omega_s)
    r0 = float(np.real((wq * base).sum()))
    if r0 <= 0:
        raise TemporalError("empty spectrum: R0 = 0")
    omega_s0 = 0.5 * cfg.omega_p0
    rho = np.real(_oscillatory_sum(tau, 2.0 * (omega_s - omega_s0), wq * interf)) / r0
    return TemporalTrace(tau, 1.0 - rho)


def entanglement_time(trace: TemporalTrace) -> float:
    """FWHM of the HOM dip 1 - R_n."""
    dip = 1.0 - trace.values
    if dip.max() < 0.1:
        raise TemporalError("no dip: depth below 0.1")
    return fwhm(trace.tau, dip)


def dispersion_cancellation_check(source, cfg: ProcessConfig, model,
                                  grid: SpectralGrid, phase_fn,
                                  tau: np.ndarray | None = None) -> float:
    """Max |change of R_n| when a common spectral phase is applied.

    The same phase function (of absolute frequency) multiplies both
    the signal and idler arguments of the amplitude; for cw pumping
    the HOM trace is invariant.  Returns the maximal deviation.
    """
    if isinstance(source, SpectralSlice):
        slice_ = source
    else:
        slice_ = two_photon_amplitude(source, cfg, model, grid)
    base = hom_trace(slice_, cfg, model, slice_.grid, tau)
    omega_s = slice_.grid.omega_s
    omega_i = slice_.omega_p0 - omega_s
    phased = SpectralSlice(
        slice_.grid,
        slice_.values * np.exp(1j * (phase_fn(omega_s) + phase_fn(omega_i))),
        slice_.omega_p0,
    )
    mod = hom_trace(phased, cfg, model, slice_.grid, tau)
    return float(np.max(np.abs(mod.values - base.values)))


def _sumfreq_from_amp(amp: np.ndarray, omega_s: np.ndarray, omega_s0: float,
                      tau: np.ndarray) -> TemporalTrace:
    wq = _trapezoid_weights(omega_s)
    field = _oscillatory_sum(tau, omega_s - omega_s0, wq * amp)
    intensity = np.abs(field) ** 2
    area = np.trapezoid(intensity, tau)
    if area <= 0:
        raise TemporalError("sum-frequency trace has zero area")
    return TemporalTrace(tau, intensity / area)


def sumfreq_trace(source, cfg: ProcessConfig, model, grid: SpectralGrid,
                  tau: np.ndarray | None = None,
                  compensation: str = "none") -> TemporalTrace:
    """Area-normalized sum-frequency intensity trace I_sum(tau).

    Single realizations and chirped structures go through their
    amplitude slice (to which the compensation mode is applied first).
    Random-family specs use the analytic cross-correlator; only the
    uncompensated trace is available that way -- use
    sumfreq_ensemble_mc for compensated ensemble traces.
    """
    if tau is None:
        tau = default_tau_grid()
    omega_s0 = 0.5 * cfg.omega_p0
    if isinstance(source, StructureSpec) and source.kind in ("rps", "weakly-random"):
        if compensation != "none":
            raise TemporalError(
                "analytic ensembles support compensation='none' only; "
                "use sumfreq_ensemble_mc"
            )
        return _sumfreq_ensemble_analytic(source, cfg, model, grid, tau)
    if isinstance(source, SpectralSlice):
        slice_ = source
    else:
        slice_ = two_photon_amplitude(source, cfg, model, grid)
    slice_ = compensate(slice_, compensation)
    omega_s = slice_.grid.omega_s
    omega_i = slice_.omega_p0 - omega_s
    amp = np.sqrt(omega_s * omega_i) * slice_.values
    return _sumfreq_from_amp(amp, omega_s, omega_s0, tau)


def _sumfreq_ensemble_analytic(spec: StructureSpec, cfg, model,
                               grid: SpectralGrid, tau: np.ndarray) -> TemporalTrace:
    from .spectra import _mismatch_slice
    omega_s = grid.omega_s
    omega_i = cfg.omega_p0 - omega_s
    dk_tot, _ = _mismatch_slice(cfg, model, grid)
    dk0 = np.pi / spec.l0  # detuning from the structure's design point
    delta_k = dk_tot - dk0
    xcorr = xcorr_rps if spec.kind == "rps" else xcorr_weak
    fmat = xcorr(delta_k[:, None], delta_k[None, :],
                 spec.n_domains, spec.l0, spec.sigma, dk0)
    g = coupling_g(omega_s, omega_i, cfg, model) * cfg.pump_amplitude
    a = np.sqrt(omega_s * omega_i) * g * _trapezoid_weights(omega_s)
    m = (a[:, None] * np.conj(a[None, :])) * fmat
    omega_s0 = 0.5 * cfg.omega_p0
    intensity = np.empty(tau.size)
    for lo in range(0, tau.size, _TAU_CHUNK):
        hi = min(lo + _TAU_CHUNK, tau.size)
        e = np.exp(-1j * np.outer(tau[lo:hi], omega_s - omega_s0))
        # I(tau) = e^T M conj(e) contracted row by row
        t = e @ m
        intensity[lo:hi] = np.real((t * np.conj(e)).sum(axis=1))
    area = np.trapezoid(intensity, tau)
    return TemporalTrace(tau, intensity / area)


def sumfreq_ensemble_mc(spec: StructureSpec, cfg: ProcessConfig, model,
                        grid: SpectralGrid, realizations: int, seed: int,
                        tau: np.ndarray | None = None,
                        compensation: str = "none") -> TemporalTrace:
    """Monte Carlo ensemble mean of per-realization sum-frequency traces."""
    if tau is None:
        tau = default_tau_grid()
    acc = np.zeros(tau.size)
    for i in range(realizations):
        structure = spec.generate(RandomSource(seed, i))
        trace = sumfreq_trace(structure, cfg, model, grid, tau, compensation)
        acc += trace.values
    area = np.trapezoid(acc, tau)
    return TemporalTrace(tau, acc / area)


def spectral_phase(slice_: SpectralSlice) -> PhaseProfile:
    """Argument of the amplitude, unwrapped over high-weight segments.

    Samples where |Phi|^2 falls below WEIGHT_FLOOR of its peak are
    masked (nan); each contiguous run above the floor is unwrapped
    independently and reported as a segment.
    """
    weights = np.abs(slice_.values) ** 2
    peak = weights.max()
    if peak <= 0:
        raise TemporalError("zero amplitude everywhere")
    mask = weights >= WEIGHT_FLOOR * peak
    phase = np.full(slice_.values.size, np.nan)
    segments = []
    idx = np.nonzero(mask)[0]
    if idx.size:
        splits = np.nonzero(np.diff(idx) > 1)[0]
        starts = np.concatenate(([idx[0]], idx[splits + 1]))
        stops = np.concatenate((idx[splits] + 1, [idx[-1] + 1]))
        for a, b in zip(starts, stops):
            phase[a:b] = np.unwrap(np.angle(slice_.values[a:b]))
            segments.append((int(a), int(b)))
    return PhaseProfile(slice_.grid.omega_s, phase, weights, tuple(segments))


def fit_quadratic_phase(slice_: SpectralSlice):
    """Weighted least-squares quadratic fit of the unwrapped phase.

    Weights are |Phi|^2 over the high-weight region; returns the
    coefficients (c0, c1, c2) of c0 + c1 x + c2 x^2 in
    x = omega_s - omega_s0.
    """
    profile = spectral_phase(slice_)
    mask = np.isfinite(profile.phase)
    if np.count_nonzero(mask) < 3:
        raise TemporalError("degenerate fit: fewer than three weighted samples")
    omega_s0 = 0.5 * slice_.omega_p0
    x = profile.omega_s[mask] - omega_s0
    if np.ptp(x) == 0:
        raise TemporalError("degenerate fit: all weight at one frequency")
    coeffs = np.polynomial.polynomial.polyfit(
        x, profile.phase[mask], 2, w=np.sqrt(profile.weights[mask])
    )
    return tuple(float(c) for c in coeffs)


def _apply_phase(slice_: SpectralSlice, c0: float, c1: float, c2: float):
    x = slice_.grid.omega_s - 0.5 * slice_.omega_p0
    corr = np.exp(-1j * (c0 + c1 * x + c2 * x ** 2))
    return SpectralSlice(slice_.grid, slice_.values * corr, slice_.omega_p0)


def compensate(slice_: SpectralSlice, mode: str) -> SpectralSlice:
    """Spectral-phase compensation of the amplitude slice.

    none      -- identity.
    quadratic -- remove the best quadratic phase: start from the
                 weighted least-squares fit (exact for an injected
                 quadratic) and refine the curvature by minimizing the
                 sum-frequency trace width, keeping the refinement only
                 if it strictly narrows the trace.  This models the
                 best achievable quadratic compensator.
    ideal     -- replace the amplitude by its modulus.
    """
    if mode == "none":
        return slice_
    if mode == "ideal":
        return SpectralSlice(slice_.grid, np.abs(slice_.values), slice_.omega_p0)
    if mode != "quadratic":
        raise TemporalError(f"unknown compensation mode {mode!r}")
    c0, c1, c2 = fit_quadratic_phase(slice_)
    omega_s = slice_.grid.omega_s
    omega_s0 = 0.5 * slice_.omega_p0
    omega_i = slice_.omega_p0 - omega_s
    tau = default_tau_grid()

    def width_at(curv: float) -> float:
        cand = _apply_phase(slice_, c0, c1, curv)
        amp = np.sqrt(omega_s * omega_i) * cand.values
        trace = _sumfreq_from_amp(amp, omega_s, omega_s0, tau)
        return fwhm(trace.tau, trace.values)

    weights = np.abs(slice_.values) ** 2
    x = omega_s - omega_s0
    band = np.sqrt(np.sum(weights * x ** 2) / np.sum(weights))
    scale = max(abs(c2), 1.0 / band ** 2)
    base_width = width_at(c2)
    res = minimize_scalar(
        width_at, bounds=(c2 - 5.0 * scale, c2 + 5.0 * scale),
        method="bounded", options={"xatol": scale * 1e-4},
    )
    best = float(res.x) if res.fun < base_width * (1.0 - 1e-3) else c2
    return _apply_phase(slice_, c0, c1, best)
