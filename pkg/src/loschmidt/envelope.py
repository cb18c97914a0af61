"""Peak envelopes of an echo series and the fits applied to them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .model import ConfigError, EchoError, EchoSeries

INV_E = float(np.exp(-1.0))
POOR_POWERLAW_RESIDUAL = 0.05


class SamplingError(EchoError, ValueError):
    """The series is too short or too coarse to resolve its oscillation."""


class InsufficientDataError(EchoError, ValueError):
    """Too few qualifying points for the requested fit."""


class FitError(EchoError, ArithmeticError):
    """A fit produced a physically meaningless parameter."""


@dataclass(frozen=True, eq=False)
class PeakSet:
    times: np.ndarray
    values: np.ndarray
    side: str = "upper"

    def __len__(self):
        return self.times.size

    def on_grid(self, grid) -> np.ndarray:
        """Envelope linearly interpolated between peaks."""
        return np.interp(grid, self.times, self.values)


@dataclass(frozen=True)
class GaussianFit:
    """``ln L = intercept - alpha t^2 N/4`` fitted to peak values."""

    alpha: float
    n_scale: int
    residual: float
    points_used: int
    intercept: float = 0.0
    threshold: float = INV_E

    def __call__(self, t):
        return np.exp(self.intercept - self.alpha * np.asarray(t) ** 2 * self.n_scale / 4)


@dataclass(frozen=True)
class PowerLawFit:
    """``L ~ prefactor * t^(-exponent)`` fitted inside ``fit_window``."""

    exponent: float
    prefactor: float
    fit_window: tuple
    residual: float
    points_used: int

    @property
    def poor(self) -> bool:
        return self.residual > POOR_POWERLAW_RESIDUAL

    def __call__(self, t):
        return self.prefactor * np.asarray(t, dtype=float) ** (-self.exponent)


def _run_starts(values):
    """Index of the first sample in each run of equal values, and run values."""
    change = np.flatnonzero(np.diff(values) != 0) + 1
    starts = np.concatenate([[0], change])
    return starts, values[starts]


def find_peaks(series: EchoSeries, side: str = "upper", peak_energy: float | None = None) -> PeakSet:
    """Interior local maxima (``side="upper"``) or minima (``"lower"``).

    A plateau counts once, at its leftmost sample.  When ``peak_energy`` is
    given the fast oscillation period ``pi / peak_energy`` must span at least
    eight samples.
    """
    if side not in ("upper", "lower"):
        raise ConfigError(f"side must be 'upper' or 'lower', got {side!r}")
    t, v = series.times, series.values
    if t.size < 5:
        raise SamplingError(f"need at least 5 samples, got {t.size}")
    if peak_energy is not None:
        dt = np.max(np.diff(t))
        samples = np.pi / abs(peak_energy) / dt
        if samples < 8:
            raise SamplingError(
                f"oscillation period pi/E={np.pi / abs(peak_energy):.3g} spans only "
                f"{samples:.1f} samples (need >= 8)")
    signed = v if side == "upper" else -v
    starts, runs = _run_starts(signed)
    inner = np.flatnonzero((runs[1:-1] > runs[:-2]) & (runs[1:-1] > runs[2:])) + 1
    idx = starts[inner]
    return PeakSet(t[idx].copy(), v[idx].copy(), side)


def with_origin(peaks: PeakSet, series: EchoSeries) -> PeakSet:
    """Prepend the first sample of ``series`` (``L(0) = 1`` for a t=0 start)."""
    if peaks.times.size and peaks.times[0] <= series.times[0]:
        return peaks
    return PeakSet(np.concatenate([series.times[:1], peaks.times]),
                   np.concatenate([series.values[:1], peaks.values]), peaks.side)


def leading_run(peaks: PeakSet, threshold: float) -> PeakSet:
    """Peaks of the first decay: everything before the first peak at or below ``threshold``."""
    below = np.flatnonzero(peaks.values <= threshold)
    stop = below[0] if below.size else len(peaks)
    return PeakSet(peaks.times[:stop], peaks.values[:stop], peaks.side)


def fit_gaussian(peaks: PeakSet, n_sites: int, threshold: float = INV_E,
                 intercept: str = "free") -> GaussianFit:
    """Least-squares fit of ``ln L_peak`` against ``t^2 N/4``.

    Only the leading run of peaks above ``threshold`` is used, so late
    finite-size revivals do not enter.

    Parameters
    ----------
    peaks : PeakSet
    n_sites : int
        Chain length ``N`` in the scaling ``exp(-alpha t^2 N/4)``.
    threshold : float
        Peaks must exceed this value (default ``1/e``).
    intercept : {"free", "unit"}
        ``"free"`` fits ``ln L = c - alpha t^2 N/4`` and needs three peaks;
        ``"unit"`` pins ``c = 0`` (the envelope passes through ``L = 1`` at
        ``t = 0``) and needs one.
    """
    if intercept not in ("free", "unit"):
        raise ConfigError(f"intercept must be 'free' or 'unit', got {intercept!r}")
    run = leading_run(peaks, threshold)
    t, v = run.times, run.values
    need = 3 if intercept == "free" else 1
    if t.size < need:
        raise InsufficientDataError(
            f"{t.size} peak(s) above threshold {threshold:.4g}; need {need}")
    x = t ** 2 * n_sites / 4.0
    y = np.log(v)
    if intercept == "free":
        design = np.column_stack([np.ones_like(x), -x])
        (c, alpha), *_ = np.linalg.lstsq(design, y, rcond=None)
    else:
        c = 0.0
        if not np.any(x > 0):
            raise InsufficientDataError("unit-intercept fit needs a peak at t > 0")
        alpha = -np.dot(x, y) / np.dot(x, x)
    if alpha < 0:
        raise FitError(f"fitted alpha is negative ({alpha:.3g}); peaks grow with time")
    resid = y - (c - alpha * x)
    return GaussianFit(alpha=float(alpha), n_scale=int(n_sites),
                       residual=float(np.sqrt(np.mean(resid ** 2))),
                       points_used=int(t.size), intercept=float(c), threshold=threshold)


def fit_powerlaw(peaks: PeakSet, window) -> PowerLawFit:
    """Least-squares fit of ``ln L`` against ``ln t`` for peaks inside ``window``."""
    t0, t1 = map(float, window)
    if not t1 > t0 > 0:
        raise ConfigError(f"window must satisfy 0 < t0 < t1, got {window}")
    sel = (peaks.times >= t0) & (peaks.times <= t1)
    t, v = peaks.times[sel], peaks.values[sel]
    if t.size < 5:
        raise InsufficientDataError(f"{t.size} peak(s) in window {window}; need 5")
    if np.any(v <= 0):
        raise InsufficientDataError("power-law fit needs strictly positive peak values")
    slope, lnpre = np.polyfit(np.log(t), np.log(v), 1)
    resid = np.log(v) - (lnpre + slope * np.log(t))
    return PowerLawFit(exponent=float(-slope), prefactor=float(np.exp(lnpre)),
                       fit_window=(t0, t1), residual=float(np.sqrt(np.mean(resid ** 2))),
                       points_used=int(t.size))


def crossover_time(gauss: GaussianFit, power: PowerLawFit) -> float:
    """Time after which the power law lies above the Gaussian for good.

    In log form ``d(t) = ln gauss - ln power`` is concave in ``ln t`` with a
    single maximum at ``t* = sqrt(p / 2a)``, ``a = alpha N/4``; the crossover
    is the root of ``d`` beyond ``t*``.
    """
    a = gauss.alpha * gauss.n_scale / 4.0
    p = power.exponent
    if a <= 0 or p <= 0:
        raise FitError("crossover needs a decaying Gaussian and a decaying power law")

    def diff(t):
        return gauss.intercept - a * t * t + p * np.log(t) - np.log(power.prefactor)

    t_star = np.sqrt(p / (2 * a))
    if diff(t_star) <= 0:
        raise FitError("the Gaussian and power-law models do not cross")
    hi = 2 * t_star
    while diff(hi) > 0:
        hi *= 2
    return float(brentq(diff, t_star, hi))


def universality_threshold(alpha_curve, rel_tol: float = 0.05) -> float:
    """Smallest sampled ``g`` after which ``alpha`` changes by less than ``rel_tol`` per step.

    Returns ``inf`` when the curve never settles.
    """
    curve = np.asarray(alpha_curve, dtype=float)
    if curve.ndim != 2 or curve.shape[1] != 2:
        raise ConfigError("alpha_curve must be a sequence of (g, alpha) pairs")
    if curve.shape[0] < 5:
        raise InsufficientDataError("need at least 5 sampled couplings")
    g, alpha = curve[:, 0], curve[:, 1]
    if np.any(np.diff(g) <= 0):
        raise ConfigError("couplings must be strictly increasing")
    change = np.abs(np.diff(alpha)) / np.abs(alpha[:-1])
    ok = change < rel_tol
    # settled[i]: every step from g[i] onward is small
    settled = np.flip(np.logical_and.accumulate(np.flip(ok)))
    if not settled.any():
        return float("inf")
    return float(g[np.argmax(settled)])


def envelope_distance(a: PeakSet, b: PeakSet, n_grid: int = 4000, t_range=None) -> float:
    """Sup-norm distance between two interpolated envelopes over their common span."""
    lo = max(a.times[0], b.times[0])
    hi = min(a.times[-1], b.times[-1])
    if t_range is not None:
        lo, hi = max(lo, t_range[0]), min(hi, t_range[1])
    if not hi > lo:
        raise InsufficientDataError("envelopes do not overlap in time")
    grid = np.linspace(lo, hi, n_grid)
    return float(np.max(np.abs(a.on_grid(grid) - b.on_grid(grid))))


def first_minimum(series: EchoSeries) -> tuple:
    """``(time, value)`` of the first interior local minimum."""
    low = find_peaks(series, "lower")
    if not len(low):
        raise InsufficientDataError("series has no interior minimum")
    return float(low.times[0]), float(low.values[0])
