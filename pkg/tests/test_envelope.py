import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loschmidt import envelope as ev, modes
from loschmidt.model import ChainSpec, ConfigError, EchoSeries, Uniform, default_dt, time_grid

N = 100


def _series(t, v):
    return EchoSeries(np.asarray(t, float), np.asarray(v, float))


def _modes(gamma, lam, g, t_max, dt=None):
    return modes.echo(ChainSpec(N, gamma, lam), Uniform(g), time_grid(t_max, dt or default_dt(g)))


def _unit_alpha_curve(lam, gs, threshold):
    out = []
    for g in gs:
        peaks = ev.find_peaks(_modes(1.0, lam, g, 0.6, dt=1e-5))
        out.append((g, ev.fit_gaussian(peaks, N, threshold, "unit").alpha))
    return out


def test_peaks_of_squared_cosine():
    t = np.arange(0, 3, 0.01)
    peaks = ev.find_peaks(_series(t, np.cos(5 * t) ** 2))
    k = np.arange(1, len(peaks) + 1)
    assert len(peaks) == 4
    assert np.allclose(peaks.times, k * np.pi / 5, atol=0.01)
    assert np.all(peaks.values > 0.99)


def test_monotone_series_has_no_extrema():
    s = _series(np.linspace(0, 1, 50), np.linspace(1, 0, 50))
    assert len(ev.find_peaks(s)) == 0
    assert len(ev.find_peaks(s, "lower")) == 0


def test_plateau_counts_once_at_left_edge():
    s = _series(np.arange(7.0), [0, 0.5, 1, 1, 1, 0.5, 0])
    peaks = ev.find_peaks(s)
    assert peaks.times.tolist() == [2.0]


def test_under_sampled_series_is_rejected():
    t = np.arange(0, 3, 0.1)
    with pytest.raises(ev.SamplingError):
        ev.find_peaks(_series(t, np.cos(5 * t) ** 2), peak_energy=5.0)
    with pytest.raises(ev.SamplingError):
        ev.find_peaks(_series([0, 1, 2], [1, 0.5, 1]))


def test_peak_spacing_follows_peak_energy():
    g = 40
    table = modes.build_mode_table(ChainSpec(N, 1.0, 0.0), Uniform(g))
    energy = modes.analytic_peak_energy(table)
    peaks = ev.find_peaks(_modes(1.0, 0.0, g, 0.5, dt=1e-5), peak_energy=energy)
    spacing = np.median(np.diff(peaks.times))
    assert spacing == pytest.approx(np.pi / energy, rel=0.01)


@pytest.mark.parametrize("intercept", ["free", "unit"])
def test_gaussian_exact_recovery(intercept):
    t = np.linspace(0.02, 0.2, 10)
    peaks = ev.PeakSet(t, np.exp(-0.5 * t ** 2 * N / 4))
    fit = ev.fit_gaussian(peaks, N, intercept=intercept)
    assert fit.alpha == pytest.approx(0.5, abs=1e-6)
    assert fit.residual < 1e-10
    assert fit(t) == pytest.approx(peaks.values)


def test_gaussian_needs_three_points():
    peaks = ev.PeakSet(np.array([0.1, 0.2]), np.array([0.9, 0.8]))
    with pytest.raises(ev.InsufficientDataError):
        ev.fit_gaussian(peaks, N)
    with pytest.raises(ConfigError):
        ev.fit_gaussian(peaks, N, intercept="other")


def test_gaussian_uses_only_leading_run():
    t = np.linspace(0.05, 0.5, 10)
    v = np.exp(-t ** 2 * N / 4)
    v[-1] = 0.9  # late revival
    fit = ev.fit_gaussian(ev.PeakSet(t, v), N)
    assert fit.alpha == pytest.approx(1.0, abs=1e-9)


def test_gaussian_width_of_ising_chain():
    fit = ev.fit_gaussian(ev.find_peaks(_modes(1.0, 0.0, 40, 1.5)), N)
    assert abs(fit.alpha - 1) < 0.15


def test_gaussian_width_changes_modestly_near_critical_field():
    (_, low), (_, high) = _unit_alpha_curve(0.9, (10, 75), ev.INV_E)
    assert 0.05 < (high - low) / high < 0.15


def test_power_law_exact_recovery():
    t = np.linspace(2, 8, 20)
    fit = ev.fit_powerlaw(ev.PeakSet(t, 0.3 * t ** -2.0), (2, 8))
    assert fit.exponent == pytest.approx(2.0, abs=1e-6)
    assert fit.prefactor == pytest.approx(0.3)
    assert not fit.poor


def test_power_law_needs_five_peaks():
    t = np.linspace(2, 8, 4)
    with pytest.raises(ev.InsufficientDataError):
        ev.fit_powerlaw(ev.PeakSet(t, t ** -1.0), (2, 8))
    with pytest.raises(ConfigError):
        ev.fit_powerlaw(ev.PeakSet(t, t ** -1.0), (0, 8))


def test_power_law_of_small_anisotropy():
    fit = ev.fit_powerlaw(ev.find_peaks(_modes(0.1, 0.0, 20, 20.0)), (2, 8))
    assert abs(fit.exponent - 1.1) <= 0.2


def test_power_law_is_flagged_poor_on_gaussian_decay():
    fit = ev.fit_powerlaw(ev.find_peaks(_modes(1.0, 0.0, 40, 1.0)), (0.05, 0.9))
    assert fit.poor


def test_crossover_time():
    gauss = ev.GaussianFit(alpha=1.0, n_scale=4, residual=0.0, points_used=3)
    power = ev.PowerLawFit(exponent=1.0, prefactor=0.1, fit_window=(1, 5), residual=0.0,
                           points_used=5)
    tc = ev.crossover_time(gauss, power)
    # t exp(-t^2) = 0.1 has roots near 0.1 and 1.6; the late one is the crossover
    assert tc > 1
    assert np.exp(-tc ** 2) == pytest.approx(0.1 / tc)
    far = ev.PowerLawFit(exponent=1.0, prefactor=0.5, fit_window=(1, 5), residual=0.0,
                         points_used=5)
    with pytest.raises(ev.FitError):
        ev.crossover_time(gauss, far)


def test_universality_of_constant_curve():
    curve = [(g, 0.9) for g in (5, 10, 20, 40, 80)]
    assert ev.universality_threshold(curve) == 5


def test_universality_never_reached():
    curve = [(g, g) for g in (1.0, 2.0, 3.0, 4.0, 5.0)]
    assert ev.universality_threshold(curve) == np.inf
    with pytest.raises(ev.InsufficientDataError):
        ev.universality_threshold(curve[:3])


def test_universality_reached_later_near_critical_field():
    gs = (5, 10, 20, 30, 40, 50, 60, 75)
    threshold = np.exp(-3)
    g0 = ev.universality_threshold(_unit_alpha_curve(0.0, gs, threshold))
    g9 = ev.universality_threshold(_unit_alpha_curve(0.9, gs, threshold))
    assert g0 == 5
    assert g9 > g0


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.01, 1))
def test_envelope_distance_of_scaled_copies(scale, shift):
    t = np.linspace(0, 1, 50)
    a = ev.PeakSet(t, np.exp(-scale * t))
    b = ev.PeakSet(t, np.exp(-scale * t) + shift)
    assert ev.envelope_distance(a, b) == pytest.approx(shift)
    assert ev.envelope_distance(a, a) == 0


def test_first_minimum_and_origin():
    t = np.arange(0, 2, 0.01)
    s = _series(t, 1 - 0.6 * np.sin(3 * t) ** 2)
    tm, vm = ev.first_minimum(s)
    assert tm == pytest.approx(np.pi / 6, abs=0.01)
    assert vm == pytest.approx(0.4, abs=1e-3)
    peaks = ev.with_origin(ev.find_peaks(s), s)
    assert peaks.times[0] == 0 and peaks.values[0] == 1
    with pytest.raises(ev.InsufficientDataError):
        ev.first_minimum(_series(t, np.ones_like(t)))
