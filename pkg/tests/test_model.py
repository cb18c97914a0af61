import numpy as np
import pytest
from hypothesis import given, strategies as st

from loschmidt.model import (Boundary, ChainSpec, ConfigError, EchoSeries, EngineError,
                             PerSite, QubitState, Uniform, default_dt, effective_field,
                             effective_lambda, offdiagonal_factor, purity, time_grid)


@pytest.mark.parametrize("lam, g, branch, expected", [
    (0.0, 5.0, 1, 5.0),
    (0.9, 75.0, 0, 0.9),
    (0.5, 30.0, 1, 30.5),
])
def test_effective_lambda(lam, g, branch, expected):
    assert effective_lambda(ChainSpec(10, 1.0, lam), Uniform(g), branch) == expected


def test_effective_field_pair():
    f = effective_field(ChainSpec(10, 1.0, 0.5), Uniform(30))
    assert (f.lambda_0, f.lambda_1) == (0.5, 30.5)


def test_effective_lambda_rejects_site_coupling():
    with pytest.raises(ConfigError):
        effective_lambda(ChainSpec(10, 1.0, 0.5), PerSite.single(0, 1.0), 1)


@pytest.mark.parametrize("alpha, beta, echo, expected", [
    (2 ** -0.5, 2 ** -0.5, 1.0, 1.0),
    (2 ** -0.5, 2 ** -0.5, 0.0, 0.5),
    (1.0, 0.0, 0.3, 1.0),
])
def test_purity_examples(alpha, beta, echo, expected):
    assert purity(QubitState(alpha, beta), echo) == pytest.approx(expected, abs=1e-15)


def test_purity_rejects_out_of_range_echo():
    with pytest.raises(ConfigError):
        purity(QubitState(1.0, 0.0), 1.5)


@given(st.floats(0, 2 * np.pi), st.floats(0, 1))
def test_purity_stays_between_half_and_one(theta, echo):
    q = QubitState(np.cos(theta / 2), np.sin(theta / 2) * 1j)
    p = purity(q, echo)
    assert 0.5 - 1e-12 <= p <= 1 + 1e-12


def test_offdiagonal_factor_examples():
    assert np.allclose(offdiagonal_factor(np.ones(4), 0.5), 0.5)
    assert offdiagonal_factor([0.0], 0.5)[0] == 0.0
    assert offdiagonal_factor([0.25], 0.4)[0] == pytest.approx(0.2)


def test_qubit_state_must_be_normalised():
    with pytest.raises(ConfigError):
        QubitState(1.0, 1.0)


def test_chain_spec_validation():
    with pytest.raises(ConfigError):
        ChainSpec(1, 1.0, 0.0)
    with pytest.raises(ValueError):
        ChainSpec(4, 1.0, 0.0, "twisted")
    spec = ChainSpec(4, 1, 0, "open")
    assert spec.boundary is Boundary.OPEN and not spec.periodic
    assert spec.with_(lam=0.3).lam == 0.3


def test_per_site_validation():
    with pytest.raises(ConfigError):
        PerSite(((0, 1.0), (0, 2.0)))
    with pytest.raises(ConfigError):
        PerSite.single(5, 1.0).validate(4)
    assert PerSite(((1, 2.0), (3, 4.0))).strengths(4).tolist() == [0, 2, 0, 4]


def test_echo_series_invariants():
    s = EchoSeries([0.0, 0.1], [1.0, 1.0 + 1e-12])
    assert s.values.max() == 1.0
    with pytest.raises(ValueError):
        s.values[0] = 0.5
    with pytest.raises(ConfigError):
        EchoSeries([0.1, 0.0], [1.0, 1.0])
    with pytest.raises(EngineError):
        EchoSeries([0.0], [1.1])


def test_time_grid_includes_endpoint():
    t = time_grid(1.0, 0.25)
    assert t.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    with pytest.raises(ConfigError):
        time_grid(1.0, 0.0)


@given(st.floats(0, 500))
def test_default_dt_resolves_fast_oscillation(g):
    # the fast frequency is at most 2(|g| + 2)
    assert np.pi / (2 * (abs(g) + 2)) / default_dt(g) >= 8
