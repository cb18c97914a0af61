import numpy as np
import pytest

from loschmidt import edoracle, quadratic
from loschmidt.model import ChainSpec, ConfigError, PerSite, Uniform


def test_two_spin_ising_is_antidiagonal():
    h = edoracle.build_spin_hamiltonian(ChainSpec(2, 1.0, 0.0, "open")).matrix
    assert np.array_equal(h, -np.fliplr(np.eye(4)))


def test_two_spin_xx_chain_is_traceless_hermitian():
    h = edoracle.build_spin_hamiltonian(ChainSpec(2, 0.0, 1.0, "open")).matrix
    assert np.allclose(h, h.conj().T)
    assert np.trace(h) == 0
    assert np.diag(h).tolist() == [-2, 0, 0, 2]


def test_size_cap():
    with pytest.raises(ConfigError):
        edoracle.build_spin_hamiltonian(ChainSpec(edoracle.MAX_SITES + 1, 1.0, 0.0))


def test_parity_is_conserved():
    h = edoracle.build_spin_hamiltonian(ChainSpec(6, 0.6, 0.3), PerSite.single(2, 4.0), 1).matrix
    labels = edoracle.parity_labels(6)
    assert np.all(h[np.not_equal.outer(labels, labels)] == 0)


def test_ground_energy_matches_quadratic():
    spec, coupling = ChainSpec(10, 1.0, 0.5, "open"), Uniform(5)
    e_ed, _, _ = edoracle.ground_state(edoracle.build_spin_hamiltonian(spec, coupling, 1))
    gs = quadratic.ground_state(quadratic.build_quadratic(spec, coupling, 1))
    assert e_ed == pytest.approx(gs.ground_energy, abs=1e-8)


def test_echo_without_quench_is_one():
    h = edoracle.build_spin_hamiltonian(ChainSpec(6, 0.5, 0.7))
    assert np.allclose(edoracle.echo_ed(h, h, np.linspace(0, 5, 21)).values, 1.0)


def test_two_spin_echo_closed_form():
    # even sector {|00>,|11>}: H = -(sigma_x + 2 lambda sigma_z), a single two-level quench
    lam, g = 0.5, 3.0
    t = np.linspace(0, 3, 121)
    s = edoracle.echo(ChainSpec(2, 1.0, lam, "open"), Uniform(g), t)
    b0 = np.array([1.0, 2 * lam])
    b1 = np.array([1.0, 2 * (lam + g)])
    cos_theta = b0 @ b1 / np.linalg.norm(b0) / np.linalg.norm(b1)
    expected = 1 - (1 - cos_theta ** 2) * np.sin(np.linalg.norm(b1) * t) ** 2
    assert np.allclose(s.values, expected, atol=1e-12)


@pytest.mark.filterwarnings("ignore::loschmidt.quadratic.DegenerateGroundStateWarning")
def test_open_chain_matches_quadratic():
    spec, coupling = ChainSpec(10, 1.0, 0.0, "open"), Uniform(40)
    t = np.linspace(0, 1, 201)
    e = edoracle.echo(spec, coupling, t).values
    q = quadratic.echo(spec, coupling, t).values
    assert np.max(np.abs(e - q)) < 1e-8


def test_degenerate_ground_state_needs_a_sector():
    # Ising chain at zero field: the two symmetry-broken states are degenerate in the open limit
    h = edoracle.build_spin_hamiltonian(ChainSpec(2, 1.0, 0.0, "open"))
    with pytest.raises(edoracle.AmbiguousGroundStateError):
        edoracle.ground_state(h, parity=None)
    _, _, parity = edoracle.ground_state(h, parity="auto")
    assert parity == 1


def test_two_branch_mode_agrees_with_ground_state_mode():
    spec, coupling = ChainSpec(6, 0.8, 0.4), Uniform(5)
    h0 = edoracle.build_spin_hamiltonian(spec, coupling, 0)
    h1 = edoracle.build_spin_hamiltonian(spec, coupling, 1)
    t = np.linspace(0, 2, 41)
    a = edoracle.echo_ed(h0, h1, t).values
    b = edoracle.echo_ed(h0, h1, t, two_branch=True).values
    assert np.allclose(a, b, atol=1e-12)


def test_projection_keeps_diagonal_matrices():
    diag = np.diag(np.arange(8.0))
    block = edoracle.project_block_diagonal(edoracle.SpinHamiltonian(diag, 3))
    assert np.array_equal(block.to_dense(), diag)


def test_projection_drops_magnetization_changing_terms():
    h = edoracle.build_spin_hamiltonian(ChainSpec(2, 1.0, 0.0, "open"))
    dense = edoracle.project_block_diagonal(h).to_dense()
    assert dense[0, 3] == 0 and dense[3, 0] == 0
    assert dense[1, 2] == -1 and dense[2, 1] == -1


def test_projection_preserves_trace():
    h = edoracle.build_spin_hamiltonian(ChainSpec(6, 0.3, 0.8), PerSite.single(1, 2.0), 1)
    assert edoracle.project_block_diagonal(h).trace() == pytest.approx(np.trace(h.matrix))


def test_strong_coupling_at_stroboscopic_times():
    h_c = edoracle.build_spin_hamiltonian(ChainSpec(8, 1.0, 0.0))
    for g in (50, 100):
        ts = edoracle.stroboscopic_times(g, 2.0)
        fast = edoracle.echo_strong_coupling(h_c, g, ts).values
        slow = edoracle.strong_coupling_envelope(h_c, ts).values
        assert np.allclose(fast, slow, atol=1e-12)


def test_strong_coupling_tracks_exact_echo():
    spec, g = ChainSpec(8, 1.0, 0.0), 50
    h_c = edoracle.build_spin_hamiltonian(spec)
    ts = edoracle.stroboscopic_times(g, 2.0)
    exact = edoracle.echo(spec, Uniform(g), ts).values
    approx = edoracle.echo_strong_coupling(h_c, g, ts).values
    assert np.max(np.abs(exact - approx)) < 0.05


def test_site_magnetization_symmetric_at_zero_field():
    h = edoracle.build_spin_hamiltonian(ChainSpec(8, 1.0, 0.0))
    assert abs(edoracle.site_magnetization(h, 3)) < 1e-9
