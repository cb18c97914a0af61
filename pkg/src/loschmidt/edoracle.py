"""Brute-force exact diagonalization of the spin chain, used as ground truth.

Basis states are integers whose bit ``j`` is the state of site ``j``; bit 0
means ``Z_j = +1``.  Every Hamiltonian here conserves the spin-flip parity
``prod_j Z_j = (-1)^popcount``, so spectra are computed sector by sector.
The module also holds the strong-coupling approximation in which the chain
Hamiltonian is projected onto blocks of fixed total magnetization
``Z_T = sum_j Z_j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (ChainSpec, ConfigError, CouplingSpec, EchoSeries, EngineError,
                    QubitState, Uniform, as_times)
from .quadratic import chain_bonds

MAX_SITES = 14
DEGENERACY_TOL = 1e-10


class AmbiguousGroundStateError(EngineError):
    """Ground state degenerate across parity sectors and no sector selected."""


def _popcount(n_sites: int) -> np.ndarray:
    idx = np.arange(2 ** n_sites)
    bits = (idx[:, None] >> np.arange(n_sites)) & 1
    return bits.sum(axis=1)


def z_eigenvalues(n_sites: int) -> np.ndarray:
    """``z[i, j]`` is the ``Z_j`` eigenvalue of basis state ``i``."""
    idx = np.arange(2 ** n_sites)
    return 1 - 2 * ((idx[:, None] >> np.arange(n_sites)) & 1)


def total_magnetization(n_sites: int) -> np.ndarray:
    """Eigenvalue ``Lambda = sum_j Z_j`` of every basis state."""
    return n_sites - 2 * _popcount(n_sites)


def parity_labels(n_sites: int) -> np.ndarray:
    return 1 - 2 * (_popcount(n_sites) % 2)


@dataclass(frozen=True, eq=False)
class SpinHamiltonian:
    matrix: np.ndarray
    n_sites: int

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (2 ** self.n_sites,) * 2:
            raise ConfigError("matrix dimension does not match 2**n_sites")
        if not np.allclose(m, m.conj().T, rtol=0, atol=1e-12):
            raise ConfigError("spin Hamiltonian is not Hermitian")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _check_size(n_sites: int):
    if n_sites > MAX_SITES:
        raise ConfigError(f"exact diagonalization capped at {MAX_SITES} sites, got {n_sites}")


def build_spin_hamiltonian(spec: ChainSpec, coupling: CouplingSpec | None = None,
                           branch: int = 0) -> SpinHamiltonian:
    """Dense ``H_C - branch * sum_j g_j Z_j`` including the spin wrap bond."""
    n = spec.n_sites
    _check_size(n)
    if branch not in (0, 1):
        raise ConfigError(f"branch must be 0 or 1, got {branch}")
    coupling = coupling if coupling is not None else Uniform(0.0)
    coupling.validate(n)
    dim = 2 ** n
    idx = np.arange(dim)
    z = z_eigenvalues(n)
    fields = spec.lam + branch * coupling.strengths(n)
    h = np.zeros((dim, dim))
    h[idx, idx] = -z @ fields
    for i, j in chain_bonds(n, spec.periodic):
        flipped = idx ^ ((1 << i) | (1 << j))
        same = z[:, i] == z[:, j]
        # -(1+gamma)/2 XX - (1-gamma)/2 YY: -gamma between equal spins, -1 otherwise
        np.add.at(h, (flipped, idx), np.where(same, -spec.gamma, -1.0))
    return SpinHamiltonian(h, n)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigen-decomposition of a Hamiltonian, split by spin-flip parity."""

    energies: np.ndarray
    vectors: np.ndarray
    parities: np.ndarray


def spectrum(h: SpinHamiltonian) -> Spectrum:
    labels = parity_labels(h.n_sites)
    energies, vectors, parities = [], [], []
    for p in (1, -1):
        sel = np.flatnonzero(labels == p)
        e, v = np.linalg.eigh(h.matrix[np.ix_(sel, sel)])
        full = np.zeros((h.dim, sel.size), dtype=v.dtype)
        full[sel] = v
        energies.append(e)
        vectors.append(full)
        parities.append(np.full(sel.size, p))
    return Spectrum(np.concatenate(energies), np.hstack(vectors), np.concatenate(parities))


def ground_state(h: SpinHamiltonian, parity: str | None = "auto"):
    """Lowest eigenvector, returned as ``(energy, vector, parity)``.

    ``parity="auto"`` returns the global ground state and falls back to the
    even sector when the two sector minima lie within 1e-10 of each other;
    ``"even"`` or ``"odd"`` restricts to that sector; ``None`` raises on
    a cross-sector degeneracy.
    """
    spec = spectrum(h)
    best = {}
    for p in (1, -1):
        mask = spec.parities == p
        if np.any(mask):
            i = np.flatnonzero(mask)[np.argmin(spec.energies[mask])]
            best[p] = i
    if parity in ("even", "odd"):
        i = best[1 if parity == "even" else -1]
    else:
        ie, io = best[1], best.get(-1)
        if io is not None and abs(spec.energies[ie] - spec.energies[io]) < DEGENERACY_TOL:
            if parity is None:
                raise AmbiguousGroundStateError(
                    "ground state degenerate across parity sectors")
            i = ie
        else:
            i = ie if io is None or spec.energies[ie] < spec.energies[io] else io
    return float(spec.energies[i]), spec.vectors[:, i], int(spec.parities[i])


def _evolve(spec: Spectrum, state: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Rows are ``exp(-i H t) state`` for each time."""
    amps = spec.vectors.conj().T @ state
    phases = np.exp(-1j * np.outer(t, spec.energies))
    return (phases * amps[None, :]) @ spec.vectors.T


def echo_ed(h0: SpinHamiltonian, h1: SpinHamiltonian, times, *, parity: str | None = "auto",
            initial_state: np.ndarray | None = None, two_branch: bool = False) -> EchoSeries:
    """Exact echo ``|<psi| e^{i H0 t} e^{-i H1 t} |psi>|^2``.

    By default ``psi`` is the ground state of ``h0``, so only the ``h1``
    evolution matters.  Passing ``initial_state`` (or ``two_branch=True``)
    evolves under both Hamiltonians.
    """
    if h0.dim != h1.dim:
        raise ConfigError(f"dimension mismatch: {h0.dim} vs {h1.dim}")
    t = as_times(times)
    sp1 = spectrum(h1)
    if initial_state is None:
        _, psi, _ = ground_state(h0, parity)
    else:
        psi = np.asarray(initial_state, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        two_branch = True
    if two_branch:
        phi0 = _evolve(spectrum(h0), psi, t)
        phi1 = _evolve(sp1, psi, t)
        norms = np.linalg.norm(phi1, axis=1)
        if np.max(np.abs(norms - 1)) > 1e-10:
            raise EngineError("norm not conserved during evolution")
        amp = np.einsum("ti,ti->t", phi0.conj(), phi1)
    else:
        weights = np.abs(sp1.vectors.conj().T @ psi) ** 2
        if abs(weights.sum() - 1) > 1e-10:
            raise EngineError("norm not conserved during evolution")
        amp = np.exp(-1j * np.outer(t, sp1.energies)) @ weights
    return EchoSeries(t, np.abs(amp) ** 2)


def echo(spec: ChainSpec, coupling: CouplingSpec, times, parity: str | None = "auto") -> EchoSeries:
    return echo_ed(build_spin_hamiltonian(spec, coupling, 0),
                   build_spin_hamiltonian(spec, coupling, 1), times, parity=parity)


@dataclass(frozen=True, eq=False)
class BlockHamiltonian:
    """Chain Hamiltonian restricted to blocks of equal ``Lambda``."""

    n_sites: int
    blocks: dict

    def to_dense(self) -> np.ndarray:
        dim = 2 ** self.n_sites
        first = next(iter(self.blocks.values()))[1]
        out = np.zeros((dim, dim), dtype=first.dtype)
        for sel, mat in self.blocks.values():
            out[np.ix_(sel, sel)] = mat
        return out

    def trace(self) -> float:
        return float(sum(np.trace(m).real for _, m in self.blocks.values()))


def project_block_diagonal(h_c: SpinHamiltonian) -> BlockHamiltonian:
    """Drop every element connecting states of different total magnetization."""
    lam = total_magnetization(h_c.n_sites)
    values = np.unique(lam)
    assert np.all(np.diff(values) == 2), "Lambda spectrum must be spaced by 2"
    blocks = {}
    for val in values[::-1]:
        sel = np.flatnonzero(lam == val)
        blocks[int(val)] = (sel, h_c.matrix[np.ix_(sel, sel)].copy())
    return BlockHamiltonian(h_c.n_sites, blocks)


def _slow_amplitudes(h_c: SpinHamiltonian, t: np.ndarray, parity):
    """Per-block amplitudes ``<E0| P_Lambda exp(-i t H'_C) |E0>``."""
    _, psi, _ = ground_state(h_c, parity)
    block = project_block_diagonal(h_c)
    lams, amps = [], []
    for val, (sel, mat) in block.blocks.items():
        part = psi[sel]
        if not np.any(np.abs(part) > 0):
            continue
        e, v = np.linalg.eigh(mat)
        w = np.abs(v.conj().T @ part) ** 2
        lams.append(val)
        amps.append(np.exp(-1j * np.outer(t, e)) @ w)
    return np.array(lams), np.array(amps).T


def echo_strong_coupling(h_c: SpinHamiltonian, g: float, times, parity: str | None = "auto") -> EchoSeries:
    """Strong-coupling echo ``|<E0| e^{i g t Z_T} e^{-i t H'_C} |E0>|^2``.

    ``h_c`` is the bare chain (branch 0) Hamiltonian and ``g`` the uniform
    coupling of branch 1.
    """
    _check_size(h_c.n_sites)
    t = as_times(times)
    lams, amps = _slow_amplitudes(h_c, t, parity)
    fast = np.exp(1j * g * np.outer(t, lams))
    return EchoSeries(t, np.abs(np.sum(fast * amps, axis=1)) ** 2)


def strong_coupling_envelope(h_c: SpinHamiltonian, times, parity: str | None = "auto") -> EchoSeries:
    """Slow part ``|<E0| e^{-i t H'_C} |E0>|^2``, independent of ``g``.

    It equals :func:`echo_strong_coupling` at the stroboscopic times
    ``t = m pi / g`` where all fast phases coincide.
    """
    t = as_times(times)
    _, amps = _slow_amplitudes(h_c, t, parity)
    return EchoSeries(t, np.abs(np.sum(amps, axis=1)) ** 2)


def stroboscopic_times(g: float, t_max: float) -> np.ndarray:
    """``m pi / g`` for ``m = 0, 1, ...`` up to ``t_max``."""
    m = np.arange(int(np.floor(t_max * abs(g) / np.pi + 1e-9)) + 1)
    return m * np.pi / abs(g)


def site_magnetization(h: SpinHamiltonian, site: int, parity: str | None = "auto") -> float:
    _, psi, _ = ground_state(h, parity)
    z = z_eigenvalues(h.n_sites)[:, site]
    return float(np.sum(np.abs(psi) ** 2 * z))


def qubit_reduced_states(qubit: QubitState, spec: ChainSpec, coupling: CouplingSpec, times,
                         parity: str | None = "auto") -> np.ndarray:
    """Reduced qubit density matrices from the full qubit+chain evolution.

    The total Hamiltonian ``1 (x) H_C - |1><1| (x) sum_j g_j Z_j`` is built on
    ``2^(N+1)`` states with the qubit as the most significant factor; the
    chain starts in the ground state of ``H_C``.
    """
    _check_size(spec.n_sites + 1)
    t = as_times(times)
    h_c = build_spin_hamiltonian(spec, coupling, 0)
    h_1 = build_spin_hamiltonian(spec, coupling, 1)
    proj0 = np.diag([1.0, 0.0])
    proj1 = np.diag([0.0, 1.0])
    total = np.kron(proj0, h_c.matrix) + np.kron(proj1, h_1.matrix)
    _, env, _ = ground_state(h_c, parity)
    psi0 = np.kron(np.array([qubit.alpha, qubit.beta], dtype=complex), env)
    e, v = np.linalg.eigh(total)
    amps = v.conj().T @ psi0
    states = (np.exp(-1j * np.outer(t, e)) * amps[None, :]) @ v.T
    psi = states.reshape(t.size, 2, h_c.dim)
    return np.einsum("tae,tbe->tab", psi, psi.conj())


def purity_direct(qubit: QubitState, spec: ChainSpec, coupling: CouplingSpec, times,
                  parity: str | None = "auto") -> np.ndarray:
    rho = qubit_reduced_states(qubit, spec, coupling, times, parity)
    return np.einsum("tab,tba->t", rho, rho).real
