"""Free-fermion engine for arbitrary site-resolved couplings.

Fermions count down spins, ``Z_j = 1 - 2 c_j^dag c_j``, so the field enters
the hopping matrix as ``+2 lambda_j`` on the diagonal.  A Hamiltonian is
stored as

    H = sum_ij a_ij c_i^dag c_j + 1/2 sum_ij b_ij (c_i^dag c_j^dag + h.c.) + offset

with ``a`` real symmetric and ``b`` real antisymmetric.  For an open chain the
mapping from spins is exact.  For a periodic chain the wrap bond is written
directly in fermions (periodic fermions), dropping the parity string.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .model import (ChainSpec, ConfigError, CouplingSpec, EchoSeries, EngineError,
                    as_times)

ZERO_MODE_TOL = 1e-10


class DegenerateGroundStateWarning(RuntimeWarning):
    pass


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    a_matrix: np.ndarray
    b_matrix: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.a_matrix, dtype=float)
        b = np.asarray(self.b_matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise ConfigError("a and b must be square matrices of equal size")
        if not np.allclose(a, a.T, rtol=0, atol=1e-12):
            raise ConfigError("hopping matrix is not symmetric")
        if not np.allclose(b, -b.T, rtol=0, atol=1e-12):
            raise ConfigError("pairing matrix is not antisymmetric")
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "b_matrix", b)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n_modes(self) -> int:
        return self.a_matrix.shape[0]

    def bdg(self) -> np.ndarray:
        """Nambu matrix with ``H = 1/2 Psi^dag H_bdg Psi + tr(a)/2 + offset``."""
        a, b = self.a_matrix, self.b_matrix
        return np.block([[a, b], [-b, -a]])


def chain_bonds(n_sites: int, periodic: bool):
    bonds = [(j, j + 1) for j in range(n_sites - 1)]
    if periodic:
        bonds.append((n_sites - 1, 0))
    return bonds


def build_quadratic(spec: ChainSpec, coupling: CouplingSpec, branch: int,
                    fermion_boundary: str = "periodic") -> QuadraticHamiltonian:
    """Fermionic form of ``H_C - branch * sum_j g_j Z_j``.

    ``fermion_boundary`` only matters for a periodic chain.  ``"periodic"``
    closes the ring directly in fermions.  ``"antiperiodic"`` flips the sign
    of the wrap bond, which reproduces the spin ring exactly inside the even
    parity sector (``prod_j Z_j = +1``).
    """
    if fermion_boundary not in ("periodic", "antiperiodic"):
        raise ConfigError(f"unknown fermion boundary {fermion_boundary!r}")
    if branch not in (0, 1):
        raise ConfigError(f"branch must be 0 or 1, got {branch}")
    n = spec.n_sites
    coupling.validate(n)
    fields = spec.lam + branch * coupling.strengths(n)
    a = np.diag(2.0 * fields)
    b = np.zeros((n, n))
    for i, j in chain_bonds(n, spec.periodic):
        sign = -1.0 if (j == 0 and fermion_boundary == "antiperiodic") else 1.0
        a[i, j] -= sign
        a[j, i] -= sign
        b[i, j] -= sign * spec.gamma
        b[j, i] += sign * spec.gamma
    return QuadraticHamiltonian(a, b, offset=-float(np.sum(fields)))


def _svd_modes(h: QuadraticHamiltonian):
    # (a+b) phi = E psi, (a-b) psi = E phi with phi = u+v, psi = u-v
    x, s, yt = np.linalg.svd(h.a_matrix + h.b_matrix)
    return x, s, yt.T


@dataclass(frozen=True, eq=False)
class GaussianGroundState:
    """Quasiparticle vacuum: ``c = U eta + V eta^dag``, all ``eta`` empty."""

    u: np.ndarray
    v: np.ndarray
    energies: np.ndarray
    ground_energy: float
    parity: int
    warnings: tuple = field(default=())

    @property
    def n_modes(self) -> int:
        return self.u.shape[0]

    @property
    def bogoliubov_matrices(self):
        return self.u, self.v

    def w_matrix(self) -> np.ndarray:
        u, v = self.u, self.v
        return np.block([[u, v], [v, u]])

    def canonical_error(self) -> float:
        w = self.w_matrix()
        return float(np.max(np.abs(w.T @ w - np.eye(w.shape[0]))))


def ground_state(h: QuadraticHamiltonian, parity: str | None = None) -> GaussianGroundState:
    """Ground state of a quadratic Hamiltonian.

    Parameters
    ----------
    h : QuadraticHamiltonian
    parity : {None, "even", "odd"}
        Fermion-number parity to enforce when the lowest mode has zero energy.
        ``None`` picks ``"even"`` for degenerate ground states and otherwise
        keeps the true vacuum.  A non-degenerate ground state of the wrong
        parity is never altered.
    """
    if not isinstance(h, QuadraticHamiltonian):
        raise ConfigError("expected a QuadraticHamiltonian")
    x, s, y = _svd_modes(h)
    notes = []
    vac_parity = int(round(np.linalg.det(x) * np.linalg.det(y)))
    if s.size and s[-1] < ZERO_MODE_TOL:
        notes.append(f"near-zero mode energy {s[-1]:.2e}: ground state degenerate")
        warnings.warn(notes[-1], DegenerateGroundStateWarning, stacklevel=2)
        want = -1 if parity == "odd" else 1
        if vac_parity != want:
            # swap eta <-> eta^dag for the zero mode
            x = x.copy()
            x[:, -1] *= -1
            vac_parity = want
    u = 0.5 * (y + x)
    v = 0.5 * (y - x)
    e0 = -0.5 * np.sum(s) + 0.5 * np.trace(h.a_matrix) + h.offset
    return GaussianGroundState(u=u, v=v, energies=s, ground_energy=float(e0),
                               parity=vac_parity, warnings=tuple(notes))


def echo_overlap(gs0: GaussianGroundState, h1: QuadraticHamiltonian, times,
                 chunk: int = 256) -> EchoSeries:
    """Survival probability ``|<E0| exp(-i H1 t) |E0>|^2``.

    The evolved state is the vacuum of ``W(t) = exp(-i H_bdg t) W0``; the
    squared overlap of two such vacua is ``|det(U0^dag U_t + V0^dag V_t)|``.
    With the spectral form of ``H_bdg`` this block is
    ``R exp(-i D t) R^T`` where ``R`` is the top half of ``W0^T W1``.
    """
    if gs0.n_modes != h1.n_modes:
        raise ConfigError(f"dimension mismatch: {gs0.n_modes} vs {h1.n_modes}")
    t = as_times(times)
    x1, e1, y1 = _svd_modes(h1)
    u1, v1 = 0.5 * (y1 + x1), 0.5 * (y1 - x1)
    w1 = np.block([[u1, v1], [v1, u1]])
    n = gs0.n_modes
    r = (gs0.w_matrix().T @ w1)[:n, :]
    energies = np.concatenate([e1, -e1])
    values = np.empty(t.size)
    for start in range(0, t.size, chunk):
        tt = t[start:start + chunk]
        phases = np.exp(-1j * np.outer(tt, energies))
        m = (r[None, :, :] * phases[:, None, :]) @ r.T
        sign, logdet = np.linalg.slogdet(m)
        values[start:start + chunk] = np.where(sign == 0, 0.0, np.exp(logdet))
    if values.max(initial=0.0) > 1 + 1e-8:
        raise EngineError(f"overlap exceeds unity ({values.max():.3e})")
    return EchoSeries(t, values)


def echo(spec: ChainSpec, coupling: CouplingSpec, times, parity: str | None = None,
         fermion_boundary: str = "periodic") -> EchoSeries:
    """Ground state of branch 0 evolved under branch 1."""
    gs0 = ground_state(build_quadratic(spec, coupling, 0, fermion_boundary), parity=parity)
    return echo_overlap(gs0, build_quadratic(spec, coupling, 1, fermion_boundary), times)


def site_occupation(gs: GaussianGroundState) -> np.ndarray:
    return np.einsum("ik,ik->i", gs.v, gs.v)


def site_magnetization(gs: GaussianGroundState, site: int) -> float:
    """Ground-state ``<Z_site>``."""
    if not 0 <= site < gs.n_modes:
        raise ConfigError(f"site {site} outside [0, {gs.n_modes})")
    return float(1.0 - 2.0 * site_occupation(gs)[site])


def short_time_echo(mean_z: float, g: float, times) -> EchoSeries:
    """``1 - (1 - <Z>^2) sin^2(g t)``: chain dynamics neglected after preparation."""
    if abs(mean_z) > 1 + 1e-12:
        raise ConfigError(f"|<Z>| must not exceed 1, got {mean_z}")
    t = as_times(times)
    return EchoSeries(t, 1.0 - (1.0 - mean_z ** 2) * np.sin(g * t) ** 2)
