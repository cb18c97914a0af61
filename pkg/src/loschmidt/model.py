"""Domain types shared by every engine, plus the qubit-side observables.

The environment is an XY chain

    H_C = -sum_j [ (1+gamma)/2 X_j X_{j+1} + (1-gamma)/2 Y_j Y_{j+1} + lambda Z_j ]

and the qubit couples through ``-|1><1| (x) sum_j g_j Z_j``.  Conditioned on
the qubit pointer state ``a``, the chain evolves with
``H_a = H_C - a * sum_j g_j Z_j``.  Time is measured in units of the inverse
chain coupling, with hbar = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

ECHO_CLAMP_TOL = 1e-9


class EchoError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(EchoError, ValueError):
    """Invalid model parameters or engine configuration."""


class EngineError(EchoError, ArithmeticError):
    """A numerical engine produced an unusable result."""


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    OPEN = "open"


@dataclass(frozen=True)
class ChainSpec:
    """Geometry and Hamiltonian parameters of the environment chain."""

    n_sites: int
    gamma: float
    lam: float
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ConfigError(f"n_sites must be an integer >= 2, got {self.n_sites}")
        object.__setattr__(self, "n_sites", int(self.n_sites))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    def with_(self, **changes) -> "ChainSpec":
        params = dict(n_sites=self.n_sites, gamma=self.gamma, lam=self.lam,
                      boundary=self.boundary)
        params.update(changes)
        return ChainSpec(**params)


@dataclass(frozen=True)
class Uniform:
    """Central-qubit coupling: the same strength ``g`` on every site."""

    g: float

    def strengths(self, n_sites: int) -> np.ndarray:
        return np.full(n_sites, float(self.g))

    def validate(self, n_sites: int) -> None:
        pass


@dataclass(frozen=True)
class PerSite:
    """Coupling to an explicit list of sites, ``pairs = ((j, g_j), ...)``."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((int(j), float(g)) for j, g in self.pairs)
        sites = [j for j, _ in pairs]
        if len(set(sites)) != len(sites):
            raise ConfigError(f"duplicate sites in coupling: {sites}")
        object.__setattr__(self, "pairs", pairs)

    def validate(self, n_sites: int) -> None:
        for j, _ in self.pairs:
            if not 0 <= j < n_sites:
                raise ConfigError(f"coupled site {j} outside [0, {n_sites})")

    def strengths(self, n_sites: int) -> np.ndarray:
        self.validate(n_sites)
        out = np.zeros(n_sites)
        for j, g in self.pairs:
            out[j] = g
        return out

    @classmethod
    def single(cls, site: int, g: float) -> "PerSite":
        return cls(((site, g),))


CouplingSpec = Union[Uniform, PerSite]


@dataclass(frozen=True)
class QubitState:
    """Initial qubit state ``alpha|0> + beta|1>``."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ConfigError(f"qubit state not normalised: |alpha|^2+|beta|^2 = {norm}")


@dataclass(frozen=True)
class EffectiveField:
    """Field seen by the chain in each qubit branch (uniform coupling)."""

    lambda_0: float
    lambda_1: float


@dataclass(frozen=True, eq=False)
class EchoSeries:
    """Echo values ``L(t)`` on a strictly increasing time grid.

    ``notes`` carries engine markers such as ``"singular-limit"``.
    """

    times: np.ndarray
    values: np.ndarray
    notes: tuple = field(default=())

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ConfigError("times and values must be 1-d arrays of equal length")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ConfigError("times must be strictly increasing")
        if v.size and (v.min() < -ECHO_CLAMP_TOL or v.max() > 1 + ECHO_CLAMP_TOL):
            raise EngineError(
                f"echo outside [0, 1]: min {v.min():.3e}, max {v.max():.3e}")
        t.flags.writeable = False
        v = np.clip(v, 0.0, 1.0)
        v.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "notes", tuple(self.notes))

    def __len__(self):
        return self.times.size


def time_grid(t_max: float, dt: float, t_min: float = 0.0) -> np.ndarray:
    """Uniform grid ``t_min, t_min+dt, ...`` up to and including ``t_max``."""
    if dt <= 0 or t_max <= t_min:
        raise ConfigError(f"need dt > 0 and t_max > t_min (got dt={dt}, t_max={t_max})")
    n = int(np.floor((t_max - t_min) / dt + 1e-9)) + 1
    return t_min + dt * np.arange(n)


def default_dt(g: float) -> float:
    """Time step resolving the fast oscillation (frequency ~2g) with >= 16 samples."""
    return min(5e-4, np.pi / (16 * (2 * abs(g) + 4)))


def effective_lambda(spec: ChainSpec, coupling: CouplingSpec, branch: int) -> float:
    """Field ``lambda + branch * g`` felt by the chain in a given qubit branch."""
    if not isinstance(coupling, Uniform):
        raise ConfigError("effective_lambda is defined for uniform coupling only")
    if branch not in (0, 1):
        raise ConfigError(f"branch must be 0 or 1, got {branch}")
    return spec.lam + branch * coupling.g


def effective_field(spec: ChainSpec, coupling: Uniform) -> EffectiveField:
    return EffectiveField(effective_lambda(spec, coupling, 0),
                          effective_lambda(spec, coupling, 1))


def purity(qubit: QubitState, echo_value: float) -> float:
    """Purity ``Tr rho^2`` of the qubit given the echo value ``L``."""
    if echo_value < -ECHO_CLAMP_TOL or echo_value > 1 + ECHO_CLAMP_TOL:
        raise ConfigError(f"echo value {echo_value} outside [0, 1]")
    echo_value = min(max(echo_value, 0.0), 1.0)
    ab2 = abs(qubit.alpha * qubit.beta) ** 2
    return 1.0 - 2.0 * ab2 * (1.0 - echo_value)


def offdiagonal_factor(echo_series: EchoSeries | Sequence[float] | np.ndarray,
                       rho0_offdiag: complex) -> np.ndarray:
    """Magnitude of the coherence ``|rho_01(t)| = |rho_01(0)| sqrt(L(t))``."""
    values = echo_series.values if isinstance(echo_series, EchoSeries) else echo_series
    return abs(rho0_offdiag) * np.sqrt(np.asarray(values, dtype=float))


def as_times(times: Iterable[float]) -> np.ndarray:
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if t.ndim != 1:
        raise ConfigError("times must be one-dimensional")
    return t
