"""Randomized cross-engine comparison harness."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import edoracle, modes, quadratic
from .model import Boundary, ChainSpec, PerSite, Uniform

EXACT_TOL = 1e-8


@dataclass
class PairResult:
    name: str
    tolerance: str
    max_deviation: float = 0.0
    worst_case: str = ""
    cases: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, label: str, deviation: float, limit: float):
        self.cases += 1
        if deviation > self.max_deviation:
            self.max_deviation = deviation
            self.worst_case = label
        if deviation > limit:
            self.failures.append((label, deviation, limit))


@dataclass
class ValidationReport:
    n_max: int
    seed: int
    pairs: dict

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.pairs.values())

    def lines(self):
        yield f"# cross-engine validation n_max={self.n_max} seed={self.seed}"
        yield "pair,cases,max_deviation,tolerance,status,worst_case"
        for p in self.pairs.values():
            status = "PASS" if p.passed else "FAIL"
            yield f"{p.name},{p.cases},{p.max_deviation:.3e},{p.tolerance},{status},{p.worst_case}"


def _random_coupling(rng, n):
    if rng.random() < 0.5:
        return Uniform(rng.uniform(0, 80))
    k = rng.integers(1, n + 1)
    sites = rng.choice(n, size=k, replace=False)
    return PerSite(tuple((int(j), float(rng.uniform(0, 80))) for j in sorted(sites)))


def cross_validate(n_max: int = 10, seed: int = 0, configs_per_size: int = 3,
                   times=None) -> ValidationReport:
    """Compare engines on random chains with ``4 <= N <= n_max``.

    Pairs checked:

    * quadratic vs exact diagonalization, open chain, any coupling (exact);
    * mode product vs quadratic on the fermion-periodic ring (exact);
    * mode product vs exact diagonalization on the spin ring (within ``10/N``).
    """
    if n_max > edoracle.MAX_SITES:
        raise ValueError(f"n_max must not exceed {edoracle.MAX_SITES}")
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 2.0, 201) if times is None else np.asarray(times, dtype=float)
    pairs = {
        "quadratic-ed-open": PairResult("quadratic-ed-open", f"{EXACT_TOL:g}"),
        "modes-quadratic-periodic": PairResult("modes-quadratic-periodic", f"{EXACT_TOL:g}"),
        "modes-ed-periodic": PairResult("modes-ed-periodic", "10/N"),
    }
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", quadratic.DegenerateGroundStateWarning)
        for n in range(4, n_max + 1):
            for _ in range(configs_per_size):
                gamma = float(rng.uniform(0, 1))
                lam = float(rng.uniform(0, 2))
                coupling = _random_coupling(rng, n)
                label = f"N={n} gamma={gamma:.4f} lambda={lam:.4f} {coupling}"

                spec = ChainSpec(n, gamma, lam, Boundary.OPEN)
                a = quadratic.echo(spec, coupling, t).values
                b = edoracle.echo(spec, coupling, t).values
                pairs["quadratic-ed-open"].record(label, float(np.max(np.abs(a - b))), EXACT_TOL)

                if n % 2:
                    continue
                uniform = Uniform(float(rng.uniform(0, 80)))
                ring = ChainSpec(n, gamma, lam, Boundary.PERIODIC)
                label = f"N={n} gamma={gamma:.4f} lambda={lam:.4f} g={uniform.g:.4f}"
                m = modes.echo(ring, uniform, t).values
                qv = quadratic.echo(ring, uniform, t).values
                e = edoracle.echo(ring, uniform, t).values
                pairs["modes-quadratic-periodic"].record(label, float(np.max(np.abs(m - qv))), EXACT_TOL)
                pairs["modes-ed-periodic"].record(label, float(np.max(np.abs(m - e))), 10.0 / n)
    return ValidationReport(n_max, seed, pairs)
