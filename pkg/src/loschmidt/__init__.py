"""Loschmidt echo of a qubit coupled to an anisotropic XY spin chain.

Engines: ``modes`` (uniform coupling, momentum-mode product), ``quadratic``
(free fermions, any site-resolved coupling), ``edoracle`` (exact
diagonalization for small chains).  ``envelope`` extracts and fits peak
envelopes.
"""

__version__ = "0.1.0"

from . import edoracle, envelope, model, modes, quadratic  # noqa: E402
from .model import (Boundary, ChainSpec, ConfigError, EchoError, EchoSeries,  # noqa: E402
                    EngineError, PerSite, QubitState, Uniform)

__all__ = [
    "Boundary", "ChainSpec", "ConfigError", "EchoError", "EchoSeries", "EngineError",
    "PerSite", "QubitState", "Uniform", "edoracle", "envelope", "model", "modes",
    "quadratic", "__version__",
]
