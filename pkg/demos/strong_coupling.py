"""
Strong coupling and qubit purity
================================

For ``g`` much larger than the chain bandwidth the coupling term
``g sum_j Z_j`` separates the Hilbert space into blocks of fixed total
magnetization.  Only the block-diagonal part of the chain Hamiltonian acts
slowly, so at the times ``m pi / g`` where all fast phases realign the echo
no longer depends on ``g``.
"""

import numpy as np

from loschmidt import edoracle
from loschmidt.model import ChainSpec, QubitState, Uniform, purity

spec = ChainSpec(8, 1.0, 0.0)
h_c = edoracle.build_spin_hamiltonian(spec)

for g in (10, 25, 50, 100):
    ts = edoracle.stroboscopic_times(g, 2.0)
    exact = edoracle.echo(spec, Uniform(g), ts).values
    approx = edoracle.echo_strong_coupling(h_c, g, ts).values
    print(f"g={g:<4} max |exact - block approximation| = {np.max(np.abs(exact - approx)):.5f}")

# %%
# Purity of the qubit follows from the echo alone.  Evolving qubit and chain
# together and tracing out the chain gives the same numbers.
qubit = QubitState(0.6, 0.8j)
open_chain = ChainSpec(6, 0.7, 0.4, "open")
t = np.linspace(0, 2, 9)
direct = edoracle.purity_direct(qubit, open_chain, Uniform(5), t)
from_echo = [purity(qubit, v) for v in edoracle.echo(open_chain, Uniform(5), t).values]
for ti, a, b in zip(t, direct, from_echo):
    print(f"t={ti:.2f}  purity {a:.6f}  from echo {b:.6f}")
