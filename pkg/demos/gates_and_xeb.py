"""Controlled-phase gates on qutrit-encoded qubits and their XEB decay.

Prints the CCZ and CCCZ truth tables (target sandwiched by Hadamards), then
runs cross-entropy benchmarking with injected global depolarizing noise.

Run: python3 demos/gates_and_xeb.py
"""
import numpy as np

from quditladder.circuits import cccz_circuit, ccz_circuit, leakage, restricted_unitary, truth_table
from quditladder.model import ditstring
from quditladder.xeb import average_gate_fidelity, simulate_xeb

for name, circ, target in (("CCZ", ccz_circuit(), 0), ("CCCZ", cccz_circuit(), 3)):
    t = truth_table(circ, target)
    n = len(circ.dims)
    flips = [(ditstring(i, (2,) * n), ditstring(int(np.argmax(row)), (2,) * n)) for i, row in enumerate(t)
             if np.argmax(row) != i]
    print(f"{name}: {len(circ)} ops, leakage {leakage(circ):.1e}, flipped inputs {flips}")

U = restricted_unitary(ccz_circuit().unitary(), (3, 3, 3))
for r in (0.0, 0.02, 0.05):
    run = simulate_xeb(U, [1, 2, 4, 8, 16], 30, r, 100_000, seed=0)
    fit = run.fit
    print(f"\ninjected r = {r}: mean F per depth " + " ".join(f"{x:.4f}" for x in run.mean_fidelities()))
    print(f"  fit f = {fit.fidelity:.5f} +/- {fit.fidelity_err:.5f}, "
          f"F_avg = {average_gate_fidelity(run.cycle_fidelity, 8):.5f}")
