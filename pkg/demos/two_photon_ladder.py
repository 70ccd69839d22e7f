"""Two-photon exchange between two driven transmons.

Finds the dressed resonance by exact diagonalization, measures the |00> <-> |11>
oscillation rate and compares it with the closed-form rate. Then climbs the
ladder |kk> <-> |k+1,k+1> on four-level qudits.

Run: python3 demos/two_photon_ladder.py
"""
import math

import numpy as np

from quditladder import analytics as an
from quditladder.dynamics import chevron_scan, find_resonance_ed, measure_two_photon_rate, pair_chain

MHZ = 2 * math.pi * 1e6
w1, w2, alpha, g = 5300 * MHZ, 5570 * MHZ, 270 * MHZ, 3 * MHZ

qubits = pair_chain(w1, w2, alpha, g, 2)
print("two-level pair, 5300 / 5570 MHz, g = 3 MHz")
print(f"{'amp MHz':>8} {'w_d - mid MHz':>14} {'rate MHz':>10} {'closed form':>12}")
for amp in (15, 30, 60, 90, 135):
    om = amp * MHZ
    wd = find_resonance_ed(qubits, om)
    expect = an.two_photon_rate(g, an.drive_angles(wd, w1, w2, om))
    rate = measure_two_photon_rate(qubits, om, w_d=wd)
    print(f"{amp:8d} {(wd - 0.5 * (w1 + w2)) / MHZ:14.6f} {rate / MHZ:10.4f} {expect / MHZ:12.4f}")

# a third level pulls the resonance up with amplitude
qutrits = pair_chain(w1, w2, alpha, g, 3)
print("\nresonance shift from the midpoint with a third level")
for amp in (10, 20, 40, 80):
    shift = find_resonance_ed(qutrits, amp * MHZ) - 0.5 * (w1 + w2)
    print(f"  {amp:3d} MHz: {shift / MHZ:+.3f} MHz")

# chevron: frequency cut through the resonance
om = 60 * MHZ
w0 = find_resonance_ed(qubits, om)
rate = an.two_photon_rate(g, an.drive_angles(w0, w1, w2, om))
offsets = np.linspace(-2, 2, 9)
cm = chevron_scan(qubits, (0, 0), w0 + offsets * rate, np.linspace(0, 4 * math.pi / rate, 60), om)
print("\nchevron at 60 MHz: peak |11> population vs detuning (units of the rate)")
for x, p in zip(offsets, cm.populations.max(axis=0)):
    print(f"  {x:+.1f}  {'#' * int(40 * p):40s} {p:.3f}")

# the ladder rates scale with the coupling matrix elements
ququarts = pair_chain(w1, 5400 * MHZ, alpha, g, 4)
om = 30 * MHZ
rates = [measure_two_photon_rate(ququarts, om, levels=(k, k), w_d=find_resonance_ed(ququarts, om, levels=(k, k)))
         for k in range(3)]
print("\nladder on four-level qudits at 30 MHz")
for k, r in enumerate(rates):
    print(f"  |{k}{k}> <-> |{k + 1}{k + 1}>: {r / MHZ:.4f} MHz, ratio {r / rates[0]:.3f} (matrix-element product {k + 1})")
