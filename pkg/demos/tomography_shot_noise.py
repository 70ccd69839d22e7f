"""Shot-noise limited tomography of Bell states.

Simulates n_rep shots per pre-measurement setting, reconstructs by maximum
likelihood and by least squares, and reports the fidelity spread. A reduced
trial count keeps the runtime short; the acceptance suite runs the full study.

Run: python3 demos/tomography_shot_noise.py
"""
import numpy as np

from quditladder.circuits import bell_target
from quditladder.model import QuantumState
from quditladder.readout import ConfusionMatrix, ReadoutModel, expected_confusion
from quditladder.tomography import (fidelity, mcweeny_purify, mle_reconstruct, projector_set, shot_noise_mc,
                                    simulate_tomography)

trials = 20
for d in (2, 3):
    state = QuantumState.from_vector((d, d), bell_target(d))
    pset = projector_set(d)
    for n_rep in (1000, 4000):
        mle = shot_noise_mc(state, pset, n_rep, trials, seed=1)
        ls = shot_noise_mc(state, pset, n_rep, trials, seed=1, estimator="lstsq")
        print(f"bell{d} n_rep={n_rep:5d}: MLE {mle.mean:.4f} +/- {mle.std:.4f}, "
              f"least squares {ls.mean:.4f} +/- {ls.std:.4f}")

# readout misassignment, undone before reconstruction
single = ConfusionMatrix(expected_confusion(ReadoutModel.default(3, snr=4.0)), (3,))
conf = single.kron(single)
state = QuantumState.from_vector((3, 3), bell_target(3))
pset = projector_set(3)
rec = simulate_tomography(state, pset, 2000, conf, seed=4)
rho = mle_reconstruct(rec, pset)
print(f"\nbell3 with snr=4 readout: assignment fidelity {np.diag(single.matrix).min():.4f}, "
      f"raw {fidelity(rho, state):.4f}, purified {fidelity(mcweeny_purify(rho), state):.4f}")
