"""Husimi-Q and Wigner functions of entangled qudit states on the sphere.

Compares the squeezing geodesics of Bell_4 and NOON_4 and shows the negative
fringes of a two-ququart cat state. Writes CSV grids to ./qpd_out.

Run: python3 demos/phase_space.py
"""
import math
from pathlib import Path

import numpy as np

from quditladder.circuits import bell_target, noon_target
from quditladder.model import QuantumState
from quditladder.qpd import axis_angle, export_grid, husimi_q, squeezing_axis, wigner

out = Path("qpd_out")
out.mkdir(exist_ok=True)
cat = np.zeros(16, dtype=complex)
cat[0] = cat[15] = 1 / math.sqrt(2)
states = {"bell4": bell_target(4), "noon4": noon_target(4), "cat_00_33": cat}

axes = {}
for name, vec in states.items():
    st = QuantumState.from_vector((4, 4), vec)
    q = husimi_q(st)
    w = wigner(st)
    axes[name] = squeezing_axis(q)
    export_grid(q, out / f"{name}_husimi.csv")
    export_grid(w, out / f"{name}_wigner.csv")
    print(f"{name:10s} squeezing normal {np.round(axes[name], 3)}, Wigner range [{w.values.min():+.3f}, "
          f"{w.values.max():+.3f}]")

print(f"\nangle between Bell4 and NOON4 squeezing normals: {math.degrees(axis_angle(axes['bell4'], axes['noon4'])):.1f} deg")
print(f"grids written to {out.resolve()}")
