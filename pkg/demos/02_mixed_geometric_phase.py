"""Geometric phase of a mixed qubit dragged round a geodesic triangle.

The Bloch vector of length r visits z -> x -> y -> z along great circles,
enclosing the solid angle pi/2.  A pure state (r = 1) acquires -Omega/2; a
mixed one acquires arg[cos(Omega/2) - i r sin(Omega/2)], and the fringe
visibility drops below one even though the path is closed.
"""
# %%
import math

import numpy as np

from mixphase.bloch import (
    SpherePath,
    geodesic_generator_path,
    qubit_phase_closed_form,
    qubit_visibility_closed_form,
    solid_angle,
)
from mixphase.holonomy import analyze
from mixphase.transport import transport_evolution

triangle = SpherePath(np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=float), closed=True, samples_per_arc=2000)
omega = solid_angle(triangle)
print(f"solid angle = {omega:.12f} (pi/2 = {math.pi / 2:.12f})")

# %% Sweep the purity.  transport_evolution removes the part of the drive that
# would add a dynamical phase, so arg Tr(rho U) is purely geometric.
print(" r     gamma_g (trace)   gamma_g (integral)  closed form       nu        closed nu")
for r in (0.1, 0.25, 0.5, 0.75, 0.9, 1.0):
    drive = geodesic_generator_path(triangle, r)
    rep = analyze(drive.rho0, transport_evolution(drive.rho0, drive.generators))
    print(f"{r:4.2f}  {rep.gamma_g_trace:+.10f}    {rep.gamma_g_integral:+.10f}     "
          f"{qubit_phase_closed_form(r, omega):+.10f}   {rep.visibility:.8f}  "
          f"{qubit_visibility_closed_form(r, omega):.8f}")

# %% Only the pure state reproduces -Omega/2 exactly.
print("-Omega/2 =", -omega / 2)
