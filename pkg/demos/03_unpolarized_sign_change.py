"""The 4 pi signature of an unpolarised spin.

An unpolarised spin (r = 0) carried once round a great circle (Omega = 2 pi)
has no preferred eigenbasis, so the phase comes from transporting a chosen
frame.  The fringes are inverted: I = (1 - cos chi) / 2.  Halfway round the
loop the visibility vanishes and the phase is undefined there.
"""
# %%
import numpy as np

from mixphase.bloch import SpherePath, geodesic_generator_path, solid_angle, unpolarized_profile
from mixphase.errors import NodalPoint
from mixphase.holonomy import analyze, reference_gauge
from mixphase.interferometry import simulate_profile
from mixphase.transport import frame_transport

equator = SpherePath(np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], dtype=float), samples_per_arc=500)
drive = geodesic_generator_path(equator, r=0.0)
path = frame_transport(drive.frames, drive.generators.times, drive.breaks)
rep = analyze(drive.rho0, path, frame=drive.frames[0])
print(f"solid angle {solid_angle(equator):.6f}, phase {rep.total_phase:.12f}, visibility {rep.visibility:.12f}")
print("routes:", ", ".join(rep.route))

# %% Simulated scan vs the closed form.
chi = 2 * np.pi * np.arange(16) / 16
sim = simulate_profile(drive.rho0, path.final, chi)
closed = unpolarized_profile(2 * np.pi, chi)
for c, a, b in zip(chi, sim.intensity, closed.intensity):
    print(f"chi = {c:5.3f}   simulated {a:.12f}   (1 - cos chi)/2 = {b:.12f}")

# %% Where the gauge-integral route stops.
try:
    reference_gauge(drive.rho0, path)
except NodalPoint as exc:
    print("nodal point:", exc)
