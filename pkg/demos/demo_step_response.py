# Step response of the virtual admittance arm
# ============================================
#
# The remote arm is rendered as a mass-damper-spring admittance: a force
# step should settle to f/K with the familiar underdamped ring. This demo
# integrates the model directly and overlays the analytic solution, then
# shows how the inertia-reshaping feedforward makes the same step feel
# lighter.
#
# Run:  python3 demos/demo_step_response.py  (writes step_response.png)

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from telecell.admittance import (AdmittanceParams, admittance_accel,
                                 reshape_inertia)
from telecell.core import AxisState, integrate_step

# --- the plant: M x'' + B x' + K x = f ---------------------------------------

M, B, K = 2.0, 3.0, 10.0
dt, T, f_step = 0.001, 10.0, 1.0
params = AdmittanceParams.per_axis(M, B, K, dof=1)

state = AxisState.zeros(1)
xs = []
for _ in range(int(T / dt)):
    state = integrate_step(state, admittance_accel(params, state, [f_step]), dt)
    xs.append(state.x[0])
t = np.arange(1, len(xs) + 1) * dt

# closed-form underdamped response for comparison
wn = math.sqrt(K / M)
zeta = B / (2 * math.sqrt(K * M))
wd = wn * math.sqrt(1 - zeta**2)
x_ss = f_step / K
analytic = x_ss * (1 - np.exp(-zeta * wn * t)
                   * (np.cos(wd * t) + zeta * wn / wd * np.sin(wd * t)))

print(f"steady state     : {xs[-1]:.6f} m (expected {x_ss:.6f})")
print(f"max |sim-analytic|: {np.max(np.abs(np.array(xs) - analytic)):.2e} m")

# --- same step, but with the arm reshaped to feel half as heavy ---------------

state2 = AxisState.zeros(1)
xs2 = []
for _ in range(int(T / dt)):
    f_total = f_step + reshape_inertia(M, M / 2, [f_step], state2)[0]
    state2 = integrate_step(state2, admittance_accel(params, state2, [f_total]), dt)
    xs2.append(state2.x[0])

fig, ax = plt.subplots(figsize=(8, 4.5))
ax.plot(t, xs, label="simulated")
ax.plot(t, analytic, "--", label="analytic")
ax.plot(t, xs2, label="inertia reshaped (M/2)")
ax.axhline(x_ss, color="gray", lw=0.5)
ax.set_xlabel("time [s]")
ax.set_ylabel("position [m]")
ax.set_title(f"1 N step into M={M}, B={B}, K={K}")
ax.legend()
fig.tight_layout()
fig.savefig("step_response.png", dpi=120)
print("wrote step_response.png")
