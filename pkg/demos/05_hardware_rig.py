#!/usr/bin/env python3
"""Ground-truth power from a six-channel oscilloscope capture.

The sensing rig measures three supplies feeding the card: the PCI-E 12 V
and 3.3 V slot rails through series shunt resistors on a riser board, and
the direct supply cable through a current clamp. This demo builds a capture
whose channels encode a known power profile, runs the rig arithmetic, and
integrates the kernel window.
"""

import io

import numpy as np

from instrujoule import (
    HwCapture,
    HwSample,
    KernelWindow,
    hw_energy,
    hw_power,
    hw_power_trace,
    load_hw_capture,
    save_hw_capture,
)

# one row, by hand: 0.1 V drop across each 0.1 ohm shunt, 10 A on the clamp
point = hw_power(HwSample(0.0, 12.1, 12.0, 3.4, 3.3, 10.0, 12.0), r_s=0.1)
print("single row:")
print(f"  pcie 12 V rail : {point.p_pcie_12v:6.1f} W")
print(f"  pcie 3.3 V rail: {point.p_pcie_3v3:6.1f} W")
print(f"  direct supply  : {point.p_dps:6.1f} W")
print(f"  total          : {point.p_total:6.1f} W\n")

# a capture tracking a square power pulse: 60 W idle, 210 W during [1, 3] s
r_s = 0.1
n = 4001
times = np.arange(n) * 0.001
profile_w = np.where((times >= 1.0) & (times <= 3.0), 210.0, 60.0)

v_g1 = np.full(n, 12.0)
v_s1 = v_g1 + (30.0 / v_g1) * r_s            # fixed 30 W on the 12 V rail
v_g2 = np.full(n, 3.3)
v_s2 = v_g2 + (10.0 / v_g2) * r_s            # fixed 10 W on the 3.3 V rail
v_dps = np.full(n, 12.0)
i_clamp = (profile_w - 40.0) / v_dps         # remainder on the direct supply

capture = HwCapture(
    times,
    {"v_s1": v_s1, "v_g1": v_g1, "v_s2": v_s2, "v_g2": v_g2,
     "i_clamp": i_clamp, "v_dps": v_dps},
    r_s,
)
trace = hw_power_trace(capture)
print(f"capture: {len(capture)} rows, shunt {capture.r_s} ohm")
print(f"rig power during the pulse: {trace.powers[2000] / 1000:.1f} W, "
      f"idle: {trace.powers[100] / 1000:.1f} W")

window = KernelWindow(1.0, 3.0)
energy = hw_energy(capture, window)
print(f"window energy over [1, 3] s: {energy / 1000:.1f} J "
      f"(expected 210 W x 2 s = 420 J)")

# captures round-trip through their CSV form, shunt value included
buf = io.StringIO()
save_hw_capture(capture, buf)
again = load_hw_capture(buf.getvalue().encode())
print(f"csv round trip: {len(again)} rows, r_s preserved: {again.r_s == capture.r_s}")
