"""Optical geometry on a flat torus: metrics, cones, parsed coefficients.

A spacetime here is a pair of samplers on R x torus: a lapse-squared
scalar beta and a spatial form h.  Everything causal is decided through
the optical form k = h / beta: a velocity v is timelike iff k(v, v) < 1,
so comparing light cones of two metrics is an eigenvalue comparison of
their optical forms.
"""
import numpy as np

import causalkit as ck

grid = ck.SpatialGrid(dim=2, cells=64, period=8.0)
print(f"grid: {grid.cells}^2 cells, period {grid.period}, dx = {grid.spacing}")

flat = ck.minkowski(grid)
slow = ck.ultrastatic(grid, k_scale=4.0)  # light moves at coordinate speed 1/2

x = np.array([[4.0, 4.0]])
print("\noptical forms at the centre:")
print("  flat:", ck.optical_metric(flat, 0.0, x)[0].ravel())
print("  slow:", ck.optical_metric(slow, 0.0, x)[0].ravel())

# a larger optical form means a narrower cone: slow-cones sit inside flat-cones
print("\ncone containment (slow inside flat)?", bool(ck.cone_contained(slow, flat, 0.0, x)[0]))
print("cone containment (flat inside slow)?", bool(ck.cone_contained(flat, slow, 0.0, x)[0]))
print("margin (min eig of k_slow - k_flat):", float(ck.cone_margin(slow, flat, 0.0, x)[0]))

# coefficients can come from expression text; 't' and 'x1', 'x2' are the
# variables, with sin/cos/exp/sqrt/abs/min/max available
wavy = ck.from_expressions(grid, beta_src="1", h_src="1.5 + 0.5*sin(x1)*cos(x2)")
pts = grid.points().reshape(-1, 2)[::97]
k = ck.optical_metric(wavy, 0.0, pts)
print("\nexpression metric: k_xx ranges over",
      (float(k[..., 0, 0].min()), float(k[..., 0, 0].max())))

# an expanding metric: the optical form decays, light speeds up with time
expanding = ck.from_expressions(grid, "1", "exp(-2*t)")
for t in (0.0, 0.5, 1.0):
    from causalkit.geometry import max_speed
    print(f"fastest coordinate light speed at t={t}: {max_speed(expanding, t):.4f}")

# parse errors carry the offset of the failure
try:
    ck.parse_field_expression("x1*")
except Exception as e:
    print("\nparse error demo:", e)
