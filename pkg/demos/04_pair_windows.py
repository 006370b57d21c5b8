"""Regular pairs, the development preorder, and certified time windows.

A pair (S, T) of nested slice regions is regular when S sits strictly
inside T and T leaves an exterior.  One pair precedes another when the
second's inner region lies in the development of the first's, and the
first's outer region lies in the development of the second's.

The window certificate makes the causal-speed estimate effective: K
bounds how much the reference optical form exceeds nearby ones over the
dilated region, and any two times within eps = delta / (2 sqrt(K)) of the
reference keep the containments valid.
"""
import numpy as np

import causalkit as ck

grid = ck.SpatialGrid(2, 96, 12.0)
c = [6.0, 6.0]
flat = ck.minkowski(grid)

pair = ck.CauchyPair(0.0, ck.ball(grid, c, 1.0), ck.ball(grid, c, 2.0))
print("pair (ball 1, ball 2) regular?", bool(ck.is_regular(pair)))
bad = ck.CauchyPair(0.0, ck.ball(grid, c, 2.0), ck.ball(grid, c, 1.0))
print("reversed pair:", ck.is_regular(bad).reason)

p1 = ck.CauchyPair(0.0, ck.ball(grid, c, 2.0), ck.ball(grid, c, 3.0))
p2 = ck.CauchyPair(0.5, ck.ball(grid, c, 1.0), ck.ball(grid, c, 4.0))
res = ck.precedes(p1, p2, flat, ck.Margin(2.0))
print(f"\n(2,3)@0 precedes (1,4)@0.5: {bool(res)} "
      f"(margins {res.s_margin:.1f}, {res.t_margin:.1f} cells)")

# a time-independent metric gives K = 1 (up to the 1.05 safety factor)
cert = ck.lightspeed_epsilon(flat, ck.ball(grid, c, 1.0), delta=0.5, tstar=0.0)
print(f"\nflat window: K = {cert.K:.4f}, eps = {cert.eps:.4f}"
      f"  [delta/(2 sqrt(K)) = {0.5 / (2 * np.sqrt(cert.K)):.4f}]")

# an expanding metric forces a smaller window
expanding = ck.from_expressions(grid, "1", "exp(-2*t)")
cert_e = ck.lightspeed_epsilon(expanding, ck.ball(grid, c, 1.0), 0.5, 0.0)
print(f"expanding window: K = {cert_e.K:.4f} (~1.05 e), eps = {cert_e.eps:.4f}; "
      f"one-sided K = {cert_e.K_literal:.4f}")

rep = ck.verify_lightspeed(expanding, ck.ball(grid, c, 1.0), 0.5, 0.0, samples=10, seed=1)
print(f"window exercised at 10 sampled time pairs: passed = {rep.passed}, "
      f"worst margin {rep.worst_margin:.2f} cells")

# nested chains produce ordered pairs at nearby times
chain = tuple(ck.ball(grid, c, r) for r in (0.5, 1.0, 2.0, 3.0))
step = ck.step_pairs(flat, chain, tstar=0.0, validate=2)
print(f"\nstep certificate: delta = {step.delta:.4f} (gap minimum), "
      f"K = {step.K:.3f}, eps = {step.eps:.4f}")
for chk in step.checks:
    print(f"  validated at t1={chk['t1']:+.3f}, t2={chk['t2']:+.3f}: ok={chk['ok']}")

# pair transport under a scaled contraction: times dilate, regions shrink
f = ck.linear_map(2.0, c=2.0, center=c, period=grid.period)
moved = ck.transport_pair(f, ck.CauchyPair(-0.2, pair.S, pair.T), "forward")
print(f"\ntransported pair: t = {moved.t} (was -0.2), S area {moved.S.area():.3f} "
      f"(was {pair.S.area():.3f})")
