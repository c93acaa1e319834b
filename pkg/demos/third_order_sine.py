"""Small sine boundary data: the Neumann response order by order.

Solves the full nonlinear problem for g0 = eps sin t, removes the linear
response, and compares what is left with the closed third-order assembly.
"""

import numpy as np

from nlsdtn.glm import BoundaryData, TriangularGrid, solve_dtn
from nlsdtn.perturbative import expand
from nlsdtn.sine3 import g13_sine

grid = TriangularGrid(8.0, 400)
g11 = expand([np.sin], 1, grid).g1[1]
t = grid.t

print(f"{'eps':>6} {'|g1 - eps g11|':>16} {'ratio':>7}")
prev = None
for eps in (0.08, 0.04, 0.02, 0.01):
    r = solve_dtn(BoundaryData.sine(eps), grid)
    n = np.max(np.abs(r.g1_values - eps * g11))
    print(f"{eps:6.3f} {n:16.3e} {'' if prev is None else f'{prev / n:7.3f}'}")
    prev = n
print("ratio 8 under halving: the second-order term vanishes\n")

eps = 0.05
g3 = (solve_dtn(BoundaryData.sine(eps), grid).g1_values - eps * g11) / eps**3
exact = g13_sine(t)
for x in (1.0, 2.0, 4.0, 6.0, 8.0):
    i = int(round(x / grid.dt))
    print(f"t = {x:3.1f}  solver {g3[i]:.5f}   assembly {exact[i]:.5f}")
