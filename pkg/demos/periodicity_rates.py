"""How fast does the linear Neumann response become 2pi-periodic?

The first-order response to data whose derivative drifts from periodicity
like t^(-1/2-nu) is fed to the periodicity classifier for three values of nu.
"""

import numpy as np

from nlsdtn.asymptotics import g11_sine, periodicity_defect
from nlsdtn.perturbative import g11_general

TP = 2 * np.pi
t = np.geomspace(100, 1e4, 40)

for nu in (0.25, 0.5, 1.0):
    b = 0.5 - nu
    psi = (lambda s: np.log1p(s) / TP) if b == 0 else (lambda s, b=b: ((1 + s) ** b - 1) / (b * TP))
    rep = periodicity_defect(lambda x, psi=psi: g11_general(lambda s: np.cos(s) + psi(s), x), TP, t)
    print(f"nu = {nu:4.2f}: exponent {rep.exponent:.3f}  log factor {rep.log_corrected!s:5}  "
          f"-> {rep.classification}")

rep = periodicity_defect(g11_sine, TP, np.linspace(100, 1000, 4000))
print(f"pure sine data: exponent {rep.exponent:.2f} -> {rep.classification}")
