# Trade the four-photon weight epsilon against herald probability along the cancellation curve.
import math

import numpy as np

from fockherald.circuits import epsilon_on_cancellation, closed_forms, scan_epsilon, solve_cancellation

lam = math.sqrt(0.5)
for b in np.linspace(0.5, 1.0, 6):
    cf = closed_forms(solve_cancellation(b), b, lam)
    print(f"b={b:.2f}  epsilon={cf.epsilon:.4f}  P_succ={cf.p_succ:.4f}")

b_star, cf = scan_epsilon(0.01, lam)
print(f"epsilon = 1% at b* = {b_star:.10f} with P_succ = {cf.p_succ:.6f}")
print("epsilon at b*:", epsilon_on_cancellation(b_star, lam))
