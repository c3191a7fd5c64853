# The six-mode two-photon herald: simulate, compare with closed forms, reduce to two terms.
import math

from fockherald.circuits import build_fig3, closed_forms, psi_tez_reduce, solve_cancellation

lam = math.sqrt(0.5)
b = 0.8
a = solve_cancellation(b)  # kills the beta_minus error terms
print(f"b = {b}, cancellation a = {a:.6f}")

recipe = build_fig3(a, b, lam)  # raises if the simulation disagrees with the closed forms
res = recipe.run()
cf = closed_forms(a, b, lam)
print("herald probability", res.success_probability, "closed form", cf.p_succ)
for occ, amp in res.amplitude_table.items():
    label = "".join(map(str, occ))
    print(f"  x_{label} = {amp.real:+.6f}")
print("epsilon =", cf.epsilon)

# off the cancellation curve the double-pair terms are the tabulated beta_minus over sqrt 2
off = build_fig3(0.3, b, lam).run()
cf = closed_forms(0.3, b, lam)
print("x_0202 simulated", off.amplitude_table[(0, 2, 0, 2)].real, "tabulated", cf.error_amplitudes[(0, 2, 0, 2)])

# recombine the first output pair: only |0000> and |2011> remain
two = psi_tez_reduce(res)
print("two-term state:", {k: round(abs(v) ** 2, 6) for k, v in two.state}, "c =", round(two.c, 6))
