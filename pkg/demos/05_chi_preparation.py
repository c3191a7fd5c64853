# Two ways to herald chi(b) = sqrt(b)|20> - sqrt(1-b)|02> from a pair of two-mode squeezers.
from fockherald.circuits import DEFAULT_LAMBDA, chi_prep_damping, chi_prep_herald_interference

print(" b     damping   interference  (squeezing tuned)  interference (attenuation)")
for b in (0.5, 0.6, 0.75, 0.9):
    _, damp = chi_prep_damping(b, DEFAULT_LAMBDA)
    _, inter = chi_prep_herald_interference(b, DEFAULT_LAMBDA)
    _, atten = chi_prep_herald_interference(b, DEFAULT_LAMBDA, tune="attenuation")
    print(f"{b:.2f}  {damp:.6f}  {inter:.6f}                    {atten:.6f}")
