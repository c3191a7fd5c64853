# Two photons on a balanced beamsplitter, and where permanents come in.
import numpy as np

from fockherald import StateVector, apply, beamsplitter_r, permanent
from fockherald.oracle import naive_permanent

bs = beamsplitter_r(0.5)
print("beamsplitter matrix:\n", bs.matrix.round(4))

# |11> in, bunched pair out: the |11> amplitude is the permanent of the full 2x2 matrix, which is zero
out = apply(bs, StateVector(2, {(1, 1): 1.0}))
for occ, amp in out:
    print(occ, round(amp.real, 6))

# the fast Ryser permanent against the permutation sum
rng = np.random.default_rng(0)
m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
print("ryser:", permanent(m))
print("naive:", naive_permanent(m))
