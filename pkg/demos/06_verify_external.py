# Feed squeezed vacua through a supplied unitary and sort small amplitudes into real and noise.

import numpy as np

from fockherald import HeraldPattern, ModeUnitary, beamsplitter_r, embed, pairing_unitary
from fockherald.fock import CutoffPolicy
from fockherald.verify import classify_gray_zone, external_sources, verify_external

pair = pairing_unitary().matrix
m = embed(pair, (0, 1), 6) @ np.eye(6)
m = embed(pair, (2, 3), 6) @ m
m = embed(beamsplitter_r(0.5).matrix, (0, 2), 6) @ m
m = embed(beamsplitter_r(1 - 1e-12).matrix, (0, 4), 6) @ m  # a one-in-a-million leak into ancilla 4
u = ModeUnitary(m)

cut = CutoffPolicy(6, zero_threshold=1e-22)
pattern = HeraldPattern((1, 3), (1, 1))
res = verify_external(u, [0.5] * 4, 2, pattern, cut)
print("herald probability", res.success_probability)
for e in classify_gray_zone(res, u, external_sources([0.5] * 4, 6), cut):
    print(e.occupations, f"{abs(e.double):.3e}", e.verdict)
