# Any 2x2 unitary on (idler, bunched mode) followed by a two-photon herald leaves 0 or 4 photons.
import numpy as np

from fockherald import ModeUnitary, photon_number_support
from fockherald.circuits import build_fig2

rng = np.random.default_rng(7)
for pattern in [(2, 0), (1, 1), (0, 2)]:
    u = ModeUnitary.random(2, rng)
    res = build_fig2(u, lam=0.6, pattern=pattern).run()
    support = sorted(photon_number_support(res.conditional_state))
    print(pattern, "probability", round(res.success_probability, 5), "photon numbers", support)
