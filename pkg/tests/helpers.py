"""Shared builders for tests."""
import numpy as np

from fockherald.interferometer import ModeUnitary, beamsplitter_r, embed, pairing_unitary

FIXTURE_SQUEEZING = [0.5, 0.5, 0.5, 0.5]
FIXTURE_HERALD = "1:1,3:1"
FIXTURE_WEAK = 1e-12
# expected verdicts, keyed by occupations of output modes (0, 2, 4, 5)
FIXTURE_REAL = {(1, 0, 1, 0), (0, 0, 2, 0)}


def fixture_unitary(phases=(0.3, 1.1, 2.3, 0.7), weak=FIXTURE_WEAK):
    """Six-mode test interferometer with a hand-computable herald.

    Two pairing unitaries turn the squeezed vacua on (0, 1) and (2, 3) into
    two-mode squeezed pairs; a phased balanced beamsplitter on (0, 2) makes
    the two heralded signal photons bunch, so |1010> needs the extra weak
    coupling of mode 0 into ancilla 4 (amplitude ~1e-7) and |0020> needs it
    twice (~1e-13). Everything else that survives is rounding noise.
    """
    pair = pairing_unitary().matrix
    m = embed(pair, (0, 1), 6) @ np.eye(6)
    m = embed(pair, (2, 3), 6) @ m
    hom = np.diag(np.exp(1j * np.array(phases[:2]))) @ beamsplitter_r(0.5).matrix @ np.diag(np.exp(1j * np.array(phases[2:])))
    m = embed(hom, (0, 2), 6) @ m
    m = embed(beamsplitter_r(1 - weak).matrix, (0, 4), 6) @ m
    return ModeUnitary(m)


def random_state(rng, modes, max_total, n_terms=6):
    from fockherald.fock import StateVector, enumerate_basis

    basis = enumerate_basis(modes, max_total)
    idx = rng.choice(len(basis), size=min(n_terms, len(basis)), replace=False)
    amps = rng.normal(size=len(idx)) + 1j * rng.normal(size=len(idx))
    amps /= np.linalg.norm(amps)
    return StateVector(modes, {basis[i]: a for i, a in zip(idx, amps)})
