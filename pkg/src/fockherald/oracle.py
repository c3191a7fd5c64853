"""Slow reference implementations used to cross-check the fast paths.

Nothing here shares code with :mod:`fockherald.interferometer` beyond the
basis enumeration: permanents are permutation sums or Glynn's formula, and
Fock-space evolution is a multinomial expansion of transformed creation
operators.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import mpmath
import numpy as np

from .errors import DomainError, ResourceLimitError
from .fock import CutoffPolicy, FockState, enumerate_basis, index_map

MAX_NAIVE_DIM = 9
DEFAULT_DPS = 40


def naive_permanent(m, max_dim: int = MAX_NAIVE_DIM) -> complex:
    """Sum over all permutations of entry products."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if m.shape != (n, n):
        raise DomainError(f"permanent needs a square matrix, got shape {m.shape}")
    if n > max_dim:
        raise ResourceLimitError(f"naive permanent limited to {max_dim}x{max_dim}, got {n}")
    total = 0j
    for perm in itertools.permutations(range(n)):
        prod = 1 + 0j
        for i, j in enumerate(perm):
            prod *= m[i, j]
        total += prod
    return total


def glynn_permanent(m, dps: int | None = None, shift: float = 0.0):
    """Glynn's formula over Gray-ordered sign vectors.

    With ``dps`` set, the entries are converted exactly to mpmath numbers
    (then ``shift`` is added to each) and the sum is carried out at that many
    decimal digits; the result is then an ``mpmath.mpc``.
    """
    if dps is None:
        a = np.asarray(m, dtype=complex)
        n = a.shape[0]
        if n == 0:
            return 1 + 0j
        sums = a.sum(axis=0).astype(complex)
        total = complex(np.prod(sums))
        sign = 1
        prev = 0
        for k in range(1, 1 << (n - 1)):
            gray = k ^ (k >> 1)
            j = (gray ^ prev).bit_length() - 1
            row = j + 1
            sums = sums - 2 * a[row] if gray & (1 << j) else sums + 2 * a[row]
            sign = -sign
            total += sign * complex(np.prod(sums))
            prev = gray
        return total / (1 << (n - 1))
    with mpmath.workdps(dps):
        rows = [[mpmath.mpc(complex(x).real, complex(x).imag) + mpmath.mpf(shift) for x in r]
                for r in np.asarray(m, dtype=complex)]
        n = len(rows)
        if n == 0:
            return mpmath.mpc(1)
        sums = [mpmath.fsum(rows[i][j] for i in range(n)) for j in range(n)]
        total = mpmath.fprod(sums)
        sign = 1
        prev = 0
        for k in range(1, 1 << (n - 1)):
            gray = k ^ (k >> 1)
            j = (gray ^ prev).bit_length() - 1
            r = rows[j + 1]
            if gray & (1 << j):
                sums = [s - 2 * x for s, x in zip(sums, r)]
            else:
                sums = [s + 2 * x for s, x in zip(sums, r)]
            sign = -sign
            total += sign * mpmath.fprod(sums)
            prev = gray
        return total / (1 << (n - 1))


def _power_of_linear_form(coeffs: Sequence[complex], k: int) -> dict[tuple[int, ...], complex]:
    """Expand ``(sum_j c_j x_j)^k`` by the multinomial theorem."""
    modes = len(coeffs)
    out = {}
    for alpha in _compositions(k, modes):
        coef = math.factorial(k)
        term = 1 + 0j
        for c, e in zip(coeffs, alpha):
            coef //= math.factorial(e)
            term *= c**e
        out[alpha] = coef * term
    return out


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _poly_mul(p, q):
    out = {}
    for ka, va in p.items():
        for kb, vb in q.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            out[key] = out.get(key, 0j) + va * vb
    return out


def evolve_basis_state(u, occ: Sequence[int]) -> dict[FockState, complex]:
    """Image of one Fock state, as a map from output states to amplitudes."""
    u = np.asarray(u, dtype=complex)
    modes = u.shape[0]
    poly = {(0,) * modes: 1 + 0j}
    for i, n in enumerate(occ):
        if n:
            poly = _poly_mul(poly, _power_of_linear_form(u[:, i], n))
    in_norm = math.sqrt(math.prod(math.factorial(n) for n in occ))
    return {
        key: coef * math.sqrt(math.prod(math.factorial(n) for n in key)) / in_norm
        for key, coef in poly.items()
    }


@dataclass(frozen=True)
class DenseFockOperator:
    basis: tuple[FockState, ...]
    matrix: np.ndarray

    def index(self) -> dict[FockState, int]:
        return index_map(self.basis)

    def block_unitarity_deviation(self) -> float:
        worst = 0.0
        totals = np.array([sum(k) for k in self.basis])
        for n in np.unique(totals):
            idx = np.flatnonzero(totals == n)
            block = self.matrix[np.ix_(idx, idx)]
            worst = max(worst, float(np.max(np.abs(block.conj().T @ block - np.eye(len(idx))))))
        return worst

    def apply(self, terms: Mapping[FockState, complex]) -> dict[FockState, complex]:
        index = self.index()
        vec = np.zeros(len(self.basis), dtype=complex)
        for k, v in terms.items():
            vec[index[tuple(k)]] = v
        res = self.matrix @ vec
        return {self.basis[i]: res[i] for i in np.flatnonzero(res)}


def dense_evolve(u, cutoff: CutoffPolicy | int, max_states: int = 5000) -> DenseFockOperator:
    """Full Fock-space matrix of ``u`` on all states with at most the cutoff photon number."""
    u = np.asarray(u, dtype=complex)
    max_total = cutoff if isinstance(cutoff, int) else cutoff.max_total_photons
    basis = enumerate_basis(u.shape[0], max_total, max_states=max_states)
    index = index_map(basis)
    mat = np.zeros((len(basis), len(basis)), dtype=complex)
    for col, occ in enumerate(basis):
        for out, amp in evolve_basis_state(u, occ).items():
            mat[index[out], col] = amp
    return DenseFockOperator(tuple(basis), mat)


def extended_amplitude(u, inputs: Sequence[tuple[FockState, object]], out: Sequence[int], dps: int = DEFAULT_DPS,
                       entry_tol: float = 0.0):
    """``sum_in c_in <out|U|in>`` in extended precision.

    ``inputs`` pairs Fock states with coefficients (floats, complex or mpmath
    numbers). Returns ``(value, sensitivity)``. The sensitivity bounds how far
    the value can move when every matrix entry is off by at most
    ``entry_tol`` in absolute value:
    ``sum |c| (perm(|U_sub| + entry_tol) - perm(|U_sub|)) / norm``.
    """
    u = np.asarray(u, dtype=complex)
    out = tuple(out)
    rows = [j for j, n in enumerate(out) for _ in range(n)]
    out_norm = math.prod(math.factorial(n) for n in out)
    with mpmath.workdps(dps):
        value = mpmath.mpc(0)
        sens = mpmath.mpf(0)
        for occ, coef in inputs:
            if sum(occ) != sum(out):
                continue
            cols = [i for i, n in enumerate(occ) for _ in range(n)]
            sub = u[np.ix_(rows, cols)]
            norm = mpmath.sqrt(mpmath.mpf(math.prod(math.factorial(n) for n in occ) * out_norm))
            c = coef if isinstance(coef, (mpmath.mpf, mpmath.mpc)) else mpmath.mpc(complex(coef).real, complex(coef).imag)
            value += c * glynn_permanent(sub, dps=dps) / norm
            if entry_tol:
                a = np.abs(sub)
                grow = glynn_permanent(a, dps=dps, shift=entry_tol) - glynn_permanent(a, dps=dps)
                sens += abs(c) * abs(grow) / norm
        return value, sens
