"""Mode unitaries, circuits, permanents and Fock-space scattering.

Convention: a unitary ``U`` acts on creation operators as
``a_in^dagger -> sum_out U[out, in] a_out^dagger``. With this convention
``beamsplitter_r(0.5)`` takes ``|11>`` to ``(|20> - |02>)/sqrt(2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from numba import njit
from scipy.linalg import polar
from scipy.stats import unitary_group

from .errors import DomainError, ModeMismatchError, ResourceLimitError, UnitarityError
from .fock import FockState, StateVector, fixed_number_states

UNITARITY_TOL = 1e-10
MAX_PERMANENT_DIM = 20
MAX_OUTPUTS = 2_000_000


def unitarity_deviation(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])), initial=0.0))


class ModeUnitary:
    """Square unitary matrix over optical modes, checked on construction."""

    __slots__ = ("_m",)

    def __init__(self, entries, tol: float = UNITARITY_TOL):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"mode unitary must be square, got shape {m.shape}")
        dev = unitarity_deviation(m)
        if dev > tol:
            raise UnitarityError(f"matrix deviates from unitarity by {dev:.3e} (tolerance {tol:.1e})", dev)
        m.setflags(write=False)
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def __matmul__(self, other: "ModeUnitary") -> "ModeUnitary":
        return ModeUnitary(self._m @ other.matrix)

    @property
    def dagger(self) -> "ModeUnitary":
        return ModeUnitary(self._m.conj().T)

    def __repr__(self):
        return f"ModeUnitary(dim={self.dim})"

    @classmethod
    def identity(cls, dim: int) -> "ModeUnitary":
        return cls(np.eye(dim))

    @classmethod
    def random(cls, dim: int, rng=None) -> "ModeUnitary":
        if dim == 1:
            phase = np.random.default_rng(rng).uniform(0, 2 * np.pi)
            return cls([[np.exp(1j * phase)]])
        return cls(unitary_group.rvs(dim, random_state=rng))


def nearest_unitary(m) -> np.ndarray:
    """Unitary factor of the polar decomposition (closest unitary in Frobenius norm)."""
    u, _ = polar(np.asarray(m, dtype=complex))
    return u


def beamsplitter_r(a: float) -> ModeUnitary:
    """The real two-mode unitary ``[[sqrt(a), sqrt(1-a)], [sqrt(1-a), -sqrt(a)]]``."""
    if not 0 <= a <= 1:
        raise DomainError(f"beamsplitter parameter must lie in [0, 1], got {a}")
    t, r = math.sqrt(a), math.sqrt(1 - a)
    return ModeUnitary([[t, r], [r, -t]])


def phase_shift(phi: float) -> ModeUnitary:
    return ModeUnitary([[np.exp(1j * phi)]])


def pairing_unitary() -> ModeUnitary:
    """Balanced beamsplitter with a quarter-wave phase on its second input.

    Two identical (non-negative coefficient) squeezed vacua through this
    element give a two-mode squeezed vacuum with positive coefficients.
    """
    return beamsplitter_r(0.5) @ ModeUnitary(np.diag([1, 1j]))


def embed(u, targets: Sequence[int], modes: int) -> np.ndarray:
    """Embed a k-mode matrix acting on ``targets`` into ``modes`` modes."""
    u = np.asarray(u, dtype=complex)
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise DomainError(f"target modes {targets} are not distinct")
    if any(t < 0 or t >= modes for t in targets):
        raise DomainError(f"target modes {targets} out of range for {modes} modes")
    if u.shape != (len(targets), len(targets)):
        raise ModeMismatchError(f"{u.shape[0]}-mode matrix applied to {len(targets)} targets")
    full = np.eye(modes, dtype=complex)
    full[np.ix_(targets, targets)] = u
    return full


@dataclass(frozen=True)
class CircuitElement:
    """One element of a circuit.

    ``kind`` is ``"beamsplitter"`` (params ``{"a": ...}``, the matrix of
    :func:`beamsplitter_r`), ``"phase"`` (params ``{"phi": ...}``) or
    ``"general"`` (params ``{"matrix": ...}``).
    """

    kind: str
    modes: tuple[int, ...]
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        if len(set(self.modes)) != len(self.modes):
            raise DomainError(f"element modes {self.modes} are not distinct")
        expected = {"beamsplitter": 2, "phase": 1}.get(self.kind)
        if self.kind not in ("beamsplitter", "phase", "general"):
            raise DomainError(f"unknown element kind {self.kind!r}")
        if expected is not None and len(self.modes) != expected:
            raise DomainError(f"{self.kind} acts on {expected} modes, got {self.modes}")

    def unitary(self) -> ModeUnitary:
        if self.kind == "beamsplitter":
            return beamsplitter_r(float(self.params["a"]))
        if self.kind == "phase":
            return phase_shift(float(self.params["phi"]))
        m = self.params["matrix"]
        return m if isinstance(m, ModeUnitary) else ModeUnitary(m)


@dataclass(frozen=True)
class Circuit:
    modes: int
    elements: tuple[CircuitElement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        for el in self.elements:
            if any(m >= self.modes or m < 0 for m in el.modes):
                raise DomainError(f"element on modes {el.modes} outside a {self.modes}-mode circuit")

    def then(self, kind: str, modes: Sequence[int], **params) -> "Circuit":
        return Circuit(self.modes, self.elements + (CircuitElement(kind, tuple(modes), params),))


def compose(c: Circuit) -> ModeUnitary:
    """Full-width unitary; elements act in list order (first element first)."""
    total = np.eye(c.modes, dtype=complex)
    for el in c.elements:
        total = embed(el.unitary().matrix, el.modes, c.modes) @ total
    return ModeUnitary(total)


@njit(cache=True)
def _ryser_gray(m):
    n = m.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    row_sums = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    gray_prev = 0
    size = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        diff = gray ^ gray_prev
        j = 0
        while (diff >> j) & 1 == 0:
            j += 1
        if gray & diff:
            for i in range(n):
                row_sums[i] += m[i, j]
            size += 1
        else:
            for i in range(n):
                row_sums[i] -= m[i, j]
            size -= 1
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= row_sums[i]
        if size & 1:
            total -= prod
        else:
            total += prod
        gray_prev = gray
    if n & 1:
        return -total
    return total


def permanent(m, max_dim: int = MAX_PERMANENT_DIM) -> complex:
    """Matrix permanent by Ryser's formula with Gray-code subset order, O(2^n n)."""
    m = np.ascontiguousarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"permanent needs a square matrix, got shape {m.shape}")
    if m.shape[0] > max_dim:
        raise ResourceLimitError(f"permanent of a {m.shape[0]}x{m.shape[0]} matrix exceeds limit {max_dim}")
    return complex(_ryser_gray(m))


def _repeat_index(occ: Sequence[int]) -> list[int]:
    return [mode for mode, n in enumerate(occ) for _ in range(n)]


def _fact_norm(occ: Sequence[int]) -> float:
    return math.prod(math.factorial(n) for n in occ)


def scattering_amplitude(inp: Sequence[int], out: Sequence[int], u) -> complex:
    """``<out| U |in>`` for Fock states ``in`` and ``out``.

    Equals ``Per(U[rows, cols]) / sqrt(prod in! prod out!)`` where rows repeat
    output mode ``j`` ``out_j`` times and columns repeat input mode ``i``
    ``in_i`` times.
    """
    m = np.asarray(u, dtype=complex)
    if len(inp) != m.shape[0] or len(out) != m.shape[0]:
        raise ModeMismatchError(f"states on {len(inp)}/{len(out)} modes with a {m.shape[0]}-mode unitary")
    if sum(inp) != sum(out):
        return 0j
    sub = m[np.ix_(_repeat_index(out), _repeat_index(inp))]
    return permanent(sub) / math.sqrt(_fact_norm(inp) * _fact_norm(out))


def _outputs(modes: int, total: int, fixed: Mapping[int, int] | None) -> list[FockState]:
    if not fixed:
        return fixed_number_states(modes, total)
    free = [m for m in range(modes) if m not in fixed]
    rest = total - sum(fixed.values())
    if rest < 0:
        return []
    if not free:
        return [tuple(fixed[m] for m in range(modes))] if rest == 0 else []
    states = []
    for part in fixed_number_states(len(free), rest):
        occ = [0] * modes
        for m, n in fixed.items():
            occ[m] = n
        for m, n in zip(free, part):
            occ[m] = n
        states.append(tuple(occ))
    return states


def apply(u, s: StateVector, fixed: Mapping[int, int] | None = None, max_outputs: int = MAX_OUTPUTS) -> StateVector:
    """Evolve ``s`` through the interferometer ``u``.

    Works sector by sector in total photon number, so no full Fock-space
    matrix is built. ``fixed`` optionally restricts the output to states with
    the given occupations on some modes (``{mode: count}``), which is all a
    subsequent herald needs.
    """
    m = np.asarray(u, dtype=complex)
    if m.shape != (s.modes, s.modes):
        raise ModeMismatchError(f"{m.shape[0]}-mode unitary applied to a {s.modes}-mode state")
    by_sector: dict[int, list[tuple[FockState, complex]]] = {}
    for key, amp in s.terms.items():
        by_sector.setdefault(sum(key), []).append((key, amp))
    out: dict[FockState, complex] = {}
    n_out = 0
    for total, inputs in by_sector.items():
        free = s.modes - len(fixed or ())
        rest = total - sum((fixed or {}).values())
        n_out += math.comb(rest + free - 1, free - 1) if rest >= 0 and free else 1
        if n_out > max_outputs:
            raise ResourceLimitError(f"apply would evaluate more than {max_outputs} output states")
        outputs = _outputs(s.modes, total, fixed)
        prepared = [(_repeat_index(k), math.sqrt(_fact_norm(k)), amp) for k, amp in inputs]
        for o in outputs:
            rows = _repeat_index(o)
            acc = 0j
            for cols, norm_in, amp in prepared:
                acc += amp * permanent(m[np.ix_(rows, cols)]) / norm_in
            out[o] = acc / math.sqrt(_fact_norm(o))
    return StateVector(s.modes, out, s.cutoff, s.deficit)
