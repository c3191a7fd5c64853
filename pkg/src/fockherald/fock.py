"""Fock basis enumeration and sparse state vectors.

Fock states are plain tuples of non-negative occupation numbers. A
:class:`StateVector` is an immutable sparse map from such tuples to complex
amplitudes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Tuple

import numpy as np

from .errors import DomainError, ModeMismatchError, ResourceLimitError

FockState = Tuple[int, ...]

DEFAULT_ZERO_THRESHOLD = 1e-12
DEFAULT_MAX_BASIS = 1_000_000


@dataclass(frozen=True)
class CutoffPolicy:
    """Truncation of the Fock space and the amplitude floor for storage."""

    max_total_photons: int = 8
    zero_threshold: float = DEFAULT_ZERO_THRESHOLD

    def __post_init__(self):
        if self.max_total_photons < 0:
            raise DomainError("max_total_photons must be non-negative")
        if self.zero_threshold < 0:
            raise DomainError("zero_threshold must be non-negative")


def basis_size(modes: int, max_total: int) -> int:
    """Number of occupation vectors over ``modes`` modes with sum <= ``max_total``."""
    return math.comb(max_total + modes, modes)


def _compositions(total: int, modes: int) -> Iterator[FockState]:
    # lexicographic ascending order of the occupation tuple
    if modes == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, modes - 1):
            yield (first,) + rest


def fixed_number_states(modes: int, total: int) -> list[FockState]:
    """All occupation vectors with exactly ``total`` photons, lexicographic order."""
    if modes < 1:
        raise DomainError("modes must be >= 1")
    return list(_compositions(total, modes))


def enumerate_basis(modes: int, max_total: int, max_states: int = DEFAULT_MAX_BASIS) -> list[FockState]:
    """Enumerate the truncated Fock basis in graded lexicographic order.

    States are ordered first by total photon number, then lexicographically
    by occupation tuple.

    Raises
    ------
    ResourceLimitError
        If the basis would contain more than ``max_states`` states.
    """
    if modes < 1:
        raise DomainError("modes must be >= 1")
    if max_total < 0:
        raise DomainError("max_total must be non-negative")
    size = basis_size(modes, max_total)
    if size > max_states:
        raise ResourceLimitError(
            f"basis of {modes} modes up to {max_total} photons has {size} states (limit {max_states})"
        )
    basis: list[FockState] = []
    for k in range(max_total + 1):
        basis.extend(_compositions(k, modes))
    return basis


def index_map(basis: Sequence[FockState]) -> dict[FockState, int]:
    return {state: i for i, state in enumerate(basis)}


def canonical_key(state: FockState):
    """Sort key implementing graded lexicographic order."""
    return (sum(state), state)


@dataclass(frozen=True)
class StateVector:
    """Immutable sparse pure state (possibly sub-normalized).

    ``deficit`` is an upper bound on the squared norm discarded by truncation
    upstream of this state. It is metadata only and does not enter the
    algebra except where documented.
    """

    modes: int
    terms: Mapping[FockState, complex]
    cutoff: CutoffPolicy = field(default_factory=CutoffPolicy)
    deficit: float = 0.0

    def __post_init__(self):
        if self.modes < 1:
            raise DomainError("a state needs at least one mode")
        thr = self.cutoff.zero_threshold
        clean = {}
        for key, amp in self.terms.items():
            key = tuple(int(n) for n in key)
            if len(key) != self.modes:
                raise ModeMismatchError(f"key {key} does not have {self.modes} modes")
            if any(n < 0 for n in key):
                raise DomainError(f"negative occupation in {key}")
            amp = complex(amp)
            if abs(amp) > thr:
                clean[key] = clean.get(key, 0j) + amp
        clean = {k: v for k, v in clean.items() if abs(v) > thr}
        object.__setattr__(self, "terms", MappingProxyType(dict(sorted(clean.items(), key=lambda kv: canonical_key(kv[0])))))

    @classmethod
    def from_dict(cls, terms: Mapping[Sequence[int], complex], modes: int | None = None, **kwargs) -> "StateVector":
        if modes is None:
            if not terms:
                raise DomainError("cannot infer mode count of an empty state")
            modes = len(next(iter(terms)))
        return cls(modes, {tuple(k): v for k, v in terms.items()}, **kwargs)

    @classmethod
    def vacuum(cls, modes: int, **kwargs) -> "StateVector":
        return cls(modes, {(0,) * modes: 1.0}, **kwargs)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def amplitude(self, key: Sequence[int]) -> complex:
        return self.terms.get(tuple(key), 0j)

    @property
    def norm2(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.terms.values()))

    @property
    def max_photons(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def normalized(self) -> "StateVector":
        n2 = self.norm2
        if n2 == 0:
            raise DomainError("cannot normalize a zero state")
        scale = 1 / math.sqrt(n2)
        return self.replace_terms({k: v * scale for k, v in self.terms.items()})

    def scaled(self, factor: complex) -> "StateVector":
        return self.replace_terms({k: v * factor for k, v in self.terms.items()})

    def replace_terms(self, terms: Mapping[FockState, complex], modes: int | None = None) -> "StateVector":
        return StateVector(self.modes if modes is None else modes, terms, self.cutoff, self.deficit)

    def __add__(self, other: "StateVector") -> "StateVector":
        if other.modes != self.modes:
            raise ModeMismatchError("cannot add states with different mode counts")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0j) + v
        return StateVector(self.modes, out, self.cutoff, max(self.deficit, other.deficit))

    def sector(self, total: int) -> "StateVector":
        """Component with exactly ``total`` photons."""
        return self.replace_terms({k: v for k, v in self.terms.items() if sum(k) == total})

    def truncated(self, max_total: int) -> "StateVector":
        kept = {k: v for k, v in self.terms.items() if sum(k) <= max_total}
        lost = sum(abs(v) ** 2 for k, v in self.terms.items() if sum(k) > max_total)
        return StateVector(self.modes, kept, self.cutoff, self.deficit + lost)

    def permuted(self, order: Sequence[int]) -> "StateVector":
        """New state whose mode ``i`` is mode ``order[i]`` of this one."""
        if sorted(order) != list(range(self.modes)):
            raise DomainError(f"{order} is not a permutation of {self.modes} modes")
        return self.replace_terms({tuple(k[j] for j in order): v for k, v in self.terms.items()})

    def to_dense(self, basis: Sequence[FockState]) -> np.ndarray:
        index = index_map(basis)
        vec = np.zeros(len(basis), dtype=complex)
        for k, v in self.terms.items():
            vec[index[k]] = v
        return vec

    def to_records(self) -> list[dict]:
        """Serialize to ``[{occupations, re, im}, ...]`` in canonical order."""
        return [
            {"occupations": list(k), "re": float(v.real), "im": float(v.imag)}
            for k, v in self.terms.items()
        ]

    @classmethod
    def from_records(cls, records: Iterable[Mapping], modes: int | None = None, **kwargs) -> "StateVector":
        terms = {}
        for rec in records:
            key = tuple(int(n) for n in rec["occupations"])
            terms[key] = terms.get(key, 0j) + complex(rec.get("re", 0.0), rec.get("im", 0.0))
        if modes is None:
            if not terms:
                raise DomainError("cannot infer mode count of an empty record list")
            modes = len(next(iter(terms)))
        return cls(modes, terms, **kwargs)


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Product state on ``a.modes + b.modes`` modes, ``a`` first."""
    terms = {ka + kb: va * vb for ka, va in a.terms.items() for kb, vb in b.terms.items()}
    thr = min(a.cutoff.zero_threshold, b.cutoff.zero_threshold)
    cutoff = CutoffPolicy(max(a.cutoff.max_total_photons, b.cutoff.max_total_photons), thr)
    deficit = 1 - (1 - a.deficit) * (1 - b.deficit)
    return StateVector(a.modes + b.modes, terms, cutoff, deficit)


def tensor_all(states: Iterable[StateVector], max_total: int | None = None) -> StateVector:
    """Fold :func:`tensor_product` over ``states``, optionally truncating the total photon number as it goes."""
    it = iter(states)
    acc = next(it)
    for s in it:
        acc = tensor_product(acc, s)
        if max_total is not None:
            acc = acc.truncated(max_total)
    if max_total is not None:
        acc = acc.truncated(max_total)
    return acc


def inner_product(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    if a.modes != b.modes:
        raise ModeMismatchError(f"inner product of {a.modes}-mode and {b.modes}-mode states")
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for k, v in small.terms.items():
        w = large.terms.get(k)
        if w is not None:
            total += (v.conjugate() * w) if small is a else (w.conjugate() * v)
    return total


def photon_number_support(s: StateVector) -> set[int]:
    """Total photon numbers carried by terms above the state's zero threshold."""
    thr = s.cutoff.zero_threshold
    return {sum(k) for k, v in s.terms.items() if abs(v) > thr}
