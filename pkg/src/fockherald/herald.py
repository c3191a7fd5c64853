"""Conditioning on photon-number-resolving detection patterns."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import DomainError, ModeMismatchError
from .fock import FockState, StateVector, canonical_key, inner_product
from .interferometer import apply


@dataclass(frozen=True)
class HeraldPattern:
    detected_modes: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "detected_modes", tuple(int(m) for m in self.detected_modes))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.detected_modes) != len(self.counts):
            raise DomainError("herald pattern needs one count per detected mode")
        if len(set(self.detected_modes)) != len(self.detected_modes):
            raise DomainError(f"detected modes {self.detected_modes} are not distinct")
        if any(c < 0 for c in self.counts) or any(m < 0 for m in self.detected_modes):
            raise DomainError("negative mode index or count in herald pattern")

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "HeraldPattern":
        items = sorted(mapping.items())
        return cls(tuple(m for m, _ in items), tuple(c for _, c in items))

    def as_mapping(self) -> dict[int, int]:
        return dict(zip(self.detected_modes, self.counts))

    @property
    def photons(self) -> int:
        return sum(self.counts)

    def check(self, modes: int):
        if any(m >= modes for m in self.detected_modes):
            raise DomainError(f"herald modes {self.detected_modes} outside a {modes}-mode state")


@dataclass(frozen=True)
class HeraldResult:
    """Outcome of a herald.

    ``amplitude_table`` holds the unnormalized branch amplitudes keyed by the
    occupations of the undetected modes, in their original relative order
    (``output_modes``). ``conditional_state`` is the normalized branch, or
    ``None`` when the herald has zero probability.
    """

    pattern: HeraldPattern
    output_modes: tuple[int, ...]
    amplitude_table: Mapping[FockState, complex]
    success_probability: float
    conditional_state: StateVector | None
    truncation_bound: float = 0.0
    zero_threshold: float = 0.0

    @property
    def succeeded(self) -> bool:
        return self.conditional_state is not None

    def multiset_table(self) -> dict[tuple[int, ...], list[tuple[FockState, complex]]]:
        """Group branch amplitudes by their sorted occupation multiset.

        Terms like ``|2110>`` and ``|0211>`` land in the same group; the raw
        keys are kept so no relabeling is implied.
        """
        groups: dict[tuple[int, ...], list] = {}
        for key, amp in self.amplitude_table.items():
            groups.setdefault(tuple(sorted(key, reverse=True)), []).append((key, amp))
        return dict(sorted(groups.items(), key=lambda kv: canonical_key(kv[0])))

    def to_json(self) -> dict:
        return {
            "herald": {"modes": list(self.pattern.detected_modes), "counts": list(self.pattern.counts)},
            "output_modes": list(self.output_modes),
            "success_probability": self.success_probability,
            "truncation_bound": self.truncation_bound,
            "amplitudes": [
                {"occupations": list(k), "re": v.real, "im": v.imag, "abs": abs(v)}
                for k, v in self.amplitude_table.items()
            ],
            "multisets": [
                {"multiset": list(ms), "keys": [list(k) for k, _ in members]}
                for ms, members in self.multiset_table().items()
            ],
        }


def herald(s: StateVector, p: HeraldPattern) -> HeraldResult:
    """Project ``s`` onto the detection pattern and drop the detected modes."""
    p.check(s.modes)
    wanted = p.as_mapping()
    kept = [m for m in range(s.modes) if m not in wanted]
    table: dict[FockState, complex] = {}
    for key, amp in s.terms.items():
        if all(key[m] == c for m, c in wanted.items()):
            sub = tuple(key[m] for m in kept)
            table[sub] = table.get(sub, 0j) + amp
    thr = s.cutoff.zero_threshold
    table = {k: v for k, v in sorted(table.items(), key=lambda kv: canonical_key(kv[0])) if abs(v) > thr}
    prob = float(sum(abs(v) ** 2 for v in table.values()))
    state = None
    if kept and prob > thr:
        scale = 1 / math.sqrt(prob)
        state = StateVector(len(kept), {k: v * scale for k, v in table.items()}, s.cutoff, s.deficit)
    return HeraldResult(p, tuple(kept), table, prob, state, s.deficit, thr)


def herald_after(u, s: StateVector, p: HeraldPattern) -> HeraldResult:
    """Apply ``u`` to ``s`` then herald, evaluating only pattern-compatible outputs."""
    p.check(s.modes)
    return herald(apply(u, s, fixed=p.as_mapping()), p)


def fidelity(s: StateVector, target: StateVector) -> float:
    """``|<target|s>|^2`` for normalized states."""
    if s.modes != target.modes:
        raise ModeMismatchError(f"fidelity between {s.modes}-mode and {target.modes}-mode states")
    return float(min(1.0, abs(inner_product(target, s)) ** 2))


def epsilon_ratio(result: HeraldResult, target_key: Sequence[int]) -> float:
    """Weight of one branch amplitude relative to the success probability."""
    if result.success_probability <= result.zero_threshold or result.success_probability == 0:
        raise DomainError("epsilon ratio undefined for a zero-probability herald")
    amp = result.amplitude_table.get(tuple(target_key), 0j)
    return abs(amp) ** 2 / result.success_probability
