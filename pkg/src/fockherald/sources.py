"""Fock-basis expansions of squeezed-light sources and simple input states."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError
from .fock import CutoffPolicy, StateVector


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing strength. ``r`` is the squeezing parameter, ``lam = tanh(r)``."""

    r: float

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0:
            raise DomainError(f"squeezing parameter must be finite and non-negative, got {self.r}")

    @classmethod
    def from_lambda(cls, lam: float) -> "SqueezeParams":
        if not 0 <= lam < 1:
            raise DomainError(f"lambda must lie in [0, 1), got {lam}")
        return cls(math.atanh(lam))

    @property
    def lam(self) -> float:
        return math.tanh(self.r)


def _as_params(p) -> SqueezeParams:
    return p if isinstance(p, SqueezeParams) else SqueezeParams(float(p))


def tmss_coefficient(lam: float, n: int) -> float:
    """``s_n = sqrt(1 - lam^2) lam^n``."""
    return math.sqrt(1 - lam * lam) * lam**n


def tmss(p, cutoff: CutoffPolicy | None = None) -> StateVector:
    """Two-mode squeezed vacuum ``sum_n s_n |n n>`` truncated at ``2n <= max_total_photons``.

    ``p`` is a :class:`SqueezeParams` or a squeezing parameter ``r``; use
    ``tmss(SqueezeParams.from_lambda(lam))`` to specify lambda directly. The
    coefficients are real and positive.
    """
    p = _as_params(p)
    cutoff = cutoff or CutoffPolicy()
    lam = p.lam
    nmax = cutoff.max_total_photons // 2
    terms = {(n, n): tmss_coefficient(lam, n) for n in range(nmax + 1)}
    deficit = lam ** (2 * (nmax + 1))
    return StateVector(2, terms, cutoff, deficit)


def smsv_coefficient(r: float, n: int) -> float:
    """Amplitude of ``|2n>`` in squeezed vacuum, real and non-negative."""
    t = math.tanh(r)
    if n == 0:
        return 1 / math.sqrt(math.cosh(r))
    if t == 0:
        return 0.0
    log_c = (
        -0.5 * math.log(math.cosh(r))
        + n * math.log(t)
        + 0.5 * math.lgamma(2 * n + 1)
        - n * math.log(2)
        - math.lgamma(n + 1)
    )
    return math.exp(log_c)


def smsv(p, cutoff: CutoffPolicy | None = None) -> StateVector:
    """Single-mode squeezed vacuum with only even occupations up to the cutoff.

    The phase convention (all coefficients non-negative) is the one for which
    two copies passed through :func:`~fockherald.interferometer.pairing_unitary`
    give :func:`tmss` with positive coefficients.
    """
    p = _as_params(p)
    cutoff = cutoff or CutoffPolicy()
    terms = {(2 * n,): smsv_coefficient(p.r, n) for n in range(cutoff.max_total_photons // 2 + 1)}
    kept = sum(c * c for c in terms.values())
    return StateVector(1, terms, cutoff, max(0.0, 1 - kept))


def chi(b: float, cutoff: CutoffPolicy | None = None) -> StateVector:
    """``sqrt(b)|20> - sqrt(1-b)|02>``."""
    if not 0 <= b <= 1:
        raise DomainError(f"b must lie in [0, 1], got {b}")
    cutoff = cutoff or CutoffPolicy()
    return StateVector(2, {(2, 0): math.sqrt(b), (0, 2): -math.sqrt(1 - b)}, cutoff)


def fock(occupations: Sequence[int], cutoff: CutoffPolicy | None = None) -> StateVector:
    occ = tuple(int(n) for n in occupations)
    return StateVector(len(occ), {occ: 1.0}, cutoff or CutoffPolicy())


def vacuum(modes: int = 1, cutoff: CutoffPolicy | None = None) -> StateVector:
    return StateVector.vacuum(modes, cutoff=cutoff or CutoffPolicy())
