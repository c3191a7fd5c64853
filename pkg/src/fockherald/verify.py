"""End-to-end checks of externally supplied interferometers.

:func:`verify_external` feeds single-mode squeezed vacua and vacuum ancillas
through a user unitary and heralds. :func:`classify_gray_zone` then takes
every small amplitude and recomputes it in extended precision to decide
whether it is a genuine feature of the supplied matrix or floating-point
noise.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from .circuits import SourceSpec, assemble_input
from .errors import DomainError, ModeMismatchError
from .fock import CutoffPolicy, FockState, StateVector
from .herald import HeraldPattern, HeraldResult, herald_after
from .interferometer import ModeUnitary
from .oracle import DEFAULT_DPS, extended_amplitude
from .sources import SqueezeParams

GRAY_ZONE_UPPER = 1e-4
MACHINE_EPS = sys.float_info.epsilon


def external_sources(squeeze: Sequence, modes: int, source_modes: Sequence[int] | None = None) -> list[SourceSpec]:
    squeeze = [p if isinstance(p, SqueezeParams) else SqueezeParams(float(p)) for p in squeeze]
    if source_modes is None:
        source_modes = range(len(squeeze))
    source_modes = list(source_modes)
    if len(source_modes) != len(squeeze):
        raise DomainError("one source mode per squeezer required")
    if len(squeeze) > modes:
        raise ModeMismatchError(f"{len(squeeze)} squeezers do not fit into {modes} modes")
    return [SourceSpec("smsv", (m,), {"r": p.r}) for m, p in zip(source_modes, squeeze)]


def verify_external(u, squeeze: Sequence, vacuum_ancillae: int, pattern: HeraldPattern,
                    cutoff: CutoffPolicy | None = None, source_modes: Sequence[int] | None = None) -> HeraldResult:
    """Squeezed vacua plus vacuum ancillas through ``u``, then herald.

    Squeezers occupy ``source_modes`` (default: the first modes) and the
    ancillas fill the rest. The default cutoff keeps six photons beyond the
    heralded ones.
    """
    u = u if isinstance(u, ModeUnitary) else ModeUnitary(u)
    modes = len(squeeze) + vacuum_ancillae
    if u.dim != modes:
        raise ModeMismatchError(f"{u.dim}-mode unitary for {len(squeeze)} sources and {vacuum_ancillae} ancillae")
    pattern.check(modes)
    cutoff = cutoff or CutoffPolicy(pattern.photons + 6)
    state = assemble_input(modes, external_sources(squeeze, modes, source_modes), cutoff)
    return herald_after(u, state, pattern)


def _mp_source_terms(spec: SourceSpec, max_total: int) -> dict[FockState, object]:
    p = spec.params
    if spec.kind == "smsv":
        r = mpmath.mpf(p["r"])
        t = mpmath.tanh(r)
        pref = 1 / mpmath.sqrt(mpmath.cosh(r))
        return {
            (2 * n,): pref * t**n * mpmath.sqrt(mpmath.factorial(2 * n)) / (2**n * mpmath.factorial(n))
            for n in range(max_total // 2 + 1)
        }
    if spec.kind == "tmss":
        lam = mpmath.mpf(p["lambda"]) if "lambda" in p else mpmath.tanh(mpmath.mpf(p["r"]))
        return {(n, n): mpmath.sqrt(1 - lam**2) * lam**n for n in range(max_total // 2 + 1)}
    if spec.kind == "chi":
        b = mpmath.mpf(p["b"])
        return {(2, 0): mpmath.sqrt(b), (0, 2): -mpmath.sqrt(1 - b)}
    if spec.kind == "fock":
        return {tuple(int(n) for n in p["occupations"]): mpmath.mpf(1)}
    return {(0,) * len(spec.modes): mpmath.mpf(1)}


def extended_input(modes: int, sources: Sequence[SourceSpec], max_total: int, dps: int = DEFAULT_DPS):
    """Input Fock terms with coefficients recomputed at ``dps`` digits."""
    with mpmath.workdps(dps):
        terms: dict[tuple, object] = {(0,) * modes: mpmath.mpf(1)}
        for spec in sources:
            new = {}
            for key, c in terms.items():
                for sub, d in _mp_source_terms(spec, max_total).items():
                    occ = list(key)
                    for m, n in zip(spec.modes, sub):
                        occ[m] += n
                    if sum(occ) <= max_total:
                        new[tuple(occ)] = c * d
            terms = new
        return list(terms.items())


@dataclass(frozen=True)
class GrayZoneEntry:
    occupations: FockState
    double: complex
    extended: complex
    floor: float
    verdict: str

    def to_json(self) -> dict:
        return {
            "occupations": list(self.occupations),
            "double": {"re": self.double.real, "im": self.double.imag, "abs": abs(self.double)},
            "extended": {"re": self.extended.real, "im": self.extended.imag, "abs": abs(self.extended)},
            "floor": self.floor,
            "verdict": self.verdict,
        }


def classify_gray_zone(result: HeraldResult, u, sources: Sequence[SourceSpec], cutoff: CutoffPolicy, *,
                       upper: float = GRAY_ZONE_UPPER, entry_tol: float = MACHINE_EPS,
                       dps: int = DEFAULT_DPS, rel_agree: float = 1e-3) -> list[GrayZoneEntry]:
    """Re-check small branch amplitudes in extended precision.

    An amplitude is in the gray zone when its double-precision magnitude is
    at least the zero threshold and at most ``upper``. For each one the
    extended-precision value ``ext`` is computed, together with the floor:
    the largest change any perturbation of the matrix entries by up to
    ``entry_tol`` (absolute) could cause. The verdict is

    * ``"noise"`` if ``|ext|`` is below the zero threshold or the floor;
    * ``"real"`` if the double value agrees with ``ext`` to ``rel_agree``;
    * ``"inconclusive"`` otherwise.

    The default ``entry_tol`` is one unit of double rounding; raise it for
    matrices transcribed to a few digits.
    """
    u = np.asarray(u, dtype=complex)
    modes = u.shape[0]
    thr = result.zero_threshold
    gray = [(k, v) for k, v in result.amplitude_table.items() if thr <= abs(v) <= upper]
    if not gray:
        return []
    inputs = extended_input(modes, sources, cutoff.max_total_photons, dps)
    fixed = result.pattern.as_mapping()
    entries = []
    for key, dbl in gray:
        full = [0] * modes
        for m, n in fixed.items():
            full[m] = n
        for m, n in zip(result.output_modes, key):
            full[m] = n
        value, sens = extended_amplitude(u, inputs, full, dps=dps, entry_tol=entry_tol)
        ext = complex(value)
        floor = float(sens)
        if abs(ext) < thr or abs(ext) <= floor:
            verdict = "noise"
        elif abs(dbl - ext) <= rel_agree * abs(ext):
            verdict = "real"
        else:
            verdict = "inconclusive"
        entries.append(GrayZoneEntry(key, complex(dbl), ext, floor, verdict))
    return entries
