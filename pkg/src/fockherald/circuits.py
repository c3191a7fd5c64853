"""Concrete heralded constructions for the single-rail 4-photon GHZ problem.

The module contains:

* closed-form amplitudes of the two-photon-heralded circuit fed by one
  two-mode squeezed vacuum and the two-mode state ``chi(b)``;
* builders for that circuit and for the simpler parity circuit, each checked
  against a hard validation gate;
* the beamsplitter reduction to a two-term state;
* two ways of preparing ``chi(b)`` and their success probabilities;
* an epsilon scan along the cancellation curve.

Mode layout of :func:`build_fig3` (0-based)::

    0  TMSS signal        -> output a1 \\ balanced split
    1  vacuum             -> output a2 /
    2  TMSS idler         -> detector  \\ balanced
    3  vacuum ancilla     -> detector  /   (mode 3 first mixes with 4 through R(a))
    4  chi, first mode    -> output a3 \\ balanced
    5  chi, second mode   -> output a4 /
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, TuningError, UnachievableTargetError, ValidationGateError
from .fock import CutoffPolicy, FockState, StateVector, canonical_key, photon_number_support, tensor_all
from .herald import HeraldPattern, HeraldResult, herald_after
from .interferometer import Circuit, ModeUnitary, apply, beamsplitter_r, compose
from .sources import SqueezeParams, chi, fock, smsv, tmss, tmss_coefficient, vacuum

GATE_TOL = 1e-10
SQRT2 = math.sqrt(2)


@dataclass(frozen=True)
class SourceSpec:
    """An input state placed on specific circuit modes.

    ``kind`` is one of ``tmss`` (params ``lambda`` or ``r``), ``smsv``
    (``r``), ``chi`` (``b``), ``fock`` (``occupations``) or ``vacuum``.
    """

    kind: str
    modes: tuple[int, ...]
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        arity = {"tmss": 2, "smsv": 1, "chi": 2}.get(self.kind)
        if self.kind not in ("tmss", "smsv", "chi", "fock", "vacuum"):
            raise DomainError(f"unknown source kind {self.kind!r}")
        if arity is not None and len(self.modes) != arity:
            raise DomainError(f"{self.kind} source occupies {arity} modes, got {self.modes}")
        if self.kind == "fock" and len(self.params.get("occupations", ())) != len(self.modes):
            raise DomainError("fock source needs one occupation per mode")

    def state(self, cutoff: CutoffPolicy) -> StateVector:
        p = self.params
        if self.kind == "tmss":
            sq = SqueezeParams.from_lambda(p["lambda"]) if "lambda" in p else SqueezeParams(p["r"])
            return tmss(sq, cutoff)
        if self.kind == "smsv":
            return smsv(SqueezeParams(p["r"]), cutoff)
        if self.kind == "chi":
            return chi(p["b"], cutoff)
        if self.kind == "fock":
            return fock(p["occupations"], cutoff)
        return vacuum(len(self.modes), cutoff)


def assemble_input(modes: int, sources: Sequence[SourceSpec], cutoff: CutoffPolicy) -> StateVector:
    """Product of all sources, vacuum on uncovered modes, truncated at the cutoff."""
    covered = [m for s in sources for m in s.modes]
    if len(set(covered)) != len(covered):
        raise DomainError("a mode is covered by more than one source")
    if any(m < 0 or m >= modes for m in covered):
        raise DomainError(f"source modes {covered} out of range for {modes} modes")
    placed = list(sources) + [SourceSpec("vacuum", (m,)) for m in range(modes) if m not in covered]
    order = [m for s in placed for m in s.modes]
    product = tensor_all((s.state(cutoff) for s in placed), max_total=cutoff.max_total_photons)
    # product modes follow `order`; move them to circuit positions
    inverse = [order.index(m) for m in range(modes)]
    return product.permuted(inverse)


@dataclass(frozen=True)
class CircuitRecipe:
    circuit: Circuit
    sources: tuple[SourceSpec, ...]
    herald_pattern: HeraldPattern
    output_mode_labels: tuple[str, ...] = ()
    cutoff: CutoffPolicy = field(default_factory=CutoffPolicy)
    closed_form: Mapping | None = None
    target: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        self.herald_pattern.check(self.circuit.modes)
        n_out = self.circuit.modes - len(self.herald_pattern.detected_modes)
        if self.output_mode_labels and len(self.output_mode_labels) != n_out:
            raise DomainError(f"{len(self.output_mode_labels)} output labels for {n_out} output modes")

    @property
    def input(self) -> StateVector:
        return assemble_input(self.circuit.modes, self.sources, self.cutoff)

    def run(self) -> HeraldResult:
        return herald_after(compose(self.circuit), self.input, self.herald_pattern)


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class ClosedFormReport:
    """Closed-form amplitudes of the two-photon herald of :func:`build_fig3`.

    ``error_amplitudes`` lists the remaining nonzero amplitudes in their
    tabulated form: ``-x_1102 = -x_1120 = x_0202 = x_0220 =
    x_2002 = x_2020 = beta_minus`` and ``x_0211 = x_2011 = -beta_plus``.
    ``p_succ`` is the a-independent success probability, valid on the
    cancellation curve ``beta_minus = 0``.
    """

    a: float
    b: float
    s0: float
    s1: float
    s2: float
    beta_plus: float
    beta_minus: float
    x_0000: float
    x_1111: float
    error_amplitudes: Mapping[FockState, float]
    p_succ: float
    epsilon: float

    DOUBLE_PAIR = ((0, 2, 0, 2), (0, 2, 2, 0), (2, 0, 0, 2), (2, 0, 2, 0))

    def amplitude_table(self, normalized: bool = False) -> dict[FockState, float]:
        """All amplitudes keyed by output occupations.

        With ``normalized=True`` the four double-pair entries (``x_0202``
        and permutations) are divided by ``sqrt(2)``. That is what the
        normalized Fock amplitudes of the circuit actually are; the tabulated
        values agree with it whenever ``beta_minus = 0``.
        """
        table = {(0, 0, 0, 0): self.x_0000, (1, 1, 1, 1): self.x_1111}
        for key, val in self.error_amplitudes.items():
            table[key] = val / SQRT2 if normalized and key in self.DOUBLE_PAIR else val
        return dict(sorted(table.items(), key=lambda kv: canonical_key(kv[0])))

    def table_probability(self, normalized: bool = True) -> float:
        return sum(v * v for v in self.amplitude_table(normalized).values())

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "s0": self.s0,
            "s1": self.s1,
            "s2": self.s2,
            "beta_plus": self.beta_plus,
            "beta_minus": self.beta_minus,
            "x_0000": self.x_0000,
            "x_1111": self.x_1111,
            "error_amplitudes": [{"occupations": list(k), "value": v} for k, v in self.error_amplitudes.items()],
            "p_succ": self.p_succ,
            "epsilon": self.epsilon,
        }


def _check_unit(name, x):
    if not 0 <= x <= 1:
        raise DomainError(f"{name} must lie in [0, 1], got {x}")


def closed_forms(a: float, b: float, lam: float | None = None, *, s0: float | None = None,
                 s2: float | None = None) -> ClosedFormReport:
    """Evaluate the closed-form amplitudes and success probability.

    The TMSS coefficients come from ``lam`` (``s_n = sqrt(1-lam^2) lam^n``)
    unless ``s0`` and ``s2`` are given directly.
    """
    _check_unit("a", a)
    _check_unit("b", b)
    if s0 is None or s2 is None:
        if lam is None or not 0 <= lam < 1:
            raise DomainError(f"lambda must lie in [0, 1), got {lam}")
        s0, s1, s2 = (tmss_coefficient(lam, n) for n in range(3))
    else:
        s1 = math.sqrt(s0 * s2)
    rb, rc = math.sqrt(b), math.sqrt(1 - b)
    beta_plus = -s2 * (rc + a * rb) / 4
    beta_minus = -s2 * (rc - a * rb) / 4
    x_0000 = -(s0 / SQRT2) * (1 - a) * rb
    x_1111 = SQRT2 * beta_plus
    errors = {
        (1, 1, 0, 2): -beta_minus,
        (1, 1, 2, 0): -beta_minus,
        (0, 2, 0, 2): beta_minus,
        (0, 2, 2, 0): beta_minus,
        (2, 0, 0, 2): beta_minus,
        (2, 0, 2, 0): beta_minus,
        (0, 2, 1, 1): -beta_plus,
        (2, 0, 1, 1): -beta_plus,
    }
    p_succ = s0 * s0 * (0.5 - math.sqrt(b * (1 - b))) + s2 * s2 * (1 - b)
    epsilon = x_1111 * x_1111 / p_succ if p_succ > 0 else math.nan
    return ClosedFormReport(a, b, s0, s1, s2, beta_plus, beta_minus, x_0000, x_1111,
                            dict(sorted(errors.items(), key=lambda kv: canonical_key(kv[0]))), p_succ, epsilon)


def solve_cancellation(b: float) -> float:
    """Beamsplitter parameter ``a = sqrt(1/b - 1)`` that removes the ``beta_minus`` terms."""
    if not 0.5 <= b <= 1:
        raise DomainError(f"cancellation needs b in [1/2, 1], got {b}")
    return math.sqrt(1 / b - 1)


# ---------------------------------------------------------------------------
# circuit builders


def fig3_circuit(a: float) -> Circuit:
    return (
        Circuit(6)
        .then("beamsplitter", (3, 4), a=a)
        .then("beamsplitter", (2, 3), a=0.5)
        .then("beamsplitter", (1, 0), a=0.5)
        .then("beamsplitter", (4, 5), a=0.5)
    )


def build_fig3(a: float, b: float, lam: float, validate: bool = True,
               cutoff: CutoffPolicy | None = None) -> CircuitRecipe:
    """Two-photon-heralded circuit producing vacuum/4-photon superpositions on four modes.

    Inputs are ``tmss(lam)`` on modes (0, 2) and ``chi(b)`` on modes (4, 5);
    modes 2 and 3 are detected at one photon each. With ``validate`` the
    simulated amplitude table must match :func:`closed_forms` (normalized
    table, see :meth:`ClosedFormReport.amplitude_table`) to ``1e-10``.

    A cutoff of 6 photons is exact for this herald: higher TMSS terms put at
    least three photons on the detectors.
    """
    _check_unit("a", a)
    _check_unit("b", b)
    if not 0 <= lam < 1:
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    recipe = CircuitRecipe(
        circuit=fig3_circuit(a),
        sources=(SourceSpec("tmss", (0, 2), {"lambda": lam}), SourceSpec("chi", (4, 5), {"b": b})),
        herald_pattern=HeraldPattern((2, 3), (1, 1)),
        output_mode_labels=("1", "2", "7", "8"),
        cutoff=cutoff or CutoffPolicy(6),
        closed_form={"a": a, "b": b, "lambda": lam},
        target=(1, 1, 1, 1),
    )
    if validate:
        check_fig3(recipe.run(), closed_forms(a, b, lam))
    return recipe


def check_fig3(result: HeraldResult, report: ClosedFormReport, tol: float = GATE_TOL):
    expected = report.amplitude_table(normalized=True)
    keys = set(expected) | set(result.amplitude_table)
    worst = max((abs(result.amplitude_table.get(k, 0) - expected.get(k, 0)) for k in keys), default=0.0)
    if worst > tol:
        raise ValidationGateError(f"simulated amplitudes deviate from the closed forms by {worst:.3e}")
    if result.conditional_state is not None and not photon_number_support(result.conditional_state) <= {0, 4}:
        raise ValidationGateError("conditional state leaves the vacuum/4-photon subspace")


def build_fig2(u, lam: float, pattern: Sequence[int] = (1, 1), validate: bool = True,
               cutoff: CutoffPolicy | None = None) -> CircuitRecipe:
    """Parity circuit: any two-photon detection leaves vacuum or four photons.

    ``tmss(lam)`` sits on modes (0, 1) and ``|11>`` on modes (2, 3), which a
    balanced beamsplitter turns into ``(|20> - |02>)/sqrt(2)``. The arbitrary
    two-mode unitary ``u`` then mixes the idler (mode 1) with mode 3, and
    both are detected with ``pattern`` (two photons in total). Modes 0 and 2
    are the outputs.
    """
    u = u if isinstance(u, ModeUnitary) else ModeUnitary(u)
    if u.dim != 2:
        raise DomainError("the parity circuit takes a two-mode unitary on (idler, bunched mode)")
    if sum(pattern) != 2 or len(pattern) != 2:
        raise DomainError(f"herald pattern must detect two photons on two modes, got {pattern}")
    if not 0 <= lam < 1:
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    recipe = CircuitRecipe(
        circuit=Circuit(4).then("beamsplitter", (2, 3), a=0.5).then("general", (1, 3), matrix=u),
        sources=(SourceSpec("tmss", (0, 1), {"lambda": lam}), SourceSpec("fock", (2, 3), {"occupations": (1, 1)})),
        herald_pattern=HeraldPattern((1, 3), tuple(pattern)),
        output_mode_labels=("1", "3"),
        cutoff=cutoff or CutoffPolicy(8),
    )
    if validate:
        res = recipe.run()
        if res.conditional_state is not None and not photon_number_support(res.conditional_state) <= {0, 4}:
            raise ValidationGateError(
                f"parity circuit support {sorted(photon_number_support(res.conditional_state))} is not within {{0, 4}}"
            )
    return recipe


# ---------------------------------------------------------------------------
# two-term reduction


class TwoTermState(NamedTuple):
    state: StateVector
    c: float
    excited: FockState


def psi_tez_reduce(r: HeraldResult, tol: float = GATE_TOL) -> TwoTermState:
    """Undo the balanced split of the first output pair.

    At a cancellation point the heralded state is
    ``x0|0000> + beta_plus (sqrt2|1111> - |0211> - |2011>)``; the
    ``1111``/``0211``/``2011`` combination is two photons in one mode split
    by a balanced beamsplitter. Recombining gives
    ``sqrt(c)|0000> + sqrt(1-c) e^{i phi}|2011>``.
    """
    if r.conditional_state is None:
        raise DomainError("cannot reduce a zero-probability herald")
    s = r.conditional_state
    if s.modes != 4:
        raise DomainError("expected a four-mode heralded state")
    leftover = max(
        (abs(s.amplitude(k)) for k in ((1, 1, 0, 2), (1, 1, 2, 0)) + ClosedFormReport.DOUBLE_PAIR),
        default=0.0,
    )
    if leftover * math.sqrt(r.success_probability) > tol:
        raise DomainError(f"state is not at a cancellation point (residual amplitude {leftover:.2e})")
    u = compose(Circuit(4).then("beamsplitter", (1, 0), a=0.5))
    out = apply(u, s)
    out = out.replace_terms({k: v for k, v in out.terms.items() if abs(v) > tol})
    c = abs(out.amplitude((0, 0, 0, 0))) ** 2
    excited = max((k for k in out.terms if any(k)), key=lambda k: abs(out.amplitude(k)), default=(2, 0, 1, 1))
    return TwoTermState(out, c, excited)


# ---------------------------------------------------------------------------
# chi preparation

DEFAULT_LAMBDA = math.sqrt(0.5)


def damping_stage_probability(b: float) -> float:
    """Probability that the vacuum herald of the damping stage fires: ``1/(2 max(b, 1-b))``."""
    _check_unit("b", b)
    return 1 / (2 * max(b, 1 - b))


def chi_prep_damping(b: float, lam: float = DEFAULT_LAMBDA) -> tuple[CircuitRecipe, float]:
    """Prepare ``chi(b)`` from two heralded single photons.

    Modes: 0/1 and 2/3 are two TMSSs (idlers 1 and 3 heralded at one photon),
    the signals meet on a balanced beamsplitter, and the larger-amplitude
    term is damped by a beamsplitter to the vacuum ancilla 4, heralded empty.
    Returns the recipe and the total per-attempt success probability
    ``s1^4 / (2 max(b, 1-b))``; :func:`damping_stage_probability` gives the
    damping stage alone.
    """
    _check_unit("b", b)
    if b >= 0.5:
        damped, keep = 2, math.sqrt((1 - b) / b) if b > 0 else 0.0
    else:
        damped, keep = 0, math.sqrt(b / (1 - b))
    recipe = CircuitRecipe(
        circuit=Circuit(5).then("beamsplitter", (0, 2), a=0.5).then("beamsplitter", (damped, 4), a=keep),
        sources=(SourceSpec("tmss", (0, 1), {"lambda": lam}), SourceSpec("tmss", (2, 3), {"lambda": lam})),
        herald_pattern=HeraldPattern((1, 3, 4), (1, 1, 0)),
        output_mode_labels=("c", "d"),
        cutoff=CutoffPolicy(4),
    )
    res = recipe.run()
    _check_chi(res, b)
    return recipe, res.success_probability


def chi_prep_herald_interference(b: float, lam: float = DEFAULT_LAMBDA,
                                 tune: str = "squeezing") -> tuple[CircuitRecipe, float]:
    """Prepare ``chi(b)`` by interfering the idlers of two TMSSs.

    Modes: 0/1 and 2/3 are two TMSSs; each idler first meets a vacuum
    ancilla (modes 4 and 5) on a beamsplitter, then the idlers meet on a
    balanced beamsplitter and are heralded at one photon each with the
    ancillas empty. The ``|11>`` signal term then cancels.

    ``tune="squeezing"`` keeps the stronger source at ``lam`` and lowers the
    other so that ``lam1^2 : lam2^2 = sqrt(b) : sqrt(1-b)``; the ancilla
    couplers are left fully transmitting. ``tune="attenuation"`` keeps both
    sources at ``lam`` and sets the ancilla coupling instead.
    """
    _check_unit("b", b)
    if tune not in ("squeezing", "attenuation"):
        raise DomainError(f"unknown tuning mode {tune!r}")
    big, small = max(b, 1 - b), min(b, 1 - b)
    ratio = math.sqrt(small / big)
    lam1 = lam2 = lam
    t1 = t2 = 1.0
    if tune == "squeezing":
        if b >= 0.5:
            lam2 = lam * math.sqrt(ratio)
        else:
            lam1 = lam * math.sqrt(ratio)
    elif b >= 0.5:
        t2 = ratio
    else:
        t1 = ratio
    recipe = CircuitRecipe(
        circuit=(
            Circuit(6)
            .then("beamsplitter", (1, 4), a=t1)
            .then("beamsplitter", (3, 5), a=t2)
            .then("beamsplitter", (1, 3), a=0.5)
        ),
        sources=(SourceSpec("tmss", (0, 1), {"lambda": lam1}), SourceSpec("tmss", (2, 3), {"lambda": lam2})),
        herald_pattern=HeraldPattern((1, 3, 4, 5), (1, 1, 0, 0)),
        output_mode_labels=("c", "d"),
        cutoff=CutoffPolicy(4),
    )
    res = recipe.run()
    _check_chi(res, b)
    return recipe, res.success_probability


def _check_chi(res: HeraldResult, b: float, tol: float = 1e-10):
    if res.conditional_state is None:
        raise TuningError("chi preparation herald has zero probability")
    target = chi(b)
    overlap = sum(target.amplitude(k).conjugate() * v for k, v in res.conditional_state.terms.items())
    if abs(abs(overlap) ** 2 - 1) > tol:
        raise TuningError(f"prepared state has fidelity {abs(overlap) ** 2:.12f} with chi({b})")


# ---------------------------------------------------------------------------
# epsilon scan


def epsilon_on_cancellation(b: float, lam: float) -> float:
    return closed_forms(solve_cancellation(b), b, lam).epsilon


def scan_epsilon(target_epsilon: float, lam: float, tol: float = 1e-6, grid: int = 64) -> tuple[float, ClosedFormReport]:
    """Find ``b`` on the cancellation curve where ``x_1111^2 / P_succ`` equals the target.

    Checks monotonicity of epsilon(b) on a coarse grid, then bisects (to
    well below ``tol``). If the coarse grid is not monotone, the bracket
    found on the grid is refined by a dense grid instead.
    """
    if not 0 <= lam < 1:
        raise DomainError(f"lambda must lie in [0, 1), got {lam}")
    bs = np.linspace(0.5, 1.0, grid + 1)
    eps = np.array([epsilon_on_cancellation(b, lam) for b in bs])
    lo_eps, hi_eps = float(eps.min()), float(eps.max())
    if not lo_eps - tol <= target_epsilon <= hi_eps + tol:
        raise UnachievableTargetError(
            f"epsilon {target_epsilon} outside the attainable range [{lo_eps:.6g}, {hi_eps:.6g}]",
            (lo_eps, hi_eps),
        )
    for b, e in zip(bs, eps):
        if abs(e - target_epsilon) <= tol * 1e-3:
            b = float(b)
            return b, closed_forms(solve_cancellation(b), b, lam)
    diffs = np.diff(eps)
    monotone = bool(np.all(diffs <= 0) or np.all(diffs >= 0))
    idx = int(np.flatnonzero(np.sign(eps[:-1] - target_epsilon) != np.sign(eps[1:] - target_epsilon))[0])
    lo, hi = float(bs[idx]), float(bs[idx + 1])
    f = lambda b: epsilon_on_cancellation(b, lam) - target_epsilon  # noqa: E731
    if not monotone:
        fine = np.linspace(lo, hi, 257)
        vals = np.array([f(b) for b in fine])
        j = int(np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0])
        lo, hi = float(fine[j]), float(fine[j + 1])
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo < 1e-15:
            lo = hi = mid
            break
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    b = 0.5 * (lo + hi)
    report = closed_forms(solve_cancellation(b), b, lam)
    if abs(report.epsilon - target_epsilon) > tol:
        raise UnachievableTargetError(f"scan converged to epsilon {report.epsilon} (target {target_epsilon})")
    return b, report
