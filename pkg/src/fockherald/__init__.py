"""Heralded Fock-state preparation in passive linear optics."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    FockHeraldError,
    ModeMismatchError,
    ResourceLimitError,
    SchemaError,
    TuningError,
    UnachievableTargetError,
    UnitarityError,
    ValidationGateError,
)
from .fock import CutoffPolicy, StateVector, enumerate_basis, inner_product, photon_number_support, tensor_product
from .sources import SqueezeParams, chi, fock, smsv, tmss, vacuum
from .interferometer import (
    Circuit,
    CircuitElement,
    ModeUnitary,
    apply,
    beamsplitter_r,
    compose,
    embed,
    pairing_unitary,
    permanent,
    phase_shift,
)
from .herald import HeraldPattern, HeraldResult, epsilon_ratio, fidelity, herald, herald_after
from .circuits import (
    CircuitRecipe,
    ClosedFormReport,
    SourceSpec,
    build_fig2,
    build_fig3,
    chi_prep_damping,
    chi_prep_herald_interference,
    closed_forms,
    psi_tez_reduce,
    scan_epsilon,
    solve_cancellation,
)
from .verify import classify_gray_zone, verify_external
