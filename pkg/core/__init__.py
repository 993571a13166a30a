"""
MagLat - Core Package
=====================
Magnetic fields, lattice operators, noncommutative-torus pairings and
interface topology, separated from the command line.
"""

from .fields import (
    Window,
    MagneticField,
    build_field,
    Gauge,
    VectorPotential,
    GaugeFunction,
    build_potential,
    circulation,
    apply_gauge,
    random_gauge,
    symmetric_gauge_function,
    InterfaceStructure,
    classify_asymptotics,
)

from .lattice_ops import (
    LatticeDomain,
    LatticeOperator,
    BoxSequence,
    BulkPair,
    magnetic_translation,
    commutator_flux,
    harper_hamiltonian,
    column_projection,
    half_plane_projections,
    fourier_coefficients,
    cesaro_mean,
    partial_sum,
    derivation,
    trace_per_unit_volume,
    lp_norm,
    regularity_norms,
    evaluate_bulk,
)

from .nctorus import (
    BlochFamily,
    PowerRieffelRep,
    harper_bloch_family,
    fermi_projection,
    chern_fhs,
    band_chern_numbers,
    bulk_gaps,
    xi_pairing,
    chern_realspace,
    power_rieffel,
    chern_power_rieffel,
    gap_label,
    hofstadter_butterfly,
)

from .interface import (
    BFPhase,
    FiberOperator,
    SwitchFunction,
    DualityReport,
    bf_phase,
    fiber_hamiltonian,
    interface_spectrum,
    u_delta,
    calibration_family,
    winding_number,
    eta_pairing,
    interface_current,
    spectral_flow,
    find_common_gap,
    verify_duality,
)

from .exceptions import (
    MagLatError,
    ConfigError,
    FieldError,
    DomainError,
    NumericalError,
    GapError,
    OutputError,
)

__all__ = [
    # Fields
    "Window",
    "MagneticField",
    "build_field",
    "Gauge",
    "VectorPotential",
    "GaugeFunction",
    "build_potential",
    "circulation",
    "apply_gauge",
    "random_gauge",
    "symmetric_gauge_function",
    "InterfaceStructure",
    "classify_asymptotics",
    # Lattice operators
    "LatticeDomain",
    "LatticeOperator",
    "BoxSequence",
    "BulkPair",
    "magnetic_translation",
    "commutator_flux",
    "harper_hamiltonian",
    "column_projection",
    "half_plane_projections",
    "fourier_coefficients",
    "cesaro_mean",
    "partial_sum",
    "derivation",
    "trace_per_unit_volume",
    "lp_norm",
    "regularity_norms",
    "evaluate_bulk",
    # Noncommutative torus
    "BlochFamily",
    "PowerRieffelRep",
    "harper_bloch_family",
    "fermi_projection",
    "chern_fhs",
    "band_chern_numbers",
    "bulk_gaps",
    "xi_pairing",
    "chern_realspace",
    "power_rieffel",
    "chern_power_rieffel",
    "gap_label",
    "hofstadter_butterfly",
    # Interface
    "BFPhase",
    "FiberOperator",
    "SwitchFunction",
    "DualityReport",
    "bf_phase",
    "fiber_hamiltonian",
    "interface_spectrum",
    "u_delta",
    "calibration_family",
    "winding_number",
    "eta_pairing",
    "interface_current",
    "spectral_flow",
    "find_common_gap",
    "verify_duality",
    # Exceptions
    "MagLatError",
    "ConfigError",
    "FieldError",
    "DomainError",
    "NumericalError",
    "GapError",
    "OutputError",
]
