"""Stellar representation of spin states and spin-coherent-sphere geometry."""

from .config import DEFAULT_TOLS, Tolerances
from .stellar import (
    Constellation,
    Direction,
    INFINITY,
    MajoranaPolynomial,
    SpinState,
    StereoPoint,
    antipode,
    antipode_stereo,
    chordal_distance,
    coherent_overlap,
    direction,
    fidelity,
    majorana_polynomial,
    polynomial_roots,
    random_spin_state,
    rotate_state,
    sphere_to_stereo,
    spin_state,
    state_from_constellation,
    stereo_to_sphere,
    symmetrized_norm,
)

__version__ = "0.1.0"
