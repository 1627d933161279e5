"""Central tolerance record.

Every numerical threshold used by the library lives here, so tests and the
CLI calibrate against a single source.  All values are dimensionless unless
stated otherwise; angles are radians.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds with documented defaults.

    poly_abs_floor      absolute floor below which a polynomial counts as zero
    inf_root_rel        leading-coefficient threshold (relative to the largest
                        coefficient) for roots at infinity
    cluster_chordal     chordal-metric radius for clustering roots into stars
    norm_atol           allowed deviation of a state vector from unit norm
    phase_floor         relative magnitude below which a coefficient is
                        treated as zero when fixing the global phase
    basis_chordal       minimal chordal separation of SC-basis directions
    cond_warn           condition number beyond which expansion warns
    crit_residual       |<n,s-1|psi>| bound for accepting a critical point
    marginal            half-width of the degenerate-Hessian classification band
    dedup_radius        angular radius for de-duplicating critical points
    tie_h               Husimi-value window for closest-SC ties
    pole_margin         polar-cap size triggering chart re-centering
    cut_locus_margin    omega >= pi/2 - cut_locus_margin counts as cut locus
    scan_cluster        looser clustering radius for SC-membership scans
    a_degenerate_rel    relative |A| threshold routing the spin-3/2
                        decomposition to the infinity branch
    """

    poly_abs_floor: float = 1e-250
    inf_root_rel: float = 1e-12
    cluster_chordal: float = 1e-7
    norm_atol: float = 1e-9
    phase_floor: float = 1e-12
    basis_chordal: float = 1e-7
    cond_warn: float = 1e12
    crit_residual: float = 1e-9
    marginal: float = 1e-8
    dedup_radius: float = 1e-6
    tie_h: float = 1e-9
    pole_margin: float = 0.1
    cut_locus_margin: float = 1e-6
    scan_cluster: float = 1e-5
    a_degenerate_rel: float = 1e-10

    def override(self, **kwargs: float) -> "Tolerances":
        """Return a copy with the given thresholds replaced."""
        unknown = set(kwargs) - {f.name for f in fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **kwargs)


DEFAULT_TOLS = Tolerances()
