//! Shared fixtures for the benchmarks.

use eprb_core::UnitVector;

/// Analyzer pair at `theta_deg` degrees, a on +z and b in the x–z plane.
pub fn planar_pair(theta_deg: f64) -> (UnitVector, UnitVector) {
    (
        UnitVector::Z,
        UnitVector::in_xz_plane(theta_deg.to_radians()),
    )
}
