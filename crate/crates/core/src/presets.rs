//! The lattices `L_φ` with basis `e1`, `R_φ e1` for the angles 90°, 93°,
//! 105° and 120°.

use crate::error::{Error, Result};
use crate::lattice::Lattice;

pub const PRESET_NAMES: [&str; 4] = ["L90", "L93", "L105", "L120"];

/// Basis `v1 = e1`, `v2 = (cos φ, sin φ)` with `φ` in degrees.
pub fn rotated_pair(degrees: f64) -> Result<Lattice> {
    let phi = degrees.to_radians();
    Lattice::from_rows(&[vec![1.0, 0.0], vec![phi.cos(), phi.sin()]])
}

pub fn preset(name: &str) -> Result<Lattice> {
    let deg = match name {
        "L90" => 90.0,
        "L93" => 93.0,
        "L105" => 105.0,
        "L120" => 120.0,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset {name:?} (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    rotated_pair(deg)
}
