use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{coset_shortest_vectors, lagrange_reduce, Lattice, TIE_TOL};

/// `u0, u1, u2` in the dual lattice with `u0 + u1 + u2 = 0` and pairwise
/// non-acute angles; `u1, u2` is a basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObtuseSuperbasis {
    pub vectors: [Vector2<f64>; 3],
    /// Integer coordinates in the dual lattice's basis.
    pub coords: [[i64; 2]; 3],
}

impl ObtuseSuperbasis {
    /// Residue classes of the three vectors in `L*/2L*`.
    pub fn cosets(&self) -> [[i64; 2]; 3] {
        self.coords.map(|c| [c[0].rem_euclid(2), c[1].rem_euclid(2)])
    }
}

/// Nonnegative one-sided coefficients with `4π² Σ z_i u_i u_iᵀ = I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityDecomposition {
    pub superbasis: ObtuseSuperbasis,
    pub coeffs: [f64; 3],
}

const PAIR_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-12;

/// The obtuse superbasis `u1 = b1, u2 = b2, u0 = -b1 - b2` built from the
/// Lagrange-reduced basis of `lstar`, with every invariant re-checked.
pub fn obtuse_superbasis(lstar: &Lattice) -> Result<ObtuseSuperbasis> {
    let red = lagrange_reduce(lstar)?;
    let c1 = red.to_original([1, 0]);
    let c2 = red.to_original([0, 1]);
    let sb = ObtuseSuperbasis {
        vectors: [-red.b1 - red.b2, red.b1, red.b2],
        coords: [[-c1[0] - c2[0], -c1[1] - c2[1]], c1, c2],
    };
    check_superbasis(&sb, lstar)?;
    Ok(sb)
}

pub(crate) fn check_superbasis(sb: &ObtuseSuperbasis, lstar: &Lattice) -> Result<()> {
    let u = &sb.vectors;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let dot = u[i].dot(&u[j]);
        if dot > PAIR_TOL * (u[i].norm() * u[j].norm()).max(1.0) {
            return Err(Error::SuperbasisInvalid(format!("u{i}·u{j} = {dot:e} > 0")));
        }
    }
    if (u[0] + u[1] + u[2]).norm() > PAIR_TOL * u[0].norm().max(1.0) {
        return Err(Error::SuperbasisInvalid("vectors do not sum to zero".into()));
    }
    let det = sb.coords[1][0] * sb.coords[2][1] - sb.coords[1][1] * sb.coords[2][0];
    if det.abs() != 1 {
        return Err(Error::SuperbasisInvalid(format!(
            "u1, u2 span an index-{} sublattice",
            det.abs()
        )));
    }
    let cosets = sb.cosets();
    if cosets.contains(&[0, 0]) || cosets[0] == cosets[1] || cosets[0] == cosets[2] || cosets[1] == cosets[2] {
        return Err(Error::SuperbasisInvalid(format!("cosets {cosets:?} not distinct and nonzero")));
    }
    for (i, ui) in u.iter().enumerate() {
        let shortest = coset_shortest_vectors(lstar, ui)?;
        let min = shortest[0].vector.norm();
        if ui.norm() > min * (1.0 + TIE_TOL) {
            return Err(Error::SuperbasisInvalid(format!(
                "u{i} has norm {} but its coset contains norm {min}",
                ui.norm()
            )));
        }
    }
    Ok(())
}

/// Solves the three independent entries of `4π² Σ z_i u_i u_iᵀ = I`.
pub fn identity_decomposition(sb: &ObtuseSuperbasis) -> Result<IdentityDecomposition> {
    let s = 4.0 * PI * PI;
    let col = |u: &Vector2<f64>| Vector3::new(u.x * u.x, u.x * u.y, u.y * u.y) * s;
    let a = Matrix3::from_columns(&[col(&sb.vectors[0]), col(&sb.vectors[1]), col(&sb.vectors[2])]);
    let z = a
        .lu()
        .solve(&Vector3::new(1.0, 0.0, 1.0))
        .ok_or_else(|| Error::DecompositionFailed("singular system".into()))?;
    let scale = z.amax().max(1.0);
    if z.iter().any(|&c| c < -RESIDUAL_TOL * scale || !c.is_finite()) {
        return Err(Error::DecompositionFailed(format!("negative coefficient in {z:?}")));
    }
    let coeffs = [z[0].max(0.0), z[1].max(0.0), z[2].max(0.0)];
    let dec = IdentityDecomposition {
        superbasis: sb.clone(),
        coeffs,
    };
    let res = dec.identity_residual();
    if res > RESIDUAL_TOL {
        return Err(Error::DecompositionFailed(format!("residual {res:e}")));
    }
    Ok(dec)
}

impl IdentityDecomposition {
    /// `‖4π² Σ z_i u_i u_iᵀ - I‖_max`.
    pub fn identity_residual(&self) -> f64 {
        (self.reconstruction() - Matrix2::identity()).amax()
    }

    /// `4π² Σ z_i u_i u_iᵀ`.
    pub fn reconstruction(&self) -> Matrix2<f64> {
        self.superbasis
            .vectors
            .iter()
            .zip(self.coeffs)
            .map(|(u, z)| u * u.transpose() * (4.0 * PI * PI * z))
            .sum()
    }

    /// Distortion ratio `|x|² / (2 Σ z_i (1 - cos 2π u_iᵀx))`; 1 at the
    /// origin.
    pub fn ratio(&self, x: &Vector2<f64>) -> Result<f64> {
        let s = x.norm();
        if s == 0.0 {
            return Ok(1.0);
        }
        // Written as 1 / (4 Σ z_i (sin(π u_iᵀx)/|x|)²) so tiny |x| does not underflow.
        let dir = x / s;
        let mut denom = 0.0;
        let mut integral = true;
        let mut nonzero = false;
        for (u, z) in self.superbasis.vectors.iter().zip(self.coeffs) {
            let t = u.dot(&dir);
            let a = PI * s * t;
            let q = if a.abs() < 1e-4 {
                PI * t * (1.0 - a * a / 6.0)
            } else {
                a.sin() / s
            };
            denom += z * q * q;
            // Every weighted phase at an integer, not all zero, means x is a
            // nonzero lattice point and the denominator is rounding noise.
            let p = u.dot(x);
            let k = p.round();
            if z > 0.0 {
                integral &= (p - k).abs() <= 1e-12 * p.abs().max(1.0);
                nonzero |= k != 0.0;
            }
        }
        if denom == 0.0 || (integral && nonzero) {
            return Err(Error::DivisionByZero([x.x, x.y]));
        }
        Ok(1.0 / (4.0 * denom))
    }
}

/// `distortion_ratio(sb, x)`.
pub fn distortion_ratio(dec: &IdentityDecomposition, x: &Vector2<f64>) -> Result<f64> {
    dec.ratio(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[[f64; 2]]) -> Lattice {
        Lattice::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn square_superbasis() {
        let sb = obtuse_superbasis(&lat(&[[1.0, 0.0], [0.0, 1.0]])).unwrap();
        assert_eq!(sb.vectors[1], Vector2::new(1.0, 0.0));
        assert_eq!(sb.vectors[2].abs(), Vector2::new(0.0, 1.0));
        assert!(sb.vectors[0].dot(&sb.vectors[1]) <= -1.0 + 1e-15);
        let dec = identity_decomposition(&sb).unwrap();
        let expect = 1.0 / (4.0 * PI * PI);
        assert!(dec.coeffs[0].abs() < 1e-16);
        assert!((dec.coeffs[1] - expect).abs() < 1e-16);
        assert!((dec.coeffs[2] - expect).abs() < 1e-16);
    }

    #[test]
    fn hexagonal_superbasis() {
        let a2 = lat(&[[1.0, 0.0], [-0.5, 3f64.sqrt() / 2.0]]);
        let sb = obtuse_superbasis(&a2.dual()).unwrap();
        let n: Vec<f64> = sb.vectors.iter().map(|u| u.norm()).collect();
        assert!((n[0] - n[1]).abs() < 1e-14 && (n[1] - n[2]).abs() < 1e-14);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let cos = sb.vectors[i].dot(&sb.vectors[j]) / (n[i] * n[j]);
            assert!((cos + 0.5).abs() < 1e-14);
        }
        let dec = identity_decomposition(&sb).unwrap();
        assert!((dec.coeffs[0] - dec.coeffs[1]).abs() < 1e-15);
        assert!((dec.coeffs[1] - dec.coeffs[2]).abs() < 1e-15);
    }

    #[test]
    fn rectangular_superbasis() {
        let sb = obtuse_superbasis(&lat(&[[1.0, 0.0], [0.0, 3.0]])).unwrap();
        assert_eq!(sb.vectors[1], Vector2::new(1.0, 0.0));
        assert_eq!(sb.vectors[2].abs(), Vector2::new(0.0, 3.0));
        // u0 = (-1, ∓3) ties with (1, ∓3) in its coset; still shortest.
        let ties = coset_shortest_vectors(&lat(&[[1.0, 0.0], [0.0, 3.0]]), &sb.vectors[0]).unwrap();
        assert_eq!(ties.len(), 4);
        let dec = identity_decomposition(&sb).unwrap();
        assert!(dec.coeffs[0].abs() < 1e-16);
        assert!((dec.coeffs[1] - 1.0 / (4.0 * PI * PI)).abs() < 1e-16);
        assert!((dec.coeffs[2] - 1.0 / (36.0 * PI * PI)).abs() < 1e-16);
    }

    #[test]
    fn ratio_values() {
        let dec = identity_decomposition(&obtuse_superbasis(&lat(&[[1.0, 0.0], [0.0, 1.0]])).unwrap()).unwrap();
        let g = dec.ratio(&Vector2::new(0.5, 0.5)).unwrap();
        assert!((g - PI * PI / 4.0).abs() < 1e-14);
        // Edge midpoints tie with the vertices: (1/4) / (2 · 1/(4π²) · 2).
        let g = dec.ratio(&Vector2::new(0.5, 0.0)).unwrap();
        assert!((g - PI * PI / 4.0).abs() < 1e-14);
        let g = dec.ratio(&Vector2::new(0.25, 0.0)).unwrap();
        // (1/16) / (2 · 1/(4π²) · 1)
        assert!((g - PI * PI / 8.0).abs() < 1e-14);
        assert_eq!(dec.ratio(&Vector2::zeros()).unwrap(), 1.0);
        let g = dec.ratio(&Vector2::new(1e-200, 3e-201)).unwrap();
        assert!((g - 1.0).abs() < 1e-15);
        assert!(matches!(
            dec.ratio(&Vector2::new(1.0, 0.0)),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn ratio_is_even() {
        let dec = identity_decomposition(&obtuse_superbasis(&lat(&[[1.0, 0.3], [0.2, 0.9]])).unwrap()).unwrap();
        let x = Vector2::new(0.123, -0.31);
        assert_eq!(dec.ratio(&x).unwrap(), dec.ratio(&-x).unwrap());
    }
}
