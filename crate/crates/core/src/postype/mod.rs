//! Finite-support positive-type functions on a flat torus.
//!
//! A [`WeightFunction`] stores nonnegative Fourier weights `z(u) = z(-u)` on
//! the dual lattice, one entry per ± pair. It induces
//!
//! ```text
//! f(x) = 2 Σ_{u ∈ L*} z(u) (1 - cos 2π uᵀx)
//! ```
//!
//! where the sum runs over the full support (both `u` and `-u`), and the
//! embedding `x ↦ (√z(u) e^{2πi uᵀx})_u` with `‖φ(x) - φ(y)‖² = f(x - y)`.
//!
//! Some constructions (the identity decomposition of the 2D pipeline) list
//! one vector per pair with a coefficient that already counts both signs.
//! [`pair_weight_from_one_sided`] is the only conversion between the two
//! conventions.

mod feasibility;
mod reduction;

pub use feasibility::{
    check_primal_feasible, distortion_of_candidate, CandidateDistortion, FeasibilityReport,
    PrimalCandidate, Verdict, FEASIBILITY_TOL,
};
pub use reduction::{
    collapse_multiple, is_primitive, merge_coset_pair, reduce_support, ReductionReport, ReductionStep,
    StepKind,
};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Converts a one-sided coefficient `c` (the term `c·(1 - cos)` inside
/// `2 Σ_i c_i (1 - cos 2π u_iᵀx)` over one representative per pair) into
/// the per-vector weight `z(u) = z(-u)`.
pub fn pair_weight_from_one_sided(c: f64) -> f64 {
    c / 2.0
}

/// Inverse of [`pair_weight_from_one_sided`].
pub fn one_sided_from_pair_weight(w: f64) -> f64 {
    2.0 * w
}

/// `1 - cos(2πt)`, evaluated as `2 sin²(πt)` to keep precision near 0.
#[inline]
pub(crate) fn one_minus_cos_2pi(t: f64) -> f64 {
    let s = (PI * t).sin();
    2.0 * s * s
}

/// Canonical representative of `±u`: first nonzero coordinate positive.
pub fn canonical(u: &[i64]) -> Vec<i64> {
    match u.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => u.iter().map(|x| -x).collect(),
        _ => u.to_vec(),
    }
}

/// Nonnegative symmetric weights on finitely many dual-lattice vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    dual_basis: Lattice,
    entries: BTreeMap<Vec<i64>, f64>,
}

impl WeightFunction {
    pub fn new(dual_basis: Lattice) -> Self {
        WeightFunction {
            dual_basis,
            entries: BTreeMap::new(),
        }
    }

    /// Builds from `(u, z(u))` pairs, `u` in dual-basis integer coordinates,
    /// one entry per ± pair. Zero weights are dropped.
    pub fn from_pairs<I>(dual_basis: Lattice, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, f64)>,
    {
        let mut z = WeightFunction::new(dual_basis);
        for (u, w) in pairs {
            z.check_vector(&u)?;
            if z.entries.contains_key(&canonical(&u)) {
                return Err(Error::InvalidWeights(format!(
                    "duplicate entry for ±{u:?}"
                )));
            }
            z.set(&u, w)?;
        }
        Ok(z)
    }

    fn check_vector(&self, u: &[i64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::InvalidWeights(format!(
                "vector {u:?} has wrong dimension (expected {})",
                self.dim()
            )));
        }
        if u.iter().all(|&c| c == 0) {
            return Err(Error::InvalidWeights("zero vector in support".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dual_basis.dim()
    }

    pub fn dual_basis(&self) -> &Lattice {
        &self.dual_basis
    }

    /// `z(u)`; zero off the support.
    pub fn get(&self, u: &[i64]) -> f64 {
        self.entries.get(&canonical(u)).copied().unwrap_or(0.0)
    }

    /// Sets `z(±u) = w`; `w = 0` removes the pair.
    pub fn set(&mut self, u: &[i64], w: f64) -> Result<()> {
        self.check_vector(u)?;
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidWeights(format!("weight {w} for {u:?}")));
        }
        if w == 0.0 {
            self.entries.remove(&canonical(u));
        } else {
            self.entries.insert(canonical(u), w);
        }
        Ok(())
    }

    pub(crate) fn add(&mut self, u: &[i64], dw: f64) -> Result<()> {
        let w = self.get(u) + dw;
        self.set(u, w)
    }

    /// Canonical representatives and their weights, in coordinate order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Vec<i64>, f64)> + '_ {
        self.entries.iter().map(|(u, &w)| (u, w))
    }

    /// Every support vector with its weight, both signs.
    pub fn full_support(&self) -> impl Iterator<Item = (Vec<i64>, f64)> + '_ {
        self.entries.iter().flat_map(|(u, &w)| {
            let neg: Vec<i64> = u.iter().map(|c| -c).collect();
            [(u.clone(), w), (neg, w)]
        })
    }

    /// Number of ± pairs in the support.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Cartesian vector of the dual-lattice point with coordinates `u`.
    pub fn vector(&self, u: &[i64]) -> DVector<f64> {
        self.dual_basis.vector(u)
    }

    /// `Σ_{u ∈ L*} z(u)`.
    pub fn total_mass(&self) -> f64 {
        self.full_support().map(|(_, w)| w).sum()
    }

    /// `Σ_{u ∈ L*} z(u) u uᵀ`.
    pub fn moment(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (u, w) in self.full_support() {
            let v = self.vector(&u);
            m += (&v * v.transpose()) * w;
        }
        m
    }

    /// Largest Euclidean norm in the support.
    pub fn support_radius(&self) -> f64 {
        self.entries
            .keys()
            .map(|u| self.vector(u).norm())
            .fold(0.0, f64::max)
    }

    /// Whether the support spans ℝⁿ, which is necessary for the induced
    /// embedding to be injective.
    pub fn spans(&self) -> bool {
        let n = self.dim();
        if self.entries.len() < n {
            return false;
        }
        let cols: Vec<DVector<f64>> = self.entries.keys().map(|u| self.vector(u)).collect();
        DMatrix::from_columns(&cols).rank(1e-10 * self.support_radius().max(1.0)) == n
    }

    /// Multiplies every weight by `c ≥ 0`.
    pub fn scaled(&self, c: f64) -> Result<WeightFunction> {
        let mut out = WeightFunction::new(self.dual_basis.clone());
        for (u, w) in self.pairs() {
            out.set(u, w * c)?;
        }
        Ok(out)
    }
}

/// `f(x) = 2 Σ_{u ∈ L*} z(u)(1 - cos 2π uᵀx)`.
pub fn evaluate_f(z: &WeightFunction, x: &[f64]) -> f64 {
    let x = DVector::from_column_slice(x);
    2.0 * z
        .full_support()
        .map(|(u, w)| w * one_minus_cos_2pi(z.vector(&u).dot(&x)))
        .sum::<f64>()
}

/// `4π² Σ z(u) u uᵀ`, whose largest eigenvalue is the squared expansion.
pub fn expansion_matrix(z: &WeightFunction) -> DMatrix<f64> {
    z.moment() * (4.0 * PI * PI)
}

/// `λ_max(4π² Σ z(u) u uᵀ)`.
pub fn spectral_expansion(z: &WeightFunction) -> f64 {
    let m = expansion_matrix(z);
    SymmetricEigen::new(m).eigenvalues.max().max(0.0)
}

/// Coordinates `√z(u)·e^{2πi uᵀx}` of the embedded point, one per support
/// vector (both signs).
pub fn embedding_map(z: &WeightFunction, x: &[f64]) -> Vec<(Vec<i64>, Complex64)> {
    let x = DVector::from_column_slice(x);
    z.full_support()
        .map(|(u, w)| {
            let phase = 2.0 * PI * z.vector(&u).dot(&x);
            (u, Complex64::from_polar(w.sqrt(), phase))
        })
        .collect()
}

/// `2f(x) + 2f(y) - f(x+y) - f(x-y)`; nonnegative for every `z`.
pub fn subquadratic_check(z: &WeightFunction, x: &[f64], y: &[f64]) -> f64 {
    let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    2.0 * evaluate_f(z, x) + 2.0 * evaluate_f(z, y) - evaluate_f(z, &sum) - evaluate_f(z, &diff)
}

/// `k² f(x) - f(kx)`; nonnegative for integers `k ≥ 1`.
pub fn scaling_check(z: &WeightFunction, x: &[f64], k: u32) -> f64 {
    let kx: Vec<f64> = x.iter().map(|t| t * k as f64).collect();
    (k * k) as f64 * evaluate_f(z, x) - evaluate_f(z, &kx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Lattice {
        Lattice::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    /// Unit-expansion weights on ℤ²: z(±e_i) = 1/(8π²).
    fn standard() -> WeightFunction {
        let w = 1.0 / (8.0 * PI * PI);
        WeightFunction::from_pairs(z2(), [(vec![1, 0], w), (vec![0, 1], w)]).unwrap()
    }

    #[test]
    fn f_at_corner() {
        let f = evaluate_f(&standard(), &[0.5, 0.5]);
        assert!((f - 2.0 / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn f_vanishes_on_lattice() {
        let z = standard();
        assert_eq!(evaluate_f(&z, &[0.0, 0.0]), 0.0);
        assert!(evaluate_f(&z, &[3.0, -2.0]).abs() < 1e-15);
        let a = evaluate_f(&z, &[0.3, 0.1]);
        let b = evaluate_f(&z, &[1.3, -4.9]);
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn expansion_values() {
        assert!((spectral_expansion(&standard()) - 1.0).abs() < 1e-14);
        assert_eq!(spectral_expansion(&WeightFunction::new(z2())), 0.0);
        let c = 0.37;
        let z = WeightFunction::from_pairs(z2(), [(vec![1, 0], c)]).unwrap();
        assert!((spectral_expansion(&z) - 8.0 * PI * PI * c).abs() < 1e-12);
    }

    #[test]
    fn embedding_coordinates() {
        let z = standard();
        for (_, c) in embedding_map(&z, &[0.0, 0.0]) {
            assert!((c.re - z.get(&[1, 0]).sqrt()).abs() < 1e-15 && c.im == 0.0);
        }
        let e = embedding_map(&z, &[0.25, 0.0]);
        let (_, c) = e.iter().find(|(u, _)| u == &vec![1, 0]).unwrap();
        assert!(c.re.abs() < 1e-15 && (c.im - z.get(&[1, 0]).sqrt()).abs() < 1e-15);
        let norm2: f64 = embedding_map(&z, &[0.17, -0.4])
            .iter()
            .map(|(_, c)| c.norm_sqr())
            .sum();
        assert!((norm2 - z.total_mass()).abs() < 1e-15);
    }

    #[test]
    fn subquadratic_and_scaling_edge_cases() {
        let z = standard();
        assert!(subquadratic_check(&z, &[0.3, 0.2], &[0.0, 0.0]).abs() < 1e-15);
        assert!(subquadratic_check(&z, &[0.3, 0.2], &[1.0, -2.0]).abs() < 1e-9);
        assert_eq!(scaling_check(&z, &[0.3, 0.2], 1), 0.0);
        assert!(scaling_check(&z, &[0.25, 0.0], 2) >= 0.0);
        assert!(scaling_check(&z, &[1.0, 2.0], 3).abs() < 1e-12);
    }

    #[test]
    fn canonical_pairs() {
        assert_eq!(canonical(&[-1, 2]), vec![1, -2]);
        assert_eq!(canonical(&[0, -3]), vec![0, 3]);
        let mut z = WeightFunction::new(z2());
        z.set(&[-1, 1], 0.5).unwrap();
        assert_eq!(z.get(&[1, -1]), 0.5);
        assert_eq!(z.len(), 1);
        assert_eq!(z.total_mass(), 1.0);
        assert!(z.set(&[0, 0], 1.0).is_err());
        assert!(z.set(&[1, 0], -1.0).is_err());
        assert!(WeightFunction::from_pairs(z2(), [(vec![1, 0], 1.0), (vec![-1, 0], 1.0)]).is_err());
    }

    #[test]
    fn spanning() {
        assert!(standard().spans());
        let z = WeightFunction::from_pairs(z2(), [(vec![1, 1], 1.0), (vec![2, 2], 1.0)]).unwrap();
        assert!(!z.spans());
    }

    #[test]
    fn one_sided_conversion() {
        assert_eq!(one_sided_from_pair_weight(pair_weight_from_one_sided(0.3)), 0.3);
    }
}
