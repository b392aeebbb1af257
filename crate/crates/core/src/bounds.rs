//! Closed-form lower bounds on the least distortion, and composition over
//! orthogonal sums.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::embed2d::least_distortion_2d;
use crate::error::{Error, Result};
use crate::lattice::{deep_hole, enumerate_ball, shortest_vector, Lattice};

/// The least distortion of the standard torus `ℝⁿ/ℤⁿ`, for every `n`.
pub fn standard_torus_reference() -> f64 {
    PI / 2.0
}

/// `λ(L*)` for dimensions 1, 2 and orthogonal sums of such blocks.
pub fn dual_minimum(l: &Lattice) -> Result<f64> {
    let lstar = l.dual();
    match l.dim() {
        1 | 2 => Ok(shortest_vector(&lstar)?.length),
        n => {
            let factors = lstar.orthogonal_factors().ok_or(Error::UnsupportedDimension {
                expected: "1, 2 or an orthogonal sum of such blocks".into(),
                found: n,
            })?;
            factors
                .iter()
                .map(|f| shortest_vector(&f.lattice).map(|s| s.length))
                .try_fold(f64::INFINITY, |m, s| s.map(|s| m.min(s)))
        }
    }
}

/// The bound `π λ(L*) μ(L) / √n` with its witnessing dual pair: a point mass
/// of weight `λ(L*)²/(2n)` at a deep hole `y` and `Y = I/n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm51Bound {
    pub value: f64,
    pub n: usize,
    pub dual_minimum: f64,
    pub covering_radius: f64,
    pub deep_hole: Vec<f64>,
    pub mass: f64,
    /// `2π² · mass · |y|²`, the dual objective; equals `value²`.
    pub objective: f64,
    /// Largest `mass (1 - cos 2πuᵀy) - uᵀYu` over the dual vectors checked.
    pub max_violation: f64,
    pub checked_vectors: usize,
}

impl Thm51Bound {
    pub fn verified(&self) -> bool {
        self.max_violation <= 1e-9 && (self.objective.sqrt() - self.value).abs() <= 1e-9 * self.value.max(1.0)
    }
}

/// Checks the dual inequality of the witnessing pair on all dual vectors of
/// norm at most `enum_factor · λ(L*)` (dimensions 1 and 2, and each block of
/// an orthogonal sum).
pub fn lower_bound_thm51_with(l: &Lattice, enum_factor: f64) -> Result<Thm51Bound> {
    let n = l.dim();
    let lam = dual_minimum(l)?;
    let y = deep_hole(l)?;
    let mu = y.norm();
    let mass = lam * lam / (2.0 * n as f64);
    let ymat = DMatrix::<f64>::identity(n, n) / n as f64;

    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut check = |u: &DVector<f64>| {
        let s = (PI * u.dot(&y)).sin();
        let lhs = mass * 2.0 * s * s;
        let rhs = (u.transpose() * &ymat * u)[0];
        worst = worst.max(lhs - rhs);
        checked += 1;
    };
    let lstar = l.dual();
    match n {
        1 => {
            let b = lstar.basis()[(0, 0)];
            let k = (enum_factor * lam / b.abs()).ceil() as i64;
            for i in -k..=k {
                check(&DVector::from_element(1, b * i as f64));
            }
        }
        2 => {
            for p in enumerate_ball(&lstar, enum_factor * lam)? {
                check(&DVector::from_vec(vec![p.vector.x, p.vector.y]));
            }
        }
        _ => {
            let factors = lstar.orthogonal_factors().ok_or(Error::UnsupportedDimension {
                expected: "1, 2 or an orthogonal sum of such blocks".into(),
                found: n,
            })?;
            let r = enum_factor * lam;
            // Every block component of a vector in the ball lies in the ball.
            let mut blocks: Vec<Vec<DVector<f64>>> = Vec::new();
            for f in &factors {
                let pts: Vec<DVector<f64>> = match f.lattice.dim() {
                    1 => {
                        let b = f.lattice.basis()[(0, 0)];
                        let k = (r / b.abs()).ceil() as i64;
                        (-k..=k).map(|i| DVector::from_element(1, b * i as f64)).collect()
                    }
                    _ => enumerate_ball(&f.lattice, r)?
                        .iter()
                        .map(|p| DVector::from_vec(vec![p.vector.x, p.vector.y]))
                        .collect(),
                };
                blocks.push(pts.iter().map(|p| f.lift(p)).collect());
            }
            let mut partial = vec![DVector::zeros(n)];
            for block in &blocks {
                let mut next = Vec::new();
                for s in &partial {
                    for p in block {
                        let t = s + p;
                        if t.norm() <= r * (1.0 + 1e-12) {
                            next.push(t);
                        }
                    }
                }
                partial = next;
            }
            for u in &partial {
                check(u);
            }
        }
    }
    Ok(Thm51Bound {
        value: PI * lam * mu / (n as f64).sqrt(),
        n,
        dual_minimum: lam,
        covering_radius: mu,
        deep_hole: y.iter().copied().collect(),
        mass,
        objective: 2.0 * PI * PI * mass * mu * mu,
        max_violation: worst,
        checked_vectors: checked,
    })
}

pub fn lower_bound_thm51(l: &Lattice) -> Result<Thm51Bound> {
    lower_bound_thm51_with(l, 8.0)
}

/// `λ(L*) μ(L) / (4√n)`.
pub fn haviv_regev_bound(l: &Lattice) -> Result<f64> {
    let lam = dual_minimum(l)?;
    let mu = deep_hole(l)?.norm();
    Ok(lam * mu / (4.0 * (l.dim() as f64).sqrt()))
}

/// The least distortion of an orthogonal sum is the largest over its
/// factors.
pub fn orthogonal_compose(factors: &[f64]) -> Result<f64> {
    if factors.is_empty() {
        return Err(Error::EmptyFactorList);
    }
    Ok(factors.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Least distortion for dimension 1 (always `π/2`), dimension 2 (via the
/// certified pipeline) and orthogonal sums of such blocks.
pub fn least_distortion(l: &Lattice) -> Result<f64> {
    match l.dim() {
        1 => Ok(standard_torus_reference()),
        2 => Ok(least_distortion_2d(l)?.c2),
        n => {
            let factors = l.orthogonal_factors().ok_or(Error::UnsupportedDimension {
                expected: "1, 2 or an orthogonal sum of such blocks".into(),
                found: n,
            })?;
            let c: Result<Vec<f64>> = factors.iter().map(|f| least_distortion(&f.lattice)).collect();
            orthogonal_compose(&c?)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsSummary {
    pub thm51: f64,
    pub haviv_regev: f64,
    pub n: usize,
    pub deep_hole: Vec<f64>,
}

pub fn bounds_summary(l: &Lattice) -> Result<BoundsSummary> {
    let t = lower_bound_thm51(l)?;
    Ok(BoundsSummary {
        thm51: t.value,
        haviv_regev: haviv_regev_bound(l)?,
        n: l.dim(),
        deep_hole: t.deep_hole,
    })
}
