use nalgebra::{SymmetricEigen, Vector2};
use serde::Serialize;

use super::{expansion_matrix, one_minus_cos_2pi, spectral_expansion, WeightFunction};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lattice::{voronoi_cell, Lattice, VoronoiCell2D};

/// Margin below which a constraint counts as violated.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A pair `(C, z)`: squared-distortion bound and weights, contraction
/// normalized to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalCandidate {
    pub c: f64,
    pub z: WeightFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// `C - λ_max(4π² Σ z(u) u uᵀ)`.
    pub eigen_margin: f64,
    /// `min f(x) - |x|²` over the sampled cell.
    pub contraction_margin: f64,
    /// Sample attaining `contraction_margin`.
    pub worst_point: [f64; 2],
    pub samples: usize,
    /// Contraction margin on the doubled grid, when it was computed.
    pub refined_contraction_margin: Option<f64>,
    pub verdict: Verdict,
}

/// `f` specialised to 2D with Cartesian support vectors.
pub(crate) struct F2 {
    us: Vec<Vector2<f64>>,
    ws: Vec<f64>,
}

impl F2 {
    pub(crate) fn new(z: &WeightFunction) -> Self {
        let (us, ws) = z
            .full_support()
            .map(|(u, w)| {
                let v = z.vector(&u);
                (Vector2::new(v[0], v[1]), w)
            })
            .unzip();
        F2 { us, ws }
    }

    pub(crate) fn eval(&self, x: &Vector2<f64>) -> f64 {
        2.0 * self
            .us
            .iter()
            .zip(&self.ws)
            .map(|(u, w)| w * one_minus_cos_2pi(u.dot(x)))
            .sum::<f64>()
    }
}

fn check_compatible(z: &WeightFunction, l: &Lattice) -> Result<()> {
    l.require_dim(2)?;
    if z.dim() != 2 {
        return Err(Error::InvalidWeights(format!(
            "weights live in dimension {}",
            z.dim()
        )));
    }
    let dual = l.dual();
    for col in z.dual_basis().basis().column_iter() {
        if dual.integer_coordinates(&col.into_owned()).is_err() {
            return Err(Error::InvalidWeights(
                "weight basis is not contained in the dual lattice".into(),
            ));
        }
    }
    Ok(())
}

fn contraction_scan(
    f: &F2,
    cell: &VoronoiCell2D,
    per_axis: usize,
    exec: Execution,
) -> (f64, Vector2<f64>, usize) {
    let pts = cell.sample_points(per_axis);
    let margins = exec.map(&pts, |x| f.eval(x) - x.norm_squared());
    let (i, m) = margins
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &m)| if m < acc.1 { (i, m) } else { acc });
    (m, pts[i], pts.len())
}

/// Checks `(C, z)` against the eigenvalue condition and, on a sampled
/// Voronoi cell, the contraction condition `|x|² ≤ f(x)`.
///
/// Infeasible if any margin is below `-FEASIBILITY_TOL`; feasible if both
/// pass and still pass on a grid with twice the resolution; otherwise
/// inconclusive.
pub fn check_primal_feasible(
    cand: &PrimalCandidate,
    l: &Lattice,
    grid_per_axis: usize,
    exec: Execution,
) -> Result<FeasibilityReport> {
    if grid_per_axis < 16 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution {grid_per_axis} below minimum 16"
        )));
    }
    check_compatible(&cand.z, l)?;
    let cell = voronoi_cell(l)?;
    let f = F2::new(&cand.z);
    let eigen_margin = cand.c - spectral_expansion(&cand.z);
    let (contraction_margin, worst, samples) = contraction_scan(&f, &cell, grid_per_axis, exec);
    let mut report = FeasibilityReport {
        eigen_margin,
        contraction_margin,
        worst_point: [worst.x, worst.y],
        samples,
        refined_contraction_margin: None,
        verdict: Verdict::Infeasible,
    };
    if eigen_margin < -FEASIBILITY_TOL || contraction_margin < -FEASIBILITY_TOL {
        return Ok(report);
    }
    let (refined, _, _) = contraction_scan(&f, &cell, 2 * grid_per_axis, exec);
    report.refined_contraction_margin = Some(refined);
    report.verdict = if refined < -FEASIBILITY_TOL {
        Verdict::Inconclusive
    } else {
        Verdict::Feasible
    };
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateDistortion {
    /// `λ_max(4π² Σ z(u) u uᵀ)`, the squared expansion.
    pub expansion: f64,
    /// Smallest sampled `f(x)/|x|²`, including the limit `λ_min` at 0.
    pub min_ratio: f64,
    /// Sample attaining `min_ratio`; `None` when the limit at 0 attains it.
    pub argmin: Option<[f64; 2]>,
    /// `√(expansion / min_ratio)`; infinite for non-injective weights.
    pub estimate: f64,
    /// `√C`, the distortion bound claimed by the candidate.
    pub claimed: f64,
}

/// Distortion of the embedding induced by `cand.z`, estimated on the grid.
pub fn distortion_of_candidate(
    cand: &PrimalCandidate,
    l: &Lattice,
    grid_per_axis: usize,
    exec: Execution,
) -> Result<CandidateDistortion> {
    check_compatible(&cand.z, l)?;
    let cell = voronoi_cell(l)?;
    let f = F2::new(&cand.z);
    let eig = SymmetricEigen::new(expansion_matrix(&cand.z)).eigenvalues;
    let expansion = eig.max().max(0.0);
    let limit = eig.min().max(0.0);

    // 0/0 is replaced by its Taylor limit λ_min.
    let cutoff = 1e-6 * cell.circumradius;
    let pts: Vec<Vector2<f64>> = cell
        .sample_points(grid_per_axis)
        .into_iter()
        .filter(|x| x.norm() >= cutoff)
        .collect();
    let ratios = exec.map(&pts, |x| f.eval(x) / x.norm_squared());
    let mut min_ratio = limit;
    let mut argmin = None;
    for (x, r) in pts.iter().zip(ratios) {
        if r < min_ratio {
            min_ratio = r;
            argmin = Some([x.x, x.y]);
        }
    }
    let estimate = if min_ratio > 0.0 {
        (expansion / min_ratio).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(CandidateDistortion {
        expansion,
        min_ratio,
        argmin,
        estimate,
        claimed: cand.c.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn z2() -> Lattice {
        Lattice::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    fn weights(w: f64) -> WeightFunction {
        WeightFunction::from_pairs(z2(), [(vec![1, 0], w), (vec![0, 1], w)]).unwrap()
    }

    #[test]
    fn standard_embedding_is_feasible() {
        // z(±e_i) = 1/32 with C = π²/4.
        let cand = PrimalCandidate {
            c: PI * PI / 4.0,
            z: weights(1.0 / 32.0),
        };
        let r = check_primal_feasible(&cand, &z2(), 32, Execution::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Feasible);
        assert!(r.eigen_margin.abs() < 1e-14);
        assert!(r.contraction_margin.abs() < 1e-15);
        assert!((r.worst_point[0].abs() - 0.5).abs() < 1e-15);
        assert!((r.worst_point[1].abs() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lowered_bound_is_infeasible() {
        let cand = PrimalCandidate {
            c: PI * PI / 4.0 - 0.01,
            z: weights(1.0 / 32.0),
        };
        let r = check_primal_feasible(&cand, &z2(), 32, Execution::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Infeasible);
        assert!(r.eigen_margin < 0.0);
    }

    #[test]
    fn zero_weights_infeasible() {
        let cand = PrimalCandidate {
            c: 100.0,
            z: WeightFunction::new(z2()),
        };
        let r = check_primal_feasible(&cand, &z2(), 16, Execution::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Infeasible);
        assert!(r.contraction_margin < 0.0);
    }

    #[test]
    fn rejects_coarse_grid() {
        let cand = PrimalCandidate {
            c: 1.0,
            z: weights(1.0),
        };
        assert!(check_primal_feasible(&cand, &z2(), 8, Execution::default()).is_err());
    }

    #[test]
    fn standard_distortion() {
        for w in [1.0 / (8.0 * PI * PI), 1.0 / 32.0, 3.0] {
            let cand = PrimalCandidate {
                c: PI * PI / 4.0,
                z: weights(w),
            };
            let d = distortion_of_candidate(&cand, &z2(), 64, Execution::default()).unwrap();
            assert!((d.estimate - PI / 2.0).abs() < 1e-12, "{d:?}");
            assert!((d.expansion - 8.0 * PI * PI * w).abs() < 1e-12);
        }
    }

    #[test]
    fn single_pair_is_not_injective() {
        let z = WeightFunction::from_pairs(z2(), [(vec![1, 0], 1.0)]).unwrap();
        let d = distortion_of_candidate(&PrimalCandidate { c: 10.0, z }, &z2(), 32, Execution::default())
            .unwrap();
        assert!(d.estimate.is_infinite());
    }
}
