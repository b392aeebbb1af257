//! The point-mass dual certificate `(x̄, β, Y)` and its finite verification.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::superbasis::IdentityDecomposition;
use crate::error::{Error, Result};
use crate::lattice::{
    coset_shortest_vectors, enumerate_ball, shortest_vector, voronoi_cell, Lattice, TIE_TOL,
};

pub const TRACE_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-9;
pub const TIGHT_TOL: f64 = 1e-10;
pub const ENUM_TOL: f64 = 1e-9;
pub const SLACKNESS_TOL: f64 = 1e-9;
pub const DEFAULT_ENUM_FACTOR: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", content = "failed", rename_all = "lowercase")]
pub enum CertificateStatus {
    Unverified,
    Verified,
    Failed(Vec<String>),
}

/// A point mass `β δ_x̄` and a unit-trace PSD matrix `Y` whose objective
/// `2π² β |x̄|²` equals `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub x_bar: Vector2<f64>,
    pub beta: f64,
    pub y: Matrix2<f64>,
    pub objective: f64,
    pub d: f64,
    pub status: CertificateStatus,
}

/// Builds `Y` from its Gram matrix in the basis `(u0, u1)`.
pub fn dual_certificate(
    dec: &IdentityDecomposition,
    d: f64,
    x_bar: &Vector2<f64>,
) -> Result<DualCertificate> {
    let r2 = x_bar.norm_squared();
    if x_bar.norm() < 1e-12 {
        return Err(Error::ZeroContractionPoint);
    }
    let beta = d / (2.0 * PI * PI * r2);
    let [u0, u1, _] = dec.superbasis.vectors;
    let s0 = (PI * u0.dot(x_bar)).sin();
    let s1 = (PI * u1.dot(x_bar)).sin();
    let c01 = (PI * (u0 + u1).dot(x_bar)).cos();
    let b = Matrix2::new(
        2.0 * beta * s0 * s0,
        2.0 * beta * s0 * s1 * c01,
        2.0 * beta * s0 * s1 * c01,
        2.0 * beta * s1 * s1,
    );
    let u = Matrix2::from_columns(&[u0, u1]);
    let u_inv = u
        .try_inverse()
        .ok_or_else(|| Error::SuperbasisInvalid("u0, u1 are dependent".into()))?;
    let y = u_inv.transpose() * b * u_inv;
    let y = (y + y.transpose()) * 0.5;
    Ok(DualCertificate {
        x_bar: *x_bar,
        beta,
        y,
        objective: 2.0 * PI * PI * beta * r2,
        d,
        status: CertificateStatus::Unverified,
    })
}

/// Outcome of one verification check; `residual` is the quantity compared
/// against that check's tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub passed: bool,
    pub residual: f64,
}

impl CheckResult {
    fn within(residual: f64, tol: f64) -> Self {
        CheckResult {
            passed: residual <= tol,
            residual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// `|tr Y - 1|`.
    pub trace: CheckResult,
    /// `-λ_min(Y)`.
    pub psd: CheckResult,
    /// Largest violation of the three superbasis equalities.
    pub tight_constraints: CheckResult,
    /// Relative excess of each `u_i` over the shortest norm in its coset.
    pub coset_coverage: CheckResult,
    /// Largest `β(1 - cos 2πuᵀx̄) - uᵀYu` over the enumeration ball.
    pub enumeration: CheckResult,
    /// Largest of `|g(x̄) - D|`, `|objective - D|`, any sampled `g - D`
    /// and the equality residual on the weight support.
    pub complementary_slackness: CheckResult,
    /// Number of dual vectors examined by the enumeration check.
    pub enumerated: usize,
}

impl VerificationReport {
    pub fn checks(&self) -> [(&'static str, CheckResult); 6] {
        [
            ("trace", self.trace),
            ("psd", self.psd),
            ("tight_constraints", self.tight_constraints),
            ("coset_coverage", self.coset_coverage),
            ("enumeration", self.enumeration),
            ("complementary_slackness", self.complementary_slackness),
        ]
    }

    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed)
    }

    pub fn failed(&self) -> Vec<String> {
        self.checks()
            .iter()
            .filter(|(_, c)| !c.passed)
            .map(|(n, _)| n.to_string())
            .collect()
    }
}

fn one_minus_cos(u: &Vector2<f64>, x: &Vector2<f64>) -> f64 {
    let s = (PI * u.dot(x)).sin();
    2.0 * s * s
}

/// Points of `V(L)` where the primal side is sampled during the slackness
/// check.
const SLACKNESS_GRID: usize = 64;

/// Runs the six checks. `lstar` must be the dual lattice the superbasis was
/// built from.
pub fn verify_certificate(
    cert: &DualCertificate,
    dec: &IdentityDecomposition,
    lstar: &Lattice,
    enum_factor: f64,
) -> Result<VerificationReport> {
    lstar.require_dim(2)?;
    let y = &cert.y;
    let beta = cert.beta;
    let x = &cert.x_bar;
    let sb = &dec.superbasis;

    let trace = CheckResult::within((y.trace() - 1.0).abs(), TRACE_TOL);

    let eig = y.symmetric_eigenvalues();
    let psd = CheckResult::within(-eig.min(), PSD_TOL);

    let tight: Vec<f64> = sb
        .vectors
        .iter()
        .map(|u| ((u.transpose() * y * u)[0] - beta * one_minus_cos(u, x)).abs())
        .collect();
    let tight_constraints = CheckResult::within(tight.iter().cloned().fold(0.0, f64::max), TIGHT_TOL);

    let coset_coverage = {
        let cosets = sb.cosets();
        let distinct = !cosets.contains(&[0, 0])
            && cosets[0] != cosets[1]
            && cosets[0] != cosets[2]
            && cosets[1] != cosets[2];
        let mut excess = 0.0f64;
        let mut consistent = true;
        for (u, c) in sb.vectors.iter().zip(sb.coords) {
            let v = lstar.vector(&c);
            consistent &= (Vector2::new(v[0], v[1]) - u).norm() <= 1e-9 * u.norm().max(1.0);
            let min = coset_shortest_vectors(lstar, u)?[0].vector.norm();
            excess = excess.max(u.norm() / min - 1.0);
        }
        CheckResult {
            passed: distinct && consistent && excess <= TIE_TOL,
            residual: if distinct && consistent { excess } else { f64::INFINITY },
        }
    };

    let lambda = shortest_vector(lstar)?.length;
    let ball = enumerate_ball(lstar, enum_factor * lambda)?;
    let worst = ball
        .iter()
        .map(|p| beta * one_minus_cos(&p.vector, x) - (p.vector.transpose() * y * p.vector)[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let enumeration = CheckResult::within(worst, ENUM_TOL);

    let complementary_slackness = {
        let cell = voronoi_cell(&lstar.dual())?;
        let g_bar = dec.ratio(x)?;
        let mut r = (g_bar - cert.d).abs().max((cert.objective - cert.d).abs());
        for p in cell.sample_points(SLACKNESS_GRID) {
            r = r.max(dec.ratio(&p)? - cert.d);
        }
        let mut support_tight = 0.0f64;
        for (t, z) in tight.iter().zip(dec.coeffs) {
            if z > 0.0 {
                support_tight = support_tight.max(*t);
            }
        }
        let inside = cell.contains(x);
        CheckResult {
            passed: inside && r <= SLACKNESS_TOL && support_tight <= TIGHT_TOL,
            residual: if inside { r.max(support_tight) } else { f64::INFINITY },
        }
    };

    Ok(VerificationReport {
        trace,
        psd,
        tight_constraints,
        coset_coverage,
        enumeration,
        complementary_slackness,
        enumerated: ball.len(),
    })
}
