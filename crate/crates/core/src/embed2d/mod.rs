//! Exact least-distortion embeddings of two-dimensional flat tori.
//!
//! The dual lattice is given an obtuse superbasis, the identity is split
//! along it, the distortion ratio is maximized over the Voronoi cell and the
//! maximizer is turned into a dual certificate that is checked on its own.

mod certificate;
mod search;
mod superbasis;

pub use certificate::{
    dual_certificate, verify_certificate, CertificateStatus, CheckResult, DualCertificate,
    VerificationReport, DEFAULT_ENUM_FACTOR,
};
pub use search::{maximize_distortion, nelder_mead_max, DistortionResult, SearchConfig};
pub use superbasis::{
    distortion_ratio, identity_decomposition, obtuse_superbasis, IdentityDecomposition,
    ObtuseSuperbasis,
};

use crate::error::Result;
use crate::lattice::{voronoi_cell, Lattice, VoronoiCell2D};
use crate::postype::{pair_weight_from_one_sided, WeightFunction};

/// Everything the pipeline produces for one lattice.
#[derive(Debug, Clone)]
pub struct Embedding2D {
    pub lattice: Lattice,
    pub dual: Lattice,
    pub cell: VoronoiCell2D,
    pub decomposition: IdentityDecomposition,
    pub result: DistortionResult,
    pub certificate: DualCertificate,
    pub report: VerificationReport,
    /// Primal weights `D z_i` on `±u_i`, in pair convention.
    pub weights: WeightFunction,
    /// `√D`.
    pub c2: f64,
}

impl Embedding2D {
    pub fn verified(&self) -> bool {
        self.certificate.status == CertificateStatus::Verified
    }
}

pub fn least_distortion_2d(l: &Lattice) -> Result<Embedding2D> {
    least_distortion_2d_with(l, &SearchConfig::default(), DEFAULT_ENUM_FACTOR)
}

pub fn least_distortion_2d_with(
    l: &Lattice,
    config: &SearchConfig,
    enum_factor: f64,
) -> Result<Embedding2D> {
    l.require_dim(2)?;
    let dual = l.dual();
    let cell = voronoi_cell(l)?;
    let sb = obtuse_superbasis(&dual)?;
    let dec = identity_decomposition(&sb)?;
    let result = maximize_distortion(&dec, &cell, config)?;
    let mut certificate = dual_certificate(&dec, result.d, &result.x_bar)?;
    let report = verify_certificate(&certificate, &dec, &dual, enum_factor)?;
    certificate.status = if report.all_passed() {
        CertificateStatus::Verified
    } else {
        CertificateStatus::Failed(report.failed())
    };
    let mut weights = WeightFunction::new(dual.clone());
    for (c, w) in sb.coords.iter().zip(result.weights) {
        weights.set(c, pair_weight_from_one_sided(w))?;
    }
    Ok(Embedding2D {
        lattice: l.clone(),
        dual,
        cell,
        decomposition: dec,
        c2: result.d.sqrt(),
        result,
        certificate,
        report,
        weights,
    })
}
