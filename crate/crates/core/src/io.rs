//! JSON file formats for lattices, weight functions, certificates and
//! bound summaries.

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Vector2};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::embed2d::{CertificateStatus, CheckResult, DualCertificate, Embedding2D, ObtuseSuperbasis};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::postype::WeightFunction;

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

/// `{"basis": [[..], ..]}`, rows are basis vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeFile {
    pub basis: Vec<Vec<f64>>,
}

impl LatticeFile {
    pub fn from_lattice(l: &Lattice) -> Self {
        LatticeFile { basis: l.rows() }
    }

    pub fn to_lattice(&self) -> Result<Lattice> {
        Lattice::from_rows(&self.basis)
    }
}

pub fn read_lattice(text: &str) -> Result<Lattice> {
    parse::<LatticeFile>(text)?.to_lattice()
}

pub fn write_lattice(l: &Lattice) -> String {
    to_json(&LatticeFile::from_lattice(l))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub u: Vec<i64>,
    pub z: f64,
}

/// `{"dual_basis": [[..]], "weights": [{"u": [..], "z": w}, ..]}`, one
/// entry per `±` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsFile {
    pub dual_basis: Vec<Vec<f64>>,
    pub weights: Vec<WeightEntry>,
}

impl WeightsFile {
    pub fn from_weights(z: &WeightFunction) -> Self {
        WeightsFile {
            dual_basis: z.dual_basis().rows(),
            weights: z
                .pairs()
                .map(|(u, w)| WeightEntry { u: u.clone(), z: w })
                .collect(),
        }
    }

    pub fn to_weights(&self) -> Result<WeightFunction> {
        let basis = Lattice::from_rows(&self.dual_basis)?;
        WeightFunction::from_pairs(basis, self.weights.iter().map(|e| (e.u.clone(), e.z)))
    }
}

pub fn read_weights(text: &str) -> Result<WeightFunction> {
    parse::<WeightsFile>(text)?.to_weights()
}

pub fn write_weights(z: &WeightFunction) -> String {
    to_json(&WeightsFile::from_weights(z))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    #[serde(rename = "D")]
    pub d: f64,
    pub c2: f64,
    pub x_bar: [f64; 2],
    pub beta: f64,
    #[serde(rename = "Y")]
    pub y: [[f64; 2]; 2],
    pub objective: f64,
    /// `u0, u1, u2` as vectors.
    pub superbasis: [[f64; 2]; 3],
    /// Their coordinates in the dual basis.
    pub superbasis_coords: [[i64; 2]; 3],
    /// One-sided identity-decomposition coefficients.
    pub coeffs: [f64; 3],
    pub status: CertificateStatus,
    pub checks: BTreeMap<String, CheckResult>,
}

impl CertificateFile {
    pub fn from_embedding(e: &Embedding2D) -> Self {
        let c = &e.certificate;
        let sb = &e.decomposition.superbasis;
        CertificateFile {
            d: c.d,
            c2: e.c2,
            x_bar: [c.x_bar.x, c.x_bar.y],
            beta: c.beta,
            y: [[c.y[(0, 0)], c.y[(0, 1)]], [c.y[(1, 0)], c.y[(1, 1)]]],
            objective: c.objective,
            superbasis: sb.vectors.map(|v| [v.x, v.y]),
            superbasis_coords: sb.coords,
            coeffs: e.decomposition.coeffs,
            status: c.status.clone(),
            checks: e
                .report
                .checks()
                .iter()
                .map(|(n, r)| (n.to_string(), *r))
                .collect(),
        }
    }

    pub fn certificate(&self) -> DualCertificate {
        DualCertificate {
            x_bar: Vector2::new(self.x_bar[0], self.x_bar[1]),
            beta: self.beta,
            y: Matrix2::new(self.y[0][0], self.y[0][1], self.y[1][0], self.y[1][1]),
            objective: self.objective,
            d: self.d,
            status: CertificateStatus::Unverified,
        }
    }

    pub fn stored_superbasis(&self) -> ObtuseSuperbasis {
        ObtuseSuperbasis {
            vectors: self.superbasis.map(|v| Vector2::new(v[0], v[1])),
            coords: self.superbasis_coords,
        }
    }
}

pub fn read_certificate(text: &str) -> Result<CertificateFile> {
    parse(text)
}

pub fn write_certificate(e: &Embedding2D) -> String {
    to_json(&CertificateFile::from_embedding(e))
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    to_json(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed2d::least_distortion_2d;

    #[test]
    fn lattice_round_trip() {
        let l = Lattice::from_rows(&[vec![1.0, 0.0], vec![-0.5, 0.75f64.sqrt()]]).unwrap();
        let back = read_lattice(&write_lattice(&l)).unwrap();
        assert_eq!(back.basis(), l.basis());
    }

    #[test]
    fn parse_error_has_position() {
        match read_lattice("{\"basis\": [[1, 0],\n [0, 1]") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weights_round_trip() {
        let l = Lattice::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let z = WeightFunction::from_pairs(l, vec![(vec![1, 1], 0.25), (vec![1, -1], 0.5)]).unwrap();
        let back = read_weights(&write_weights(&z)).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn certificate_round_trip() {
        let l = Lattice::from_rows(&[vec![1.0, 0.2], vec![0.1, 1.3]]).unwrap();
        let e = least_distortion_2d(&l).unwrap();
        let f = read_certificate(&write_certificate(&e)).unwrap();
        let c = f.certificate();
        assert_eq!(c.y, e.certificate.y);
        assert_eq!(c.x_bar, e.certificate.x_bar);
        assert_eq!(f.stored_superbasis(), e.decomposition.superbasis);
        assert_eq!(f.status, CertificateStatus::Verified);
    }
}
