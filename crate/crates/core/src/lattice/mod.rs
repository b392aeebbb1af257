//! Lattices, Lagrange reduction, coset enumeration and Voronoi cells.
//!
//! Bases are stored column-wise: column `j` of [`Lattice::basis`] is the
//! `j`-th basis vector. Input files list basis vectors as rows, so
//! [`Lattice::from_rows`] transposes.

mod reduce;
mod voronoi;

pub use reduce::{
    coset_shortest_vectors, enumerate_ball, lagrange_reduce, shortest_vector, LatticePoint,
    ReducedBasis, ShortVector, TIE_TOL,
};
pub use voronoi::{
    cell_contains, covering_radius, deep_hole, voronoi_cell, voronoi_relevant_vectors, CellKind,
    VoronoiCell2D,
};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};

/// Bases whose condition number exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// Integrality tolerance for lattice coordinates.
pub const COORD_TOL: f64 = 1e-9;

/// A full-rank lattice in ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    basis: DMatrix<f64>,
    gram: DMatrix<f64>,
}

impl Lattice {
    /// Builds a lattice from basis vectors given as rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty basis".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has length {}, expected {n}",
                r.len()
            )));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite basis entry".into()));
        }
        Self::from_columns(DMatrix::from_fn(n, n, |i, j| rows[j][i]))
    }

    /// Builds a lattice from a square matrix whose columns are basis vectors.
    pub fn from_columns(basis: DMatrix<f64>) -> Result<Self> {
        let n = basis.nrows();
        if n == 0 || basis.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "basis matrix is {}x{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        let det = basis.determinant();
        let max_norm = basis
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
        // negated so NaN is rejected
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(det.abs() >= 1e-12 * max_norm.powi(n as i32)) || max_norm == 0.0 {
            return Err(Error::SingularBasis { det });
        }
        let sv = basis.clone().svd(false, false).singular_values;
        let cond = sv.max() / sv.min();
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(cond <= MAX_CONDITION) {
            return Err(Error::IllConditioned {
                cond,
                limit: MAX_CONDITION,
            });
        }
        let gram = basis.transpose() * &basis;
        Ok(Lattice { basis, gram })
    }

    /// 2D convenience constructor from two basis vectors.
    pub fn from_vectors2(b1: Vector2<f64>, b2: Vector2<f64>) -> Result<Self> {
        Self::from_columns(DMatrix::from_column_slice(2, 2, &[b1.x, b1.y, b2.x, b2.y]))
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Basis vectors as rows, the file layout.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.basis
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    pub fn det(&self) -> f64 {
        self.basis.determinant()
    }

    /// Volume of a fundamental domain.
    pub fn covolume(&self) -> f64 {
        self.det().abs()
    }

    /// The dual lattice, with basis B⁻ᵀ.
    pub fn dual(&self) -> Lattice {
        let inv = self
            .basis
            .clone()
            .try_inverse()
            .expect("basis invertibility is checked at construction");
        let basis = inv.transpose();
        let gram = basis.transpose() * &basis;
        Lattice { basis, gram }
    }

    /// The lattice `c·L`.
    pub fn scaled(&self, c: f64) -> Result<Lattice> {
        Lattice::from_columns(&self.basis * c)
    }

    /// The lattice `A·L` for a linear map `A`.
    pub fn transformed(&self, a: &DMatrix<f64>) -> Result<Lattice> {
        Lattice::from_columns(a * &self.basis)
    }

    /// The basis as a fixed-size matrix; errors unless `dim == 2`.
    pub fn basis2(&self) -> Result<Matrix2<f64>> {
        self.require_dim(2)?;
        Ok(Matrix2::new(
            self.basis[(0, 0)],
            self.basis[(0, 1)],
            self.basis[(1, 0)],
            self.basis[(1, 1)],
        ))
    }

    pub(crate) fn require_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::UnsupportedDimension {
                expected: n.to_string(),
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// The lattice vector with integer coordinates `coords`.
    pub fn vector(&self, coords: &[i64]) -> DVector<f64> {
        let c = DVector::from_iterator(coords.len(), coords.iter().map(|&k| k as f64));
        &self.basis * c
    }

    /// Real coordinates of `x` in the basis.
    pub fn coordinates(&self, x: &DVector<f64>) -> DVector<f64> {
        self.basis
            .clone()
            .lu()
            .solve(x)
            .expect("basis invertibility is checked at construction")
    }

    /// Integer coordinates of `x`, or `NotALatticeVector` if any coordinate
    /// is farther than [`COORD_TOL`] from an integer.
    pub fn integer_coordinates(&self, x: &DVector<f64>) -> Result<Vec<i64>> {
        let c = self.coordinates(x);
        if c.iter().any(|&t| (t - t.round()).abs() > COORD_TOL) {
            return Err(Error::NotALatticeVector {
                coords: c.iter().copied().collect(),
            });
        }
        Ok(c.iter().map(|t| t.round() as i64).collect())
    }

    /// Splits the lattice along its basis into mutually orthogonal blocks of
    /// dimension 1 or 2. Returns `None` if some block has dimension ≥ 3.
    ///
    /// Only orthogonality between the given basis vectors is detected; a
    /// decomposable lattice presented in a mixing basis is not recognized.
    pub fn orthogonal_factors(&self) -> Option<Vec<OrthogonalFactor>> {
        let n = self.dim();
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while c[r] != r {
                r = c[r];
            }
            c[i] = r;
            r
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let g = self.gram[(i, j)];
                if g.abs() > 1e-12 * (self.gram[(i, i)] * self.gram[(j, j)]).sqrt() {
                    let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                    comp[a] = b;
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for i in 0..n {
            let r = find(&mut comp, i);
            match roots.iter().position(|&x| x == r) {
                Some(k) => groups[k].push(i),
                None => {
                    roots.push(r);
                    groups.push(vec![i]);
                }
            }
        }
        if groups.iter().any(|g| g.len() > 2) {
            return None;
        }
        groups
            .into_iter()
            .map(|indices| {
                let k = indices.len();
                let g = DMatrix::from_fn(k, k, |a, b| self.gram[(indices[a], indices[b])]);
                // An isometric copy in ℝᵏ: the transposed Cholesky factor has Gram matrix g.
                let chol = g.cholesky()?;
                let lattice = Lattice::from_columns(chol.l().transpose()).ok()?;
                let columns = DMatrix::from_fn(n, k, |r, c| self.basis[(r, indices[c])]);
                Some(OrthogonalFactor {
                    indices,
                    lattice,
                    columns,
                })
            })
            .collect()
    }

    /// The orthogonal direct sum of `factors`, as a block-diagonal basis.
    pub fn orthogonal_sum(factors: &[Lattice]) -> Result<Lattice> {
        let n: usize = factors.iter().map(Lattice::dim).sum();
        let mut basis = DMatrix::zeros(n, n);
        let mut off = 0;
        for f in factors {
            let k = f.dim();
            basis.view_mut((off, off), (k, k)).copy_from(f.basis());
            off += k;
        }
        Lattice::from_columns(basis)
    }
}

/// One block of an orthogonal decomposition.
#[derive(Debug, Clone)]
pub struct OrthogonalFactor {
    /// Indices of the original basis vectors spanning this block.
    pub indices: Vec<usize>,
    /// An isometric copy of the block in ℝᵏ.
    pub lattice: Lattice,
    /// The original basis vectors of the block (n×k).
    pub columns: DMatrix<f64>,
}

impl OrthogonalFactor {
    /// Maps a point of the isometric copy back into the ambient space.
    pub fn lift(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.columns * self.lattice.coordinates(y)
    }
}

/// `lattice_from_basis`: rows are basis vectors.
pub fn lattice_from_basis(rows: &[Vec<f64>]) -> Result<Lattice> {
    Lattice::from_rows(rows)
}

/// `dual_lattice`.
pub fn dual_lattice(l: &Lattice) -> Lattice {
    l.dual()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Lattice {
        Lattice::from_rows(&[vec![1.0, 0.0], vec![-0.5, 3f64.sqrt() / 2.0]]).unwrap()
    }

    #[test]
    fn identity_basis() {
        let l = Lattice::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(l.gram(), &DMatrix::identity(2, 2));
        assert_eq!(l.dual().basis(), l.basis());
    }

    #[test]
    fn hexagonal_determinant() {
        assert!((a2().det() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((a2().dual().det() - 2.0 / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_singular_and_ragged() {
        assert!(matches!(
            Lattice::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]),
            Err(Error::SingularBasis { .. })
        ));
        assert!(matches!(
            Lattice::from_rows(&[vec![1.0, 1.0], vec![1.0]]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            Lattice::from_rows(&[]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn rejects_ill_conditioned() {
        let r = Lattice::from_rows(&[vec![1.0, 0.0], vec![0.0, 1e-9]]);
        assert!(matches!(r, Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn diagonal_dual() {
        let l = Lattice::from_rows(&[vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap();
        let d = l.dual();
        assert_eq!(d.basis()[(0, 0)], 0.5);
        assert_eq!(d.basis()[(1, 1)], 2.0);
    }

    #[test]
    fn columns_are_rows_of_input() {
        let l = Lattice::from_rows(&[vec![1.0, 2.0], vec![3.0, 5.0]]).unwrap();
        assert_eq!(l.basis()[(1, 0)], 2.0);
        assert_eq!(l.rows(), vec![vec![1.0, 2.0], vec![3.0, 5.0]]);
    }

    #[test]
    fn integer_coordinates() {
        let l = a2();
        let v = l.vector(&[3, -2]);
        assert_eq!(l.integer_coordinates(&v).unwrap(), vec![3, -2]);
        let x = DVector::from_vec(vec![0.3, 0.1]);
        assert!(matches!(
            l.integer_coordinates(&x),
            Err(Error::NotALatticeVector { .. })
        ));
    }

    #[test]
    fn orthogonal_factors_of_block_sum() {
        let sum = Lattice::orthogonal_sum(&[
            a2(),
            Lattice::from_rows(&[vec![2.0]]).unwrap(),
        ])
        .unwrap();
        let f = sum.orthogonal_factors().unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].indices, vec![0, 1]);
        assert!((f[0].lattice.covolume() - a2().covolume()).abs() < 1e-14);
        assert_eq!(f[1].lattice.basis()[(0, 0)], 2.0);

        let full = Lattice::from_rows(&[
            vec![1.0, 0.2, 0.0],
            vec![0.0, 1.0, 0.3],
            vec![0.1, 0.0, 1.0],
        ])
        .unwrap();
        assert!(full.orthogonal_factors().is_none());
    }
}
