use nalgebra::{DVector, Matrix2, Vector2};

use super::{Lattice, COORD_TOL};
use crate::error::{Error, Result};

/// Relative tolerance under which two norms count as tied.
pub const TIE_TOL: f64 = 1e-9;

/// A 2D lattice vector together with its integer coordinates in the
/// lattice's own basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub coords: [i64; 2],
    pub vector: Vector2<f64>,
}

impl LatticePoint {
    pub fn neg(&self) -> LatticePoint {
        LatticePoint {
            coords: [-self.coords[0], -self.coords[1]],
            vector: -self.vector,
        }
    }
}

/// A Lagrange-reduced basis: `|b1| ≤ |b2|`, `|b1·b2| ≤ |b1|²/2` and
/// `b1·b2 ≤ 0`. Column `j` of `transform` holds the coordinates of `b_{j+1}`
/// in the original basis; it is unimodular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBasis {
    pub b1: Vector2<f64>,
    pub b2: Vector2<f64>,
    pub transform: [[i64; 2]; 2],
}

impl ReducedBasis {
    /// Reduced basis vectors as matrix columns.
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::from_columns(&[self.b1, self.b2])
    }

    pub fn transform_det(&self) -> i64 {
        let t = self.transform;
        t[0][0] * t[1][1] - t[0][1] * t[1][0]
    }

    /// Original-basis coordinates of the vector with reduced coordinates `k`.
    pub fn to_original(&self, k: [i64; 2]) -> [i64; 2] {
        let t = self.transform;
        [
            t[0][0] * k[0] + t[0][1] * k[1],
            t[1][0] * k[0] + t[1][1] * k[1],
        ]
    }

    pub fn point(&self, k: [i64; 2]) -> LatticePoint {
        LatticePoint {
            coords: self.to_original(k),
            vector: self.b1 * k[0] as f64 + self.b2 * k[1] as f64,
        }
    }

    /// Upper bound on the covering radius: every point of the fundamental
    /// parallelogram is within `(|b1| + |b2|)/2` of one of its corners.
    pub fn covering_radius_bound(&self) -> f64 {
        0.5 * (self.b1.norm() + self.b2.norm())
    }

    /// Box bound for enumeration: if `|b1 k1 + b2 k2| ≤ r` then
    /// `|k_i| ≤ r·‖row_i(B⁻¹)‖`.
    pub(crate) fn coefficient_bounds(&self, r: f64) -> [i64; 2] {
        let inv = self
            .matrix()
            .try_inverse()
            .expect("reduced basis is invertible");
        [
            (r * inv.row(0).norm()).ceil() as i64,
            (r * inv.row(1).norm()).ceil() as i64,
        ]
    }
}

/// Lagrange–Gauss reduction of a 2D lattice basis.
pub fn lagrange_reduce(l: &Lattice) -> Result<ReducedBasis> {
    let b = l.basis2()?;
    let vec = |c: [i64; 2]| b * Vector2::new(c[0] as f64, c[1] as f64);
    let mut c1 = [1_i64, 0];
    let mut c2 = [0_i64, 1];
    for _ in 0..10_000 {
        let (mut v1, mut v2) = (vec(c1), vec(c2));
        if v1.norm_squared() > v2.norm_squared() {
            std::mem::swap(&mut c1, &mut c2);
            std::mem::swap(&mut v1, &mut v2);
        }
        let ratio = v1.dot(&v2) / v1.norm_squared();
        // |ratio| = 1/2 exactly is already reduced; rounding it would cycle.
        if ratio.abs() <= 0.5 * (1.0 + 1e-12) {
            break;
        }
        let mu = ratio.round() as i64;
        c2 = [c2[0] - mu * c1[0], c2[1] - mu * c1[1]];
    }
    let (v1, v2) = (vec(c1), vec(c2));
    if v1.norm_squared() > v2.norm_squared() {
        std::mem::swap(&mut c1, &mut c2);
    }
    let (v1, mut v2) = (vec(c1), vec(c2));
    if v1.dot(&v2) > 0.0 {
        c2 = [-c2[0], -c2[1]];
        v2 = -v2;
    }
    Ok(ReducedBasis {
        b1: v1,
        b2: v2,
        transform: [[c1[0], c2[0]], [c1[1], c2[1]]],
    })
}

/// A shortest nonzero lattice vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortVector {
    pub vector: DVector<f64>,
    pub coords: Vec<i64>,
    pub length: f64,
}

/// Shortest nonzero vector for lattices of dimension 1 or 2.
pub fn shortest_vector(l: &Lattice) -> Result<ShortVector> {
    match l.dim() {
        1 => {
            let v = l.vector(&[1]);
            Ok(ShortVector {
                length: v[0].abs(),
                vector: v,
                coords: vec![1],
            })
        }
        2 => {
            let r = lagrange_reduce(l)?;
            Ok(ShortVector {
                vector: DVector::from_vec(vec![r.b1.x, r.b1.y]),
                coords: vec![r.transform[0][0], r.transform[1][0]],
                length: r.b1.norm(),
            })
        }
        n => Err(Error::UnsupportedDimension {
            expected: "1 or 2".into(),
            found: n,
        }),
    }
}

/// All lattice points with `|v| ≤ radius`, origin included, sorted by
/// norm and then coordinates.
pub fn enumerate_ball(l: &Lattice, radius: f64) -> Result<Vec<LatticePoint>> {
    let red = lagrange_reduce(l)?;
    let [k0, k1] = red.coefficient_bounds(radius);
    let mut out = Vec::new();
    for i in -k0..=k0 {
        for j in -k1..=k1 {
            let p = red.point([i, j]);
            if p.vector.norm() <= radius {
                out.push(p);
            }
        }
    }
    out.sort_by(|a, b| {
        a.vector
            .norm_squared()
            .total_cmp(&b.vector.norm_squared())
            .then(a.coords.cmp(&b.coords))
    });
    Ok(out)
}

/// All shortest vectors of the coset `v + 2L`; norm ties within relative
/// [`TIE_TOL`] are all reported.
///
/// Candidates `w = v + 2·B_red·k` are enumerated over the box
/// `|k_i| ≤ max(⌈(|v| + 2μ̂)/(2λ)⌉ + 1, ⌈|v|·‖row_i(B_red⁻¹)‖⌉)` where μ̂ is
/// the parallelogram bound on the covering radius. The second term alone
/// already contains every `w` with `|w| ≤ |v|`.
pub fn coset_shortest_vectors(l: &Lattice, v: &Vector2<f64>) -> Result<Vec<LatticePoint>> {
    let red = lagrange_reduce(l)?;
    let inv = red
        .matrix()
        .try_inverse()
        .expect("reduced basis is invertible");
    let c = inv * v;
    if c.iter().any(|t| (t - t.round()).abs() > COORD_TOL) {
        return Err(Error::NotALatticeVector {
            coords: c.iter().copied().collect(),
        });
    }
    let c = [c[0].round() as i64, c[1].round() as i64];
    let v = red.point(c).vector;
    let vn = v.norm();
    let lambda = red.b1.norm();
    let heuristic = ((vn + 2.0 * red.covering_radius_bound()) / (2.0 * lambda)).ceil() as i64 + 1;
    let rigorous = red.coefficient_bounds(vn * (1.0 + TIE_TOL));
    let k0 = heuristic.max(rigorous[0]);
    let k1 = heuristic.max(rigorous[1]);

    let mut cands = Vec::with_capacity(((2 * k0 + 1) * (2 * k1 + 1)) as usize);
    for i in -k0..=k0 {
        for j in -k1..=k1 {
            cands.push(red.point([c[0] + 2 * i, c[1] + 2 * j]));
        }
    }
    let min = cands
        .iter()
        .map(|p| p.vector.norm())
        .fold(f64::INFINITY, f64::min);
    let mut out: Vec<LatticePoint> = cands
        .into_iter()
        .filter(|p| p.vector.norm() <= min * (1.0 + TIE_TOL))
        .collect();
    out.sort_by_key(|a| a.coords);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[[f64; 2]]) -> Lattice {
        Lattice::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn z2() -> Lattice {
        lat(&[[1.0, 0.0], [0.0, 1.0]])
    }

    fn a2() -> Lattice {
        lat(&[[1.0, 0.0], [-0.5, 3f64.sqrt() / 2.0]])
    }

    /// Shortest nonzero length by exhaustive search over a large box.
    fn brute_lambda(l: &Lattice) -> f64 {
        let mut best = f64::INFINITY;
        for i in -60..=60_i64 {
            for j in -60..=60_i64 {
                if (i, j) != (0, 0) {
                    best = best.min(l.vector(&[i, j]).norm());
                }
            }
        }
        best
    }

    #[test]
    fn reduces_skewed_square_basis() {
        let r = lagrange_reduce(&lat(&[[1.0, 0.0], [5.0, 1.0]])).unwrap();
        assert!((r.b1.norm() - 1.0).abs() < 1e-14);
        assert!((r.b2.norm() - 1.0).abs() < 1e-14);
        assert!(r.b1.dot(&r.b2).abs() < 1e-14);
        assert_eq!(r.transform_det().abs(), 1);
        assert!((brute_lambda(&lat(&[[1.0, 0.0], [5.0, 1.0]])) - r.b1.norm()).abs() < 1e-14);
    }

    #[test]
    fn identity_stays_put() {
        let r = lagrange_reduce(&z2()).unwrap();
        assert_eq!(r.b1, Vector2::new(1.0, 0.0));
        assert_eq!(r.b2.abs(), Vector2::new(0.0, 1.0));
    }

    #[test]
    fn hexagonal_reduction() {
        let r = lagrange_reduce(&a2()).unwrap();
        assert!((r.b1.norm() - 1.0).abs() < 1e-14);
        assert!((r.b2.norm() - 1.0).abs() < 1e-14);
        assert!((r.b1.dot(&r.b2) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn shortest_vectors() {
        assert_eq!(shortest_vector(&z2()).unwrap().length, 1.0);
        assert!((shortest_vector(&a2()).unwrap().length - 1.0).abs() < 1e-14);
        let d = lat(&[[3.0, 0.0], [0.0, 5.0]]);
        assert_eq!(shortest_vector(&d).unwrap().length, 3.0);
        let one = Lattice::from_rows(&[vec![-2.5]]).unwrap();
        assert_eq!(shortest_vector(&one).unwrap().length, 2.5);
    }

    #[test]
    fn coset_examples() {
        let l = z2();
        let s = coset_shortest_vectors(&l, &Vector2::new(1.0, 0.0)).unwrap();
        let coords: Vec<_> = s.iter().map(|p| p.coords).collect();
        assert_eq!(coords, vec![[-1, 0], [1, 0]]);

        let s = coset_shortest_vectors(&l, &Vector2::new(1.0, 1.0)).unwrap();
        let coords: Vec<_> = s.iter().map(|p| p.coords).collect();
        assert_eq!(coords, vec![[-1, -1], [-1, 1], [1, -1], [1, 1]]);

        let s = coset_shortest_vectors(&l, &Vector2::zeros()).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].coords, [0, 0]);

        // A long representative is pulled back to the short ones.
        let s = coset_shortest_vectors(&l, &Vector2::new(7.0, -3.0)).unwrap();
        assert_eq!(s.len(), 4);

        assert!(matches!(
            coset_shortest_vectors(&l, &Vector2::new(0.5, 0.0)),
            Err(Error::NotALatticeVector { .. })
        ));
    }

    #[test]
    fn ball_enumeration() {
        let pts = enumerate_ball(&a2(), 1.0 + 1e-12).unwrap();
        assert_eq!(pts.len(), 7);
        let pts = enumerate_ball(&z2(), 2f64.sqrt() + 1e-12).unwrap();
        assert_eq!(pts.len(), 9);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let l3 = Lattice::from_columns(nalgebra::DMatrix::identity(3, 3)).unwrap();
        assert!(lagrange_reduce(&l3).is_err());
        assert!(shortest_vector(&l3).is_err());
    }
}
