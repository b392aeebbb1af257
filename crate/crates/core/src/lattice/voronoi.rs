use nalgebra::{DVector, Matrix2, Vector2};
use serde::Serialize;

use super::reduce::{coset_shortest_vectors, lagrange_reduce, LatticePoint};
use super::Lattice;
use crate::error::{Error, Result};

/// Slack for the half-plane test `v·x ≤ v·v/2`, scaled by `max(1, v·v)`.
pub const CONTAINS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Rectangle,
    Hexagon,
}

impl std::fmt::Display for CellKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellKind::Rectangle => write!(f, "rectangle"),
            CellKind::Hexagon => write!(f, "hexagon"),
        }
    }
}

/// The Voronoi cell of a 2D lattice: a centrally symmetric rectangle or
/// hexagon.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiCell2D {
    /// Counterclockwise vertex cycle. Vertex `i` lies between the facets of
    /// `relevant_vectors[i]` and `relevant_vectors[i + 1]`.
    pub vertices: Vec<Vector2<f64>>,
    /// Voronoi-relevant vectors sorted by angle; they come in ± pairs.
    pub relevant_vectors: Vec<LatticePoint>,
    /// λ(L)/2.
    pub inradius: f64,
    /// μ(L).
    pub circumradius: f64,
    /// A vertex of maximal norm.
    pub deep_hole: Vector2<f64>,
}

impl VoronoiCell2D {
    pub fn kind(&self) -> CellKind {
        if self.vertices.len() == 4 {
            CellKind::Rectangle
        } else {
            CellKind::Hexagon
        }
    }

    pub fn contains(&self, x: &Vector2<f64>) -> bool {
        cell_contains(self, x)
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        self.edges()
            .map(|(a, b)| a.x * b.y - a.y * b.x)
            .sum::<f64>()
            * 0.5
    }

    /// Consecutive vertex pairs, closing the cycle.
    pub fn edges(&self) -> impl Iterator<Item = (Vector2<f64>, Vector2<f64>)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Edge midpoints, i.e. the centers of the facets.
    pub fn edge_midpoints(&self) -> Vec<Vector2<f64>> {
        self.edges().map(|(a, b)| (a + b) * 0.5).collect()
    }

    /// Vertices, edge midpoints and edge quarter points. Extremal values of
    /// the distortion ratio tend to sit on these.
    pub fn special_points(&self) -> Vec<Vector2<f64>> {
        let mut pts = self.vertices.clone();
        for (a, b) in self.edges() {
            pts.push(a * 0.75 + b * 0.25);
            pts.push((a + b) * 0.5);
            pts.push(a * 0.25 + b * 0.75);
        }
        pts
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Vector2<f64>, Vector2<f64>) {
        let mut lo = Vector2::repeat(f64::INFINITY);
        let mut hi = Vector2::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    /// Nearest point of the cell. Points violating a facet inequality by
    /// any amount are moved onto the boundary, so iterating searches cannot
    /// creep outward through the containment tolerance.
    pub fn project(&self, x: &Vector2<f64>) -> Vector2<f64> {
        let strictly_inside = self
            .relevant_vectors
            .iter()
            .all(|p| p.vector.dot(x) <= 0.5 * p.vector.norm_squared());
        if strictly_inside {
            return *x;
        }
        let mut best = *x;
        let mut best_d = f64::INFINITY;
        for (a, b) in self.edges() {
            let ab = b - a;
            let t = ((x - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
            let p = a + ab * t;
            let d = (x - p).norm_squared();
            if d < best_d {
                best_d = d;
                best = p;
            }
        }
        best
    }

    /// In-cell points of the `per_axis × per_axis` lattice grid spanning the
    /// bounding box, in row-major order.
    pub fn grid(&self, per_axis: usize) -> Vec<Vector2<f64>> {
        let (lo, hi) = self.bounding_box();
        let step = (hi - lo) / (per_axis.max(2) - 1) as f64;
        let mut pts = Vec::new();
        for j in 0..per_axis {
            for i in 0..per_axis {
                let x = Vector2::new(lo.x + step.x * i as f64, lo.y + step.y * j as f64);
                if self.contains(&x) {
                    pts.push(x);
                }
            }
        }
        pts
    }

    /// [`Self::grid`] augmented with [`Self::special_points`] and the origin.
    pub fn sample_points(&self, per_axis: usize) -> Vec<Vector2<f64>> {
        let mut pts = self.grid(per_axis);
        pts.extend(self.special_points());
        pts.push(Vector2::zeros());
        pts
    }

    /// Distance from `x` to the nearest vertex.
    pub fn distance_to_nearest_vertex(&self, x: &Vector2<f64>) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v - x).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// `v·x ≤ v·v/2 + tol` for every relevant vector `v`.
pub fn cell_contains(cell: &VoronoiCell2D, x: &Vector2<f64>) -> bool {
    cell.relevant_vectors.iter().all(|p| {
        let vv = p.vector.norm_squared();
        p.vector.dot(x) <= 0.5 * vv + CONTAINS_TOL * vv.max(1.0)
    })
}

/// Vectors `v` whose coset `v + 2L` has `±v` as its only shortest vectors.
/// There are 4 (rectangle) or 6 (hexagon), sorted by angle.
pub fn voronoi_relevant_vectors(l: &Lattice) -> Result<Vec<LatticePoint>> {
    let red = lagrange_reduce(l)?;
    let mut out = Vec::with_capacity(6);
    for rep in [[1, 0], [0, 1], [1, 1]] {
        let v = red.point(rep).vector;
        let shortest = coset_shortest_vectors(l, &v)?;
        if shortest.len() == 2 {
            out.extend(shortest);
        }
    }
    out.sort_by(|a, b| angle(&a.vector).total_cmp(&angle(&b.vector)));
    Ok(out)
}

fn angle(v: &Vector2<f64>) -> f64 {
    v.y.atan2(v.x)
}

/// Voronoi cell as the intersection of the half-planes `v·x ≤ v·v/2` over
/// the Voronoi-relevant vectors.
pub fn voronoi_cell(l: &Lattice) -> Result<VoronoiCell2D> {
    let relevant = voronoi_relevant_vectors(l)?;
    let k = relevant.len();
    if k != 4 && k != 6 {
        return Err(Error::CellInconsistent(format!(
            "{k} Voronoi-relevant vectors"
        )));
    }
    let mut vertices = Vec::with_capacity(k);
    for i in 0..k {
        let (a, b) = (relevant[i].vector, relevant[(i + 1) % k].vector);
        let m = Matrix2::from_rows(&[a.transpose(), b.transpose()]);
        let rhs = Vector2::new(0.5 * a.norm_squared(), 0.5 * b.norm_squared());
        let x = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::CellInconsistent("parallel adjacent facets".into()))?;
        vertices.push(x);
    }
    let lambda = relevant
        .iter()
        .map(|p| p.vector.norm())
        .fold(f64::INFINITY, f64::min);
    let (mut deep_hole, mut circumradius) = (vertices[0], vertices[0].norm());
    for v in &vertices[1..] {
        if v.norm() > circumradius * (1.0 + 1e-12) {
            deep_hole = *v;
            circumradius = v.norm();
        }
    }
    let cell = VoronoiCell2D {
        vertices,
        relevant_vectors: relevant,
        inradius: 0.5 * lambda,
        circumradius,
        deep_hole,
    };
    let scale = circumradius.max(1.0);
    for v in &cell.vertices {
        let ok = cell.relevant_vectors.iter().all(|p| {
            p.vector.dot(v) <= 0.5 * p.vector.norm_squared() + 1e-9 * scale * p.vector.norm()
        });
        if !ok {
            return Err(Error::CellInconsistent(format!(
                "vertex {v:?} violates a facet"
            )));
        }
        if !cell
            .vertices
            .iter()
            .any(|w| (w + v).norm() <= 1e-10 * scale)
        {
            return Err(Error::CellInconsistent(format!(
                "vertex {v:?} has no antipode"
            )));
        }
    }
    Ok(cell)
}

/// Covering radius μ(L) for dimensions 1 and 2 and for orthogonal sums of
/// such blocks.
pub fn covering_radius(l: &Lattice) -> Result<f64> {
    Ok(deep_hole(l)?.norm())
}

/// A point of maximal distance to the lattice (a deep hole).
pub fn deep_hole(l: &Lattice) -> Result<DVector<f64>> {
    match l.dim() {
        1 => Ok(l.basis().column(0) * 0.5),
        2 => {
            let h = voronoi_cell(l)?.deep_hole;
            Ok(DVector::from_vec(vec![h.x, h.y]))
        }
        n => {
            let factors = l.orthogonal_factors().ok_or(Error::UnsupportedDimension {
                expected: "1, 2 or an orthogonal sum of such blocks".into(),
                found: n,
            })?;
            let mut y = DVector::zeros(n);
            for f in &factors {
                y += f.lift(&deep_hole(&f.lattice)?);
            }
            Ok(y)
        }
    }
}
