//! Global maximization of the distortion ratio over a Voronoi cell: a dense
//! grid sweep followed by projected Nelder–Mead refinement from the best
//! grid points.

use nalgebra::Vector2;
use serde::Serialize;

use super::superbasis::IdentityDecomposition;
use crate::error::Result;
use crate::exec::Execution;
use crate::lattice::VoronoiCell2D;

/// Maximizers within this of `D` (relative to `max(D, 1)`) are reported.
pub const MAXIMIZER_TOL: f64 = 1e-9;
/// Maximizers closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Grid points per axis over the cell's bounding box.
    pub grid_per_axis: usize,
    /// Number of refinement starts taken from the grid.
    pub starts: usize,
    pub max_iter: usize,
    /// Stop once the simplex diameter falls below this.
    pub simplex_tol: f64,
    pub exec: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_per_axis: 512,
            starts: 32,
            max_iter: 500,
            simplex_tol: 1e-12,
            exec: Execution::default(),
        }
    }
}

/// The squared distortion `D = max g` and where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionResult {
    #[serde(rename = "D")]
    pub d: f64,
    pub x_bar: Vector2<f64>,
    /// All refined maximizers within [`MAXIMIZER_TOL`] of `D`, closed under
    /// `x ↦ -x`, sorted lexicographically.
    pub contracted_points: Vec<Vector2<f64>>,
    /// One-sided weights `D·z_i` of the optimal embedding.
    pub weights: [f64; 3],
}

/// Maximizes `g` over `cell`; ties keep every maximizer and `x_bar` is the
/// lexicographically first.
pub fn maximize_distortion(
    dec: &IdentityDecomposition,
    cell: &VoronoiCell2D,
    config: &SearchConfig,
) -> Result<DistortionResult> {
    let g = |x: &Vector2<f64>| dec.ratio(x).unwrap_or(f64::NEG_INFINITY);

    let grid = cell.grid(config.grid_per_axis);
    let values = config.exec.map(&grid, g);

    let (lo, hi) = cell.bounding_box();
    let spacing = ((hi - lo) / (config.grid_per_axis.max(2) - 1) as f64).norm();

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .total_cmp(&values[a])
            .then(lex(&grid[a], &grid[b]))
    });
    let mut starts: Vec<Vector2<f64>> = cell.special_points();
    let mut picked: Vec<Vector2<f64>> = Vec::with_capacity(config.starts);
    for &i in &order {
        if picked.len() >= config.starts {
            break;
        }
        if picked.iter().all(|p| (p - grid[i]).norm() > 2.0 * spacing) {
            picked.push(grid[i]);
        }
    }
    starts.extend(picked);

    let step = spacing.max(1e-12 * cell.circumradius);
    let refined = config.exec.map(&starts, |x0| {
        nelder_mead_max(&g, |x| cell.project(x), *x0, step, config.max_iter, config.simplex_tol)
    });

    let d = refined
        .iter()
        .map(|r| r.1)
        .chain(values.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = d - MAXIMIZER_TOL * d.max(1.0);

    let mut points: Vec<Vector2<f64>> = Vec::new();
    fn push(points: &mut Vec<Vector2<f64>>, x: Vector2<f64>) {
        // clears negative zeros left by negation
        let x = x.map(|c| c + 0.0);
        if points.iter().all(|p| (p - x).norm() > DEDUP_TOL) {
            points.push(x);
        }
    }
    // Nelder–Mead stalls a few 1e-9 short along flat directions; a nearby
    // vertex or edge midpoint that is itself a maximizer replaces it.
    let special: Vec<(Vector2<f64>, f64)> = cell
        .special_points()
        .into_iter()
        .map(|s| (s, g(&s)))
        .filter(|s| s.1 >= threshold)
        .collect();
    let mut best: Vec<(Vector2<f64>, f64)> = refined
        .iter()
        .filter(|r| r.1 >= threshold)
        .map(|r| {
            special
                .iter()
                .find(|s| (s.0 - r.0).norm() <= DEDUP_TOL)
                .copied()
                .unwrap_or(*r)
        })
        .collect();
    best.sort_by(|a, b| b.1.total_cmp(&a.1).then(lex(&a.0, &b.0)));
    for (x, _) in best {
        push(&mut points, x);
        push(&mut points, -x);
    }
    if points.is_empty() {
        // Only reachable if a grid point beats every refinement, which the
        // refinement from that point's neighbourhood should prevent.
        let i = order[0];
        push(&mut points, grid[i]);
        push(&mut points, -grid[i]);
    }
    points.sort_by(lex);
    let x_bar = points[0];
    let d = g(&x_bar).max(d);
    Ok(DistortionResult {
        d,
        x_bar,
        contracted_points: points,
        weights: dec.coeffs.map(|z| d * z),
    })
}

fn lex(a: &Vector2<f64>, b: &Vector2<f64>) -> std::cmp::Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

/// Nelder–Mead ascent in the plane; every trial point is projected back
/// onto the feasible set. Returns the best vertex and its value.
pub fn nelder_mead_max<F, P>(
    f: &F,
    project: P,
    x0: Vector2<f64>,
    step: f64,
    max_iter: usize,
    tol: f64,
) -> (Vector2<f64>, f64)
where
    F: Fn(&Vector2<f64>) -> f64,
    P: Fn(&Vector2<f64>) -> Vector2<f64>,
{
    let eval = |x: Vector2<f64>| {
        let p = project(&x);
        (p, f(&p))
    };
    let mut s = [
        eval(x0),
        eval(x0 + Vector2::new(step, 0.0)),
        eval(x0 + Vector2::new(0.0, step)),
    ];
    for _ in 0..max_iter {
        s.sort_by(|a, b| b.1.total_cmp(&a.1));
        let diam = (s[0].0 - s[1].0)
            .norm()
            .max((s[0].0 - s[2].0).norm())
            .max((s[1].0 - s[2].0).norm());
        if diam < tol {
            break;
        }
        let centroid = (s[0].0 + s[1].0) * 0.5;
        let worst = s[2];
        let r = eval(centroid + (centroid - worst.0));
        if r.1 > s[0].1 {
            let e = eval(centroid + (centroid - worst.0) * 2.0);
            s[2] = if e.1 > r.1 { e } else { r };
        } else if r.1 > s[1].1 {
            s[2] = r;
        } else {
            let c = if r.1 > worst.1 {
                eval(centroid + (r.0 - centroid) * 0.5)
            } else {
                eval(centroid + (worst.0 - centroid) * 0.5)
            };
            if c.1 > worst.1.max(r.1) {
                s[2] = c;
            } else {
                let best = s[0].0;
                s[1] = eval(best + (s[1].0 - best) * 0.5);
                s[2] = eval(best + (s[2].0 - best) * 0.5);
            }
        }
    }
    s.sort_by(|a, b| b.1.total_cmp(&a.1));
    s[0]
}
