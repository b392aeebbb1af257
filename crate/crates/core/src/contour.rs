//! Samples of the distortion ratio over the Voronoi cell, as CSV.

use std::io::Write;

use nalgebra::Vector2;

use crate::embed2d::Embedding2D;
use crate::error::{Error, Result};
use crate::exec::Execution;

pub const MIN_RESOLUTION: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ContourGrid {
    pub resolution: usize,
    /// `(x, y, g)` for grid points inside the cell, row-major.
    pub samples: Vec<[f64; 3]>,
    pub maximizers: Vec<Vector2<f64>>,
}

pub fn contour_grid(emb: &Embedding2D, resolution: usize, exec: Execution) -> Result<ContourGrid> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} is below the minimum {MIN_RESOLUTION}"
        )));
    }
    let pts = emb.cell.grid(resolution);
    let g = exec.map(&pts, |p| emb.decomposition.ratio(p));
    let samples = pts
        .iter()
        .zip(g)
        .map(|(p, g)| g.map(|g| [p.x, p.y, g]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ContourGrid {
        resolution,
        samples,
        maximizers: emb.result.contracted_points.clone(),
    })
}

impl ContourGrid {
    /// Header `x,y,g`, one row per sample, then one `# maximizer,x,y` comment
    /// line per maximizer. Floats use the shortest representation that
    /// round-trips.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y,g")?;
        for [x, y, g] in &self.samples {
            writeln!(w, "{x:?},{y:?},{g:?}")?;
        }
        writeln!(w, "# maximizers")?;
        for m in &self.maximizers {
            writeln!(w, "# maximizer,{:?},{:?}", m.x, m.y)?;
        }
        Ok(())
    }

    pub fn max_g(&self) -> f64 {
        self.samples.iter().map(|s| s[2]).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed2d::least_distortion_2d;
    use crate::lattice::Lattice;

    #[test]
    fn csv_is_deterministic_and_in_cell() {
        let l = Lattice::from_rows(&[vec![1.0, 0.0], vec![0.3, 1.1]]).unwrap();
        let e = least_distortion_2d(&l).unwrap();
        let a = contour_grid(&e, 32, Execution::Sequential).unwrap();
        let b = contour_grid(&e, 32, Execution::default()).unwrap();
        let (mut sa, mut sb) = (Vec::new(), Vec::new());
        a.write_csv(&mut sa).unwrap();
        b.write_csv(&mut sb).unwrap();
        assert_eq!(sa, sb);
        for s in &a.samples {
            assert!(e.cell.contains(&Vector2::new(s[0], s[1])));
            assert!(s[2] >= 1.0 - 1e-10);
        }
        assert!(contour_grid(&e, 1, Execution::Sequential).is_err());
    }
}
