//! Least-distortion Euclidean embeddings of flat tori ℝⁿ/L.
//!
//! The crate is organised in layers:
//!
//! * [`lattice`]: bases, duality, Lagrange reduction, coset enumeration and
//!   2D Voronoi cells.
//! * [`postype`]: finite-support positive-type functions (weight functions
//!   on the dual lattice), primal feasibility, the induced embedding and
//!   the support-reduction transforms.
//! * [`embed2d`]: the exact two-dimensional pipeline, from obtuse
//!   superbasis to a verified dual certificate.
//! * [`bounds`]: closed-form lower bounds and orthogonal composition.
//! * [`contour`], [`io`], [`presets`]: data export and file schemas used by
//!   the command-line tool.

pub mod bounds;
pub mod contour;
pub mod embed2d;
pub mod error;
pub mod exec;
pub mod io;
pub mod lattice;
pub mod postype;
pub mod presets;

pub use error::{Error, Result};
pub use exec::Execution;
pub use lattice::Lattice;
