//! Numerical toolkit for rotation sets of torus maps homotopic to the
//! identity: lifted orbit iteration with exact deck bookkeeping,
//! rotation-set hull estimation with stabilization diagnostics, rotation
//! vectors of the area measure and of orbit measures, empirical probes of
//! the uniform boundary-deviation bound, greedy lattice staircases tracking
//! arbitrary directions, and Newton realization of rational rotation
//! vectors by periodic orbits.

pub mod deviation;
pub mod error;
pub mod geom;
pub mod hull;
pub mod map;
pub mod measure;
pub mod orbit;
pub mod periodic;
pub mod rotset;
pub mod staircase;

pub use error::{Error, Result};
pub use geom::{LatticeVec, Mat2, Vec2};
pub use hull::{ConvexPolygon, SupportLine};
pub use map::{TorusLift, TorusMapSpec};
pub use orbit::{DisplacementRecord, GridSpec, LiftedPoint};
pub use rotset::RotationSetEstimate;
