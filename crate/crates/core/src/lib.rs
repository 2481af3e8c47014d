//! Integrality-ratio laboratory for the subtour LP on three-line Euclidean
//! TSP instances `G(n, d)`.
//!
//! The crate builds the instances, solves the subtour relaxation exactly by
//! cutting planes, computes optimal tours with exact dynamic programming and
//! with the specialised z-structure analysis, and compares the resulting
//! integrality ratios against their closed forms.

pub mod error;
pub mod exact;
pub mod gline;
pub mod instances;
pub mod lp;
pub mod mincut;
pub mod numfmt;
pub mod ratio;
pub mod subtour;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use exact::Tour;
pub use gline::{ZTour, ZVector};
pub use instances::{generate, Distances, Instance, InstanceSpec, Metric, Point, PointSet, Role};
pub use lp::{DenseLp, LpSolution, LpStatus};
pub use ratio::{DRule, LpBackend, RatioReport, TourBackend};
pub use subtour::{CutList, EdgeValueMap};
