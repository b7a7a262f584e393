//! Planning engine for stationary UVC disinfection.
//!
//! A room is described by a [`FloorPlan`]. The pipeline discretizes it into
//! candidate lamp stops and target cells, computes per-second dose rates,
//! solves a dwell-time linear program, orders the stops into a route and
//! checks the result on an independent fine grid.

pub mod corpus;
pub mod discretize;
mod error;
pub mod floorplan;
pub mod geometry;
pub mod irradiance;
pub mod plan;
pub mod route;
pub mod verify;

pub use error::{Error, Result};
pub use floorplan::{FloorPlan, Provenance};
pub use geometry::Point2;
