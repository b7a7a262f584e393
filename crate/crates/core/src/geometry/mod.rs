//! Planar predicates and constructions on a [`FloorPlan`](crate::FloorPlan).
//!
//! Orientation and crossing tests run on coordinates snapped to a 1e-9 m
//! lattice with exact integer determinants. Metric quantities (distances,
//! angles) stay in `f64`.

mod clip;
mod erode;
pub(crate) mod exact;
mod fan;
mod geodesic;
mod point;
mod predicates;
mod triangulate;

pub use clip::{
    clip_convex, convex_hull, distance_to_convex, intrudes_open_interior, nearest_on_convex, polygon_area,
    polygon_centroid,
};
pub use erode::{erode, GuardRegion};
pub use fan::{Sector, VisibilityFan};
pub use geodesic::{geodesic_distance, GeodesicGraph};
pub use point::{Bbox, Point2};
pub use predicates::{
    contains, first_hits, point_segment_distance, ray_cast, segment_clear, visible, RayHit,
};
pub use triangulate::{triangulate, Triangle};
