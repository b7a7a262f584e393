//! Occupancy-grid ingestion and vectorization into a [`FloorPlan`].

mod contour;
mod grid;
mod plan;
mod simplify;

pub use contour::extract_boundary;
pub use grid::{
    load_occupancy_grid, morphological_close, parse_metadata, rasterize, CellState, MapMetadata, OccupancyGrid,
};
pub use plan::{Edge, FloorPlan, Provenance};
pub(crate) use plan::signed_area;
pub use simplify::{
    hausdorff_to_ring, rectilinear_frame, simplify_douglas_peucker, simplify_rectilinear, vectorize, SimplificationConfig,
    SimplificationMethod,
};
