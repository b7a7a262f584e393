use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed raster: {0}")]
    MalformedRaster(String),
    #[error("bad map metadata: {0}")]
    Metadata(String),
    #[error("occupancy grid has no free cells")]
    EmptyRegion,
    #[error("invalid floor plan: {0}")]
    InvalidPlan(String),
    #[error("simplification failed: {0}")]
    Simplification(String),
    #[error("rectilinear fit impossible at this tolerance (best deviation {best_deviation:.6} m)")]
    RectilinearFit { best_deviation: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no path between ({0:.3}, {1:.3}) and ({2:.3}, {3:.3})")]
    Unreachable(f64, f64, f64, f64),
    #[error("ray from ({0:.6}, {1:.6}) hits no wall")]
    RayEscaped(f64, f64),
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("linear program infeasible: {0}")]
    Infeasible(String),
    #[error("linear program solver failed: {0}")]
    Numerical(String),
    #[error("region cannot be covered: {0}")]
    Uncoverable(String),
    #[error("route does not match waypoints: {0}")]
    RouteMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
