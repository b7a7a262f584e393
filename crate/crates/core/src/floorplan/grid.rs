use image::ImageFormat;
use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    Free,
    Occupied,
    Unknown,
}

/// Raster map. Row 0 is the bottom row; cell `(col, row)` covers
/// `origin + [col, col+1) × [row, row+1)` scaled by `resolution`.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub origin: Point2,
    pub cells: Vec<CellState>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapMetadata {
    pub resolution: f64,
    pub origin: Point2,
}

pub const FREE_THRESHOLD: f64 = 0.75;
pub const OCCUPIED_THRESHOLD: f64 = 0.25;

impl OccupancyGrid {
    pub fn new(width: usize, height: usize, resolution: f64, origin: Point2, cells: Vec<CellState>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::MalformedRaster("grid dimensions must be positive".into()));
        }
        if cells.len() != width * height {
            return Err(Error::MalformedRaster(format!("{} cells for a {width}x{height} grid", cells.len())));
        }
        if !(resolution > 0.0) {
            return Err(Error::Metadata(format!("resolution {resolution} is not positive")));
        }
        Ok(OccupancyGrid { width, height, resolution, origin, cells })
    }

    pub fn filled(width: usize, height: usize, resolution: f64, state: CellState) -> Self {
        OccupancyGrid { width, height, resolution, origin: Point2::default(), cells: vec![state; width * height] }
    }

    pub fn get(&self, col: usize, row: usize) -> CellState {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, s: CellState) {
        self.cells[row * self.width + col] = s;
    }

    pub fn is_free(&self, col: i64, row: i64) -> bool {
        col >= 0
            && row >= 0
            && (col as usize) < self.width
            && (row as usize) < self.height
            && self.get(col as usize, row as usize) == CellState::Free
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == CellState::Free).count()
    }

    /// World coordinates of lattice corner `(i, j)`.
    pub fn corner(&self, i: i64, j: i64) -> Point2 {
        Point2::new(self.origin.x + i as f64 * self.resolution, self.origin.y + j as f64 * self.resolution)
    }
}

/// Parse a map-server style sidecar: `resolution: 0.05` and
/// `origin: [x, y, yaw]` (or `origin: x y`).
pub fn parse_metadata(text: &str) -> Result<MapMetadata> {
    let mut resolution = None;
    let mut origin = None;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        let Some((k, v)) = line.split_once(':').or_else(|| line.split_once('=')) else {
            continue;
        };
        let v = v.trim();
        match k.trim() {
            "resolution" => {
                resolution = Some(v.parse::<f64>().map_err(|_| Error::Metadata(format!("bad resolution '{v}'")))?)
            }
            "origin" => {
                let nums: Vec<f64> = v
                    .trim_matches(|c| c == '[' || c == ']')
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Metadata(format!("bad origin '{v}'")))?;
                if nums.len() < 2 {
                    return Err(Error::Metadata(format!("origin needs x and y, got '{v}'")));
                }
                origin = Some(Point2::new(nums[0], nums[1]));
            }
            _ => {}
        }
    }
    let resolution = resolution.ok_or_else(|| Error::Metadata("missing resolution".into()))?;
    let origin = origin.ok_or_else(|| Error::Metadata("missing origin".into()))?;
    if !(resolution > 0.0) {
        return Err(Error::Metadata(format!("resolution {resolution} is not positive")));
    }
    Ok(MapMetadata { resolution, origin })
}

/// Decode a PGM/PPM raster into cell states using the free/occupied
/// intensity thresholds. The image's top row becomes the grid's top row.
pub fn load_occupancy_grid(image_payload: &[u8], meta: &MapMetadata) -> Result<OccupancyGrid> {
    if !(meta.resolution > 0.0) {
        return Err(Error::Metadata(format!("resolution {} is not positive", meta.resolution)));
    }
    let img = image::load_from_memory_with_format(image_payload, ImageFormat::Pnm)
        .map_err(|e| Error::MalformedRaster(e.to_string()))?
        .into_luma16();
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(Error::MalformedRaster("empty raster".into()));
    }
    let max = u16::MAX as f64;
    let mut cells = vec![CellState::Unknown; w * h];
    for (x, y, px) in img.enumerate_pixels() {
        let v = px.0[0] as f64;
        let s = if v >= FREE_THRESHOLD * max {
            CellState::Free
        } else if v <= OCCUPIED_THRESHOLD * max {
            CellState::Occupied
        } else {
            CellState::Unknown
        };
        let row = h - 1 - y as usize;
        cells[row * w + x as usize] = s;
    }
    OccupancyGrid::new(w, h, meta.resolution, meta.origin, cells)
}

/// Row span half-widths of a digital disk.
fn disk_spans(radius: usize) -> Vec<(i64, i64)> {
    let r = radius as i64;
    (-r..=r).map(|dy| (dy, ((r * r - dy * dy) as f64).sqrt().floor() as i64)).collect()
}

/// For every cell, whether any cell of `mask` lies within the disk; cells
/// outside the grid count as set.
fn dilate(mask: &[bool], w: usize, h: usize, spans: &[(i64, i64)]) -> Vec<bool> {
    let mut prefix = vec![0u32; (w + 1) * h];
    for row in 0..h {
        for col in 0..w {
            prefix[row * (w + 1) + col + 1] = prefix[row * (w + 1) + col] + mask[row * w + col] as u32;
        }
    }
    let mut out = vec![false; w * h];
    for row in 0..h as i64 {
        for col in 0..w as i64 {
            let hit = spans.iter().any(|&(dy, hw)| {
                let r = row + dy;
                if r < 0 || r >= h as i64 || col - hw < 0 || col + hw >= w as i64 {
                    return true;
                }
                let base = r as usize * (w + 1);
                prefix[base + (col + hw) as usize + 1] > prefix[base + (col - hw) as usize]
            });
            out[row as usize * w + col as usize] = hit;
        }
    }
    out
}

/// Closing of the blocked (non-free) set by a disk of `radius` cells.
/// Free cells absorbed by the closing become occupied; everything else is
/// left as it was.
pub fn morphological_close(grid: &OccupancyGrid, radius: usize) -> OccupancyGrid {
    if radius == 0 {
        return grid.clone();
    }
    let (w, h) = (grid.width, grid.height);
    let spans = disk_spans(radius);
    let blocked: Vec<bool> = grid.cells.iter().map(|&c| c != CellState::Free).collect();
    let dilated = dilate(&blocked, w, h, &spans);
    // Erosion of D is the complement of the dilation of its complement, where
    // outside-the-grid belongs to D and so never erodes anything.
    let holes: Vec<bool> = dilated.iter().map(|&d| !d).collect();
    let grown = dilate_inside(&holes, w, h, &spans);
    let mut out = grid.clone();
    for i in 0..w * h {
        if grid.cells[i] == CellState::Free && !grown[i] {
            out.cells[i] = CellState::Occupied;
        }
    }
    out
}

/// Like [`dilate`] but with cells outside the grid counted as unset.
fn dilate_inside(mask: &[bool], w: usize, h: usize, spans: &[(i64, i64)]) -> Vec<bool> {
    let mut prefix = vec![0u32; (w + 1) * h];
    for row in 0..h {
        for col in 0..w {
            prefix[row * (w + 1) + col + 1] = prefix[row * (w + 1) + col] + mask[row * w + col] as u32;
        }
    }
    let mut out = vec![false; w * h];
    for row in 0..h as i64 {
        for col in 0..w as i64 {
            out[row as usize * w + col as usize] = spans.iter().any(|&(dy, hw)| {
                let r = row + dy;
                if r < 0 || r >= h as i64 {
                    return false;
                }
                let lo = (col - hw).max(0) as usize;
                let hi = ((col + hw).min(w as i64 - 1)) as usize;
                let base = r as usize * (w + 1);
                prefix[base + hi + 1] > prefix[base + lo]
            });
        }
    }
    out
}

/// Raster of a plan: a cell is free when its center lies in the plan.
/// The grid covers the plan's bounding box plus `margin` cells on each side.
pub fn rasterize(plan: &crate::FloorPlan, resolution: f64, margin: usize) -> OccupancyGrid {
    let b = plan.bbox();
    let origin = Point2::new(b.min.x - margin as f64 * resolution, b.min.y - margin as f64 * resolution);
    let width = (b.width() / resolution).ceil() as usize + 2 * margin;
    let height = (b.height() / resolution).ceil() as usize + 2 * margin;
    let mut cells = Vec::with_capacity(width * height);
    for row in 0..height {
        for col in 0..width {
            let c = Point2::new(origin.x + (col as f64 + 0.5) * resolution, origin.y + (row as f64 + 0.5) * resolution);
            cells.push(if crate::geometry::contains(plan, c) { CellState::Free } else { CellState::Occupied });
        }
    }
    OccupancyGrid { width, height, resolution, origin, cells }
}
