//! Built-in test rooms and a seeded random rectilinear room generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::floorplan::{extract_boundary, CellState, OccupancyGrid};
use crate::geometry::Point2;
use crate::{FloorPlan, Provenance};

fn poly(pts: &[(f64, f64)]) -> Vec<Point2> {
    pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()
}

/// Lab with a corridor along the south wall and three bays separated by
/// deep partition walls, plus a bench in the east bay.
pub fn hri_lab() -> FloorPlan {
    let outer = poly(&[
        (0.0, 0.0),
        (9.0, 0.0),
        (9.0, 6.0),
        (6.4, 6.0),
        (6.4, 2.0),
        (5.9, 2.0),
        (5.9, 6.0),
        (3.1, 6.0),
        (3.1, 2.0),
        (2.6, 2.0),
        (2.6, 6.0),
        (0.0, 6.0),
    ]);
    let bench = poly(&[(7.4, 4.4), (8.4, 4.4), (8.4, 4.9), (7.4, 4.9)]);
    FloorPlan::new(outer, vec![bench], Provenance::RawContour).expect("valid lab")
}

pub fn l_room() -> FloorPlan {
    FloorPlan::polygon(&[(0.0, 0.0), (5.0, 0.0), (5.0, 2.0), (2.0, 2.0), (2.0, 5.0), (0.0, 5.0)]).expect("valid L")
}

/// Office with a square pillar.
pub fn office() -> FloorPlan {
    let outer = poly(&[(0.0, 0.0), (6.0, 0.0), (6.0, 4.0), (0.0, 4.0)]);
    let pillar = poly(&[(2.6, 1.6), (3.4, 1.6), (3.4, 2.4), (2.6, 2.4)]);
    FloorPlan::new(outer, vec![pillar], Provenance::RawContour).expect("valid office")
}

pub fn t_corridor() -> FloorPlan {
    FloorPlan::polygon(&[
        (0.0, 3.0),
        (2.5, 3.0),
        (2.5, 0.0),
        (4.0, 0.0),
        (4.0, 3.0),
        (6.5, 3.0),
        (6.5, 4.5),
        (0.0, 4.5),
    ])
    .expect("valid T")
}

/// Thin straight corridor.
pub fn corridor(length: f64, width: f64) -> FloorPlan {
    FloorPlan::rectangle(0.0, 0.0, length, width)
}

/// The named rooms used for experiments.
pub fn rooms() -> Vec<(&'static str, FloorPlan)> {
    vec![("hri-lab", hri_lab()), ("l-room", l_room()), ("office", office()), ("t-corridor", t_corridor())]
}

pub fn room(name: &str) -> Option<FloorPlan> {
    rooms().into_iter().find(|(n, _)| *n == name).map(|(_, p)| p)
}

/// Union of a few random axis-aligned rectangles on a `cell`-meter lattice,
/// at most `extent` cells on a side. Retries until the union is a simple
/// polygon without holes.
pub fn random_rectilinear(seed: u64, extent: usize, cell: f64) -> FloorPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut g = OccupancyGrid::filled(extent + 2, extent + 2, cell, CellState::Occupied);
        let rects = rng.gen_range(2..=4);
        let mut first = true;
        for _ in 0..rects {
            let w = rng.gen_range(2..=extent.max(3) - 1);
            let h = rng.gen_range(2..=extent.max(3) - 1);
            let x = rng.gen_range(1..=extent + 1 - w);
            let y = rng.gen_range(1..=extent + 1 - h);
            let overlaps = (y..y + h).any(|r| (x..x + w).any(|c| g.get(c, r) == CellState::Free));
            if !first && !overlaps {
                continue;
            }
            first = false;
            for r in y..y + h {
                for c in x..x + w {
                    g.set(c, r, CellState::Free);
                }
            }
        }
        let Ok(contours) = extract_boundary(&g) else {
            continue;
        };
        if contours.len() != 1 {
            continue;
        }
        if let Ok(p) = FloorPlan::new(contours[0].clone(), vec![], Provenance::RawContour) {
            return p;
        }
    }
}
