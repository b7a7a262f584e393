use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uvplan::corpus;
use uvplan::floorplan::*;
use uvplan::geometry::{polygon_area, Point2};
use uvplan::{Error, FloorPlan};

fn pgm(w: usize, h: usize, px: &[u8]) -> Vec<u8> {
    let mut v = format!("P5\n{w} {h}\n255\n").into_bytes();
    v.extend_from_slice(px);
    v
}

fn meta() -> MapMetadata {
    MapMetadata { resolution: 0.05, origin: Point2::new(0.0, 0.0) }
}

fn grid_from(rows: &[&str], res: f64) -> OccupancyGrid {
    // Rows listed top to bottom; '.' free, '#' occupied.
    let h = rows.len();
    let w = rows[0].len();
    let mut g = OccupancyGrid::filled(w, h, res, CellState::Occupied);
    for (k, r) in rows.iter().enumerate() {
        for (c, ch) in r.chars().enumerate() {
            if ch == '.' {
                g.set(c, h - 1 - k, CellState::Free);
            }
        }
    }
    g
}

#[test]
fn white_raster_is_free() {
    let g = load_occupancy_grid(&pgm(2, 2, &[255; 4]), &meta()).unwrap();
    assert_eq!((g.width, g.height), (2, 2));
    assert!(g.cells.iter().all(|&c| c == CellState::Free));
}

#[test]
fn black_raster_is_occupied() {
    let g = load_occupancy_grid(&pgm(2, 2, &[0; 4]), &meta()).unwrap();
    assert!(g.cells.iter().all(|&c| c == CellState::Occupied));
}

#[test]
fn mid_gray_is_unknown() {
    let g = load_occupancy_grid(&pgm(1, 1, &[128]), &meta()).unwrap();
    assert_eq!(g.cells[0], CellState::Unknown);
}

#[test]
fn top_image_row_is_top_grid_row() {
    let g = load_occupancy_grid(&pgm(1, 2, &[255, 0]), &meta()).unwrap();
    assert_eq!(g.get(0, 1), CellState::Free);
    assert_eq!(g.get(0, 0), CellState::Occupied);
}

#[test]
fn malformed_raster_rejected() {
    assert!(matches!(load_occupancy_grid(b"not an image", &meta()), Err(Error::MalformedRaster(_))));
}

#[test]
fn non_positive_resolution_rejected() {
    let m = MapMetadata { resolution: 0.0, origin: Point2::default() };
    assert!(load_occupancy_grid(&pgm(1, 1, &[255]), &m).is_err());
}

#[test]
fn metadata_parsing() {
    let m = parse_metadata("image: lab.pgm\nresolution: 0.05\norigin: [-1.5, 2.0, 0.0]\n").unwrap();
    assert_eq!(m.resolution, 0.05);
    assert_eq!(m.origin, Point2::new(-1.5, 2.0));
    assert!(matches!(parse_metadata("origin: [0, 0, 0]"), Err(Error::Metadata(_))));
    assert!(matches!(parse_metadata("resolution: 0.05"), Err(Error::Metadata(_))));
    assert!(parse_metadata("resolution: -1\norigin: [0, 0, 0]").is_err());
}

/// Closing by explicit disk masks: dilate the blocked set (outside counts
/// as blocked), then erode it.
fn reference_close(g: &OccupancyGrid, r: i64) -> OccupancyGrid {
    let (w, h) = (g.width as i64, g.height as i64);
    let blocked = |c: i64, rr: i64| c < 0 || rr < 0 || c >= w || rr >= h || g.get(c as usize, rr as usize) != CellState::Free;
    let disk: Vec<(i64, i64)> =
        (-r..=r).flat_map(|dy| (-r..=r).map(move |dx| (dx, dy))).filter(|(dx, dy)| dx * dx + dy * dy <= r * r).collect();
    let dil = |c: i64, rr: i64| disk.iter().any(|(dx, dy)| blocked(c + dx, rr + dy));
    let mut out = g.clone();
    for rr in 0..h {
        for c in 0..w {
            let closed = disk.iter().all(|(dx, dy)| {
                let (x, y) = (c + dx, rr + dy);
                x < 0 || y < 0 || x >= w || y >= h || dil(x, y)
            });
            if closed && g.get(c as usize, rr as usize) == CellState::Free {
                out.set(c as usize, rr as usize, CellState::Occupied);
            }
        }
    }
    out
}

#[test]
fn closing_radius_zero_is_identity() {
    let g = grid_from(&["#####", "#...#", "#.#.#", "#####"], 0.1);
    assert_eq!(morphological_close(&g, 0), g);
}

#[test]
fn closing_seals_one_cell_slit() {
    let mut rows = vec!["####################".to_string()];
    for _ in 0..8 {
        rows.push("#.......###........#".into());
    }
    rows[4] = "#..................#".into();
    rows.push("####################".into());
    let refs: Vec<&str> = rows.iter().map(|s| s.as_str()).collect();
    let g = grid_from(&refs, 0.1);
    let c = morphological_close(&g, 2);
    assert_eq!(c, reference_close(&g, 2));
    // Middle of the three-cell wall, gap row.
    assert_eq!(c.get(9, g.height - 1 - 4), CellState::Occupied);
}

#[test]
fn closing_keeps_open_interior() {
    let mut g = OccupancyGrid::filled(30, 30, 0.1, CellState::Occupied);
    for r in 5..25 {
        for c in 5..25 {
            g.set(c, r, CellState::Free);
        }
    }
    let c = morphological_close(&g, 2);
    assert_eq!(c, reference_close(&g, 2));
    for r in 7..23 {
        for col in 7..23 {
            assert_eq!(c.get(col, r), CellState::Free);
        }
    }
}

#[test]
fn closing_matches_mask_oracle_on_random_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let (w, h) = (rng.gen_range(5..25), rng.gen_range(5..25));
        let mut g = OccupancyGrid::filled(w, h, 0.1, CellState::Free);
        for i in 0..w * h {
            if rng.gen_bool(0.2) {
                g.cells[i] = CellState::Occupied;
            }
        }
        let r = rng.gen_range(1..4);
        let once = morphological_close(&g, r);
        assert_eq!(once, reference_close(&g, r as i64));
        assert_eq!(morphological_close(&once, r), once, "closing is idempotent");
    }
}

#[test]
fn centered_block_contour() {
    let mut g = OccupancyGrid::filled(10, 10, 1.0, CellState::Occupied);
    for r in 2..8 {
        for c in 2..8 {
            g.set(c, r, CellState::Free);
        }
    }
    let cs = extract_boundary(&g).unwrap();
    assert_eq!(cs.len(), 1);
    let mut got = cs[0].clone();
    got.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let want = [(2.0, 2.0), (2.0, 8.0), (8.0, 2.0), (8.0, 8.0)].map(|(x, y)| Point2::new(x, y));
    assert_eq!(got, want);
    assert!(polygon_area(&cs[0]) > 0.0);
}

#[test]
fn island_gives_hole_contour() {
    let mut g = OccupancyGrid::filled(12, 12, 1.0, CellState::Occupied);
    for r in 1..11 {
        for c in 1..11 {
            g.set(c, r, CellState::Free);
        }
    }
    for r in 5..7 {
        for c in 5..7 {
            g.set(c, r, CellState::Occupied);
        }
    }
    let cs = extract_boundary(&g).unwrap();
    assert_eq!(cs.len(), 2);
    assert!((polygon_area(&cs[0]) - 100.0).abs() < 1e-12);
    assert!((polygon_area(&cs[1]) + 4.0).abs() < 1e-12);
}

#[test]
fn all_free_contour_is_grid_border() {
    let g = OccupancyGrid {
        width: 4,
        height: 3,
        resolution: 0.5,
        origin: Point2::new(1.0, -1.0),
        cells: vec![CellState::Free; 12],
    };
    let cs = extract_boundary(&g).unwrap();
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].len(), 4);
    assert!((polygon_area(&cs[0]) - 3.0).abs() < 1e-12);
    assert!(cs[0].contains(&Point2::new(1.0, -1.0)) && cs[0].contains(&Point2::new(3.0, 0.5)));
}

#[test]
fn no_free_cells_is_an_error() {
    let g = OccupancyGrid::filled(3, 3, 1.0, CellState::Occupied);
    assert!(matches!(extract_boundary(&g), Err(Error::EmptyRegion)));
}

#[test]
fn tiny_contours_are_noise() {
    let mut g = OccupancyGrid::filled(10, 10, 1.0, CellState::Occupied);
    for r in 1..6 {
        for c in 1..6 {
            g.set(c, r, CellState::Free);
        }
    }
    g.set(8, 8, CellState::Free);
    assert_eq!(extract_boundary(&g).unwrap().len(), 1);
}

#[test]
fn rasterize_then_trace_recovers_polygon() {
    for (name, plan) in corpus::rooms() {
        let res = 0.05;
        let g = rasterize(&plan, res, 2);
        let cs = extract_boundary(&g).unwrap();
        let dev = hausdorff_to_ring(plan.outer(), &cs[0]).max(hausdorff_to_ring(&cs[0], plan.outer()));
        assert!(dev <= res * std::f64::consts::SQRT_2 + 1e-9, "{name}: deviation {dev}");
    }
}

fn square_with_midpoint() -> Vec<Point2> {
    [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)].map(|(x, y)| Point2::new(x, y)).to_vec()
}

#[test]
fn dp_zero_tolerance_is_identity() {
    let r = square_with_midpoint();
    assert_eq!(simplify_douglas_peucker(&r, 0.0).unwrap().outer().len(), 5);
}

#[test]
fn dp_drops_collinear_vertex() {
    let p = simplify_douglas_peucker(&square_with_midpoint(), 1e-3).unwrap();
    assert_eq!(p.outer().len(), 4);
    assert_eq!(p.provenance(), Provenance::DouglasPeucker);
}

#[test]
fn dp_flattens_sawtooth() {
    let a = 0.05;
    let mut ring: Vec<Point2> = (0..=20).map(|i| Point2::new(i as f64 * 0.5, if i % 2 == 1 { a } else { 0.0 })).collect();
    ring.push(Point2::new(10.0, 4.0));
    ring.push(Point2::new(0.0, 4.0));
    let p = simplify_douglas_peucker(&ring, 2.0 * a).unwrap();
    assert_eq!(p.outer().len(), 4);
    assert!(hausdorff_to_ring(&ring, p.outer()) <= 2.0 * a);
}

#[test]
fn dp_rejects_degenerate_input() {
    assert!(simplify_douglas_peucker(&square_with_midpoint()[..2], 0.1).is_err());
}

fn noisy_rect(seed: u64, tol: f64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ring = Vec::new();
    let (w, h) = (6.0, 4.0);
    let step = 0.25;
    let mut push = |x: f64, y: f64, rng: &mut ChaCha8Rng| {
        let n = tol / 2.0 * 0.99;
        ring.push(Point2::new(x + rng.gen_range(-n..n) / 2.0_f64.sqrt(), y + rng.gen_range(-n..n) / 2.0_f64.sqrt()));
    };
    let k = (w / step) as usize;
    let m = (h / step) as usize;
    for i in 0..k {
        push(i as f64 * step, 0.0, &mut rng);
    }
    for j in 0..m {
        push(w, j as f64 * step, &mut rng);
    }
    for i in 0..k {
        push(w - i as f64 * step, h, &mut rng);
    }
    for j in 0..m {
        push(0.0, h - j as f64 * step, &mut rng);
    }
    ring
}

#[test]
fn rectilinear_noisy_rectangle_has_four_vertices() {
    for seed in 0..10 {
        let tol = 0.1;
        let ring = noisy_rect(seed, tol);
        let p = simplify_rectilinear(&ring, tol).unwrap();
        assert_eq!(p.outer().len(), 4, "seed {seed}");
        assert!(hausdorff_to_ring(&ring, p.outer()) <= tol + 1e-12);
        // Fewer than 4 vertices cannot form a rectilinear polygon at all.
        assert_eq!(p.provenance(), Provenance::Rectilinear);
    }
}

#[test]
fn rectilinear_l_shape_is_kept() {
    let l = corpus::l_room();
    let p = simplify_rectilinear(l.outer(), 0.05).unwrap();
    assert_eq!(p.outer().len(), 6);
    assert!(hausdorff_to_ring(l.outer(), p.outer()) <= 0.05);
    assert!((p.area() - l.area()).abs() < 0.05 * l.perimeter());
}

fn assert_rectilinear(ring: &[Point2], frame: f64) {
    let n = ring.len();
    for i in 0..n {
        let e = (ring[(i + 1) % n] - ring[i]).rotate(-frame);
        let axis_aligned = e.x.abs() < 1e-9 * e.norm().max(1.0) || e.y.abs() < 1e-9 * e.norm().max(1.0);
        assert!(axis_aligned, "edge {i} = {e:?} not along the frame");
    }
}

#[test]
fn rectilinear_rotated_square() {
    let s = std::f64::consts::FRAC_1_SQRT_2 * 2.0;
    let sq: Vec<Point2> = [(0.0, -s), (s, 0.0), (0.0, s), (-s, 0.0)].map(|(x, y)| Point2::new(x, y)).to_vec();
    let frame = rectilinear_frame(&sq);
    assert!((frame - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    let p = simplify_rectilinear(&sq, 0.01).unwrap();
    assert_eq!(p.outer().len(), 4);
    assert_rectilinear(p.outer(), frame);
    assert!((p.area() - 4.0).abs() < 1e-6);
}

#[test]
fn rectilinear_rejects_zero_tolerance() {
    assert!(simplify_rectilinear(corpus::l_room().outer(), 0.0).is_err());
}

#[test]
fn vectorize_raster_room() {
    let plan = corpus::t_corridor();
    let g = rasterize(&plan, 0.05, 3);
    let cfg = SimplificationConfig { tolerance: 0.1, closing_radius: 2, method: SimplificationMethod::Rectilinear };
    let v = vectorize(&g, &cfg).unwrap();
    assert_eq!(v.outer().len(), plan.outer().len());
    assert!(hausdorff_to_ring(plan.outer(), v.outer()) <= 0.1 + 0.05 * std::f64::consts::SQRT_2);
}

#[test]
fn vectorize_keeps_obstacles_as_holes() {
    let plan = corpus::office();
    let g = rasterize(&plan, 0.05, 3);
    let v = vectorize(&g, &SimplificationConfig::default()).unwrap();
    assert_eq!(v.holes().len(), 1);
    // Each wall may move by up to the tolerance.
    assert!((v.area() - plan.area()).abs() <= 0.1 * plan.perimeter());
    assert!(hausdorff_to_ring(plan.outer(), v.outer()) <= 0.1 + 0.05 * std::f64::consts::SQRT_2);
}

#[test]
fn plan_validation() {
    assert!(FloorPlan::polygon(&[(0.0, 0.0), (1.0, 0.0)]).is_err());
    // Bow tie.
    assert!(FloorPlan::polygon(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]).is_err());
    // Clockwise input is reoriented.
    let p = FloorPlan::polygon(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]).unwrap();
    assert!(polygon_area(p.outer()) > 0.0);
    // A hole poking out of the room is rejected.
    let sq = FloorPlan::rectangle(0.0, 0.0, 2.0, 2.0);
    let bad = [(1.5, 0.5), (2.5, 0.5), (2.5, 1.5), (1.5, 1.5)].map(|(x, y)| Point2::new(x, y)).to_vec();
    assert!(sq.with_holes(vec![bad]).is_err());
    let hole = [(0.5, 0.5), (1.5, 0.5), (1.5, 1.5), (0.5, 1.5)].map(|(x, y)| Point2::new(x, y)).to_vec();
    let h = sq.with_holes(vec![hole]).unwrap();
    assert!(polygon_area(&h.holes()[0]) < 0.0);
    assert!((h.area() - 3.0).abs() < 1e-12);
}

#[test]
fn plan_json_round_trip() {
    let p = corpus::office();
    let q = FloorPlan::from_json(&p.to_json()).unwrap();
    assert_eq!(p.outer(), q.outer());
    assert_eq!(p.holes(), q.holes());
    let doc = r#"{"outer": [[0,0],[3,0],[3,2],[0,2]], "holes": []}"#;
    assert!((FloorPlan::from_json(doc).unwrap().area() - 6.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn simplification_stays_within_tolerance(seed in 0u64..500, tol in 0.02f64..0.3) {
        let plan = corpus::random_rectilinear(seed, 8, 0.5);
        let g = rasterize(&plan, 0.05, 2);
        let ring = extract_boundary(&g).unwrap()[0].clone();
        for method in [SimplificationMethod::DouglasPeucker, SimplificationMethod::Rectilinear] {
            let out = match method {
                SimplificationMethod::DouglasPeucker => simplify_douglas_peucker(&ring, tol),
                SimplificationMethod::Rectilinear => simplify_rectilinear(&ring, tol),
            };
            match out {
                Ok(p) => {
                    prop_assert!(hausdorff_to_ring(&ring, p.outer()) <= tol + 1e-9);
                    if method == SimplificationMethod::Rectilinear {
                        assert_rectilinear(p.outer(), rectilinear_frame(&ring));
                    }
                }
                Err(Error::RectilinearFit { best_deviation }) => prop_assert!(best_deviation > tol),
                Err(Error::Simplification(_)) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
