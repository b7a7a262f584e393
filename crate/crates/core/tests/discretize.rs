use uvplan::corpus;
use uvplan::discretize::*;
use uvplan::geometry::{contains, erode, polygon_area, Point2};
use uvplan::irradiance::{dose_rate, GridCell, LightConfig};
use uvplan::{Error, FloorPlan};

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn centers(cells: &[GridCell]) -> Vec<Point2> {
    cells.iter().map(|c| c.center).collect()
}

#[test]
fn guard_grid_of_a_square() {
    let region = erode(&FloorPlan::rectangle(-1.0, -1.0, 3.0, 3.0), 1.0);
    let got = centers(&build_guard_grid(&region, 1.0));
    let want = [p(0.5, 0.5), p(1.5, 0.5), p(0.5, 1.5), p(1.5, 1.5)];
    assert_eq!(got.len(), 4);
    for w in want {
        assert!(got.iter().any(|g| g.dist(w) < 1e-12), "{w:?} missing from {got:?}");
    }
    assert!(build_guard_grid(&region, 0.0).is_empty());
}

#[test]
fn coarse_grid_can_miss_the_region() {
    // Region is the segment-thin strip [0.9, 1.1]²; one 5 m cell centered
    // at (3.4, 3.4) lies outside it.
    let region = erode(&FloorPlan::rectangle(0.0, 0.0, 2.0, 2.0), 0.9);
    assert!(build_guard_grid(&region, 5.0).is_empty());
    let sq = FloorPlan::rectangle(0.0, 0.0, 1.0, 1.0);
    assert_eq!(build_target_grid(&sq, 5.0).len(), 1, "a cell meeting the room keeps a target");
}

#[test]
fn guard_grid_of_an_l_matches_point_in_polygon() {
    let plan = corpus::l_room();
    for r in [0.0, 0.3, 0.6] {
        let region = erode(&plan, r);
        for eps in [0.25, 0.5, 1.0] {
            let got = centers(&build_guard_grid(&region, eps));
            let b = region.bbox();
            let mut want = Vec::new();
            let (nx, ny) = ((b.width() / eps).ceil() as i64, (b.height() / eps).ceil() as i64);
            for j in 0..ny {
                for i in 0..nx {
                    let c = p(b.min.x + (i as f64 + 0.5) * eps, b.min.y + (j as f64 + 0.5) * eps);
                    if contains(&plan, c) && plan.boundary_distance(c) >= r {
                        want.push(c);
                    }
                }
            }
            assert_eq!(got.len(), want.len(), "r {r} eps {eps}");
            assert!(want.iter().all(|w| got.iter().any(|g| g.dist(*w) < 1e-9)));
            assert!(got.iter().all(|&g| plan.boundary_distance(g) >= r - 1e-12));
        }
    }
}

#[test]
fn target_grid_examples() {
    let sq = FloorPlan::rectangle(0.0, 0.0, 2.0, 2.0);
    let t = build_target_grid(&sq, 1.0);
    assert_eq!(t.len(), 4);
    assert_eq!(t.dropped_fraction, 0.0);
    for want in [p(0.5, 0.5), p(1.5, 0.5), p(0.5, 1.5), p(1.5, 1.5)] {
        assert!(t.targets.iter().any(|x| x.point.dist(want) < 1e-12));
    }
    assert!(t.targets.iter().all(|x| x.region.as_ref().is_some_and(|r| (polygon_area(r) - 1.0).abs() < 1e-12)));
    assert!(build_target_grid(&sq, -1.0).is_empty());
}

#[test]
fn target_grid_of_an_l_matches_point_in_polygon() {
    let plan = corpus::l_room();
    for eps in [0.3, 0.5, 0.7] {
        let t = build_target_grid(&plan, eps);
        let b = plan.bbox();
        let (nx, ny) = ((b.width() / eps).ceil() as i64, (b.height() / eps).ceil() as i64);
        let mut meeting = 0;
        for j in 0..ny {
            for i in 0..nx {
                let c = p(b.min.x + (i as f64 + 0.5) * eps, b.min.y + (j as f64 + 0.5) * eps);
                // A cell meets the open room if any of a few interior samples does.
                let h = 0.499 * eps;
                let hit = [(0.0, 0.0), (-h, -h), (h, -h), (h, h), (-h, h)]
                    .iter()
                    .any(|&(dx, dy)| contains(&plan, c + p(dx, dy)) && plan.boundary_distance(c + p(dx, dy)) > 1e-9);
                if hit {
                    meeting += 1;
                }
            }
        }
        assert_eq!(t.len(), meeting, "eps {eps}");
        for x in &t.targets {
            assert!(contains(&plan, x.point) && x.cell.contains(x.point));
            if let Some(r) = &x.region {
                for &q in r {
                    let near = GridCell::new(x.cell.center, x.cell.half_width + 1e-12);
                    assert!(contains(&plan, q) && near.contains(q), "{q:?} of {:?} in {:?}", x.cell, r);
                }
            }
        }
        let covered: f64 = t.targets.iter().filter_map(|x| x.region.as_ref()).map(|r| polygon_area(r)).sum();
        assert!(covered <= plan.area() + 1e-9 && covered > 0.9 * plan.area());
    }
}

#[test]
fn refinement_quadruples_cells() {
    for (name, plan) in corpus::rooms() {
        for eps in [1.0, 0.5] {
            let coarse = build_target_grid(&plan, eps).len() as f64;
            let fine = build_target_grid(&plan, eps / 2.0).len() as f64;
            let slack = 4.0 * plan.perimeter() / (eps / 2.0);
            assert!(fine >= 4.0 * coarse - slack, "{name} {eps}: {fine} vs {coarse}");
        }
    }
}

#[test]
fn filtering_a_convex_room_drops_nothing() {
    let sq = FloorPlan::rectangle(0.0, 0.0, 4.0, 3.0);
    let cfg = LightConfig { shadow_radius: 0.0, ..LightConfig::default() };
    let region = erode(&sq, 0.3);
    let guards = build_guard_grid(&region, 0.5);
    let t = filter_unseen_targets(&sq, &guards, &build_target_grid(&sq, 0.5), &cfg).unwrap();
    assert_eq!(t.dropped_fraction, 0.0);
    assert!(t.dropped.is_empty());
}

#[test]
fn filtering_drops_an_unreachable_alcove() {
    // A 0.4 m wide alcove: the robot cannot enter and no guard sees inside.
    let plan = FloorPlan::polygon(&[
        (0.0, 0.0),
        (4.0, 0.0),
        (4.0, 4.0),
        (2.2, 4.0),
        (2.2, 6.0),
        (3.0, 6.0),
        (3.0, 6.4),
        (1.8, 6.4),
        (1.8, 4.0),
        (0.0, 4.0),
    ])
    .unwrap();
    let cfg = LightConfig::default();
    let region = erode(&plan, 0.3);
    let guards = build_guard_grid(&region, 0.2);
    let all = build_target_grid(&plan, 0.2);
    let kept = filter_unseen_targets(&plan, &guards, &all, &cfg).unwrap();
    assert!(kept.dropped_fraction > 0.0);
    assert_eq!(kept.total(), all.len());
    // The side arm of the alcove is around a corner from every guard.
    for t in &kept.dropped {
        let lit = guards.iter().any(|g| {
            t.region.as_ref().map_or(false, |r| r.iter().all(|&q| dose_rate(&plan, g.center, q, &cfg) > 0.0))
        });
        assert!(!lit, "dropped target at {:?} is fully lit", t.point);
    }
    assert!(kept.dropped.iter().any(|t| t.point.x > 2.3 && t.point.y > 6.0));
    assert!(kept.targets.iter().all(|t| !(t.point.x > 2.6 && t.point.y > 6.0)));
}

#[test]
fn no_guards_is_degenerate() {
    let sq = FloorPlan::rectangle(0.0, 0.0, 2.0, 2.0);
    let t = build_target_grid(&sq, 0.5);
    assert!(matches!(filter_unseen_targets(&sq, &[], &t, &LightConfig::default()), Err(Error::Degenerate(_))));
}

#[test]
fn dropped_fraction_shrinks_with_epsilon() {
    let cfg = LightConfig::default();
    for (name, plan) in corpus::rooms() {
        let region = erode(&plan, 0.3);
        let mut prev = 1.0;
        for eps in [1.0, 0.5, 0.25] {
            let guards = build_guard_grid(&region, eps);
            let t = filter_unseen_targets(&plan, &guards, &build_target_grid(&plan, eps), &cfg).unwrap();
            assert!(t.dropped_fraction <= prev + 0.02, "{name} {eps}: {} after {prev}", t.dropped_fraction);
            prev = t.dropped_fraction;
        }
    }
}

#[test]
fn guard_cover_contains_every_region_point() {
    let plan = corpus::office();
    let region = erode(&plan, 0.3);
    for eps in [1.0, 0.5] {
        let cover = build_guard_cover(&region, eps);
        let grid = build_guard_grid(&region, eps);
        assert!(cover.len() >= grid.len());
        let b = region.bbox();
        for j in 0..=60 {
            for i in 0..=60 {
                let q = p(b.min.x + b.width() * i as f64 / 60.0, b.min.y + b.height() * j as f64 / 60.0);
                if region.contains(q) {
                    assert!(cover.iter().any(|c| c.contains(q)), "{q:?} outside the cover");
                }
            }
        }
    }
}
