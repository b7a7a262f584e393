//! Acceptance run: one line per criterion. Exits non-zero when a criterion
//! outside `KNOWN_RED` fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::fs;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uvplan::corpus;
use uvplan::discretize::{build_guard_grid, build_target_grid, filter_unseen_targets};
use uvplan::geometry::{erode, Point2};
use uvplan::irradiance::{BoundKind, DoseRequirement, IncidenceMode, IrradianceMatrix, LightConfig};
use uvplan::plan::*;
use uvplan::verify::{check_wall_sufficiency, verify_plan};
use uvplan_cli::*;

/// Criteria this implementation does not meet; they are reported, not hidden.
const KNOWN_RED: [usize; 2] = [3, 4];

const ALGS: [Algorithm; 4] = [Algorithm::Naive, Algorithm::Pessimistic, Algorithm::BranchAndBound, Algorithm::LowerBound];

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

fn outcome(id: usize, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn lp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let start = Instant::now();
    let (mut worst, mut bad) = (0.0f64, 0);
    for _ in 0..200 {
        let (ng, nt) = (rng.gen_range(1..=4), rng.gen_range(1..=6));
        let rates = support::random_rates(&mut rng, ng, nt);
        let r = rng.gen_range(1.0..1e5);
        let m = IrradianceMatrix::from_rows(
            (0..ng).map(|g| Point2::new(g as f64, 0.0)).collect(),
            (0..nt).map(|t| Point2::new(t as f64, 1.0)).collect(),
            rates.clone(),
            BoundKind::Exact,
        );
        let want = support::lp_enumerate(&rates, r).expect("every target is lit");
        match solve_lp(&LpProblem { rates: m, requirement: DoseRequirement::new(r).unwrap() }) {
            Ok(s) => {
                let rel = (s.total_dwell - want).abs() / want;
                worst = worst.max(rel);
                if rel > 1e-8 {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(1, bad == 0 && secs < 10.0, format!("200 instances, {bad} mismatches, worst rel {worst:.1e}, {secs:.2} s"))
}

fn suite(dir: &std::path::Path) -> ExperimentTable {
    let mut base = RunConfig::new(Input::Room("hri-lab".into()));
    base.out = Some(dir.to_path_buf());
    run_experiment_suite(&corpus_inputs(), &DEFAULT_EPSILONS, &ALGS, &base).expect("suite runs")
}

fn rooms() -> Vec<&'static str> {
    corpus::rooms().into_iter().map(|(n, _)| n).collect()
}

fn sandwich(t: &ExperimentTable) -> Outcome {
    let mut violations = Vec::new();
    let mut checked = 0;
    for room in rooms() {
        for eps in DEFAULT_EPSILONS {
            for shadow in [true, false] {
                let get = |a| t.row(room, a, eps, shadow).filter(|r| r.error.is_none());
                let tag = format!("{room} ε={eps} shadow={shadow}");
                let (Some(p), Some(b), Some(lb)) = (get(Algorithm::Pessimistic), get(Algorithm::BranchAndBound), get(Algorithm::LowerBound))
                else {
                    violations.push(format!("{tag}: missing run"));
                    continue;
                };
                checked += 1;
                let time = |r: &ExperimentRow| r.time_s.unwrap_or(f64::NAN);
                let cov = |r: &ExperimentRow| r.disinfected_percent.unwrap_or(f64::NAN);
                if !(time(lb) <= time(p)) {
                    violations.push(format!("{tag}: lower bound {} > pessimistic {}", time(lb), time(p)));
                }
                if !(time(lb) <= time(b)) {
                    violations.push(format!("{tag}: lower bound {} > bnb {}", time(lb), time(b)));
                }
                if !(cov(lb) >= cov(p)) {
                    violations.push(format!("{tag}: lower-bound coverage {} < pessimistic {}", cov(lb), cov(p)));
                }
                if p.guarantee != Some(true) || b.guarantee != Some(true) {
                    violations.push(format!("{tag}: guarantee pess {:?} bnb {:?}", p.guarantee, b.guarantee));
                }
            }
        }
    }
    let detail = if violations.is_empty() {
        format!("{checked} room/ε/shadow cells, zero violations")
    } else {
        format!("{} violations: {}", violations.len(), violations.join("; "))
    };
    outcome(2, violations.is_empty(), detail)
}

fn convergence(t: &ExperimentTable) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for room in rooms() {
        let times: Vec<f64> = DEFAULT_EPSILONS
            .iter()
            .map(|&e| t.row(room, Algorithm::Pessimistic, e, true).and_then(|r| r.time_s).unwrap_or(f64::NAN))
            .collect();
        for (w, e) in times.windows(2).zip(DEFAULT_EPSILONS.windows(2)) {
            if !(w[1] <= 1.05 * w[0]) {
                pass = false;
                notes.push(format!("{room} ε {}→{}: {:.0}→{:.0} ({:+.1}%)", e[0], e[1], w[0], w[1], 100.0 * (w[1] / w[0] - 1.0)));
            }
        }
        let fine = *DEFAULT_EPSILONS.last().unwrap();
        let p = t.row(room, Algorithm::Pessimistic, fine, true).and_then(|r| r.time_s).unwrap_or(f64::NAN);
        let lb = t.row(room, Algorithm::LowerBound, fine, true).and_then(|r| r.time_s).unwrap_or(f64::NAN);
        let gap = (p - lb).abs() / p;
        if !(gap <= 0.35) {
            pass = false;
        }
        notes.push(format!("{room} lb/pess at ε={fine}: {:.2}", lb / p));
    }
    outcome(3, pass, notes.join("; "))
}

fn dominance(t: &ExperimentTable) -> Outcome {
    let eps = 0.2;
    let row = |a| t.row("hri-lab", a, eps, true).expect("hri-lab row");
    let (n, p) = (row(Algorithm::Naive), row(Algorithm::Pessimistic));
    let (nc, pc) = (n.disinfected_percent.unwrap_or(0.0), p.disinfected_percent.unwrap_or(0.0));
    let (nt, pt) = (n.time_s.unwrap_or(f64::NAN), p.time_s.unwrap_or(f64::NAN));
    let pass = pc >= 2.0 * nc && pt <= 0.5 * nt;
    let mut detail = format!(
        "hri-lab ε={eps}: naive {nc:.2}% in {nt:.0} s, pessimistic {pc:.2}% in {pt:.0} s (coverage ×{:.2}, time ×{:.2})",
        pc / nc,
        pt / nt
    );
    // Same instance under floor-normal incidence, for information.
    let mut cfg = RunConfig::new(Input::Room("hri-lab".into()));
    cfg.epsilon = eps;
    cfg.light.incidence = IncidenceMode::FloorNormal;
    cfg.algorithm = AlgorithmChoice::All;
    if let Ok(out) = run_pipeline(&cfg) {
        if let (Some(n), Some(p)) = (out.run(Algorithm::Naive), out.run(Algorithm::Pessimistic)) {
            let cov = |r: &AlgorithmRun| r.verification.as_ref().map_or(f64::NAN, |v| v.coverage_percent);
            detail.push_str(&format!(
                "; floor-normal: naive {:.2}% in {:.0} s, pessimistic {:.2}% in {:.0} s",
                cov(n),
                n.solution.total_dwell,
                cov(p),
                p.solution.total_dwell
            ));
        }
    }
    outcome(4, pass, detail)
}

fn shadow(t: &ExperimentTable) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for room in rooms() {
        match t.shadow_deltas.iter().find(|d| d.room == room && d.algorithm == Algorithm::Pessimistic && (d.epsilon - 0.2).abs() < 1e-12)
        {
            Some(d) => {
                pass &= d.delta_percent.abs() <= 10.0;
                notes.push(format!("{room} {:+.2}%", d.delta_percent));
            }
            None => {
                pass = false;
                notes.push(format!("{room} missing"));
            }
        }
    }
    outcome(5, pass, format!("pessimistic at ε=0.2: {}", notes.join(", ")))
}

fn corridor() -> Outcome {
    let len = 10.0;
    let eps = len / 100.0;
    let start = Instant::now();
    let plan = corpus::corridor(len, 0.2);
    let cfg = LightConfig { power: 1.0, half_height: 0.0, shadow_radius: 0.0, incidence: IncidenceMode::None };
    // Guard lattice offset from the target lattice so no lamp stands on a target.
    let guards = build_guard_grid(&erode(&plan, 0.05), eps);
    let targets = build_target_grid(&plan, eps);
    let req = DoseRequirement::default();
    let d = len * (3.0 - 3f64.sqrt()) / 6.0;
    let s = match plan_two_stop(&plan, &guards, &targets, &cfg, &req, BoundKind::Exact) {
        Ok(s) => s,
        Err(e) => return outcome(6, false, format!("two-stop solve failed: {e}")),
    };
    let mut xs: Vec<f64> = s.waypoints().iter().map(|w| w.0.x).collect();
    xs.sort_by(f64::total_cmp);
    let free = plan_exact(&plan, &guards, &targets, &cfg, &req).map(|s| s.active.len());
    let secs = start.elapsed().as_secs_f64();
    let pass = xs.len() == 2 && (xs[0] - d).abs() <= 2.0 * eps && (len - xs[1] - d).abs() <= 2.0 * eps && secs < 30.0;
    let ends = if xs.len() == 2 { format!("{:.3} and {:.3} from the ends", xs[0], len - xs[1]) } else { format!("{xs:?}") };
    outcome(
        6,
        pass,
        format!("L={len}, ε={eps}: stops {ends}, target {d:.3} ± {:.2}; unrestricted LP uses {:?} stops; {secs:.1} s", 2.0 * eps, free.ok()),
    )
}

fn guarantee_oracle() -> Outcome {
    let cfg = LightConfig::default();
    let req = DoseRequirement::default();
    let eps = 0.5;
    let mut failures = Vec::new();
    let mut plans = 0;
    for seed in 0..20u64 {
        let plan = corpus::random_rectilinear(500 + seed, 8, 0.5);
        let guards = build_guard_grid(&erode(&plan, DEFAULT_ROBOT_RADIUS), eps);
        let targets = match filter_unseen_targets(&plan, &guards, &build_target_grid(&plan, eps), &cfg) {
            Ok(t) => t,
            Err(e) => {
                failures.push(format!("room {seed}: {e}"));
                continue;
            }
        };
        let sols = [
            plan_pessimistic(&plan, &guards, &targets, &cfg, &req),
            plan_branch_and_bound(&plan, &guards, &targets, &cfg, &req, &BnbConfig::for_epsilon(eps)),
        ];
        for s in sols {
            match s {
                Ok(s) => {
                    plans += 1;
                    let rep = verify_plan(&plan, &s, &cfg, &req, eps / 4.0);
                    if !rep.guarantee_ok() || rep.kept_coverage_percent < 100.0 {
                        failures.push(format!(
                            "room {seed} {}: kept {:.3}%, guarantee {:?}",
                            s.algorithm.name(),
                            rep.kept_coverage_percent,
                            rep.guarantee.map(|g| g.passed)
                        ));
                    }
                }
                Err(e) => failures.push(format!("room {seed}: {e}")),
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{plans} plans on 20 rooms verified at ε/4, all kept cells dosed")
    } else {
        failures.join("; ")
    };
    outcome(7, failures.is_empty() && plans == 40, detail)
}

fn walls() -> Outcome {
    match check_wall_sufficiency(100_000, &LightConfig::default(), 8) {
        Ok(w) => outcome(8, w.passed && w.violations.is_empty(), format!("{} triples, {} violations", w.samples, w.violations.len())),
        Err(e) => outcome(8, false, e.to_string()),
    }
}

fn geometry_oracles() -> Outcome {
    let mut plans: Vec<_> = corpus::rooms().into_iter().map(|(_, p)| p).collect();
    plans.extend((0..6).map(|s| corpus::random_rectilinear(900 + s, 8, 0.5)));
    let (mut pairs, mut bad) = (0, 0);
    for (i, plan) in plans.iter().enumerate() {
        let st = support::geodesic_stats(plan, 70 + i as u64, 10, 100, 0.05);
        pairs += st.pairs;
        bad += st.too_far + st.too_long;
    }
    let b = support::bound_stats(9, 1000, 100);
    let pass = pairs >= 10_000
        && bad == 0
        && b.pessimistic_violations == 0
        && b.optimistic_violations == 0
        && b.pessimistic_cells >= 1000
        && b.optimistic_cells >= 1000;
    outcome(
        9,
        pass,
        format!(
            "geodesic: {pairs} pairs, {bad} off the lattice band; bounds: {}+{} cells, {} samples, {}/{} violations, {} positive pessimistic",
            b.pessimistic_cells,
            b.optimistic_cells,
            b.samples,
            b.pessimistic_violations,
            b.optimistic_violations,
            b.positive_pessimistic
        ),
    )
}

const SUITE_FILES: [&str; 2] = ["table.txt", "report.json"];

fn snapshot(dir: &std::path::Path) -> Vec<Option<Vec<u8>>> {
    SUITE_FILES.iter().map(|f| fs::read(dir.join(f)).ok()).collect()
}

fn determinism(first: &[Option<Vec<u8>>], second: &[Option<Vec<u8>>]) -> Outcome {
    let diffs: Vec<&str> =
        SUITE_FILES.iter().zip(first.iter().zip(second)).filter(|(_, (a, b))| a.is_none() || a != b).map(|(f, _)| *f).collect();
    outcome(10, diffs.is_empty(), if diffs.is_empty() { "two suite runs byte-identical".into() } else { format!("differs: {diffs:?}") })
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let out = dir.path().join("suite");
    let mut results = vec![lp_oracle()];
    let table = suite(&out);
    let first = snapshot(&out);
    results.push(sandwich(&table));
    results.push(convergence(&table));
    results.push(dominance(&table));
    results.push(shadow(&table));
    results.push(corridor());
    results.push(guarantee_oracle());
    results.push(walls());
    results.push(geometry_oracles());
    suite(&out);
    results.push(determinism(&first, &snapshot(&out)));

    let mut unexpected = Vec::new();
    for r in &results {
        let known = KNOWN_RED.contains(&r.id);
        let tag = match (r.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {:>2}: {tag}: {}", r.id, r.detail);
        if !r.pass && !known {
            unexpected.push(r.id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
