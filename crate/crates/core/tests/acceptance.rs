//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits with status 1 if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use geostark_core::discretize::{build_table, interpolate_bilinear, GridSpec, StrategyKind};
use geostark_core::geometry::{contains, segment_distance, signed_distance, Category, Point2D, ZonePolygon, ZoneSet};
use geostark_core::harness::{
    rows_to_csv, run_accuracy_sweep, run_proof_bench, run_soundness_smoke, synth_corpus, BenchCell, BenchConfig,
    QuerySample, ReportRow, DEFAULT_SAMPLE_COUNT,
};
use geostark_core::stark::{build_trace, prove, verify, AirConfig, ZoneQuery};
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;

const SEED: u64 = 42;
const BENCH_RESOLUTIONS: [u32; 5] = [8, 16, 32, 64, 128];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }

    fn error(err: impl std::fmt::Display) -> Self {
        Self::new(false, format!("error: {err}"))
    }
}

fn accuracy(rows: &[ReportRow], strategy: StrategyKind, r: u32) -> f64 {
    rows.iter()
        .find(|row| row.strategy == strategy.name() && row.r == r)
        .and_then(|row| row.accuracy)
        .expect("sweep covers every cell")
}

fn pp(x: f64) -> String {
    format!("{:+.1}pp", x * 100.0)
}

fn corpus_and_sample() -> (ZoneSet, QuerySample) {
    let zones = synth_corpus(SEED);
    let sample = QuerySample::draw(&zones.bbox(), DEFAULT_SAMPLE_COUNT, SEED);
    (zones, sample)
}

fn accuracy_ordering() -> Outcome {
    let (zones, sample) = corpus_and_sample();
    let start = Instant::now();
    let rows = match run_accuracy_sweep(&zones, &StrategyKind::all(), &[8, 16, 32], &sample) {
        Ok(rows) => rows,
        Err(e) => return Outcome::error(e),
    };
    let secs = start.elapsed().as_secs_f64();
    let [center, voting, sdf] = StrategyKind::all();
    let mut pass = secs <= 120.0;
    let mut parts = Vec::new();
    for r in [8, 16, 32] {
        let (c, v, d) = (accuracy(&rows, center, r), accuracy(&rows, voting, r), accuracy(&rows, sdf, r));
        pass &= d - v >= 0.20;
        if r <= 16 {
            pass &= d > c;
        }
        parts.push(format!("r={r}: sdf {d:.4} voting {v:.4} center {c:.4} (sdf-voting {})", pp(d - v)));
    }
    Outcome::new(pass, format!("{}; {secs:.1}s", parts.join("; ")))
}

fn resolution_convergence() -> Outcome {
    let (zones, sample) = corpus_and_sample();
    let start = Instant::now();
    let rows = match run_accuracy_sweep(&zones, &StrategyKind::all(), &[8, 128, 256], &sample) {
        Ok(rows) => rows,
        Err(e) => return Outcome::error(e),
    };
    let secs = start.elapsed().as_secs_f64();
    let mut pass = secs <= 600.0;
    let mut parts = Vec::new();
    for s in StrategyKind::all() {
        let (lo, hi) = (accuracy(&rows, s, 8), accuracy(&rows, s, 128));
        pass &= hi >= lo + 0.10;
        parts.push(format!("{} {lo:.4}->{hi:.4} ({})", s.name(), pp(hi - lo)));
    }
    let top = accuracy(&rows, StrategyKind::DistanceAware, 256);
    pass &= top >= 0.9;
    Outcome::new(pass, format!("{}; sdf r=256 {top:.4}; {secs:.1}s", parts.join("; ")))
}

fn early_saturation() -> Outcome {
    let (zones, sample) = corpus_and_sample();
    let rows = match run_accuracy_sweep(&zones, &[StrategyKind::DistanceAware], &[32, 256], &sample) {
        Ok(rows) => rows,
        Err(e) => return Outcome::error(e),
    };
    let (mid, top) = (
        accuracy(&rows, StrategyKind::DistanceAware, 32),
        accuracy(&rows, StrategyKind::DistanceAware, 256),
    );
    Outcome::new(mid >= 0.9 * top, format!("sdf r=32 {mid:.4} vs 0.9 x r=256 {:.4}", 0.9 * top))
}

fn completeness() -> Outcome {
    let zones = synth_corpus(SEED);
    let mut rng = Pcg64::seed_from_u64(SEED);
    let cells: Vec<(StrategyKind, u32)> = StrategyKind::all()
        .into_iter()
        .flat_map(|s| [8, 16, 32].map(move |r| (s, r)))
        .collect();
    let mut bundles = Vec::new();
    for &(s, r) in &cells {
        match GridSpec::new(zones.bbox(), r).and_then(|g| build_table(&zones, &g, s)) {
            Ok(b) => bundles.push(b),
            Err(e) => return Outcome::error(e),
        }
    }
    let start = Instant::now();
    let mut accepted = 0;
    let mut failures = Vec::new();
    for trial in 0..100 {
        let k = trial % cells.len();
        let (s, r) = cells[k];
        let sample = QuerySample::draw(&zones.bbox(), 64, rng.random());
        let queries: Vec<ZoneQuery> = sample
            .points
            .iter()
            .map(|p| ZoneQuery::new(*p, rng.random_range(0..zones.len())))
            .collect();
        let cfg = AirConfig::new(s, r, queries.len());
        let result = build_trace(&queries, &bundles[k], &cfg)
            .and_then(|(trace, statement)| prove(&trace, &statement, &cfg))
            .map_err(|e| e.to_string())
            .and_then(|proof| verify(&proof).map_err(|e| e.code().to_string()));
        match result {
            Ok(()) => accepted += 1,
            Err(e) => failures.push(format!("{} r={r}: {e}", s.name())),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut detail = format!("{accepted}/100 accepted; {secs:.1}s");
    if let Some(first) = failures.first() {
        detail.push_str(&format!("; first failure {first}"));
    }
    Outcome::new(accepted == 100 && secs <= 600.0, detail)
}

fn soundness() -> Outcome {
    let zones = synth_corpus(SEED);
    let results = match run_soundness_smoke(&zones, 16, 64, 100, SEED) {
        Ok(results) => results,
        Err(e) => return Outcome::error(e),
    };
    let pass = results.iter().all(|r| r.trials == 100 && r.rejected >= 99);
    let parts: Vec<String> = results
        .iter()
        .map(|r| {
            let reasons: Vec<String> = r.reasons.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            format!("{} {}/{} [{}]", r.class, r.rejected, r.trials, reasons.join(" "))
        })
        .collect();
    Outcome::new(pass, parts.join("; "))
}

fn timings(cells: &[BenchCell], pick: impl Fn(&ReportRow) -> Option<f64>) -> BTreeMap<(String, u32), f64> {
    cells
        .iter()
        .map(|c| ((c.row.strategy.clone(), c.row.r), pick(&c.row).expect("bench fills timings")))
        .collect()
}

fn verification_invariance(cells: &[BenchCell]) -> Outcome {
    let verify = timings(cells, |r| r.verify_ms);
    let mut pass = true;
    let mut parts = Vec::new();
    for s in StrategyKind::all() {
        let name = s.name().to_string();
        let (lo, hi) = (verify[&(name.clone(), 8)], verify[&(name, 128)]);
        pass &= hi <= 2.0 * lo;
        parts.push(format!("{} {lo:.2}ms->{hi:.2}ms ({:.2}x)", s.name(), hi / lo));
    }
    Outcome::new(pass, parts.join("; "))
}

fn verification_overhead(cells: &[BenchCell]) -> Outcome {
    let verify = timings(cells, |r| r.verify_ms);
    let center = StrategyKind::CenterPoint.name().to_string();
    let sdf = StrategyKind::DistanceAware.name().to_string();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in BENCH_RESOLUTIONS {
        let ratio = verify[&(sdf.clone(), r)] / verify[&(center.clone(), r)];
        pass &= (1.0..=2.5).contains(&ratio);
        parts.push(format!("r={r} {ratio:.2}x"));
    }
    Outcome::new(pass, parts.join("; "))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn prover_scaling(cells: &[BenchCell]) -> Outcome {
    let prove = timings(cells, |r| r.prove_ms);
    let rs = [8u32, 16, 32, 64];
    let mut pass = true;
    let mut parts = Vec::new();
    for s in StrategyKind::all() {
        let t: Vec<f64> = rs.iter().map(|r| prove[&(s.name().to_string(), *r)]).collect();
        let increasing = t.windows(2).all(|w| w[1] > w[0]);
        let xs: Vec<f64> = rs.iter().map(|r| (*r as f64).ln()).collect();
        let ys: Vec<f64> = t.iter().map(|x| x.ln()).collect();
        let k = slope(&xs, &ys);
        pass &= increasing && k >= 1.0;
        let shown: Vec<String> = t.iter().map(|x| format!("{x:.1}")).collect();
        parts.push(format!("{} [{}]ms slope {k:.2}", s.name(), shown.join(", ")));
    }
    Outcome::new(pass, parts.join("; "))
}

fn orient(a: Point2D, b: Point2D, p: Point2D) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

fn winding_number(zone: &ZonePolygon, p: Point2D) -> i32 {
    let mut wn = 0;
    for ring in zone.rings() {
        for (a, b) in ring.edges() {
            let side = orient(a, b, p);
            if a.y <= p.y {
                if b.y > p.y && side > 0.0 {
                    wn += 1;
                }
            } else if b.y <= p.y && side < 0.0 {
                wn -= 1;
            }
        }
    }
    wn
}

fn edge_distance(zone: &ZonePolygon, p: Point2D) -> f64 {
    zone.rings()
        .flat_map(|ring| ring.edges())
        .map(|(a, b)| segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

fn random_polygon(rng: &mut Pcg64) -> ZonePolygon {
    loop {
        let n = rng.random_range(5..=40);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let (cx, cy) = (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let pts: Vec<(f64, f64)> = angles
            .iter()
            .map(|a| {
                let r = rng.random_range(1.0..30.0);
                (cx + r * a.cos(), cy + r * a.sin())
            })
            .collect();
        if let Ok(z) = ZonePolygon::simple("oracle", Category::Other, &pts) {
            return z;
        }
    }
}

fn geometry_oracles() -> Outcome {
    let mut rng = Pcg64::seed_from_u64(SEED);
    let (mut checked, mut winding_bad, mut sign_bad, mut lipschitz_bad) = (0usize, 0usize, 0usize, 0usize);
    for _ in 0..1000 {
        let zone = random_polygon(&mut rng);
        let b = zone.bbox().expanded(2.0);
        let draw = |rng: &mut Pcg64| Point2D::new(rng.random_range(b.xmin..b.xmax), rng.random_range(b.ymin..b.ymax));
        for _ in 0..100 {
            let (p, q) = (draw(&mut rng), draw(&mut rng));
            let dist = edge_distance(&zone, p);
            let inside = contains(&zone, &p);
            let sp = signed_distance(&zone, &p);
            if dist > 1e-9 {
                checked += 1;
                winding_bad += usize::from(inside != (winding_number(&zone, p) != 0));
                sign_bad += usize::from((sp < 0.0) != inside);
            }
            sign_bad += usize::from((sp == 0.0) != (dist <= 1e-9));
            let sq = signed_distance(&zone, &q);
            lipschitz_bad += usize::from((sp - sq).abs() > p.distance(&q) + 1e-9);
        }
    }

    let (mut convex_bad, mut corner_bad) = (0usize, 0usize);
    for _ in 0..10_000 {
        let d: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1e6..1e6));
        let (u, v) = (rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0));
        let x = interpolate_bilinear(d[0], d[1], d[2], d[3], u, v);
        let (lo, hi) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
        let slack = 1e-9 * hi.abs().max(lo.abs());
        convex_bad += usize::from(x < lo - slack || x > hi + slack);
        let corners = [(0.0, 0.0, d[0]), (1.0, 0.0, d[1]), (0.0, 1.0, d[2]), (1.0, 1.0, d[3])];
        corner_bad += corners
            .iter()
            .filter(|(cu, cv, want)| interpolate_bilinear(d[0], d[1], d[2], d[3], *cu, *cv) != *want)
            .count();
    }

    let pass = winding_bad + sign_bad + lipschitz_bad + convex_bad + corner_bad == 0 && checked > 99_000;
    Outcome::new(
        pass,
        format!(
            "{checked} interior/exterior points: winding mismatches {winding_bad}, sign {sign_bad}, lipschitz {lipschitz_bad}; \
             10000 tuples: convexity {convex_bad}, corners {corner_bad}"
        ),
    )
}

fn determinism() -> Outcome {
    let (zones, sample) = corpus_and_sample();
    let resolutions = [8, 16, 32];
    let csv = || {
        run_accuracy_sweep(&zones, &StrategyKind::all(), &resolutions, &sample).and_then(|rows| rows_to_csv(&rows))
    };
    let (a, b) = match (csv(), csv()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
    };
    let mut roots_equal = true;
    for s in StrategyKind::all() {
        for r in resolutions {
            let build = || GridSpec::new(zones.bbox(), r).and_then(|g| build_table(&zones, &g, s));
            match (build(), build()) {
                (Ok(x), Ok(y)) => roots_equal &= x.commitment_root == y.commitment_root,
                (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
            }
        }
    }
    Outcome::new(
        a == b && roots_equal,
        format!("csv {} bytes identical: {}; table roots identical: {roots_equal}", a.len(), a == b),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "accuracy ordering", accuracy_ordering()),
        (2, "resolution convergence", resolution_convergence()),
        (3, "distance-aware saturation", early_saturation()),
        (4, "proof completeness", completeness()),
        (5, "soundness smoke", soundness()),
    ];

    let (zones, sample) = corpus_and_sample();
    match run_proof_bench(&zones, &StrategyKind::all(), &BENCH_RESOLUTIONS, &sample, &BenchConfig::default()) {
        Ok(cells) => {
            results.push((6, "verification invariance", verification_invariance(&cells)));
            results.push((7, "verification overhead", verification_overhead(&cells)));
            results.push((8, "prover scaling", prover_scaling(&cells)));
        }
        Err(e) => {
            let msg = e.to_string();
            results.push((6, "verification invariance", Outcome::error(&msg)));
            results.push((7, "verification overhead", Outcome::error(&msg)));
            results.push((8, "prover scaling", Outcome::error(&msg)));
        }
    }

    results.push((9, "geometry oracles", geometry_oracles()));
    results.push((10, "determinism", determinism()));

    let mut failed = 0;
    for (k, name, outcome) in &results {
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {tag} {name}: {}", outcome.detail);
        failed += usize::from(!outcome.pass);
    }
    println!("{}/{} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
