use super::*;
use crate::discretize::{build_table, GridSpec, StrategyKind};
use crate::geometry::{contains, BoundingBox, Category, Point2D, ZonePolygon, ZoneSet};
use crate::stark::verify;
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde_json::json;

fn unit_frame() -> GeoFrame {
    // a ~111 m square of longitude/latitude near the equator
    GeoFrame {
        origin: (0.0, 0.0),
        bbox_lonlat: BoundingBox::new(0.0, 0.0, 0.001, 0.001).unwrap(),
    }
}

fn square(lon0: f64, lat0: f64, side: f64) -> serde_json::Value {
    json!([[
        [lon0, lat0],
        [lon0 + side, lat0],
        [lon0 + side, lat0 + side],
        [lon0, lat0 + side],
        [lon0, lat0]
    ]])
}

fn collection(features: Vec<serde_json::Value>) -> String {
    json!({ "type": "FeatureCollection", "features": features }).to_string()
}

#[test]
fn single_polygon_ingests_as_one_zone() {
    let text = collection(vec![json!({
        "type": "Feature",
        "properties": { "id": "sq", "category": "park" },
        "geometry": { "type": "Polygon", "coordinates": square(0.0002, 0.0002, 0.0005) },
    })]);
    let zones = parse_geojson(&text, Some(unit_frame())).unwrap();
    assert_eq!(zones.len(), 1);
    assert_eq!(zones.zones()[0].id, "sq");
    assert_eq!(zones.zones()[0].category, Category::Park);
    let side = 0.0005f64.to_radians() * crate::geometry::EARTH_RADIUS_M;
    assert!((zones.zones()[0].area() - side * side).abs() < 1e-6 * side * side);
}

#[test]
fn multipolygon_splits_into_parts() {
    let text = collection(vec![json!({
        "type": "Feature",
        "properties": { "id": "campus", "category": "university" },
        "geometry": {
            "type": "MultiPolygon",
            "coordinates": [square(0.0001, 0.0001, 0.0002), square(0.0006, 0.0006, 0.0002)],
        },
    })]);
    let zones = parse_geojson(&text, Some(unit_frame())).unwrap();
    assert_eq!(zones.ids(), vec!["campus-0", "campus-1"]);
    assert!(zones.zones().iter().all(|z| z.category == Category::Campus));
}

#[test]
fn features_are_clipped_to_the_region() {
    let text = collection(vec![
        json!({
            "type": "Feature",
            "properties": { "id": "edge" },
            "geometry": { "type": "Polygon", "coordinates": square(0.0008, 0.0008, 0.0004) },
        }),
        json!({
            "type": "Feature",
            "properties": { "id": "outside" },
            "geometry": { "type": "Polygon", "coordinates": square(0.002, 0.002, 0.0001) },
        }),
    ]);
    let zones = parse_geojson(&text, Some(unit_frame())).unwrap();
    assert_eq!(zones.ids(), vec!["edge"]);
    let cell = 0.0002f64.to_radians() * crate::geometry::EARTH_RADIUS_M;
    assert!((zones.zones()[0].area() - cell * cell).abs() < 1e-6 * cell * cell);
}

#[test]
fn self_intersecting_features_are_reported() {
    let bowtie = json!([[[0.0, 0.0], [0.0008, 0.0008], [0.0008, 0.0], [0.0, 0.0004], [0.0, 0.0]]]);
    let text = collection(vec![
        json!({ "type": "Feature", "properties": { "id": "ok" }, "geometry": { "type": "Polygon", "coordinates": square(0.0001, 0.0001, 0.0001) } }),
        json!({ "type": "Feature", "properties": { "id": "bad" }, "geometry": { "type": "Polygon", "coordinates": bowtie } }),
    ]);
    match parse_geojson(&text, Some(unit_frame())) {
        Err(HarnessError::InvalidFeatures(msgs)) => {
            assert_eq!(msgs.len(), 1);
            assert!(msgs[0].starts_with("feature 1"));
        }
        other => panic!("expected diagnostics, got {other:?}"),
    }
}

#[test]
fn malformed_documents_are_rejected() {
    let frame = Some(unit_frame());
    assert!(matches!(parse_geojson("{", frame), Err(HarnessError::Parse(_))));
    assert!(matches!(parse_geojson(r#"{"type":"Feature"}"#, frame), Err(HarnessError::Parse(_))));
    let empty = collection(vec![]);
    assert!(matches!(parse_geojson(&empty, frame), Err(HarnessError::EmptyZoneSet)));
    assert!(matches!(parse_geojson(&empty, None), Err(HarnessError::Parse(_))));
    let point = collection(vec![json!({ "type": "Feature", "geometry": { "type": "Point", "coordinates": [0, 0] } })]);
    assert!(matches!(parse_geojson(&point, frame), Err(HarnessError::InvalidFeatures(_))));
}

#[test]
fn corpus_shape() {
    let zones = synth_corpus(42);
    assert_eq!(zones.len(), 60);
    assert_eq!(zones.bbox(), corpus_bbox());
    let count = |c: Category| zones.zones().iter().filter(|z| z.category == c).count();
    assert_eq!(count(Category::Building), 30);
    assert_eq!(count(Category::Road), 20);
    assert_eq!(count(Category::Park) + count(Category::Campus), 10);
    for z in zones.zones() {
        let v = z.exterior().vertices();
        match z.category {
            Category::Building => {
                let b = z.bbox();
                for side in [b.width(), b.height()] {
                    assert!((BUILDING_SIDE_M.0..=BUILDING_SIDE_M.1).contains(&side));
                }
            }
            Category::Road => {
                let a = v[0].distance(&v[1]);
                let b = v[1].distance(&v[2]);
                let (width, length) = (a.min(b), a.max(b));
                assert!(width >= ROAD_WIDTH_M.0 - 1e-9 && width <= ROAD_WIDTH_M.1 + 1e-9);
                assert!(length >= ROAD_LENGTH_M.0 - 1e-9 && length <= ROAD_LENGTH_M.1 + 1e-9);
            }
            _ => {
                assert!((PARK_VERTICES.0..=PARK_VERTICES.1).contains(&v.len()));
                let b = z.bbox();
                assert!(b.width().max(b.height()) <= PARK_EXTENT_M.1);
            }
        }
    }
}

#[test]
fn corpus_is_deterministic() {
    let a = export_geojson(&synth_corpus(7), CORPUS_ORIGIN).unwrap();
    let b = export_geojson(&synth_corpus(7), CORPUS_ORIGIN).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, export_geojson(&synth_corpus(8), CORPUS_ORIGIN).unwrap());
}

#[test]
fn export_reimports_with_embedded_frame() {
    let zones = synth_corpus(42);
    let text = export_geojson(&zones, CORPUS_ORIGIN).unwrap();
    let back = parse_geojson(&text, None).unwrap();
    assert_eq!(back.len(), 60);
    assert_eq!(back.ids(), zones.ids());
    for (a, b) in zones.zones().iter().zip(back.zones()) {
        assert!((a.area() - b.area()).abs() < 1e-6 * a.area());
    }
    let bb = back.bbox();
    assert!(bb.xmin.abs() < 1e-6 && (bb.xmax - CORPUS_SIDE_M).abs() < 1e-6);
}

#[test]
fn zone_file_round_trip() {
    let zones = synth_corpus(3);
    let bytes = encode_zones(&zones);
    assert_eq!(&bytes[..4], ZONES_MAGIC);
    assert_eq!(decode_zones(&bytes).unwrap(), zones);
    assert!(decode_zones(&bytes[..bytes.len() - 3]).is_err());
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("z.bin");
    write_zones(&zones, &bin).unwrap();
    assert_eq!(load_zones(&bin).unwrap(), zones);
    let gj = dir.path().join("z.geojson");
    std::fs::write(&gj, export_geojson(&zones, CORPUS_ORIGIN).unwrap()).unwrap();
    assert_eq!(load_zones(&gj).unwrap().len(), zones.len());
}

#[test]
fn zone_file_keeps_holes() {
    let b = BoundingBox::new(0., 0., 10., 10.).unwrap();
    let outer = crate::geometry::Ring::new(
        [(1., 1.), (9., 1.), (9., 9.), (1., 9.)].map(Point2D::from).to_vec(),
    )
    .unwrap();
    let hole = crate::geometry::Ring::new([(3., 3.), (3., 6.), (6., 6.), (6., 3.)].map(Point2D::from).to_vec()).unwrap();
    let zone = ZonePolygon::new("donut", Category::Water, outer, vec![hole]).unwrap();
    let zones = ZoneSet::new(vec![zone], b).unwrap();
    let back = decode_zones(&encode_zones(&zones)).unwrap();
    assert_eq!(back, zones);
    assert!(!contains(&back.zones()[0], &Point2D::new(4.5, 4.5)));
}

#[test]
fn sample_is_seeded_and_inside() {
    let b = corpus_bbox();
    let a = QuerySample::draw(&b, 4000, 42);
    assert_eq!(a, QuerySample::draw(&b, 4000, 42));
    assert_ne!(a.points, QuerySample::draw(&b, 4000, 43).points);
    assert!(a.points.iter().all(|p| b.contains(p)));
    // uniform: each quadrant holds about a quarter
    let left = a.points.iter().filter(|p| p.x < 1000.0).count();
    assert!((1800..2200).contains(&left));
}

#[test]
fn query_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    let recs = vec![
        QueryRecord { x: 1.5, y: 2.25, zone: "a".into() },
        QueryRecord { x: 0.0, y: 1e3, zone: "road-03".into() },
    ];
    write_queries(&path, &recs).unwrap();
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("x,y,zone\n"));
    assert_eq!(read_queries(&path).unwrap(), recs);
}

#[test]
fn whole_box_zone_is_always_exact() {
    let b = BoundingBox::new(0., 0., 100., 100.).unwrap();
    let zones = ZoneSet::new(vec![ZonePolygon::rect("all", Category::Campus, &b)], b).unwrap();
    let sample = QuerySample::draw(&b, 500, 1);
    let rows = run_accuracy_sweep(&zones, &StrategyKind::all(), &SWEEP_RESOLUTIONS, &sample).unwrap();
    assert_eq!(rows.len(), 27);
    assert!(rows.iter().all(|r| r.accuracy == Some(1.0)));
}

#[test]
fn sweep_rows_are_ordered_and_repeatable() {
    let zones = synth_corpus(5);
    let sample = QuerySample::draw(&zones.bbox(), 300, 2);
    let strategies = [StrategyKind::DistanceAware, StrategyKind::CenterPoint];
    let a = run_accuracy_sweep(&zones, &strategies, &[16, 4], &sample).unwrap();
    let order: Vec<(String, u32)> = a.iter().map(|r| (r.strategy.clone(), r.r)).collect();
    assert_eq!(
        order,
        vec![("center".into(), 4), ("center".into(), 16), ("sdf".into(), 4), ("sdf".into(), 16)]
    );
    let b = run_accuracy_sweep(&zones, &strategies, &[4, 16], &sample).unwrap();
    assert_eq!(rows_to_csv(&a).unwrap(), rows_to_csv(&b).unwrap());
}

fn sample_rows() -> Vec<ReportRow> {
    let mut rng = Pcg64::seed_from_u64(9);
    let mut rows = Vec::new();
    for s in [StrategyKind::DistanceAware, StrategyKind::CenterPoint] {
        for r in [32, 8, 16] {
            let mut row = ReportRow::new(&s, r);
            row.accuracy = Some(rng.random());
            if r != 16 {
                row.prove_ms = Some(rng.random_range(1.0..100.0));
                row.verify_ms = Some(rng.random_range(0.1..5.0));
                row.proof_bytes = Some(rng.random_range(1000..100_000));
                row.trace_rows = Some(64);
            }
            rows.push(row);
        }
    }
    rows
}

#[test]
fn report_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("report.csv");
    let rows = sample_rows();
    let json_path = emit_report(&rows, &csv_path).unwrap();
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("strategy,r,accuracy,prove_ms,verify_ms,proof_bytes,trace_rows"));
    assert_eq!(lines.count(), 6);
    let mut expected = rows.clone();
    sort_rows(&mut expected);
    let mut back = rows_from_csv(text.as_bytes()).unwrap();
    for (b, e) in back.iter_mut().zip(&expected) {
        b.timestamp_ms = e.timestamp_ms;
    }
    assert_eq!(back, expected);
    assert_eq!(back[0].strategy, "center");
    assert_eq!((back[1].r, back[1].prove_ms), (16, None));

    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(json_path).unwrap()).unwrap();
    let json_rows = json["rows"].as_array().unwrap();
    assert_eq!(json_rows.len(), 6);
    assert_eq!(json_rows[0]["strategy"], "center");
    assert!(json_rows[0]["timestamp_ms"].as_u64().unwrap() > 0);
}

#[test]
fn empty_report_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("empty.csv");
    assert!(matches!(emit_report(&[], &csv_path), Err(HarnessError::EmptyReport)));
    assert!(!csv_path.exists());
    assert!(!csv_path.with_extension("json").exists());
}

#[test]
fn bench_cells_verify_and_serialize() {
    let zones = synth_corpus(11);
    let sample = QuerySample::draw(&zones.bbox(), 200, 3);
    let bench = BenchConfig { batch: 16, warmup: 0, runs: 2 };
    let cells = run_proof_bench(&zones, &StrategyKind::all(), &[8, 16], &sample, &bench).unwrap();
    assert_eq!(cells.len(), 6);
    for c in &cells {
        assert_eq!(c.prove_runs_ms.len(), 2);
        assert_eq!(c.row.trace_rows, Some(16));
        assert!(c.row.prove_ms.unwrap() > 0.0 && c.row.verify_ms.unwrap() > 0.0);
        let bytes = crate::stark::encode_proof(&c.proof);
        assert_eq!(c.row.proof_bytes, Some(bytes.len()));
        verify(&crate::stark::decode_proof(&bytes).unwrap()).unwrap();
    }
    assert!(run_proof_bench(&zones, &[StrategyKind::CenterPoint], &[12], &sample, &bench).is_err());
}

#[test]
fn query_batch_cycles_zones() {
    let zones = synth_corpus(1);
    let sample = QuerySample::draw(&zones.bbox(), 100, 1);
    let q = query_batch(&sample, zones.len(), 64);
    assert_eq!(q.len(), 64);
    assert_eq!(q[61].zone, 1);
    assert_eq!(q[5].point, sample.points[5]);
}

#[test]
fn every_mutation_class_is_caught() {
    let zones = synth_corpus(13);
    let results = run_soundness_smoke(&zones, 8, 16, 9, 4).unwrap();
    assert_eq!(results.len(), 5);
    for r in &results {
        assert_eq!(r.trials, 9);
        assert_eq!(r.rejected, 9, "{}: {:?}", r.class, r.reasons);
    }
    let code = |c: MutationClass| results.iter().find(|r| r.class == c).unwrap().reasons.keys().cloned().collect::<Vec<_>>();
    assert_eq!(code(MutationClass::OutputFlip), vec!["OOD_MISMATCH"]);
    assert_eq!(code(MutationClass::PayloadSwap), vec!["BAD_LOOKUP_PATH"]);
    assert_eq!(code(MutationClass::TraceCellPerturbation), vec!["BAD_TRACE_OPENING"]);
    assert_eq!(code(MutationClass::FriLayerTamper), vec!["FRI_FOLD_MISMATCH"]);
    assert_eq!(code(MutationClass::OodValueTamper), vec!["OOD_MISMATCH"]);
}

#[test]
fn mutation_of_table_tree_uses_genuine_paths() {
    let zones = synth_corpus(2);
    let bundle = build_table(&zones, &GridSpec::new(zones.bbox(), 8).unwrap(), StrategyKind::CenterPoint).unwrap();
    let tree = bundle.table.commit_tree().unwrap();
    let sample = QuerySample::draw(&zones.bbox(), 8, 1);
    let queries = query_batch(&sample, zones.len(), 8);
    let cfg = crate::stark::AirConfig::new(bundle.strategy, 8, 8);
    let (trace, st) = crate::stark::build_trace(&queries, &bundle, &cfg).unwrap();
    let proof = crate::stark::prove(&trace, &st, &cfg).unwrap();
    let mut rng = Pcg64::seed_from_u64(0);
    let bad = mutate(&proof, MutationClass::PayloadSwap, &tree, &mut rng);
    let changed: Vec<_> = bad
        .statement
        .rows
        .iter()
        .zip(&proof.statement.rows)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.openings[0].clone())
        .collect();
    assert_eq!(changed.len(), 1);
    assert!(changed[0].verify(&bundle.commitment_root));
}
