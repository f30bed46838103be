//! Scenario files, trajectory CSV and PGM snapshots produced from real runs.

use degenlog::evolve::run;
use degenlog::io::{
    decode_pgm, emit_scenario, emit_trajectory_csv, encode_pgm, parse_scenario, parse_scenario_with_overrides,
    read_trajectory_csv, CsvRecord, Pgm, CSV_HEADER,
};
use degenlog::scenarios::registry;

fn short_run(label: &str) -> (degenlog::scenarios::Scenario, degenlog::evolve::Trajectory) {
    let s = registry::lookup(label).unwrap();
    let s = parse_scenario_with_overrides(
        &emit_scenario(&s),
        &["time.t_end = 0.05".into(), "output.snapshot_times = [0.0, 0.05]".into()],
    )
    .unwrap();
    let tr = run(&s).unwrap();
    (s, tr)
}

#[test]
fn every_registry_scenario_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    for label in registry::LABELS {
        let s = registry::lookup(label).unwrap();
        let path = dir.path().join(format!("{label}.toml"));
        std::fs::write(&path, emit_scenario(&s)).unwrap();
        let back = parse_scenario(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, s, "{label}");
        assert_eq!(emit_scenario(&back), emit_scenario(&s), "{label}: canonical form is not a fixed point");
    }
}

#[test]
fn trajectory_csv_rereads_bit_for_bit() {
    let (_, tr) = short_run("trichotomy-high");
    let mut bytes = Vec::new();
    emit_trajectory_csv(&tr, &mut bytes).unwrap();
    let text = String::from_utf8(bytes.clone()).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert_eq!(text.lines().count(), tr.len() + 1);
    let records = read_trajectory_csv(bytes.as_slice()).unwrap();
    assert_eq!(records, CsvRecord::of_trajectory(&tr));
    let mut again = Vec::new();
    emit_trajectory_csv(&tr, &mut again).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn cap_column_switches_on_at_the_cap_time() {
    let s = registry::lookup("jumping-control").unwrap();
    let tr = run(&s).unwrap();
    let cap = tr.cap_hit.expect("control run reaches the cap");
    let mut bytes = Vec::new();
    emit_trajectory_csv(&tr, &mut bytes).unwrap();
    for rec in read_trajectory_csv(bytes.as_slice()).unwrap() {
        assert_eq!(rec.cap_hit, rec.t >= cap, "t = {}", rec.t);
    }
}

#[test]
fn snapshots_encode_and_decode() {
    let (_, tr) = short_run("rotating-slow");
    assert_eq!(tr.snapshots.len(), 2);
    let display_max = tr.snapshots.iter().map(|(_, f)| f.sup_norm()).fold(0.0, f64::max);
    for (_, field) in &tr.snapshots {
        let img = Pgm::from_field(field, display_max);
        let bytes = encode_pgm(&img);
        assert!(bytes.starts_with(format!("P5\n{} {}\n255\n", img.width, img.height).as_bytes()));
        assert_eq!(decode_pgm(&bytes).unwrap(), img);
    }
}
