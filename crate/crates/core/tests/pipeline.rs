mod common;

use std::fs;

use locc_core::convertibility::Observable;
use locc_core::pipeline::{self, build_report, cache_path, run_sweep, solve_point, SweepConfig};
use locc_core::{Direction, Error};

fn small(sizes: Vec<usize>, h_start: f64, h_end: f64, h_step: f64) -> SweepConfig {
    SweepConfig { sizes, h_start, h_end, h_step, workers: 1, ..SweepConfig::default() }
}

#[test]
fn warm_rerun_uses_cache_only_and_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig { cache_dir: Some(dir.path().to_owned()), ..small(vec![4, 6], 0.8, 1.0, 0.1) };
    let cold = run_sweep(&cfg).unwrap();
    assert_eq!((cold.solved, cold.cache_hits, cold.failures.len()), (6, 0, 0));
    assert!(cache_path(dir.path(), 6, 0.9).is_file());

    let warm = run_sweep(&cfg).unwrap();
    assert_eq!((warm.solved, warm.cache_hits), (0, 6));
    assert_eq!(cold.records, warm.records);
    for (a, b) in cold.records.iter().zip(&warm.records) {
        assert_eq!(serde_json::to_string(a).unwrap(), serde_json::to_string(b).unwrap());
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
    }
}

#[test]
fn cached_record_round_trips_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig { cache_dir: Some(dir.path().to_owned()), ..small(vec![8], 1.1, 1.2, 0.1) };
    let out = run_sweep(&cfg).unwrap();
    let text = fs::read_to_string(cache_path(dir.path(), 8, 1.1)).unwrap();
    let back: pipeline::SweepRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(back, out.records[0]);
    assert!(back.lambdas.iter().zip(&out.records[0].lambdas).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn stale_and_corrupt_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig { cache_dir: Some(dir.path().to_owned()), ..small(vec![4], 0.5, 0.6, 0.1) };
    run_sweep(&cfg).unwrap();
    fs::write(cache_path(dir.path(), 4, 0.5), b"{ not json").unwrap();
    let out = run_sweep(&cfg).unwrap();
    assert_eq!((out.solved, out.cache_hits), (1, 1));

    let mut looser = cfg.clone();
    looser.solver.tolerance = 1e-10;
    let out = run_sweep(&looser).unwrap();
    assert_eq!((out.solved, out.cache_hits), (2, 0));

    let mut other_block = cfg.clone();
    other_block.majorization_block = vec![1, 2];
    assert_eq!(run_sweep(&other_block).unwrap().cache_hits, 0);
}

#[test]
fn unwritable_cache_is_a_configuration_error() {
    let file = tempfile::NamedTempFile::new().unwrap();
    let cfg = SweepConfig { cache_dir: Some(file.path().join("below-a-file")), ..small(vec![4], 0.5, 0.6, 0.1) };
    assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
}

#[test]
fn worker_count_does_not_change_results() {
    let one = small(vec![4, 6, 8], 0.8, 1.6, 0.1);
    let three = SweepConfig { workers: 3, ..one.clone() };
    let a = run_sweep(&one).unwrap();
    let b = run_sweep(&three).unwrap();
    assert_eq!(a.records, b.records);
    let (ra, rb) = (build_report(&a.records, &one).unwrap(), build_report(&b.records, &three).unwrap());
    assert_eq!(ra, rb);
    assert_eq!(serde_json::to_string(&ra).unwrap(), serde_json::to_string(&rb).unwrap());
}

#[test]
fn records_match_full_space_diagonalization() {
    let cfg = SweepConfig::default();
    for &(n, h) in &[(4usize, 0.5), (4, 1.0), (4, 2.5), (6, 1.3)] {
        let rec = solve_point(&cfg, n, h).unwrap();
        let (vals, vecs) = common::jacobi(&common::full_hamiltonian(n, h));
        assert!((rec.energy - vals[0]).abs() < 1e-10 * vals[0].abs(), "N={n} h={h}: {} vs {}", rec.energy, vals[0]);
        let lam = common::rdm_spectrum(&vecs[0], n, &[0, 1]);
        for (a, b) in rec.lambdas.iter().zip(&lam) {
            assert!((a - b).abs() < 1e-10, "N={n} h={h}: {:?} vs {lam:?}", rec.lambdas);
        }
        let half: Vec<usize> = (0..n / 2).collect();
        let wide = common::rdm_spectrum(&vecs[0], n, &half);
        let s_vn: f64 = -wide.iter().filter(|&&x| x > 1e-12).map(|x| x * x.log2()).sum::<f64>();
        assert!((rec.renyi.s_vn - s_vn).abs() < 1e-9);
    }
}

#[test]
fn missing_points_are_reported() {
    let cfg = small(vec![4, 6], 0.5, 0.9, 0.1);
    let mut out = run_sweep(&cfg).unwrap();
    let dropped = out.records.remove(7);
    match build_report(&out.records, &cfg) {
        Err(Error::Coverage { missing }) => assert_eq!(missing, vec![(dropped.n_sites, dropped.h)]),
        other => panic!("expected coverage error, got {other:?}"),
    }
}

#[test]
fn report_minima_fits_and_files() {
    let cfg = small(vec![4, 6, 8], 0.8, 1.8, 0.05);
    let out = run_sweep(&cfg).unwrap();
    let report = build_report(&out.records, &cfg).unwrap();
    for size in &report.sizes {
        let m2 = size.minimum_f2.as_ref().expect("f2 minimum in range");
        let m3 = size.minimum_f3.as_ref().expect("f3 minimum in range");
        assert_eq!((m2.observable, m3.observable), (Observable::F2, Observable::F3));
        assert!(m2.h_min > m3.h_min && m3.h_min > 0.9);
        let boundary = size.regions.locc_boundary.unwrap();
        assert!((boundary - m2.h_min.max(m3.h_min)).abs() <= cfg.h_step + 1e-12);
        assert!(size.steps.iter().all(|s| (s.h_hi - s.h_lo - cfg.h_step).abs() < 1e-9));
        assert_eq!(size.steps.last().unwrap().locc.direction, Direction::LowerToHigher);
    }
    let fit = report.fit_f2.as_ref().unwrap();
    assert_eq!(report.h_c, Some(fit.c));
    assert!(fit.a > 0.0 && report.fit_f3.as_ref().unwrap().a < 0.0);

    let dir = tempfile::tempdir().unwrap();
    pipeline::write_all(dir.path(), &out.records, &report).unwrap();
    let read = |name: &str| fs::read_to_string(dir.path().join(name)).unwrap();
    let spectra = read("spectra.csv");
    assert_eq!(spectra.lines().next().unwrap(), "n_sites,h,energy,lam1,lam2,lam3,lam4");
    assert_eq!(spectra.lines().count(), 1 + out.records.len());
    let row: Vec<f64> = spectra.lines().nth(1).unwrap().split(',').map(|t| t.parse().unwrap()).collect();
    assert_eq!(row[2].to_bits(), out.records[0].energy.to_bits());

    let renyi = read("renyi.csv");
    assert_eq!(renyi.lines().next().unwrap(), "n_sites,h,block_size,alpha,entropy");
    for alpha in ["0", "1", "inf"] {
        assert_eq!(renyi.lines().filter(|l| l.split(',').nth(3) == Some(alpha)).count(), out.records.len());
    }
    let verdicts = read("verdicts.csv");
    assert_eq!(verdicts.lines().count(), 1 + 3 * 20);
    assert!(verdicts.lines().skip(1).all(|l| l.split(',').skip(3).all(|t| t.parse::<Direction>().is_ok())));
    assert_eq!(read("minima.csv").lines().count(), 1 + 6);

    let fits: Vec<pipeline::FitSummary> = serde_json::from_str(&read("fit.json")).unwrap();
    assert_eq!(fits.len(), 2);
    assert_eq!(fits[0].observable, Some(Observable::F2));
    assert_eq!((fits[0].c.to_bits(), fits[0].n_points), (fit.c.to_bits(), 3));
    let back: pipeline::ReportBundle = serde_json::from_str(&read("report.json")).unwrap();
    assert_eq!(back, report);
}

#[test]
fn invalid_configs_are_rejected_before_solving() {
    for cfg in [small(vec![3], 0.5, 1.0, 0.1), small(vec![4], 1.0, 0.5, 0.1), small(vec![4], 0.5, 1.0, -0.1)] {
        assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
    }
}

#[test]
fn config_round_trips_through_toml() {
    let cfg = SweepConfig { cache_dir: Some("/tmp/x".into()), ..small(vec![6, 8], 0.7, 1.3, 0.03) };
    let text = toml::to_string(&cfg).unwrap();
    assert_eq!(toml::from_str::<SweepConfig>(&text).unwrap(), cfg);
    let partial: SweepConfig = toml::from_str("sizes = [10]\nh_step = 0.05\n").unwrap();
    assert_eq!((partial.sizes, partial.h_step, partial.h_start), (vec![10], 0.05, 0.5));
    assert!(toml::from_str::<SweepConfig>("bogus = 1\n").is_err());
}
