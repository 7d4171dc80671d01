use landau_core::exact::{bkw, BkwParams};
use landau_core::integrator::{initial_state, run, DiagnosticsCollector, TimeConfig};
use landau_core::{build_kernel_tables, CollisionOperator, GridSpec, SolverError, SpectralField};

fn bkw_setup(p: usize) -> (GridSpec, SpectralField) {
    let grid = GridSpec::new(8.0, p, 0.0).unwrap();
    let params = BkwParams::default();
    let f0 = initial_state(&grid, |v| bkw(0.0, v, &params)).unwrap();
    (grid, f0)
}

fn evolve(grid: GridSpec, f0: &SpectralField, dt: f64, t_end: f64) -> SpectralField {
    let tables = build_kernel_tables(&grid).unwrap();
    let op = CollisionOperator::new(grid, &tables).unwrap();
    let time = TimeConfig::new(dt, t_end, 1000).unwrap();
    let mut sink = |_: usize, _: f64, _: &SpectralField| Ok(());
    run(f0, &op, &time, &mut sink).unwrap()
}

#[test]
fn zero_end_time_returns_projected_state() {
    let (grid, f0) = bkw_setup(8);
    let tables = build_kernel_tables(&grid).unwrap();
    let op = CollisionOperator::new(grid, &tables).unwrap();
    let time = TimeConfig::new(0.01, 0.0, 1).unwrap();
    let mut col = DiagnosticsCollector::new(None);
    let out = run(&f0, &op, &time, &mut col).unwrap();
    assert_eq!(out, f0.project());
    assert_eq!(col.records.len(), 1);
    assert_eq!(col.records[0].t, 0.0);
}

#[test]
fn step_halving_shows_fourth_order() {
    let (grid, f0) = bkw_setup(12);
    let t_end = 0.05;
    let a = evolve(grid, &f0, 0.01, t_end);
    let b = evolve(grid, &f0, 0.005, t_end);
    let c = evolve(grid, &f0, 0.0025, t_end);
    let ratio = a.l2_distance(&b).unwrap() / b.l2_distance(&c).unwrap();
    assert!(ratio >= 8.0 * 0.9, "ratio {ratio}");
}

#[test]
fn runs_are_bitwise_reproducible() {
    let (grid, f0) = bkw_setup(8);
    let a = evolve(grid, &f0, 0.01, 0.05);
    let b = evolve(grid, &f0, 0.01, 0.05);
    assert_eq!(a, b);
}

#[test]
fn oversized_step_reports_blow_up() {
    let (grid, f0) = bkw_setup(16);
    let tables = build_kernel_tables(&grid).unwrap();
    let op = CollisionOperator::new(grid, &tables).unwrap();
    let time = TimeConfig::new(1.0, 500.0, 1000).unwrap();
    let mut sink = |_: usize, _: f64, _: &SpectralField| Ok(());
    match run(&f0, &op, &time, &mut sink) {
        Err(SolverError::BlowUp {
            step,
            time,
            last_good,
        }) => {
            assert!(step >= 1 && time == step as f64 && last_good == time - 1.0);
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
}

#[test]
fn observer_errors_stop_the_run() {
    let (grid, f0) = bkw_setup(8);
    let tables = build_kernel_tables(&grid).unwrap();
    let op = CollisionOperator::new(grid, &tables).unwrap();
    let time = TimeConfig::new(0.01, 0.1, 1).unwrap();
    let mut calls = 0;
    let mut sink = |step: usize, _: f64, _: &SpectralField| {
        calls += 1;
        if step == 3 {
            Err(SolverError::Observer("disk full".into()))
        } else {
            Ok(())
        }
    };
    assert!(matches!(
        run(&f0, &op, &time, &mut sink),
        Err(SolverError::Observer(_))
    ));
    assert_eq!(calls, 4);
}
