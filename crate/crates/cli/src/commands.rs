use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use landau_core::diagnostics::{diagnose, DiagnosticsRecord};
use landau_core::exact::{bkw, coulomb_shell};
use landau_core::field::{psi_r, PhysicalField};
use landau_core::grid::modes;
use landau_core::integrator::{initial_state, run_with, TimeConfig};
use landau_core::kernel::{build_kernel_tables, DEFAULT_TOL};
use landau_core::{
    beta_coulomb, beta_quadrature, q_periodic_direct, q_periodic_fast, to_physical, to_spectral,
    BetaParams, CollisionOperator, GridSpec, KernelTables, RadialBeta, SolverError, SpectralField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{InitSpec, RunConfig};
use crate::error::{CliError, Result};
use crate::formats::{
    read_kernel_cache, read_snapshot, write_kernel_cache, write_snapshot, Snapshot,
};
use crate::output::{diagnostics_row, fmt_float, CsvFile, CONVERGENCE_HEADER, DIAGNOSTICS_HEADER};

/// Environment variable that overrides the configured thread count.
pub const THREADS_ENV: &str = "LANDAU_THREADS";

/// Relative tolerance of the fast-versus-direct collision comparison.
pub const ORACLE_TOL: f64 = 1e-12;

/// Size the global rayon pool. `LANDAU_THREADS` wins over `configured`;
/// 0 leaves the rayon default. Only the first call has an effect.
pub fn configure_threads(configured: usize) -> Result<usize> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Validation(format!(
                "{THREADS_ENV} must be a nonnegative integer, got '{v}'"
            ))
        })?,
        Err(_) => configured,
    };
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(rayon::current_num_threads())
}

/// Load tables from `cache` when it holds tables for `grid`; otherwise
/// build them and, if a cache path is given, write it.
pub fn load_tables(grid: &GridSpec, cache: Option<&Path>) -> Result<KernelTables> {
    if let Some(path) = cache {
        if path.exists() {
            let tables = read_kernel_cache(path)?;
            if tables.matches(grid) {
                return Ok(tables);
            }
            eprintln!(
                "kernel cache {} was built for another grid; rebuilding",
                path.display()
            );
        }
    }
    let tables = build_kernel_tables(grid)?;
    if let Some(path) = cache {
        write_kernel_cache(path, &tables)?;
    }
    Ok(tables)
}

/// `P_N(f0 psi_R)` for the configured initial datum.
pub fn initial_field(config: &RunConfig, grid: &GridSpec) -> Result<SpectralField> {
    match &config.init {
        InitSpec::Bkw => {
            let p = config.bkw;
            Ok(initial_state(grid, |v| bkw(0.0, v, &p))?)
        }
        InitSpec::Shell => {
            let p = config.shell;
            Ok(initial_state(grid, |v| coulomb_shell(v, &p))?)
        }
        InitSpec::File(path) => {
            let snap = read_snapshot(path)?;
            let same_width =
                (snap.half_width - grid.half_width).abs() <= 1e-12 * grid.half_width.abs();
            if snap.points != grid.points || !same_width {
                return Err(CliError::Validation(format!(
                    "snapshot {} has P = {}, L = {}; config has P = {}, L = {}",
                    path.display(),
                    snap.points,
                    snap.half_width,
                    grid.points,
                    grid.half_width
                )));
            }
            let mut phys = PhysicalField::from_values(*grid, grid.points, snap.values)?;
            let p = grid.points;
            for (j, x) in phys.values_mut().iter_mut().enumerate() {
                let v = [
                    grid.node(j / (p * p), p),
                    grid.node((j / p) % p, p),
                    grid.node(j % p, p),
                ];
                *x *= psi_r(v, grid);
            }
            Ok(to_spectral(&phys)?)
        }
    }
}

pub fn snapshot_of(state: &SpectralField, t: f64) -> Result<Snapshot> {
    let grid = state.grid();
    let phys = to_physical(state, grid.points)?;
    Ok(Snapshot {
        points: grid.points,
        half_width: grid.half_width,
        gamma: grid.gamma,
        t,
        values: phys.values().to_vec(),
    })
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<DiagnosticsRecord>,
    pub final_t: f64,
    pub wall: Duration,
    pub min_f: f64,
    pub state: SpectralField,
}

/// Build tables, project the initial state and integrate, writing
/// `diagnostics.csv` and any snapshots into `config.output_dir`.
pub fn simulate(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let started = Instant::now();
    let grid = config.grid()?;
    let time = config.time()?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let tables = load_tables(&grid, config.kernel_cache.as_deref())?;
    let op = CollisionOperator::new(grid, &tables)?;
    let initial = initial_field(config, &grid)?;

    let bkw_params = config.bkw;
    let bkw_exact = move |t: f64, v: [f64; 3]| bkw(t, v, &bkw_params);
    let exact: Option<&dyn Fn(f64, [f64; 3]) -> f64> = if config.has_exact_solution() {
        Some(&bkw_exact)
    } else {
        None
    };

    let mut csv = CsvFile::create(&dir.join("diagnostics.csv"), DIAGNOSTICS_HEADER)?;
    let mut records = Vec::new();
    let mut failure: Option<CliError> = None;
    let steps = time.steps();
    let mut observe = |step: usize, t: f64, state: &SpectralField| -> landau_core::Result<()> {
        let result = (|| -> Result<()> {
            if step % config.sample_every == 0 || step == steps {
                let record = diagnose(state, t, exact)?;
                csv.line(&diagnostics_row(&record))?;
                records.push(record);
            }
            if config.snapshot_every > 0 && step % config.snapshot_every == 0 {
                let path = dir.join(format!("snapshot_{step:06}.lsfd"));
                write_snapshot(&path, &snapshot_of(state, t)?)?;
            }
            Ok(())
        })();
        result.map_err(|e| {
            let msg = e.to_string();
            failure = Some(e);
            SolverError::Observer(msg)
        })
    };
    // Observe every step; sampling and snapshot cadences are applied above.
    let every_step = TimeConfig::new(time.dt, time.t_end, 1)?;
    let outcome = run_with(&initial, |f| op.rhs(f), &every_step, &mut observe);
    let state = match outcome {
        Ok(state) => state,
        Err(e) => return Err(failure.unwrap_or_else(|| e.into())),
    };
    let min_f = records.last().map_or(f64::NAN, |r| r.min_f);
    Ok(RunOutcome {
        final_t: time.time_at(steps),
        wall: started.elapsed(),
        min_f,
        records,
        state,
    })
}

pub fn cmd_run(config: &RunConfig) -> Result<()> {
    let out = simulate(config)?;
    println!(
        "done: t = {}, wall = {:.3} s, min_f = {}",
        out.final_t,
        out.wall.as_secs_f64(),
        fmt_float(out.min_f)
    );
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub points: usize,
    pub l_over_n: f64,
    pub max_e1: f64,
    pub max_e2: f64,
}

/// Parse a `P1,P2,...` list; every entry must be an even integer >= 4.
pub fn parse_grids(list: &str) -> Result<Vec<usize>> {
    let grids = list
        .split(',')
        .map(|s| {
            let s = s.trim();
            match s.parse::<usize>() {
                Ok(p) if p >= 4 && p % 2 == 0 => Ok(p),
                _ => Err(CliError::Validation(format!(
                    "grid size '{s}' must be an even integer >= 4"
                ))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    if grids.is_empty() {
        return Err(CliError::Validation("empty grid list".into()));
    }
    Ok(grids)
}

/// Run the BKW problem at every `P` in `grids` (diagnostics under
/// `output_dir/P<P>/`) and write `output_dir/convergence.csv`.
pub fn convergence(config: &RunConfig, grids: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if !config.has_exact_solution() {
        return Err(CliError::Validation(
            "convergence needs an exact solution: init = bkw with gamma = 0".into(),
        ));
    }
    if let Some(&p) = grids.iter().find(|&&p| p < 4 || p % 2 != 0) {
        return Err(CliError::Validation(format!(
            "grid size {p} must be an even integer >= 4"
        )));
    }
    config.validate()?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut csv = CsvFile::create(&dir.join("convergence.csv"), CONVERGENCE_HEADER)?;
    let mut rows = Vec::new();
    for &p in grids {
        let mut cfg = config.clone();
        cfg.points = p;
        cfg.output_dir = dir.join(format!("P{p}"));
        let out = simulate(&cfg)?;
        let max = |pick: fn((f64, f64)) -> f64| {
            out.records
                .iter()
                .filter_map(|r| r.errors.map(pick))
                .fold(0.0, f64::max)
        };
        let row = ConvergenceRow {
            points: p,
            l_over_n: config.half_width / (p / 2) as f64,
            max_e1: max(|e| e.0),
            max_e2: max(|e| e.1),
        };
        csv.line(&format!(
            "{},{},{},{}",
            row.points,
            fmt_float(row.l_over_n),
            fmt_float(row.max_e1),
            fmt_float(row.max_e2)
        ))?;
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    fn measured(name: &'static str, worst: f64, limit: f64, what: &str) -> Self {
        let status = if worst <= limit {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Check {
            name,
            status,
            detail: format!("{what} = {worst:.3e} (limit {limit:.1e})"),
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Check {
            name,
            status: CheckStatus::Skipped,
            detail: why.to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelReport {
    pub checks: Vec<Check>,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const M_RANGE: std::ops::RangeInclusive<i64> = -8..=8;

fn m_cube() -> impl Iterator<Item = [i64; 3]> {
    M_RANGE.flat_map(|a| M_RANGE.flat_map(move |b| M_RANGE.map(move |c| [a, b, c])))
}

fn neg(k: [i64; 3]) -> [i64; 3] {
    [-k[0], -k[1], -k[2]]
}

fn sq(k: [i64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}

/// Random real fields `P_N(u)` with `u` uniform in `[-1, 1]` at the nodes.
pub fn random_real_field(grid: &GridSpec, rng: &mut impl Rng) -> Result<SpectralField> {
    let p = grid.points;
    let values = (0..p * p * p)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    Ok(to_spectral(&PhysicalField::from_values(*grid, p, values)?)?)
}

/// Pairwise kernel for the direct collision sum, independent of `tables`.
pub fn pairwise_beta(grid: &GridSpec) -> Result<Box<dyn Fn([i64; 3], [i64; 3]) -> f64 + Sync>> {
    if grid.gamma == landau_core::kernel::COULOMB {
        Ok(Box::new(beta_coulomb))
    } else {
        let rb = RadialBeta::for_grid(grid, DEFAULT_TOL)?;
        Ok(Box::new(move |l, m| rb.eval(l, m)))
    }
}

/// Largest relative difference between the fast and direct collision sums
/// over `pairs` random real field pairs.
pub fn fast_vs_direct(
    grid: &GridSpec,
    tables: &KernelTables,
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    let beta = pairwise_beta(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let g = random_real_field(grid, &mut rng)?;
        let h = random_real_field(grid, &mut rng)?;
        let fast = q_periodic_fast(&g, &h, tables)?;
        let direct = q_periodic_direct(&g, &h, &beta, false)?;
        worst = worst.max(fast.l2_distance(&direct)? / direct.l2_norm());
    }
    Ok(worst)
}

/// Kernel invariant suite for `grid` with freshly built tables.
pub fn kernel_check(grid: &GridSpec) -> Result<KernelReport> {
    let tables = build_kernel_tables(grid)?;
    kernel_check_with_tables(grid, &tables)
}

/// Kernel invariant suite against the given (possibly tampered) tables.
pub fn kernel_check_with_tables(grid: &GridSpec, tables: &KernelTables) -> Result<KernelReport> {
    grid.validate()?;
    if grid.points > landau_core::collision::DIRECT_COST_GUARD {
        return Err(CliError::Validation(format!(
            "kernel-check needs P <= {}, got {}",
            landau_core::collision::DIRECT_COST_GUARD,
            grid.points
        )));
    }
    if !tables.matches(grid) {
        return Err(CliError::Validation(
            "kernel tables do not match the grid".into(),
        ));
    }
    let coulomb = grid.gamma == landau_core::kernel::COULOMB;
    let params = BetaParams::new(grid.gamma, grid.half_width)?;
    let beta = |l: [i64; 3], m: [i64; 3]| -> Result<f64> {
        if coulomb {
            Ok(beta_coulomb(l, m))
        } else {
            Ok(beta_quadrature(l, m, &params, DEFAULT_TOL)?)
        }
    };
    let mode_list: Vec<(usize, [i64; 3])> = modes(grid.points).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c53_4b54);
    let samples: Vec<([i64; 3], [i64; 3])> = (0..200)
        .map(|_| {
            let l = mode_list[rng.random_range(0..mode_list.len())].1;
            let m = [0; 3].map(|_: i64| rng.random_range(M_RANGE));
            (l, m)
        })
        .collect();
    let mut checks = Vec::new();

    // reconstruction of beta from the separable tables
    let probe: Vec<[i64; 3]> = if coulomb {
        m_cube().collect()
    } else {
        const AXIS: [i64; 4] = [-8, -3, 0, 5];
        AXIS.iter()
            .flat_map(|&a| {
                AXIS.iter()
                    .flat_map(move |&b| AXIS.iter().map(move |&c| [a, b, c]))
            })
            .collect()
    };
    let mut worst = 0.0f64;
    for &(idx, l) in &mode_list {
        for &m in &probe {
            let b = beta(l, m)?;
            worst = worst.max((tables.reconstruct(idx, m) - b).abs() / (1.0 + b.abs()));
        }
    }
    let limit = if coulomb { 1e-12 } else { 1e-8 };
    checks.push(Check::measured(
        "reconstruction",
        worst,
        limit,
        "max |A+B|m|^2+C:mm - beta|/(1+|beta|)",
    ));

    // beta(l, -l) = 0
    let mut worst = 0.0f64;
    for &(_, l) in &mode_list {
        worst = worst.max(beta(l, neg(l))?.abs());
    }
    checks.push(Check::measured(
        "mass_identity",
        worst,
        1e-13,
        "max |beta(l,-l)|",
    ));

    // parity
    let mut worst = 0.0f64;
    for &(l, m) in &samples {
        let b = beta(l, m)?;
        worst = worst.max((beta(neg(l), neg(m))? - b).abs() / (1.0 + b.abs()));
    }
    checks.push(Check::measured(
        "parity",
        worst,
        1e-14,
        "max |beta(-l,-m) - beta(l,m)|/(1+|beta|)",
    ));

    // bound and quadrature cross-check
    if coulomb {
        let mut worst = 0.0f64;
        for &(_, l) in mode_list.iter().filter(|(_, l)| *l != [0, 0, 0]) {
            for m in m_cube() {
                let bound = 16.0 * std::f64::consts::PI * (1.0 + sq(m) / sq(l));
                worst = worst.max(beta_coulomb(l, m).abs() / bound);
            }
        }
        checks.push(Check::measured(
            "bound",
            worst,
            1.0,
            "max |beta|/(16 pi (1+|m|^2/|l|^2))",
        ));

        let mut worst = 0.0f64;
        for &(l, m) in &samples {
            worst = worst
                .max((beta_quadrature(l, m, &params, DEFAULT_TOL)? - beta_coulomb(l, m)).abs());
        }
        checks.push(Check::measured(
            "quadrature",
            worst,
            1e-8,
            "max |beta_quad - beta_closed|",
        ));
    } else {
        checks.push(Check::skipped(
            "bound",
            "closed-form bound holds for gamma = -3 only",
        ));
        let mut worst = 0.0f64;
        for &(l, m) in &samples {
            let fine = beta_quadrature(l, m, &params, 1e-10)?;
            let coarse = beta_quadrature(l, m, &params, 1e-8)?;
            worst = worst.max((coarse - fine).abs() / (1.0 + fine.abs()));
        }
        checks.push(Check::measured(
            "quadrature",
            worst,
            QUADRATURE_SELF_TOL,
            "max |beta(tol 1e-8) - beta(tol 1e-10)|/(1+|beta|)",
        ));
    }

    let worst = fast_vs_direct(grid, tables, 20, 0x4c53_4644)?;
    checks.push(Check::measured(
        "fft_vs_direct",
        worst,
        ORACLE_TOL,
        "max relative L2 difference",
    ));
    Ok(KernelReport { checks })
}

/// Agreement required between quadrature at tolerances 1e-8 and 1e-10.
pub const QUADRATURE_SELF_TOL: f64 = 1e-7;

pub fn print_report(report: &KernelReport) {
    for c in &report.checks {
        let tag = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        println!("{tag} {}: {}", c.name, c.detail);
    }
}

#[derive(Debug, Clone)]
pub struct OracleReport {
    pub relative_error: f64,
    pub direct_norm: f64,
}

/// Compare `Q_#(F, F)` through the tables with the direct double sum, for
/// `F = P_N(f0 psi_R)` from `config`.
pub fn oracle_compare(config: &RunConfig) -> Result<OracleReport> {
    config.validate()?;
    let grid = config.grid()?;
    if grid.points > landau_core::collision::DIRECT_COST_GUARD {
        return Err(SolverError::CostGuard {
            points: grid.points,
            limit: landau_core::collision::DIRECT_COST_GUARD,
        }
        .into());
    }
    let tables = load_tables(&grid, config.kernel_cache.as_deref())?;
    let f = initial_field(config, &grid)?;
    let beta = pairwise_beta(&grid)?;
    let direct = q_periodic_direct(&f, &f, &beta, false)?;
    let fast = q_periodic_fast(&f, &f, &tables)?;
    let direct_norm = direct.l2_norm();
    Ok(OracleReport {
        relative_error: fast.l2_distance(&direct)? / direct_norm,
        direct_norm,
    })
}
