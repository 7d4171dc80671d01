//! Fixed-step classical RK4 and the simulation loop.

use crate::collision::CollisionOperator;
use crate::diagnostics::{diagnose, DiagnosticsRecord, ExactSolution};
use crate::error::{Result, SolverError};
use crate::field::{psi_r, to_spectral, PhysicalField, SpectralField};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between diagnostic samples.
    pub sample_every: usize,
}

impl TimeConfig {
    pub fn new(dt: f64, t_end: f64, sample_every: usize) -> Result<Self> {
        let c = Self {
            dt,
            t_end,
            sample_every,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        if self.sample_every < 1 {
            return Err(SolverError::InvalidParameter(
                "sample_every must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps; the last one is shortened to land on `t_end`.
    pub fn steps(&self) -> usize {
        if self.t_end == 0.0 {
            0
        } else {
            ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize
        }
    }

    /// Time after `step` steps.
    pub fn time_at(&self, step: usize) -> f64 {
        if step >= self.steps() {
            self.t_end
        } else {
            step as f64 * self.dt
        }
    }
}

/// Vector-space operations needed by the RK4 update.
pub trait OdeState: Clone {
    /// `self += a * x`.
    fn axpy(&mut self, a: f64, x: &Self);
    fn all_finite(&self) -> bool;
}

impl OdeState for SpectralField {
    fn axpy(&mut self, a: f64, x: &Self) {
        SpectralField::axpy(self, a, x);
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for f64 {
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

/// One classical RK4 step of `y' = rhs(y)`.
pub fn rk4_step<S: OdeState>(y: &S, dt: f64, mut rhs: impl FnMut(&S) -> Result<S>) -> Result<S> {
    let checked = |stage: usize, k: S| {
        if k.all_finite() {
            Ok(k)
        } else {
            Err(SolverError::NonFinite { stage })
        }
    };
    let k1 = checked(1, rhs(y)?)?;
    let mut tmp = y.clone();
    tmp.axpy(0.5 * dt, &k1);
    let k2 = checked(2, rhs(&tmp)?)?;
    let mut tmp = y.clone();
    tmp.axpy(0.5 * dt, &k2);
    let k3 = checked(3, rhs(&tmp)?)?;
    let mut tmp = y.clone();
    tmp.axpy(dt, &k3);
    let k4 = checked(4, rhs(&tmp)?)?;

    let mut out = y.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    checked(5, out)
}

/// Receives the state at sample steps.
pub trait Observer {
    fn observe(&mut self, step: usize, t: f64, state: &SpectralField) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(usize, f64, &SpectralField) -> Result<()>,
{
    fn observe(&mut self, step: usize, t: f64, state: &SpectralField) -> Result<()> {
        self(step, t, state)
    }
}

/// Collects a [`DiagnosticsRecord`] at every observed step.
pub struct DiagnosticsCollector<'a> {
    exact: Option<ExactSolution<'a>>,
    pub records: Vec<DiagnosticsRecord>,
}

impl<'a> DiagnosticsCollector<'a> {
    pub fn new(exact: Option<ExactSolution<'a>>) -> Self {
        Self {
            exact,
            records: Vec::new(),
        }
    }
}

impl Observer for DiagnosticsCollector<'_> {
    fn observe(&mut self, _step: usize, t: f64, state: &SpectralField) -> Result<()> {
        self.records.push(diagnose(state, t, self.exact)?);
        Ok(())
    }
}

/// `P_N(f0 psi_R 1_{D_L})`, sampled on the oversampled collocation grid.
pub fn initial_state(grid: &GridSpec, f0: impl Fn([f64; 3]) -> f64) -> Result<SpectralField> {
    grid.validate()?;
    let size = grid.points * grid.oversample;
    let phys = PhysicalField::from_fn(*grid, size, |v| f0(v) * psi_r(v, grid));
    to_spectral(&phys)
}

/// Integrate `rhs` from `initial` to `time.t_end`, calling `observer` at
/// step 0, every `sample_every` steps and at the final step.
pub fn run_with(
    initial: &SpectralField,
    mut rhs: impl FnMut(&SpectralField) -> Result<SpectralField>,
    time: &TimeConfig,
    observer: &mut dyn Observer,
) -> Result<SpectralField> {
    time.validate()?;
    let steps = time.steps();
    let mut state = initial.project();
    observer.observe(0, 0.0, &state)?;
    for step in 1..=steps {
        let t_prev = time.time_at(step - 1);
        let t = time.time_at(step);
        state = rk4_step(&state, t - t_prev, &mut rhs).map_err(|e| match e {
            SolverError::NonFinite { .. } => SolverError::BlowUp {
                step,
                time: t,
                last_good: t_prev,
            },
            other => other,
        })?;
        if step % time.sample_every == 0 || step == steps {
            observer.observe(step, t, &state)?;
        }
    }
    Ok(state)
}

/// Evolve with the scheme right-hand side of `op`.
pub fn run(
    initial: &SpectralField,
    op: &CollisionOperator<'_>,
    time: &TimeConfig,
    observer: &mut dyn Observer,
) -> Result<SpectralField> {
    run_with(initial, |f| op.rhs(f), time, observer)
}
