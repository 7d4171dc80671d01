//! Macroscopic observables and error norms on the collocation grid.
//!
//! All integrals use the rectangle rule on the uniform grid, which is
//! spectrally accurate for smooth periodic integrands.

use std::f64::consts::PI;

use crate::error::{Result, SolverError};
use crate::field::{to_physical, to_spectral, PhysicalField, SpectralField};

/// Cells with `f <= POSITIVITY_FLOOR` are excluded from logarithmic and
/// Fisher integrands.
pub const POSITIVITY_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub mass: f64,
    pub momentum: [f64; 3],
    /// `\int |v|^2 f`.
    pub energy: f64,
    pub bulk_velocity: [f64; 3],
    pub temperature: f64,
    /// `\int |v|^4 f`.
    pub m4: f64,
}

/// Rectangle-rule sum of `f * weight`. Nodes on the `v_i = -L` faces stand
/// for both `-L` and `+L`, so the weight is averaged over those images; this
/// keeps odd moments of symmetric data at zero.
fn weighted_sum(f: &PhysicalField, weight: impl Fn([f64; 3]) -> f64) -> f64 {
    let l = f.grid().half_width;
    let mut sum = 0.0;
    for (v, x) in f.points() {
        let on_face = v.map(|c| c == -l);
        let w = if on_face.iter().any(|&b| b) {
            let mut acc = 0.0;
            let mut count = 0.0;
            for mask in 0..8u8 {
                if (0..3).any(|i| mask & (1 << i) != 0 && !on_face[i]) {
                    continue;
                }
                let image = std::array::from_fn(|i| if mask & (1 << i) != 0 { l } else { v[i] });
                acc += weight(image);
                count += 1.0;
            }
            acc / count
        } else {
            weight(v)
        };
        sum += x * w;
    }
    sum * f.cell_volume()
}

pub fn moments(f: &PhysicalField) -> MomentSet {
    let norm2 = |v: [f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let mass = f.values().iter().sum::<f64>() * f.cell_volume();
    let momentum: [f64; 3] = std::array::from_fn(|i| weighted_sum(f, |v| v[i]));
    let energy = weighted_sum(f, norm2);
    let m4 = weighted_sum(f, |v| norm2(v) * norm2(v));
    let (bulk_velocity, temperature) = if mass > 0.0 {
        let u = momentum.map(|x| x / mass);
        let spread = weighted_sum(f, |v| norm2([v[0] - u[0], v[1] - u[1], v[2] - u[2]]));
        (u, spread / (3.0 * mass))
    } else {
        ([0.0; 3], 0.0)
    };
    MomentSet {
        mass,
        momentum,
        energy,
        bulk_velocity,
        temperature,
        m4,
    }
}

/// `mu(v) = rho (2 pi T)^{-3/2} exp(-|v - u|^2 / (2T))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maxwellian {
    pub density: f64,
    pub velocity: [f64; 3],
    pub temperature: f64,
}

impl Maxwellian {
    pub fn eval(&self, v: [f64; 3]) -> f64 {
        let d = [
            v[0] - self.velocity[0],
            v[1] - self.velocity[1],
            v[2] - self.velocity[2],
        ];
        let d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        self.density
            * (2.0 * PI * self.temperature).powf(-1.5)
            * (-d2 / (2.0 * self.temperature)).exp()
    }
}

/// Maxwellian with the mass, bulk velocity and temperature of `m`.
pub fn maxwellian_of(m: &MomentSet) -> Result<Maxwellian> {
    if !(m.mass > 0.0 && m.temperature > 0.0 && m.mass.is_finite() && m.temperature.is_finite()) {
        return Err(SolverError::Degenerate(format!(
            "no associated Maxwellian for mass {} and temperature {}",
            m.mass, m.temperature
        )));
    }
    Ok(Maxwellian {
        density: m.mass,
        velocity: m.bulk_velocity,
        temperature: m.temperature,
    })
}

/// `\int f log f` over cells with `f > POSITIVITY_FLOOR`.
pub fn entropy(f: &PhysicalField) -> f64 {
    let sum: f64 = f
        .values()
        .iter()
        .filter(|&&x| x > POSITIVITY_FLOOR)
        .map(|&x| x * x.ln())
        .sum();
    sum * f.cell_volume()
}

/// `\int (f log(f / mu) - f + mu)`; masked cells contribute `mu`.
pub fn relative_entropy(f: &PhysicalField, mu: impl Fn([f64; 3]) -> f64) -> f64 {
    let mut sum = 0.0;
    for (v, x) in f.points() {
        let m = mu(v);
        if x > POSITIVITY_FLOOR {
            sum += x * (x / m).ln() - x + m;
        } else {
            sum += m;
        }
    }
    sum * f.cell_volume()
}

/// `\int |grad f|^2 / f` with spectral gradients, over cells with
/// `f > POSITIVITY_FLOOR`.
pub fn fisher(f: &SpectralField) -> Result<f64> {
    let p = f.grid().points;
    let phys = to_physical(f, p)?;
    let grads = (0..3)
        .map(|axis| to_physical(&f.derivative(axis), p))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = 0.0;
    for (i, &x) in phys.values().iter().enumerate() {
        if x > POSITIVITY_FLOOR {
            let g2: f64 = grads.iter().map(|g| g.values()[i] * g.values()[i]).sum();
            sum += g2 / x;
        }
    }
    Ok(sum * phys.cell_volume())
}

/// Unnormalized sums `e1 = sum_i |e_i|`, `e2 = (sum_i e_i^2)^{1/2}` of the
/// pointwise error against `exact(t, v)`.
pub fn error_norms(f: &PhysicalField, exact: impl Fn(f64, [f64; 3]) -> f64, t: f64) -> (f64, f64) {
    let mut e1 = 0.0;
    let mut e2 = 0.0;
    for (v, x) in f.points() {
        let e = (exact(t, v) - x).abs();
        e1 += e;
        e2 += e * e;
    }
    (e1, e2.sqrt())
}

/// `\int max(-f, 0)`.
pub fn negative_mass(f: &PhysicalField) -> f64 {
    f.values().iter().map(|&x| (-x).max(0.0)).sum::<f64>() * f.cell_volume()
}

/// Physical-space `L^2` distance to `mu`.
pub fn l2_distance(f: &PhysicalField, mu: impl Fn([f64; 3]) -> f64) -> f64 {
    let s: f64 = f.points().map(|(v, x)| (x - mu(v)).powi(2)).sum();
    (s * f.cell_volume()).sqrt()
}

/// Parseval-based `L^2` distance to `mu`, with `mu` sampled on the `P` grid.
pub fn l2_distance_spectral(f: &SpectralField, mu: impl Fn([f64; 3]) -> f64) -> Result<f64> {
    let grid = *f.grid();
    let mu_hat = to_spectral(&PhysicalField::from_fn(grid, grid.points, mu))?;
    f.l2_distance(&mu_hat)
}

/// One time sample of every observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub moments: MomentSet,
    pub entropy: f64,
    pub relative_entropy: f64,
    pub fisher: f64,
    pub l2_to_maxwellian: f64,
    pub min_f: f64,
    pub negative_mass: f64,
    /// `(e1, e2)` when an exact solution is configured.
    pub errors: Option<(f64, f64)>,
}

/// Exact solution `(t, v) -> f(t, v)` used for error norms.
pub type ExactSolution<'a> = &'a dyn Fn(f64, [f64; 3]) -> f64;

/// Evaluate all diagnostics of `f` at time `t` on the `P` grid.
pub fn diagnose(
    f: &SpectralField,
    t: f64,
    exact: Option<ExactSolution<'_>>,
) -> Result<DiagnosticsRecord> {
    let p = f.grid().points;
    let phys = to_physical(f, p)?;
    let m = moments(&phys);
    let mu = maxwellian_of(&m)?;
    let mu_fn = |v| mu.eval(v);
    Ok(DiagnosticsRecord {
        t,
        moments: m,
        entropy: entropy(&phys),
        relative_entropy: relative_entropy(&phys, mu_fn),
        fisher: fisher(f)?,
        l2_to_maxwellian: l2_distance(&phys, mu_fn),
        min_f: phys.values().iter().copied().fold(f64::INFINITY, f64::min),
        negative_mass: negative_mass(&phys),
        errors: exact.map(|e| error_norms(&phys, e, t)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn unit_maxwellian(v: [f64; 3]) -> f64 {
        let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        (2.0 * PI).powf(-1.5) * (-v2 / 2.0).exp()
    }

    #[test]
    fn uniform_density_moments() {
        let g = GridSpec::new(2.0, 8, 0.0).unwrap();
        let f = PhysicalField::from_fn(g, 8, |_| 1.0 / g.volume());
        let m = moments(&f);
        assert!((m.mass - 1.0).abs() < 1e-14);
        for i in 0..3 {
            assert!(m.momentum[i].abs() < 1e-14);
            assert!(m.bulk_velocity[i].abs() < 1e-14);
        }
    }

    #[test]
    fn maxwellian_formula() {
        let mu = Maxwellian {
            density: 1.0,
            velocity: [0.0; 3],
            temperature: 1.0,
        };
        assert!((mu.eval([0.0; 3]) - 0.063_493_6).abs() < 1e-7);
        let mu2 = Maxwellian { density: 2.0, ..mu };
        assert_eq!(mu2.eval([0.3, 0.1, -1.0]), 2.0 * mu.eval([0.3, 0.1, -1.0]));
        let degenerate = MomentSet {
            mass: 0.0,
            momentum: [0.0; 3],
            energy: 0.0,
            bulk_velocity: [0.0; 3],
            temperature: 0.0,
            m4: 0.0,
        };
        assert!(maxwellian_of(&degenerate).is_err());
    }

    #[test]
    fn entropy_of_one_is_zero() {
        let g = GridSpec::new(1.0, 4, 0.0).unwrap();
        let f = PhysicalField::from_fn(g, 4, |_| 1.0);
        assert_eq!(entropy(&f), 0.0);
    }

    #[test]
    fn negative_cells_are_masked() {
        let g = GridSpec::new(1.0, 4, 0.0).unwrap();
        let f = PhysicalField::from_fn(g, 4, |v| if v[0] < 0.0 { -0.5 } else { 2.0 });
        let h = f.cell_volume();
        let pos = f.values().iter().filter(|&&x| x > 0.0).count() as f64;
        assert!((entropy(&f) - pos * h * 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!((negative_mass(&f) - (64.0 - pos) * h * 0.5).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_of_scaled_maxwellian() {
        let g = GridSpec::new(8.0, 32, 0.0).unwrap();
        let f = PhysicalField::from_fn(g, 32, unit_maxwellian);
        assert!(relative_entropy(&f, unit_maxwellian).abs() < 1e-10);
        let f2 = PhysicalField::from_fn(g, 32, |v| 2.0 * unit_maxwellian(v));
        let want = 2.0 * 2f64.ln() - 1.0;
        assert!((relative_entropy(&f2, unit_maxwellian) - want).abs() < 1e-8);
    }

    #[test]
    fn error_norm_contracts() {
        let g = GridSpec::new(1.0, 4, 0.0).unwrap();
        let exact = |_: f64, v: [f64; 3]| v[0] + 2.0 * v[1];
        let mut f = PhysicalField::from_fn(g, 4, |v| exact(0.0, v));
        assert_eq!(error_norms(&f, exact, 0.0), (0.0, 0.0));
        f.values_mut()[5] += 0.25;
        let (e1, e2) = error_norms(&f, exact, 0.0);
        assert!((e1 - 0.25).abs() < 1e-15 && (e2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn fisher_of_constant_is_zero() {
        let g = GridSpec::new(1.0, 8, 0.0).unwrap();
        let f = to_spectral(&PhysicalField::from_fn(g, 8, |_| 3.0)).unwrap();
        assert!(fisher(&f).unwrap().abs() < 1e-20);
    }
}
