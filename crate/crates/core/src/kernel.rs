//! Fourier symbol `beta(l, m)` of the periodized collision operator,
//!
//! `Q_#(e_l, e_m) = beta(l, m) e_{l+m}`,  `e_k(v) = exp(i pi k.v / L)`,
//!
//! and the separable tables that make the mode sum FFT-friendly.
//!
//! For `l != 0`, `beta` is a quadratic polynomial in `m`:
//!
//! `beta(l, m) = A(l) + B(l) |m|^2 + sum_ij C_ij(l) m_i m_j`,
//!
//! with `A`, `B`, `C` depending only on `|l|` and the direction of `l`.
//! For the Coulomb exponent the radial profiles are elementary functions of
//! `x = pi |l|`; for other exponents they come from the radial integrals
//!
//! `F1(x) = 2 \int_0^x u^{gamma+4} I1(u) du`,
//! `F2(x) = \int_0^x u^{gamma+4} (I1(u) + 2 I2(u)) du`,
//!
//! `I1(u) = \int_{-1}^1 (1 - t^2) e^{iut} dt`, `I2(u) = \int_{-1}^1 t^2 e^{iut} dt`.
//!
//! The general-exponent branch extends the Coulomb derivation by carrying
//! the weight `u^{gamma+4}` through the same spherical reduction; only the
//! Coulomb closed form has an independent derivation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Result, SolverError};
use crate::grid::{modes, GridSpec};
use crate::quadrature;

/// Coulomb interaction exponent.
pub const COULOMB: f64 = -3.0;

/// Default absolute tolerance for the radial integrals.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Below this `x = pi |l|` the Coulomb profiles use Taylor series.
const SERIES_CUTOFF: f64 = 1e-3;

/// Tensor components in storage order: 11, 22, 33, 12, 13, 23.
pub const TENSOR_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    pub gamma: f64,
    pub half_width: f64,
}

impl BetaParams {
    pub fn new(gamma: f64, half_width: f64) -> Result<Self> {
        if !(gamma.is_finite() && (-4.0..=1.0).contains(&gamma)) {
            return Err(SolverError::InvalidParameter(format!(
                "gamma must lie in [-4, 1], got {gamma}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "L must be positive, got {half_width}"
            )));
        }
        Ok(Self { gamma, half_width })
    }

    /// `(L / pi)^{gamma + 3}`; equals 1 for the Coulomb exponent.
    pub fn scale(&self) -> f64 {
        (self.half_width / PI).powf(self.gamma + 3.0)
    }
}

fn dot(a: [i64; 3], b: [i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `|l x m|^2` and `|l|^4 - (l.m)^2`, exact in integer arithmetic.
fn invariants(l: [i64; 3], m: [i64; 3]) -> (i64, i64, i64) {
    let l2 = dot(l, l);
    let lm = dot(l, m);
    let cross2 = l2 * dot(m, m) - lm * lm;
    (l2, cross2, l2 * l2 - lm * lm)
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `(1 - sinc x, cos x - sinc x, cos x + 2 - 3 sinc x)`, by Taylor series for
/// small `x`.
fn coulomb_combinations(x: f64) -> (f64, f64, f64) {
    if x < SERIES_CUTOFF {
        let x2 = x * x;
        let x4 = x2 * x2;
        let x6 = x4 * x2;
        (
            x2 / 6.0 - x4 / 120.0 + x6 / 5040.0,
            -x2 / 3.0 + x4 / 30.0 - x6 / 840.0,
            x4 / 60.0 - x6 / 1260.0,
        )
    } else {
        let s = sinc(x);
        let c = x.cos();
        (1.0 - s, c - s, c + 2.0 - 3.0 * s)
    }
}

/// Closed-form `beta(l, m)` for the Coulomb exponent.
pub fn beta_coulomb(l: [i64; 3], m: [i64; 3]) -> f64 {
    let (l2, cross2, par) = invariants(l, m);
    if l2 == 0 {
        return -4.0 * PI.powi(3) / 3.0 * dot(m, m) as f64;
    }
    let norm = (l2 as f64).sqrt();
    let (one_minus_sinc, cos_minus_sinc, _) = coulomb_combinations(norm * PI);
    4.0 * PI / (l2 * l2) as f64
        * (cross2 as f64 * cos_minus_sinc + 2.0 * par as f64 * one_minus_sinc)
}

/// Scalar profiles `(a, b, c)` of the separable form at a real radius
/// `s = |l| >= 0`: `A = a`, `B = b`, `C_ij = c l_i l_j`.
///
/// At `s = 0` the `m`-tensor part is direction dependent, so `c` is
/// returned as 0 there and `b` carries the whole `|m|^2` coefficient.
pub fn coulomb_profiles(s: f64) -> (f64, f64, f64) {
    if s == 0.0 {
        return (0.0, -4.0 * PI.powi(3) / 3.0, 0.0);
    }
    let x = s * PI;
    let (p, q, r) = coulomb_combinations(x);
    if x < SERIES_CUTOFF {
        // rewrite the 1/s^2 and 1/s^4 prefactors in x so the series cancel
        let x2 = x * x;
        (
            8.0 * PI * p,
            4.0 * PI.powi(3) * (q / x2),
            -4.0 * PI.powi(5) * (r / (x2 * x2)),
        )
    } else {
        let s2 = s * s;
        (8.0 * PI * p, 4.0 * PI * q / s2, -4.0 * PI * r / (s2 * s2))
    }
}

/// `I1(u) = 4 (sin u - u cos u) / u^3`.
pub fn radial_i1(u: f64) -> f64 {
    if u.abs() < 0.25 {
        series(u, |k| 4.0 / ((2 * k + 1) * (2 * k + 3)) as f64)
    } else {
        4.0 * (u.sin() - u * u.cos()) / (u * u * u)
    }
}

/// `I2(u) = 2 ((u^2 - 2) sin u + 2 u cos u) / u^3`.
pub fn radial_i2(u: f64) -> f64 {
    if u.abs() < 0.25 {
        series(u, |k| 2.0 / (2 * k + 3) as f64)
    } else {
        2.0 * ((u * u - 2.0) * u.sin() + 2.0 * u * u.cos()) / (u * u * u)
    }
}

// sum_k (-1)^k u^{2k} / (2k)! * moment(k)
fn series(u: f64, moment: impl Fn(usize) -> f64) -> f64 {
    let u2 = u * u;
    let mut term = 1.0;
    let mut acc = 0.0;
    for k in 0..8 {
        acc += term * moment(k);
        term *= -u2 / ((2 * k + 1) * (2 * k + 2)) as f64;
    }
    acc
}

/// `(F1(x), F2(x))` for exponent `gamma` by adaptive quadrature.
pub fn radial_integrals(gamma: f64, x: f64, tol: f64) -> Result<(f64, f64)> {
    let w = gamma + 4.0;
    let weight = move |u: f64| u.powf(w);
    let f1 = quadrature::integrate(|u| 2.0 * weight(u) * radial_i1(u), 0.0, x, tol, PI)?;
    let f2 = quadrature::integrate(
        |u| weight(u) * (radial_i1(u) + 2.0 * radial_i2(u)),
        0.0,
        x,
        tol,
        PI,
    )?;
    Ok((f1, f2))
}

/// `beta(0, m)` for exponent `gamma`:
/// `-(L/pi)^{gamma+3} (8 pi / 3) pi^{gamma+5} / (gamma+5) |m|^2`.
fn beta_zero_mode(params: &BetaParams, m2: f64) -> f64 {
    let g = params.gamma;
    -params.scale() * (8.0 * PI / 3.0) * PI.powf(g + 5.0) / (g + 5.0) * m2
}

/// `beta(l, m)` for any exponent from the radial-integral representation.
pub fn beta_quadrature(l: [i64; 3], m: [i64; 3], params: &BetaParams, tol: f64) -> Result<f64> {
    let (l2, cross2, par) = invariants(l, m);
    if l2 == 0 {
        return Ok(beta_zero_mode(params, dot(m, m) as f64));
    }
    let s2 = l2 as f64;
    let s = s2.sqrt();
    let (f1, f2) = radial_integrals(params.gamma, s * PI, tol)?;
    let a1b1 = par as f64 / s2;
    let a2b2 = -(cross2 as f64) / s2;
    Ok(PI * params.scale() * s.powf(-(params.gamma + 5.0)) * (a1b1 * f1 + a2b2 * f2))
}

/// `beta(l, m)` from the radial-integral representation with the integrals
/// tabulated once per `|l|^2` of a mode set. Used as the pairwise kernel of
/// the direct collision sum for non-Coulomb exponents.
#[derive(Debug, Clone)]
pub struct RadialBeta {
    params: BetaParams,
    integrals: BTreeMap<i64, (f64, f64)>,
}

impl RadialBeta {
    /// Tabulate for every `l` of the `P^3` mode set of `grid`.
    pub fn for_grid(grid: &GridSpec, tol: f64) -> Result<Self> {
        let params = BetaParams::new(grid.gamma, grid.half_width)?;
        let mut keys: Vec<i64> = modes(grid.points).map(|(_, k)| dot(k, k)).collect();
        keys.sort_unstable();
        keys.dedup();
        let values = keys
            .par_iter()
            .map(|&r2| {
                if r2 == 0 {
                    Ok((0.0, 0.0))
                } else {
                    radial_integrals(params.gamma, (r2 as f64).sqrt() * PI, tol)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            params,
            integrals: keys.into_iter().zip(values).collect(),
        })
    }

    /// Panics if `|l|^2` was not tabulated.
    pub fn eval(&self, l: [i64; 3], m: [i64; 3]) -> f64 {
        let (l2, cross2, par) = invariants(l, m);
        if l2 == 0 {
            return beta_zero_mode(&self.params, dot(m, m) as f64);
        }
        let (f1, f2) = self.integrals[&l2];
        let s2 = l2 as f64;
        let s = s2.sqrt();
        PI * self.params.scale()
            * s.powf(-(self.params.gamma + 5.0))
            * ((par as f64 / s2) * f1 - (cross2 as f64 / s2) * f2)
    }
}

/// Radial profiles `(a, b, c)` for any exponent, via quadrature.
pub fn quadrature_profiles(params: &BetaParams, s: f64, tol: f64) -> Result<(f64, f64, f64)> {
    if s == 0.0 {
        return Ok((0.0, beta_zero_mode(params, 1.0), 0.0));
    }
    let (f1, f2) = radial_integrals(params.gamma, s * PI, tol)?;
    let k = PI * params.scale() * s.powf(-(params.gamma + 5.0));
    Ok((k * s * s * f1, -k * f2, k * (f2 - f1) / (s * s)))
}

/// Separable realization of `beta` on the `P^3` mode array.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTables {
    gamma: f64,
    half_width: f64,
    points: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: [Vec<f64>; 6],
}

impl KernelTables {
    /// Assemble tables from raw arrays in mode storage order.
    pub fn from_parts(
        gamma: f64,
        half_width: f64,
        points: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        c: [Vec<f64>; 6],
    ) -> Result<Self> {
        let len = points * points * points;
        if a.len() != len || b.len() != len || c.iter().any(|v| v.len() != len) {
            return Err(SolverError::Shape(format!(
                "kernel table arrays must have {len} entries"
            )));
        }
        Ok(Self {
            gamma,
            half_width,
            points,
            a,
            b,
            c,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Tensor component `t` in [`TENSOR_PAIRS`] order.
    pub fn c(&self, t: usize) -> &[f64] {
        &self.c[t]
    }

    pub fn a_mut(&mut self) -> &mut [f64] {
        &mut self.a
    }

    pub fn b_mut(&mut self) -> &mut [f64] {
        &mut self.b
    }

    pub fn c_mut(&mut self, t: usize) -> &mut [f64] {
        &mut self.c[t]
    }

    /// Whether the tables were built for this grid's `L`, `P` and `gamma`.
    pub fn matches(&self, grid: &GridSpec) -> bool {
        self.points == grid.points
            && self.half_width.to_bits() == grid.half_width.to_bits()
            && self.gamma.to_bits() == grid.gamma.to_bits()
    }

    /// `A(l) + B(l) |m|^2 + sum_ij C_ij(l) m_i m_j` at flat mode index `idx`.
    pub fn reconstruct(&self, idx: usize, m: [i64; 3]) -> f64 {
        let mf = [m[0] as f64, m[1] as f64, m[2] as f64];
        let mut acc = self.a[idx] + self.b[idx] * (mf[0] * mf[0] + mf[1] * mf[1] + mf[2] * mf[2]);
        for (t, &(i, j)) in TENSOR_PAIRS.iter().enumerate() {
            let sym = if i == j { 1.0 } else { 2.0 };
            acc += sym * self.c[t][idx] * mf[i] * mf[j];
        }
        acc
    }
}

/// Build tables for `grid` with the default quadrature tolerance.
pub fn build_kernel_tables(grid: &GridSpec) -> Result<KernelTables> {
    build_kernel_tables_with_tol(grid, DEFAULT_TOL)
}

/// Build tables for `grid`. The Coulomb exponent uses the closed form; any
/// other exponent evaluates the radial integrals once per distinct `|l|^2`.
pub fn build_kernel_tables_with_tol(grid: &GridSpec, tol: f64) -> Result<KernelTables> {
    grid.validate()?;
    let params = BetaParams::new(grid.gamma, grid.half_width)?;
    let p = grid.points;

    let mut radii: BTreeMap<i64, (f64, f64, f64)> = BTreeMap::new();
    for (_, k) in modes(p) {
        radii.insert(dot(k, k), (0.0, 0.0, 0.0));
    }
    let keys: Vec<i64> = radii.keys().copied().collect();
    let profiles: Vec<(f64, f64, f64)> = if grid.gamma == COULOMB {
        keys.iter()
            .map(|&r2| coulomb_profiles((r2 as f64).sqrt()))
            .collect()
    } else {
        keys.par_iter()
            .map(|&r2| quadrature_profiles(&params, (r2 as f64).sqrt(), tol))
            .collect::<Result<_>>()?
    };
    for (key, prof) in keys.into_iter().zip(profiles) {
        radii.insert(key, prof);
    }

    let len = grid.len();
    let mut a = vec![0.0; len];
    let mut b = vec![0.0; len];
    let mut c: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; len]);
    for (idx, k) in modes(p) {
        let (pa, pb, pc) = radii[&dot(k, k)];
        a[idx] = pa;
        b[idx] = pb;
        for (t, &(i, j)) in TENSOR_PAIRS.iter().enumerate() {
            c[t][idx] = pc * (k[i] * k[j]) as f64;
        }
    }
    KernelTables::from_parts(grid.gamma, grid.half_width, p, a, b, c)
}
