//! The periodic collision operator in Fourier variables,
//!
//! `Q_hat(k) = (2L)^{-3} sum_{l+m=k} g_hat(l) h_hat(m) beta(l, m)`,
//!
//! evaluated either by the literal double sum or through the separable
//! tables, where each of the eight terms of
//! `beta = A + B |m|^2 + sum_ij C_ij m_i m_j` is a truncated convolution.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, SolverError};
use crate::fft;
use crate::field::{check_same, embed, extract, padded_size, CutoffMask, SpectralField};
use crate::grid::{fft_index, modes, GridSpec};
use crate::kernel::{KernelTables, TENSOR_PAIRS};

/// Largest `P` accepted by [`q_periodic_direct`] without an override.
pub const DIRECT_COST_GUARD: usize = 16;

fn check_tables(grid: &GridSpec, tables: &KernelTables) -> Result<()> {
    if tables.matches(grid) {
        Ok(())
    } else {
        Err(SolverError::Shape(format!(
            "kernel tables (L={}, P={}, gamma={}) do not match grid (L={}, P={}, gamma={})",
            tables.half_width(),
            tables.points(),
            tables.gamma(),
            grid.half_width,
            grid.points,
            grid.gamma
        )))
    }
}

/// Fast evaluation of `Q_#(g, h)` on `J_N`.
///
/// The eight term products are summed in the padded physical domain and
/// transformed back once, which equals summing eight truncated
/// convolutions.
pub fn q_periodic_fast(
    g: &SpectralField,
    h: &SpectralField,
    tables: &KernelTables,
) -> Result<SpectralField> {
    check_same(g.grid(), h.grid())?;
    check_tables(g.grid(), tables)?;
    let grid = *g.grid();
    let m = padded_size(&grid);
    let plan = fft::plan(m);

    // Each term is a pair (g-side weight, h-side weight).
    let g_weight = |t: usize, i: usize| -> f64 {
        match t {
            0 => tables.a()[i],
            1 => tables.b()[i],
            _ => tables.c(t - 2)[i],
        }
    };
    let h_weight = |t: usize, k: [i64; 3]| -> f64 {
        match t {
            0 => 1.0,
            1 => (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64,
            _ => {
                let (a, b) = TENSOR_PAIRS[t - 2];
                let sym = if a == b { 1 } else { 2 };
                (sym * k[a] * k[b]) as f64
            }
        }
    };

    // For Hermitian inputs both factors are real in physical space, so one
    // complex transform of `G + iH` yields `g + ih` and the product is
    // `re * im`.
    let packed = is_hermitian(g) && is_hermitian(h);
    let term = |t: usize| -> Vec<Complex64> {
        if packed {
            let mut buf = embed(g, m, |i, _| Complex64::new(g_weight(t, i), 0.0));
            for (idx, k) in modes(grid.points) {
                let c = h.coeffs()[idx];
                if c != Complex64::new(0.0, 0.0) {
                    let j = (fft_index(k[0], m) * m + fft_index(k[1], m)) * m + fft_index(k[2], m);
                    buf[j] += Complex64::i() * c * h_weight(t, k);
                }
            }
            plan.inverse(&mut buf);
            for x in buf.iter_mut() {
                *x = Complex64::new(x.re * x.im, 0.0);
            }
            buf
        } else {
            let mut gb = embed(g, m, |i, _| Complex64::new(g_weight(t, i), 0.0));
            let mut hb = embed(h, m, |_, k| Complex64::new(h_weight(t, k), 0.0));
            plan.inverse(&mut gb);
            plan.inverse(&mut hb);
            for (x, y) in gb.iter_mut().zip(&hb) {
                *x *= y;
            }
            gb
        }
    };

    let products: Vec<Vec<Complex64>> = (0..8).into_par_iter().map(term).collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); m * m * m];
    for prod in &products {
        for (a, p) in acc.iter_mut().zip(prod) {
            *a += p;
        }
    }
    drop(products);
    plan.forward(&mut acc);
    let scale = 1.0 / (grid.volume() * (m * m * m) as f64);
    Ok(extract(grid, &acc, m, scale))
}

fn is_hermitian(f: &SpectralField) -> bool {
    let scale = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    f.hermitian_defect() <= 1e-14 * scale
}

/// Literal `O(|J_N|^2)` double sum; refuses `P > 16` unless `allow_large`.
pub fn q_periodic_direct(
    g: &SpectralField,
    h: &SpectralField,
    beta: impl Fn([i64; 3], [i64; 3]) -> f64,
    allow_large: bool,
) -> Result<SpectralField> {
    check_same(g.grid(), h.grid())?;
    let grid = *g.grid();
    if grid.points > DIRECT_COST_GUARD && !allow_large {
        return Err(SolverError::CostGuard {
            points: grid.points,
            limit: DIRECT_COST_GUARD,
        });
    }
    let n = grid.half_modes() as i64;
    let zero = Complex64::new(0.0, 0.0);
    let inv_vol = 1.0 / grid.volume();
    let hs: Vec<([i64; 3], Complex64)> = h.modes().filter(|(_, v)| *v != zero).collect();
    let mut out = SpectralField::zeros(grid);
    for (l, gl) in g.modes() {
        if gl == zero {
            continue;
        }
        for &(m, hm) in &hs {
            let k = [l[0] + m[0], l[1] + m[1], l[2] + m[2]];
            if k.iter().all(|&c| c > -n && c < n) {
                let prev = out.get(k);
                out.set(k, prev + gl * hm * (beta(l, m) * inv_vol));
            }
        }
    }
    Ok(out)
}

/// Scheme right-hand side with reusable cutoff samples.
#[derive(Debug, Clone)]
pub struct CollisionOperator<'a> {
    grid: GridSpec,
    tables: &'a KernelTables,
    mask: CutoffMask,
}

impl<'a> CollisionOperator<'a> {
    pub fn new(grid: GridSpec, tables: &'a KernelTables) -> Result<Self> {
        grid.validate()?;
        check_tables(&grid, tables)?;
        Ok(Self {
            grid,
            tables,
            mask: CutoffMask::new(grid),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn tables(&self) -> &KernelTables {
        self.tables
    }

    /// `P_N(f psi_R)`.
    pub fn cutoff(&self, f: &SpectralField) -> Result<SpectralField> {
        self.mask.apply(f)
    }

    /// `Q^R_N(f, f) = P_N(P_N(Q_#(F, F)) psi_R)` with `F = P_N(f psi_R)`.
    pub fn rhs(&self, f: &SpectralField) -> Result<SpectralField> {
        check_same(&self.grid, f.grid())?;
        let truncated = self.mask.apply(f)?.project();
        let q = q_periodic_fast(&truncated, &truncated, self.tables)?;
        self.mask.apply(&q.project())
    }
}

/// One-shot scheme right-hand side `Q^R_N(f, f)`.
pub fn q_scheme_rhs(
    f: &SpectralField,
    grid: &GridSpec,
    tables: &KernelTables,
) -> Result<SpectralField> {
    CollisionOperator::new(*grid, tables)?.rhs(f)
}
