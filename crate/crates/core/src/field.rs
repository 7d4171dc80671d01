//! Spectral and physical representations on the periodic box, the
//! transforms between them, Galerkin truncation, cutoff multiplication and
//! truncated mode convolution.
//!
//! Spectral coefficients use the convention
//! `f_hat(k) = \int_{D_L} f(v) exp(-i pi k.v / L) dv`, so that
//! `f(v) = (2L)^{-3} sum_k f_hat(k) exp(i pi k.v / L)`. Modes are stored in
//! FFT order on a `P^3` array covering `k in [-N, N-1]^3`; the `k_i = -N`
//! planes are kept at zero so real fields stay exactly Hermitian.

use num_complex::Complex64;

use crate::error::{Result, SolverError};
use crate::fft;
use crate::grid::{fft_index, modes, wavenumber, CutoffShape, GridSpec, Padding};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative threshold on the imaginary residue accepted by [`to_physical`].
pub const IMAG_RESIDUE_TOL: f64 = 1e-12;

/// Fourier coefficients on the retained mode set.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

/// Real samples on a uniform `size^3` grid `v_j = -L + j 2L/size`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    size: usize,
    values: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.len()],
        }
    }

    /// Field with `f_hat(k) = coeff(k)` on `J_N`; the Nyquist planes are
    /// zeroed regardless of what `coeff` returns there.
    pub fn from_fn(grid: GridSpec, mut coeff: impl FnMut([i64; 3]) -> Complex64) -> Self {
        let n = grid.half_modes() as i64;
        let coeffs = modes(grid.points)
            .map(|(_, k)| {
                if k.iter().any(|&c| c == -n) {
                    ZERO
                } else {
                    coeff(k)
                }
            })
            .collect();
        Self { grid, coeffs }
    }

    /// Wrap raw coefficients in FFT order. Nyquist planes are zeroed.
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(SolverError::Shape(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let mut f = Self { grid, coeffs };
        f.zero_nyquist();
        Ok(f)
    }

    /// Single mode `k` with value `value`, plus its Hermitian partner
    /// `conj(value)` at `-k` when `hermitian` is set.
    pub fn single_mode(grid: GridSpec, k: [i64; 3], value: Complex64, hermitian: bool) -> Self {
        let mut f = Self::zeros(grid);
        f.set(k, value);
        if hermitian {
            f.set([-k[0], -k[1], -k[2]], value.conj());
        }
        f.zero_nyquist();
        f
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    fn flat(&self, k: [i64; 3]) -> usize {
        let p = self.grid.points;
        (fft_index(k[0], p) * p + fft_index(k[1], p)) * p + fft_index(k[2], p)
    }

    /// Coefficient at mode `k`; zero outside `J_N`.
    pub fn get(&self, k: [i64; 3]) -> Complex64 {
        let n = self.grid.half_modes() as i64;
        if k.iter().any(|&c| c < -n || c >= n) {
            return ZERO;
        }
        self.coeffs[self.flat(k)]
    }

    /// Set the coefficient at `k in J_N`. Panics outside the mode set.
    pub fn set(&mut self, k: [i64; 3], value: Complex64) {
        let n = self.grid.half_modes() as i64;
        assert!(
            k.iter().all(|&c| (-n..n).contains(&c)),
            "mode {k:?} outside J_N"
        );
        let idx = self.flat(k);
        self.coeffs[idx] = value;
    }

    pub fn modes(&self) -> impl Iterator<Item = ([i64; 3], Complex64)> + '_ {
        modes(self.grid.points).map(move |(i, k)| (k, self.coeffs[i]))
    }

    /// Zero every `k_i = -N` plane.
    pub fn zero_nyquist(&mut self) {
        let p = self.grid.points;
        let nyq = p / 2;
        for i0 in 0..p {
            for i1 in 0..p {
                for i2 in 0..p {
                    if i0 == nyq || i1 == nyq || i2 == nyq {
                        self.coeffs[(i0 * p + i1) * p + i2] = ZERO;
                    }
                }
            }
        }
    }

    /// Galerkin projection `P_N`: truncation to `J_N` with zeroed Nyquist
    /// planes. Stored fields already live on `J_N`, so this only enforces
    /// the Nyquist policy.
    pub fn project(&self) -> Self {
        let mut out = self.clone();
        out.zero_nyquist();
        out
    }

    /// `sqrt(sum_k |f_hat(k)|^2)`.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `L^2(D_L)` norm via Parseval, `((2L)^{-3} sum_k |f_hat(k)|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.volume()).sqrt()
    }

    /// `L^2` distance between two fields via Parseval.
    pub fn l2_distance(&self, other: &SpectralField) -> Result<f64> {
        check_same(&self.grid, &other.grid)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s / self.grid.volume()).sqrt())
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &SpectralField) {
        debug_assert!(self.grid.same_space(&x.grid));
        for (s, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += v * a;
        }
    }

    pub fn scale(&mut self, a: Complex64) {
        for c in &mut self.coeffs {
            *c *= a;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `|f_hat(-k) - conj(f_hat(k))|` over `J_N`.
    pub fn hermitian_defect(&self) -> f64 {
        self.modes()
            .map(|(k, c)| (self.get([-k[0], -k[1], -k[2]]) - c.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Spectral derivative along `axis`: multiply by `i pi k_axis / L`.
    pub fn derivative(&self, axis: usize) -> Self {
        let scale = std::f64::consts::PI / self.grid.half_width;
        let p = self.grid.points;
        let mut out = self.clone();
        for (idx, k) in modes(p) {
            out.coeffs[idx] *= Complex64::new(0.0, scale * k[axis] as f64);
        }
        out
    }
}

impl PhysicalField {
    /// Sample `f` on the `size`-point grid.
    pub fn from_fn(grid: GridSpec, size: usize, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut values = Vec::with_capacity(size * size * size);
        for i0 in 0..size {
            let v0 = grid.node(i0, size);
            for i1 in 0..size {
                let v1 = grid.node(i1, size);
                for i2 in 0..size {
                    values.push(f([v0, v1, grid.node(i2, size)]));
                }
            }
        }
        Self { grid, size, values }
    }

    pub fn from_values(grid: GridSpec, size: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != size * size * size {
            return Err(SolverError::Shape(format!(
                "expected {} values for a {size}^3 grid, got {}",
                size * size * size,
                values.len()
            )));
        }
        Ok(Self { grid, size, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Points per dimension.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Cell volume `(2L/size)^3`.
    pub fn cell_volume(&self) -> f64 {
        self.grid.spacing(self.size).powi(3)
    }

    /// Iterate `(v, f(v))` over the grid in storage order.
    pub fn points(&self) -> impl Iterator<Item = ([f64; 3], f64)> + '_ {
        let n = self.size;
        let g = self.grid;
        self.values.iter().enumerate().map(move |(idx, &val)| {
            let i0 = idx / (n * n);
            let i1 = (idx / n) % n;
            let i2 = idx % n;
            ([g.node(i0, n), g.node(i1, n), g.node(i2, n)], val)
        })
    }
}

pub(crate) fn check_same(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a.same_space(b) {
        Ok(())
    } else {
        Err(SolverError::Shape(format!(
            "grid mismatch: (L={}, P={}) vs (L={}, P={})",
            a.half_width, a.points, b.half_width, b.points
        )))
    }
}

#[inline]
fn parity(k: [i64; 3]) -> f64 {
    if (k[0] + k[1] + k[2]).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform with rectangle-rule weight `(2L/P')^3`, truncated to
/// `J_N` with Nyquist planes zeroed. `P'` must be a multiple of `P`.
pub fn to_spectral(f: &PhysicalField) -> Result<SpectralField> {
    let grid = f.grid;
    let size = f.size;
    if size < grid.points || size % grid.points != 0 {
        return Err(SolverError::Shape(format!(
            "physical grid of {size} points is not a multiple of P = {}",
            grid.points
        )));
    }
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::plan(size).forward(&mut buf);
    let weight = f.cell_volume();
    let nyq = -(grid.half_modes() as i64);
    let coeffs = modes(grid.points)
        .map(|(_, k)| {
            if k.contains(&nyq) {
                return ZERO;
            }
            let idx = (fft_index(k[0], size) * size + fft_index(k[1], size)) * size
                + fft_index(k[2], size);
            buf[idx] * (weight * parity(k))
        })
        .collect();
    Ok(SpectralField { grid, coeffs })
}

/// Embed `f_hat * weight(k)` into an `m^3` FFT buffer (zero elsewhere).
pub(crate) fn embed(
    f: &SpectralField,
    m: usize,
    mut weight: impl FnMut(usize, [i64; 3]) -> Complex64,
) -> Vec<Complex64> {
    let mut buf = vec![ZERO; m * m * m];
    for (idx, k) in modes(f.grid.points) {
        let c = f.coeffs[idx];
        if c == ZERO {
            continue;
        }
        let j = (fft_index(k[0], m) * m + fft_index(k[1], m)) * m + fft_index(k[2], m);
        buf[j] = c * weight(idx, k);
    }
    buf
}

/// Read `J_N` back out of an `m^3` FFT buffer, scaling by `scale`.
pub(crate) fn extract(grid: GridSpec, buf: &[Complex64], m: usize, scale: f64) -> SpectralField {
    let nyq = -(grid.half_modes() as i64);
    let coeffs = modes(grid.points)
        .map(|(_, k)| {
            if k.contains(&nyq) {
                ZERO
            } else {
                buf[(fft_index(k[0], m) * m + fft_index(k[1], m)) * m + fft_index(k[2], m)] * scale
            }
        })
        .collect();
    SpectralField { grid, coeffs }
}

/// Evaluate `(2L)^{-3} sum_{k in J_N} f_hat(k) exp(i pi k.v / L)` on the
/// `size`-point grid (`size >= P`).
///
/// The imaginary part is checked against `1e-12 * (2L)^{-3} sum |f_hat|`
/// and discarded.
pub fn to_physical(f: &SpectralField, size: usize) -> Result<PhysicalField> {
    let grid = f.grid;
    if size < grid.points {
        return Err(SolverError::Shape(format!(
            "output grid of {size} points is coarser than P = {}",
            grid.points
        )));
    }
    let inv_vol = 1.0 / grid.volume();
    let mut buf = embed(f, size, |_, k| Complex64::new(parity(k) * inv_vol, 0.0));
    fft::plan(size).inverse(&mut buf);
    let bound = inv_vol * f.coeffs.iter().map(|c| c.norm()).sum::<f64>();
    let threshold = IMAG_RESIDUE_TOL * bound.max(f64::MIN_POSITIVE);
    let residue = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if residue > threshold {
        return Err(SolverError::HermitianViolation { residue, threshold });
    }
    Ok(PhysicalField {
        grid,
        size,
        values: buf.into_iter().map(|c| c.re).collect(),
    })
}

/// Radial cutoff `psi_R(v)`.
pub fn psi_r(v: [f64; 3], grid: &GridSpec) -> f64 {
    let r = grid.cutoff_radius;
    let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    match grid.cutoff_shape {
        CutoffShape::None => 1.0,
        CutoffShape::Paper => {
            if s < 0.9 * r {
                1.0
            } else if s <= r {
                10.0 * (1.0 - s / r)
            } else {
                0.0
            }
        }
        CutoffShape::Smooth => {
            if s < 0.9 * r {
                1.0
            } else if s <= r {
                let x = (s - 0.9 * r) / (0.1 * r);
                1.0 - x * x * (3.0 - 2.0 * x)
            } else {
                0.0
            }
        }
    }
}

/// Samples of `psi_R` on the oversampled collocation grid, reused across
/// cutoff applications.
#[derive(Debug, Clone)]
pub struct CutoffMask {
    grid: GridSpec,
    size: usize,
    values: Vec<f64>,
}

impl CutoffMask {
    pub fn new(grid: GridSpec) -> Self {
        let size = grid.points * grid.oversample;
        let values = PhysicalField::from_fn(grid, size, |v| psi_r(v, &grid)).values;
        Self { grid, size, values }
    }

    /// `P_N(f psi_R)` by oversampled collocation.
    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        check_same(&self.grid, &f.grid)?;
        if self.grid.cutoff_shape == CutoffShape::None {
            return Ok(f.project());
        }
        let mut phys = to_physical(f, self.size)?;
        for (x, w) in phys.values.iter_mut().zip(&self.values) {
            *x *= w;
        }
        let mut out = to_spectral(&phys)?;
        out.grid = f.grid;
        Ok(out)
    }
}

/// `P_N(f psi_R)`: evaluate on the `oversample * P` grid, multiply by the
/// cutoff, transform back and truncate.
pub fn apply_cutoff(f: &SpectralField) -> Result<SpectralField> {
    CutoffMask::new(f.grid).apply(f)
}

/// Padded transform size for truncated convolutions under `padding`.
///
/// With inputs on `[-N, N-1]^3` the linear sums reach `[-2N, 2N-2]`; a size
/// of `3N` keeps every wrapped index out of `J_N`, so the truncated result
/// equals the direct double sum.
pub fn padded_size(grid: &GridSpec) -> usize {
    match grid.padding {
        Padding::Exact => 3 * grid.half_modes(),
        Padding::Aliased => grid.points,
    }
}

/// `z_hat(k) = sum_{l+m=k; l,m in J_N} x_hat(l) y_hat(m)` for `k in J_N`.
pub fn truncated_convolution(x: &SpectralField, y: &SpectralField) -> Result<SpectralField> {
    check_same(&x.grid, &y.grid)?;
    let m = padded_size(&x.grid);
    let one = |_, _| Complex64::new(1.0, 0.0);
    let plan = fft::plan(m);
    let mut bx = embed(x, m, one);
    let mut by = embed(y, m, one);
    plan.inverse(&mut bx);
    plan.inverse(&mut by);
    for (a, b) in bx.iter_mut().zip(&by) {
        *a *= b;
    }
    plan.forward(&mut bx);
    Ok(extract(x.grid, &bx, m, 1.0 / (m * m * m) as f64))
}

/// Reference `O(P^6)` double sum for truncated convolution.
pub fn convolution_direct(x: &SpectralField, y: &SpectralField) -> Result<SpectralField> {
    check_same(&x.grid, &y.grid)?;
    let grid = x.grid;
    let n = grid.half_modes() as i64;
    let mut out = SpectralField::zeros(grid);
    for (l, xl) in x.modes() {
        if xl == ZERO {
            continue;
        }
        for (m, ym) in y.modes() {
            let k = [l[0] + m[0], l[1] + m[1], l[2] + m[2]];
            if k.iter().all(|&c| c > -n && c < n) {
                let idx = out.flat(k);
                out.coeffs[idx] += xl * ym;
            }
        }
    }
    Ok(out)
}

/// Signed wavenumber vector at a flat index of a `P^3` array.
pub fn mode_at(idx: usize, points: usize) -> [i64; 3] {
    let p = points;
    [
        wavenumber(idx / (p * p), p),
        wavenumber((idx / p) % p, p),
        wavenumber(idx % p, p),
    ]
}
