//! Discretization parameters shared by every field and operator.

use crate::error::{Result, SolverError};

/// How truncated mode convolutions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// Zero-padded linear convolution: exact Galerkin truncation.
    #[default]
    Exact,
    /// Circular convolution at size `P`; cheaper, wraps high modes back.
    Aliased,
}

/// Shape of the radial cutoff `psi_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffShape {
    /// Piecewise linear ramp from 1 at `0.9 R` down to 0 at `R`.
    #[default]
    Paper,
    /// C1 smoothstep on `[0.9 R, R]`.
    Smooth,
    /// No cutoff (`psi = 1` everywhere).
    None,
}

impl Padding {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Self::Exact),
            "aliased" => Some(Self::Aliased),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Aliased => "aliased",
        }
    }
}

impl CutoffShape {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "paper" => Some(Self::Paper),
            "smooth" => Some(Self::Smooth),
            "none" => Some(Self::None),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Paper => "paper",
            Self::Smooth => "smooth",
            Self::None => "none",
        }
    }
}

/// Velocity box `[-L, L]^3`, resolution and physical parameters.
///
/// `points` is the number of collocation points per dimension (`P`); the
/// retained Fourier modes are `[-N, N-1]^3` with `N = P / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
    pub gamma: f64,
    pub cutoff_radius: f64,
    pub padding: Padding,
    pub oversample: usize,
    pub cutoff_shape: CutoffShape,
}

impl GridSpec {
    /// Grid with default policies: `R = L`, exact padding, oversample 2,
    /// piecewise-linear cutoff.
    pub fn new(half_width: f64, points: usize, gamma: f64) -> Result<Self> {
        let grid = Self {
            half_width,
            points,
            gamma,
            cutoff_radius: half_width,
            padding: Padding::Exact,
            oversample: 2,
            cutoff_shape: CutoffShape::Paper,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_cutoff_radius(mut self, radius: f64) -> Self {
        self.cutoff_radius = radius;
        self
    }

    pub fn with_padding(mut self, padding: Padding) -> Self {
        self.padding = padding;
        self
    }

    pub fn with_oversample(mut self, oversample: usize) -> Self {
        self.oversample = oversample;
        self
    }

    pub fn with_cutoff_shape(mut self, shape: CutoffShape) -> Self {
        self.cutoff_shape = shape;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(SolverError::InvalidGrid(format!(
                "L must be positive, got {}",
                self.half_width
            )));
        }
        if self.points < 4 || self.points % 2 != 0 {
            return Err(SolverError::InvalidGrid(format!(
                "P must be an even integer >= 4, got {}",
                self.points
            )));
        }
        if !(self.gamma.is_finite() && (-4.0..=1.0).contains(&self.gamma)) {
            return Err(SolverError::InvalidGrid(format!(
                "gamma must lie in [-4, 1], got {}",
                self.gamma
            )));
        }
        if !(self.cutoff_radius > 0.0 && self.cutoff_radius <= self.half_width) {
            return Err(SolverError::InvalidGrid(format!(
                "cutoff radius must satisfy 0 < R <= L, got R = {} with L = {}",
                self.cutoff_radius, self.half_width
            )));
        }
        if self.oversample < 1 {
            return Err(SolverError::InvalidGrid("oversample must be >= 1".into()));
        }
        Ok(())
    }

    /// Galerkin half-width `N = P / 2`.
    pub fn half_modes(&self) -> usize {
        self.points / 2
    }

    /// Number of stored modes, `P^3`.
    pub fn len(&self) -> usize {
        self.points * self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    /// Side of the periodic box, `2L`.
    pub fn box_side(&self) -> f64 {
        2.0 * self.half_width
    }

    /// `(2L)^3`, the box volume.
    pub fn volume(&self) -> f64 {
        self.box_side().powi(3)
    }

    /// Physical grid spacing for a grid with `size` points per dimension.
    pub fn spacing(&self, size: usize) -> f64 {
        self.box_side() / size as f64
    }

    /// Velocity coordinate of node `j` on a `size`-point grid.
    pub fn node(&self, j: usize, size: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing(size)
    }

    /// Fields live on the same discrete space when `L` and `P` agree.
    pub fn same_space(&self, other: &GridSpec) -> bool {
        self.points == other.points && self.half_width.to_bits() == other.half_width.to_bits()
    }
}

/// Signed wavenumber stored at FFT index `i` of an `n`-point axis.
#[inline]
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT index of wavenumber `k` on an `n`-point axis.
#[inline]
pub fn fft_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Iterate over `(flat index, [k1, k2, k3])` of a `P^3` mode array in
/// row-major order (third index fastest).
pub fn modes(points: usize) -> impl Iterator<Item = (usize, [i64; 3])> {
    let n = points;
    (0..n * n * n).map(move |idx| {
        let i0 = idx / (n * n);
        let i1 = (idx / n) % n;
        let i2 = idx % n;
        (
            idx,
            [wavenumber(i0, n), wavenumber(i1, n), wavenumber(i2, n)],
        )
    })
}
