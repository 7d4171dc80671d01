use std::f64::consts::PI;

use landau_core::field::{convolution_direct, mode_at};
use landau_core::{
    apply_cutoff, psi_r, to_physical, to_spectral, truncated_convolution, GridSpec, Padding,
    PhysicalField, SolverError, SpectralField,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_real(grid: GridSpec, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = grid.points;
    let values = (0..p * p * p)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    to_spectral(&PhysicalField::from_values(grid, p, values).unwrap()).unwrap()
}

fn random_complex(grid: GridSpec, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SpectralField::from_fn(grid, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn gaussian(v: [f64; 3]) -> f64 {
    (-(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).exp()
}

#[test]
fn round_trip_through_physical_space() {
    for p in [4, 6, 8, 10] {
        let grid = GridSpec::new(1.7, p, -3.0).unwrap();
        let f = random_real(grid, p as u64);
        for size in [p, 2 * p, 3 * p] {
            let back = to_spectral(&to_physical(&f, size).unwrap()).unwrap();
            assert!(
                back.l2_distance(&f).unwrap() <= 1e-13 * f.l2_norm(),
                "P={p} size={size}"
            );
        }
    }
}

#[test]
fn parseval_on_the_collocation_grid() {
    let grid = GridSpec::new(2.0, 8, 0.0).unwrap();
    let f = random_real(grid, 11);
    let phys = to_physical(&f, 8).unwrap();
    let direct = (phys.values().iter().map(|x| x * x).sum::<f64>() * phys.cell_volume()).sqrt();
    assert!((direct - f.l2_norm()).abs() <= 1e-13 * direct);
}

#[test]
fn trig_polynomial_matches_pointwise_evaluation() {
    let grid = GridSpec::new(1.3, 6, -3.0).unwrap();
    let f = random_real(grid, 5);
    let size = 12;
    let phys = to_physical(&f, size).unwrap();
    for (j, &x) in phys.values().iter().enumerate().step_by(97) {
        let v = [
            grid.node(j / (size * size), size),
            grid.node((j / size) % size, size),
            grid.node(j % size, size),
        ];
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in f.modes() {
            let phase = PI * (k[0] as f64 * v[0] + k[1] as f64 * v[1] + k[2] as f64 * v[2])
                / grid.half_width;
            acc += c * Complex64::from_polar(1.0, phase);
        }
        acc /= grid.volume();
        assert!((acc.re - x).abs() <= 1e-12 * (1.0 + x.abs()) && acc.im.abs() < 1e-12);
    }
}

#[test]
fn projection_error_decays_spectrally() {
    let error = |p: usize| {
        let grid = GridSpec::new(6.0, p, 0.0).unwrap();
        let f = to_spectral(&PhysicalField::from_fn(grid, p, gaussian)).unwrap();
        let fine = to_physical(&f, 48).unwrap();
        fine.points()
            .map(|(v, x)| (x - gaussian(v)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let (e8, e16) = (error(8), error(16));
    assert!(e16 <= 0.1 * e8, "e8={e8:e} e16={e16:e}");
}

#[test]
fn fourier_coefficients_of_gaussian() {
    // int exp(-|v|^2) exp(-i pi k.v/L) dv = pi^{3/2} exp(-pi^2 |k|^2 / (4 L^2))
    let l = 6.0;
    let grid = GridSpec::new(l, 32, 0.0).unwrap();
    let f = to_spectral(&PhysicalField::from_fn(grid, 32, gaussian)).unwrap();
    for k in [[0, 0, 0], [1, 0, 0], [2, -1, 3], [0, 5, -5]] {
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        let exact = PI.powf(1.5) * (-PI * PI * k2 / (4.0 * l * l)).exp();
        assert!((f.get(k) - exact).norm() < 1e-12, "{k:?}");
    }
}

#[test]
fn exact_convolution_equals_direct_sum() {
    for p in [4, 6, 8] {
        let grid = GridSpec::new(1.0, p, -3.0).unwrap();
        let x = random_complex(grid, 1 + p as u64);
        let y = random_complex(grid, 100 + p as u64);
        let fast = truncated_convolution(&x, &y).unwrap();
        let direct = convolution_direct(&x, &y).unwrap();
        assert!(
            fast.l2_distance(&direct).unwrap() <= 1e-13 * direct.l2_norm(),
            "P={p}"
        );
    }
}

#[test]
fn aliased_padding_differs_from_direct_sum() {
    let grid = GridSpec::new(1.0, 6, -3.0)
        .unwrap()
        .with_padding(Padding::Aliased);
    let x = random_complex(grid, 3);
    let y = random_complex(grid, 4);
    let fast = truncated_convolution(&x, &y).unwrap();
    let direct = convolution_direct(&x, &y).unwrap();
    assert!(fast.l2_distance(&direct).unwrap() > 1e-3 * direct.l2_norm());
}

#[test]
fn cutoff_leaves_interior_gaussian_unchanged() {
    let grid = GridSpec::new(6.0, 40, 0.0).unwrap();
    let f = to_spectral(&PhysicalField::from_fn(grid, 40, gaussian)).unwrap();
    let cut = apply_cutoff(&f).unwrap();
    assert!(cut.l2_distance(&f).unwrap() <= 1e-8 * f.l2_norm());
}

#[test]
fn cutoff_is_nearly_idempotent_on_smooth_data() {
    let grid = GridSpec::new(8.0, 32, 0.0).unwrap();
    let maxwellian = |v: [f64; 3]| (-(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / 2.0).exp();
    let f = to_spectral(&PhysicalField::from_fn(grid, 64, |v| {
        maxwellian(v) * psi_r(v, &grid)
    }))
    .unwrap();
    let once = apply_cutoff(&f).unwrap();
    let twice = apply_cutoff(&once).unwrap();
    let defect = twice.l2_distance(&once).unwrap() / once.l2_norm();
    println!("cutoff idempotence defect: {defect:e}");
    assert!(defect <= 1e-9, "{defect:e}");
}

#[test]
fn cutoff_removes_mass_outside_radius() {
    let grid = GridSpec::new(2.0, 16, 0.0).unwrap().with_cutoff_radius(1.0);
    let one = to_spectral(&PhysicalField::from_fn(grid, 16, |_| 1.0)).unwrap();
    let cut = apply_cutoff(&one).unwrap();
    let mass = cut.get([0, 0, 0]).re;
    let ball = 4.0 / 3.0 * PI;
    assert!(mass < ball && mass > 0.5 * ball, "{mass}");
}

#[test]
fn non_hermitian_spectrum_is_rejected() {
    let grid = GridSpec::new(1.0, 4, 0.0).unwrap();
    let f = SpectralField::single_mode(grid, [1, 0, 0], Complex64::new(1.0, 0.0), false);
    assert!(matches!(
        to_physical(&f, 4),
        Err(SolverError::HermitianViolation { .. })
    ));
}

#[test]
fn nyquist_planes_are_zero() {
    let grid = GridSpec::new(1.0, 6, 0.0).unwrap();
    let f = random_real(grid, 9);
    for (idx, c) in f.coeffs().iter().enumerate() {
        if mode_at(idx, 6).contains(&-3) {
            assert_eq!(*c, Complex64::new(0.0, 0.0));
        }
    }
}

proptest! {
    #[test]
    fn convolution_is_bilinear_and_commutative(seed in 0u64..1000, a in -3.0f64..3.0) {
        let grid = GridSpec::new(1.0, 4, 0.0).unwrap();
        let x1 = random_complex(grid, seed);
        let x2 = random_complex(grid, seed + 1);
        let y = random_complex(grid, seed + 2);
        let mut comb = x1.clone();
        comb.scale(Complex64::new(a, 0.0));
        comb.axpy(1.0, &x2);
        let lhs = truncated_convolution(&comb, &y).unwrap();
        let mut rhs = truncated_convolution(&x1, &y).unwrap();
        rhs.scale(Complex64::new(a, 0.0));
        rhs.axpy(1.0, &truncated_convolution(&x2, &y).unwrap());
        prop_assert!(lhs.l2_distance(&rhs).unwrap() <= 1e-12 * (1.0 + rhs.l2_norm()));
        let swapped = truncated_convolution(&y, &comb).unwrap();
        prop_assert!(lhs.l2_distance(&swapped).unwrap() <= 1e-13 * (1.0 + lhs.l2_norm()));
    }

    #[test]
    fn spectral_round_trip_of_random_nodes(seed in 0u64..1000) {
        let grid = GridSpec::new(0.7, 6, 0.0).unwrap();
        let f = random_real(grid, seed);
        let phys = to_physical(&f, 6).unwrap();
        let again = to_physical(&to_spectral(&phys).unwrap(), 6).unwrap();
        for (a, b) in phys.values().iter().zip(again.values()) {
            prop_assert!((a - b).abs() < 1e-13);
        }
    }
}
