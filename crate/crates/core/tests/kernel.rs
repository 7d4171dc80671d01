use std::f64::consts::PI;

use landau_core::grid::modes;
use landau_core::kernel::{coulomb_profiles, radial_integrals, COULOMB};
use landau_core::{
    beta_coulomb, beta_quadrature, build_kernel_tables, BetaParams, GridSpec, RadialBeta,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dot(a: [i64; 3], b: [i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn m_cube() -> impl Iterator<Item = [i64; 3]> {
    (-8..=8i64).flat_map(|a| (-8..=8i64).flat_map(move |b| (-8..=8i64).map(move |c| [a, b, c])))
}

// Antiderivatives of the two radial integrands at gamma = 0.
fn f1_maxwell(x: f64) -> f64 {
    24.0 * x.sin() - 24.0 * x * x.cos() - 8.0 * x * x * x.sin()
}

fn f2_maxwell(x: f64) -> f64 {
    -4.0 * x.powi(3) * x.cos() + 16.0 * x * x * x.sin() + 36.0 * x * x.cos() - 36.0 * x.sin()
}

fn beta_maxwell(l: [i64; 3], m: [i64; 3], half_width: f64) -> f64 {
    let l2 = dot(l, l);
    let scale = (half_width / PI).powi(3);
    if l2 == 0 {
        return -scale * (8.0 * PI / 3.0) * PI.powi(5) / 5.0 * dot(m, m) as f64;
    }
    let lm = dot(l, m);
    let cross2 = l2 * dot(m, m) - lm * lm;
    let s2 = l2 as f64;
    let s = s2.sqrt();
    let x = s * PI;
    PI * scale
        * s.powi(-5)
        * ((l2 * l2 - lm * lm) as f64 / s2 * f1_maxwell(x) - cross2 as f64 / s2 * f2_maxwell(x))
}

#[test]
fn paper_values() {
    assert!((beta_coulomb([1, 0, 0], [0, 0, 0]) - 8.0 * PI).abs() < 1e-13);
    for m in [[1, 0, 0], [2, -3, 1], [0, 0, 7]] {
        let expect = -(4.0 * PI.powi(3) / 3.0) * dot(m, m) as f64;
        assert!((beta_coulomb([0, 0, 0], m) - expect).abs() <= 1e-14 * expect.abs());
    }
}

#[test]
fn coulomb_reconstruction_on_full_m_cube() {
    let grid = GridSpec::new(1.0, 8, COULOMB).unwrap();
    let tables = build_kernel_tables(&grid).unwrap();
    let mut worst = 0.0f64;
    for (idx, l) in modes(8) {
        for m in m_cube() {
            let b = beta_coulomb(l, m);
            worst = worst.max((tables.reconstruct(idx, m) - b).abs() / (1.0 + b.abs()));
        }
    }
    assert!(worst <= 1e-12, "{worst:e}");
}

#[test]
fn coulomb_bound_on_full_m_cube() {
    for (_, l) in modes(8).filter(|(_, l)| *l != [0, 0, 0]) {
        for m in m_cube() {
            let bound = 16.0 * PI * (1.0 + dot(m, m) as f64 / dot(l, l) as f64);
            assert!(beta_coulomb(l, m).abs() <= bound, "{l:?} {m:?}");
        }
    }
}

#[test]
fn mass_identity_is_exact() {
    for (_, l) in modes(10) {
        let m = [-l[0], -l[1], -l[2]];
        assert_eq!(beta_coulomb(l, m), 0.0);
        for gamma in [-2.5, 0.0, 1.0] {
            let p = BetaParams::new(gamma, 2.0).unwrap();
            assert_eq!(beta_quadrature(l, m, &p, 1e-10).unwrap(), 0.0);
        }
    }
}

#[test]
fn quadrature_agrees_with_closed_form_on_random_pairs() {
    let params = BetaParams::new(COULOMB, 1.8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let l = [0; 3].map(|_: i64| rng.random_range(-8..8));
        let m = [0; 3].map(|_: i64| rng.random_range(-8..=8));
        let q = beta_quadrature(l, m, &params, 1e-10).unwrap();
        worst = worst.max((q - beta_coulomb(l, m)).abs());
    }
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn radial_integrals_match_maxwell_antiderivatives() {
    for x in [1e-3, 0.5, PI, 4.0 * PI, 10.0 * PI + 0.3] {
        let (f1, f2) = radial_integrals(0.0, x, 1e-12).unwrap();
        let scale = 1.0 + x.powi(3);
        assert!((f1 - f1_maxwell(x)).abs() <= 1e-10 * scale, "F1({x})");
        assert!((f2 - f2_maxwell(x)).abs() <= 1e-10 * scale, "F2({x})");
    }
}

#[test]
fn maxwell_tables_match_independent_closed_form() {
    let half_width = 8.0;
    let grid = GridSpec::new(half_width, 8, 0.0).unwrap();
    let tables = build_kernel_tables(&grid).unwrap();
    let mut worst = 0.0f64;
    for (idx, l) in modes(8) {
        for m in [[0, 0, 0], [1, 2, 3], [-4, 0, 7], [8, -8, 8], [-1, -1, 0]] {
            let b = beta_maxwell(l, m, half_width);
            worst = worst.max((tables.reconstruct(idx, m) - b).abs() / (1.0 + b.abs()));
        }
    }
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn general_gamma_reconstruction_against_quadrature() {
    for gamma in [-2.0, 0.5] {
        let grid = GridSpec::new(2.5, 8, gamma).unwrap();
        let tables = build_kernel_tables(&grid).unwrap();
        let params = BetaParams::new(gamma, 2.5).unwrap();
        for (idx, l) in modes(8).step_by(7) {
            for m in [[0, 0, 0], [3, -2, 1], [-8, 5, 8]] {
                let b = beta_quadrature(l, m, &params, 1e-10).unwrap();
                assert!((tables.reconstruct(idx, m) - b).abs() <= 1e-8 * (1.0 + b.abs()));
            }
        }
    }
}

#[test]
fn coulomb_profiles_small_radius_series() {
    // Longer Taylor expansions of the three combinations at x = s pi.
    let x: f64 = 5e-4;
    let x2 = x * x;
    let one_minus_sinc = x2 / 6.0 - x2 * x2 / 120.0 + x2.powi(3) / 5040.0 - x2.powi(4) / 362880.0;
    let cos_minus_sinc = -x2 / 3.0 + x2 * x2 / 30.0 - x2.powi(3) / 840.0 + x2.powi(4) / 45360.0;
    let cos_plus_two = x2 * x2 / 60.0 - x2.powi(3) / 1260.0 + x2.powi(4) / 60480.0;
    let s = x / PI;
    let (a, b, c) = coulomb_profiles(s);
    assert!((a - 8.0 * PI * one_minus_sinc).abs() <= 1e-14 * a.abs());
    assert!((b - 4.0 * PI * cos_minus_sinc / (s * s)).abs() <= 1e-12 * b.abs());
    assert!((c + 4.0 * PI * cos_plus_two / s.powi(4)).abs() <= 1e-12 * c.abs());
    assert_eq!(coulomb_profiles(0.0), (0.0, -4.0 * PI.powi(3) / 3.0, 0.0));
}

fn vec3() -> impl Strategy<Value = [i64; 3]> {
    prop::array::uniform3(-12i64..=12)
}

proptest! {
    #[test]
    fn parity_is_exact(l in vec3(), m in vec3()) {
        let neg = |k: [i64; 3]| [-k[0], -k[1], -k[2]];
        prop_assert_eq!(beta_coulomb(neg(l), neg(m)), beta_coulomb(l, m));
        let p = BetaParams::new(-1.0, 3.0).unwrap();
        prop_assert_eq!(
            beta_quadrature(neg(l), neg(m), &p, 1e-10).unwrap(),
            beta_quadrature(l, m, &p, 1e-10).unwrap()
        );
    }

    #[test]
    fn rotation_by_axis_permutation_is_invariant(l in vec3(), m in vec3()) {
        let rot = |k: [i64; 3]| [k[2], k[0], k[1]];
        let a = beta_coulomb(l, m);
        prop_assert!((beta_coulomb(rot(l), rot(m)) - a).abs() <= 1e-13 * (1.0 + a.abs()));
    }

    #[test]
    fn quadratic_in_m(l in vec3(), m in prop::array::uniform3(-6i64..=6)) {
        // beta(l, 2m) - 4 beta(l, m) is m-independent: it equals -3 A(l).
        let two_m = m.map(|c| 2 * c);
        let b0 = beta_coulomb(l, [0, 0, 0]);
        let lhs = beta_coulomb(l, two_m) - 4.0 * beta_coulomb(l, m);
        prop_assert!((lhs + 3.0 * b0).abs() <= 1e-11 * (1.0 + beta_coulomb(l, two_m).abs()));
    }

    #[test]
    fn radial_beta_agrees_with_pairwise_quadrature(l in prop::array::uniform3(-4i64..4), m in vec3()) {
        let grid = GridSpec::new(2.0, 8, -1.5).unwrap();
        let rb = RadialBeta::for_grid(&grid, 1e-10).unwrap();
        let p = BetaParams::new(-1.5, 2.0).unwrap();
        let q = beta_quadrature(l, m, &p, 1e-10).unwrap();
        prop_assert!((rb.eval(l, m) - q).abs() <= 1e-13 * (1.0 + q.abs()));
    }
}
