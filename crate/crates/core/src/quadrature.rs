//! Globally adaptive 21-point Gauss-Kronrod quadrature.

use crate::error::{Result, SolverError};

// Kronrod abscissae on [0, 1]; odd entries (1, 3, ..., 9) are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_715_008_491_000,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_146,
];

/// Maximum number of subintervals before giving up.
pub const MAX_INTERVALS: usize = 10_000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

fn gk21(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut resabs = WGK[10] * fc.abs();
    for j in 0..10 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        kronrod += WGK[j] * (lo + hi);
        resabs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        magnitude: resabs * half.abs(),
    }
}

/// Integrate `f` over `[a, b]` to absolute accuracy `tol`.
///
/// The interval is first split into panels no longer than `panel`, then the
/// panel with the largest error estimate is bisected until the summed
/// estimate drops below `tol`, or below the rounding floor
/// `50 eps \int |f|` when that is larger.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, panel: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(SolverError::InvalidParameter(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let pieces = (((b - a).abs() / panel).ceil() as usize).max(1);
    let width = (b - a) / pieces as f64;
    let mut panels: Vec<Panel> = (0..pieces)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == pieces { b } else { lo + width };
            gk21(&f, lo, hi)
        })
        .collect();
    loop {
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let floor = 50.0 * f64::EPSILON * panels.iter().map(|p| p.magnitude).sum::<f64>();
        if !(error.is_finite() && floor.is_finite()) {
            return Err(SolverError::Quadrature {
                tol,
                estimate: error,
                intervals: panels.len(),
            });
        }
        if error <= tol.max(floor) {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= MAX_INTERVALS {
            return Err(SolverError::Quadrature {
                tol,
                estimate: error,
                intervals: panels.len(),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gk21(&f, p.a, mid));
        panels.push(gk21(&f, mid, p.b));
    }
}
