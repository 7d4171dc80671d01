//! Unnormalized 3-D FFTs on `n^3` cubes stored row-major (third index fastest).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct CubeFft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<CubeFft>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<CubeFft>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared plan for cubes of side `n`.
pub(crate) fn plan(n: usize) -> Arc<CubeFft> {
    let mut map = cache().lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(CubeFft {
                n,
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl CubeFft {
    /// `X(k) = sum_j x(j) exp(-2 pi i k.j / n)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &*self.forward);
    }

    /// `x(j) = sum_k X(k) exp(+2 pi i k.j / n)` (no `1/n^3`).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &*self.inverse);
    }

    // The fastest axis is transformed in place. For the other two, each
    // `n x n` plane is transposed into a scratch buffer, transformed along
    // its rows, and written back.
    fn transform(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let n = self.n;
        let nn = n * n;
        assert_eq!(data.len(), nn * n, "cube FFT length mismatch");
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut plane = vec![Complex64::new(0.0, 0.0); nn];
        fft.process_with_scratch(data, &mut scratch);
        for i0 in 0..n {
            let slab = &mut data[i0 * nn..(i0 + 1) * nn];
            for i1 in 0..n {
                for i2 in 0..n {
                    plane[i2 * n + i1] = slab[i1 * n + i2];
                }
            }
            fft.process_with_scratch(&mut plane, &mut scratch);
            for i1 in 0..n {
                for i2 in 0..n {
                    slab[i1 * n + i2] = plane[i2 * n + i1];
                }
            }
        }
        for i1 in 0..n {
            for i0 in 0..n {
                let row = &data[i0 * nn + i1 * n..i0 * nn + i1 * n + n];
                for (i2, &v) in row.iter().enumerate() {
                    plane[i2 * n + i0] = v;
                }
            }
            fft.process_with_scratch(&mut plane, &mut scratch);
            for i0 in 0..n {
                let row = &mut data[i0 * nn + i1 * n..i0 * nn + i1 * n + n];
                for (i2, v) in row.iter_mut().enumerate() {
                    *v = plane[i2 * n + i0];
                }
            }
        }
    }
}
