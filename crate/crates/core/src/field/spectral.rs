//! 2-D transforms on square grids built from 1-D `rustfft` plans.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place 2-D complex FFT of an `n`-by-`n` row-major array.
///
/// Unnormalised in both directions, as `rustfft` is.
pub(crate) fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n * n);
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(n) {
        plan.process_with_scratch(row, &mut scratch);
    }
    transpose(data, n);
    for row in data.chunks_exact_mut(n) {
        plan.process_with_scratch(row, &mut scratch);
    }
    transpose(data, n);
}

fn transpose<T: Copy>(data: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Signed integer frequency of FFT bin `k` (`k` in `0..n`).
#[inline]
pub(crate) fn wavenumber(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Type-I discrete sine transform of each row:
/// `out[k] = sum_{j=1..=m} x[j-1] sin(pi j k / (m + 1))` for `k = 1..=m`,
/// computed through an FFT of length `2 (m + 1)`.
struct Dst1 {
    m: usize,
    plan: std::sync::Arc<dyn rustfft::Fft<f64>>,
    buffer: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Dst1 {
    fn new(m: usize) -> Self {
        let len = 2 * (m + 1);
        let plan = FftPlanner::<f64>::new().plan_fft_forward(len);
        let scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        Dst1 {
            m,
            plan,
            buffer: vec![Complex64::new(0.0, 0.0); len],
            scratch,
        }
    }

    fn apply(&mut self, row: &mut [f64]) {
        let m = self.m;
        let half = m + 1;
        self.buffer.fill(Complex64::new(0.0, 0.0));
        for (j, &v) in row.iter().enumerate() {
            self.buffer[j + 1] = Complex64::new(v, 0.0);
            self.buffer[2 * half - (j + 1)] = Complex64::new(-v, 0.0);
        }
        self.plan
            .process_with_scratch(&mut self.buffer, &mut self.scratch);
        // FFT of the odd extension is -2i times the sine sum.
        for (k, out) in row.iter_mut().enumerate() {
            *out = -0.5 * self.buffer[k + 1].im;
        }
    }
}

/// Separable 2-D DST-I of an `m`-by-`m` array.
pub(crate) fn dst2(data: &mut [f64], m: usize) {
    debug_assert_eq!(data.len(), m * m);
    let mut dst = Dst1::new(m);
    for row in data.chunks_exact_mut(m) {
        dst.apply(row);
    }
    transpose(data, m);
    for row in data.chunks_exact_mut(m) {
        dst.apply(row);
    }
    transpose(data, m);
}
