//! FFT helpers on uniform circle grids.

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        if let Some(f) = p.1.get(&(n, forward)) {
            return f.clone();
        }
        let f = if forward { p.0.plan_fft_forward(n) } else { p.0.plan_fft_inverse(n) };
        p.1.insert((n, forward), f.clone());
        f
    })
}

/// In-place forward transform, kernel e^{-2πijk/n}, unnormalized.
pub fn fft(buf: &mut [C64]) {
    plan(buf.len(), true).process(buf);
}

/// In-place inverse transform, kernel e^{+2πijk/n}, unnormalized.
pub fn ifft(buf: &mut [C64]) {
    plan(buf.len(), false).process(buf);
}

/// Normalized Fourier coefficients c_k = (1/n) Σ x_j e^{-ikθ_j}, index k mod n.
pub fn coefficients_real(x: &[f64]) -> Vec<C64> {
    let n = x.len() as f64;
    let mut buf: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
    fft(&mut buf);
    for c in buf.iter_mut() {
        *c /= n;
    }
    buf
}

pub fn coefficients(x: &[C64]) -> Vec<C64> {
    let n = x.len() as f64;
    let mut buf = x.to_vec();
    fft(&mut buf);
    for c in buf.iter_mut() {
        *c /= n;
    }
    buf
}

/// Map normalized coefficients of length n into a length-m spectrum (m ≥ n), splitting Nyquist.
pub fn pad_spectrum(c: &[C64], m: usize) -> Vec<C64> {
    let n = c.len();
    assert!(m >= n);
    let mut out = vec![C64::new(0.0, 0.0); m];
    if n == 1 {
        out[0] = c[0];
        return out;
    }
    let half = n / 2;
    out[0] = c[0];
    for k in 1..half {
        out[k] = c[k];
        out[m - k] = c[n - k];
    }
    if m == n {
        out[half] = c[half];
    } else {
        out[half] = 0.5 * c[half];
        out[m - half] = 0.5 * c[half];
    }
    out
}

/// Band-limited resampling of a real periodic sequence onto m ≥ n points.
pub fn resample_real(x: &[f64], m: usize) -> Vec<f64> {
    if m == x.len() {
        return x.to_vec();
    }
    let c = coefficients_real(x);
    let mut s = pad_spectrum(&c, m);
    ifft(&mut s);
    s.into_iter().map(|v| v.re).collect()
}

/// Cyclic convolution (a ⋆ b)_l = Σ_j a_j b_{l-j}.
pub fn cyclic_conv(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len();
    assert_eq!(n, b.len());
    let mut fa = a.to_vec();
    let mut fb = b.to_vec();
    fft(&mut fa);
    fft(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    ifft(&mut fa);
    let inv = 1.0 / n as f64;
    for x in fa.iter_mut() {
        *x *= inv;
    }
    fa
}

/// Convolution of real data with a precomputed kernel spectrum (forward FFT of the kernel).
pub fn conv_with_spectrum(x: &[C64], kernel_spec: &[C64]) -> Vec<C64> {
    let n = x.len();
    let mut f = x.to_vec();
    fft(&mut f);
    for (a, b) in f.iter_mut().zip(kernel_spec) {
        *a *= b;
    }
    ifft(&mut f);
    let inv = 1.0 / n as f64;
    for v in f.iter_mut() {
        *v *= inv;
    }
    f
}

pub fn spectrum_of(x: &[f64]) -> Vec<C64> {
    let mut buf: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
    fft(&mut buf);
    buf
}

pub fn is_pow2(n: usize) -> bool {
    n >= 1 && n & (n - 1) == 0
}

pub fn next_pow2_at_least(x: f64) -> usize {
    let mut m = 1usize;
    while (m as f64) < x {
        m <<= 1;
    }
    m
}
