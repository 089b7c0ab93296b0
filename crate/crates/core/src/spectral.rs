//! 2-D discrete Fourier transforms on the periodic grid.
//!
//! Coefficients are stored in FFT bin order. Bin `q` along an axis carries the
//! integer wavenumber `m = q` for `q <= N/2` and `m = q - N` otherwise, with
//! `k = 2π m / L`. The forward transform is scaled by `h²`, so the zero mode is
//! the quadrature integral `h² Σ f`; the inverse divides by `L²`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;

/// Signed wavenumber index of FFT bin `q`.
pub fn bin_wavenumber(q: usize, n: usize) -> i64 {
    if q <= n / 2 {
        q as i64
    } else {
        q as i64 - n as i64
    }
}

/// `|k|²` for every 2-D bin.
pub fn wavenumber_sq(grid: &GridSpec) -> Vec<f64> {
    let n = grid.n();
    let base = 2.0 * PI / grid.length();
    let k2: Vec<f64> = (0..n)
        .map(|q| {
            let k = base * bin_wavenumber(q, n) as f64;
            k * k
        })
        .collect();
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            out.push(k2[a] + k2[b]);
        }
    }
    out
}

#[derive(Clone)]
pub struct Fourier {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("grid", &self.grid).finish()
    }
}

impl Fourier {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    fn transform_2d(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        plan.process(buf);
        transpose(buf, n);
        plan.process(buf);
        transpose(buf, n);
    }

    /// Scaled forward transform of real node data.
    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.transform_2d(buf, &self.forward);
        let w = self.grid.cell_area();
        buf.iter_mut().for_each(|c| *c *= w);
    }

    /// Inverse transform; returns the real part.
    pub fn inverse_real(&self, mut coeffs: Vec<Complex64>) -> Vec<f64> {
        self.inverse_in_place(&mut coeffs);
        coeffs.into_iter().map(|c| c.re).collect()
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.transform_2d(buf, &self.inverse);
        let l = self.grid.length();
        let s = 1.0 / (l * l);
        buf.iter_mut().for_each(|c| *c *= s);
    }

    /// Multiplies a real field by a real, even Fourier symbol.
    pub fn apply_symbol(&self, data: &mut [f64], symbol: &[f64]) {
        let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.filter(&mut buf, symbol);
        for (d, c) in data.iter_mut().zip(&buf) {
            *d = c.re;
        }
    }

    /// Applies a real, even symbol to two real fields at once, packed as the
    /// real and imaginary parts of one complex transform.
    pub fn apply_symbol_pair(&self, a: &mut [f64], b: &mut [f64], symbol: &[f64], buf: &mut Vec<Complex64>) {
        buf.clear();
        buf.extend(a.iter().zip(b.iter()).map(|(&x, &y)| Complex64::new(x, y)));
        self.filter(buf, symbol);
        for ((x, y), c) in a.iter_mut().zip(b.iter_mut()).zip(buf.iter()) {
            *x = c.re;
            *y = c.im;
        }
    }

    /// Applies `symbol` to every contiguous slice of length `N²` in `data`.
    pub fn apply_symbol_slices(&self, data: &mut [f64], symbol: &[f64]) {
        let np = self.grid.points();
        let mut buf = Vec::with_capacity(np);
        let mut chunks = data.chunks_exact_mut(2 * np);
        for pair in &mut chunks {
            let (a, b) = pair.split_at_mut(np);
            self.apply_symbol_pair(a, b, symbol, &mut buf);
        }
        let rest = chunks.into_remainder();
        if !rest.is_empty() {
            self.apply_symbol(rest, symbol);
        }
    }

    fn filter(&self, buf: &mut [Complex64], symbol: &[f64]) {
        // The h² and 1/L² scalings cancel up to N²; fold them into one factor.
        let n = self.grid.n();
        let norm = 1.0 / (n * n) as f64;
        self.transform_2d(buf, &self.forward);
        for (c, s) in buf.iter_mut().zip(symbol) {
            *c *= s * norm;
        }
        self.transform_2d(buf, &self.inverse);
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Rolls node data by `N/2` along both axes, moving the origin from index 0
/// to the centre node (and back, since the roll is an involution for even N).
pub fn roll_half(data: &[f64], n: usize) -> Vec<f64> {
    let half = n / 2;
    let mut out = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            out[((a + half) % n) * n + (b + half) % n] = data[a * n + b];
        }
    }
    out
}
