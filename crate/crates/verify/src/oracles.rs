//! Brute-force references that share only the grid with the solver.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use rhsim_core::epidemic::{EpidemicParams, EpidemicState};
use rhsim_core::kernels::{gaussian_rho, heat_propagate, matching_time, SpectralSymbol};
use rhsim_core::{CoreParams, Frame, GridSpec, Result, ScalarField, TravelerField};

/// `ε²Δ` on one N×N slice, by a plain row/column FFT.
pub struct SpectralLaplacian {
    n: usize,
    symbol: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    col: Vec<Complex64>,
}

impl SpectralLaplacian {
    pub fn new(grid: GridSpec, diffusivity: f64) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let k = |q: usize| {
            let m = if q < n / 2 { q as f64 } else { q as f64 - n as f64 };
            2.0 * PI * m / grid.length()
        };
        let mut symbol = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                symbol.push(-diffusivity * (k(a) * k(a) + k(b) * k(b)));
            }
        }
        Self {
            n,
            symbol,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            buf: vec![Complex64::default(); n * n],
            col: vec![Complex64::default(); n],
        }
    }

    fn transform(&mut self, fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        for row in self.buf.chunks_exact_mut(n) {
            fft.process(row);
        }
        for c in 0..n {
            for r in 0..n {
                self.col[r] = self.buf[r * n + c];
            }
            fft.process(&mut self.col);
            for r in 0..n {
                self.buf[r * n + c] = self.col[r];
            }
        }
    }

    pub fn apply(&mut self, input: &[f64], out: &mut [f64]) {
        for (b, x) in self.buf.iter_mut().zip(input) {
            *b = Complex64::new(*x, 0.0);
        }
        let fwd = Arc::clone(&self.forward);
        self.transform(&fwd);
        for (b, s) in self.buf.iter_mut().zip(&self.symbol) {
            *b *= *s;
        }
        let inv = Arc::clone(&self.inverse);
        self.transform(&inv);
        let scale = 1.0 / (self.n * self.n) as f64;
        for (o, b) in out.iter_mut().zip(&self.buf) {
            *o = b.re * scale;
        }
    }
}

/// Explicit RK4 on the flattened epidemic system
///
/// ```text
/// s₁' = −γs₁ + α∫s₂dx − κ₁s₁i₁
/// i₁' = −γi₁ + α∫i₂dx + κ₁s₁i₁ − ν₁i₁
/// s₂' = ε²Δs₂ − αs₂ + γρ(x−y)s₁ − κ₂s₂I(x)
/// i₂' = ε²Δi₂ − αi₂ + γρ(x−y)i₁ + κ₂s₂I(x) − ν₂i₂
/// ```
///
/// Homes whose four components are identically zero have zero right-hand
/// side and stay zero, so they are skipped.
pub struct EpidemicOracle {
    grid: GridSpec,
    params: EpidemicParams,
    rho: Vec<f64>,
    lap: SpectralLaplacian,
}

/// Per active home: `s₁, i₁, s₂(·), i₂(·)`.
#[derive(Clone)]
struct Flat {
    homes: Vec<usize>,
    s1: Vec<f64>,
    i1: Vec<f64>,
    s2: Vec<Vec<f64>>,
    i2: Vec<Vec<f64>>,
}

impl Flat {
    fn axpy(&self, a: f64, d: &Flat) -> Flat {
        let add = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p + a * q).collect::<Vec<_>>();
        Flat {
            homes: self.homes.clone(),
            s1: add(&self.s1, &d.s1),
            i1: add(&self.i1, &d.i1),
            s2: self.s2.iter().zip(&d.s2).map(|(x, y)| add(x, y)).collect(),
            i2: self.i2.iter().zip(&d.i2).map(|(x, y)| add(x, y)).collect(),
        }
    }
}

impl EpidemicOracle {
    pub fn new(grid: GridSpec, params: EpidemicParams) -> Result<Self> {
        params.validate()?;
        let rho = gaussian_rho(grid, params.core.sigma)?.into_values();
        Ok(Self {
            grid,
            params,
            rho,
            lap: SpectralLaplacian::new(grid, params.core.diffusivity()),
        })
    }

    fn flatten(&self, state: &EpidemicState) -> Result<Flat> {
        let np = self.grid.points();
        let s2 = to_euler(&state.s2)?;
        let i2 = to_euler(&state.i2)?;
        let homes: Vec<usize> = (0..np)
            .filter(|&y| {
                state.s1.values()[y] != 0.0
                    || state.i1.values()[y] != 0.0
                    || s2.home_slice(y).iter().any(|&v| v != 0.0)
                    || i2.home_slice(y).iter().any(|&v| v != 0.0)
            })
            .collect();
        Ok(Flat {
            s1: homes.iter().map(|&y| state.s1.values()[y]).collect(),
            i1: homes.iter().map(|&y| state.i1.values()[y]).collect(),
            s2: homes.iter().map(|&y| s2.home_slice(y).to_vec()).collect(),
            i2: homes.iter().map(|&y| i2.home_slice(y).to_vec()).collect(),
            homes,
        })
    }

    fn unflatten(&self, f: &Flat, t: f64) -> Result<EpidemicState> {
        let np = self.grid.points();
        let mut s1 = vec![0.0; np];
        let mut i1 = vec![0.0; np];
        let mut s2 = vec![0.0; np * np];
        let mut i2 = vec![0.0; np * np];
        for (k, &y) in f.homes.iter().enumerate() {
            s1[y] = f.s1[k];
            i1[y] = f.i1[k];
            s2[y * np..(y + 1) * np].copy_from_slice(&f.s2[k]);
            i2[y * np..(y + 1) * np].copy_from_slice(&f.i2[k]);
        }
        let mut st = EpidemicState::new(
            ScalarField::new(self.grid, s1)?,
            ScalarField::new(self.grid, i1)?,
            TravelerField::new(self.grid, Frame::Eulerian, s2)?,
            TravelerField::new(self.grid, Frame::Eulerian, i2)?,
        )?;
        st.t = t;
        Ok(st)
    }

    fn rhs(&mut self, f: &Flat) -> Flat {
        let CoreParams { alpha, gamma, .. } = self.params.core;
        let EpidemicParams { kappa1, kappa2, nu1, nu2, .. } = self.params;
        let np = self.grid.points();
        let area = self.grid.cell_area();
        let n = self.grid.n();
        let mut pooled = vec![0.0; np];
        for slice in &f.i2 {
            for (p, v) in pooled.iter_mut().zip(slice) {
                *p += area * v;
            }
        }
        let mut out = f.clone();
        let mut lap = vec![0.0; np];
        for (k, &y) in f.homes.iter().enumerate() {
            let (s1, i1) = (f.s1[k], f.i1[k]);
            let int_s2: f64 = f.s2[k].iter().sum::<f64>() * area;
            let int_i2: f64 = f.i2[k].iter().sum::<f64>() * area;
            let home_inc = kappa1 * s1 * i1;
            out.s1[k] = -gamma * s1 + alpha * int_s2 - home_inc;
            out.i1[k] = -gamma * i1 + alpha * int_i2 + home_inc - nu1 * i1;
            // ρ(x − y) with the offset taken on the torus, centred at node N/2.
            let (y1, y2) = (y / n, y % n);
            let rho_at = |x: usize| {
                let (x1, x2) = (x / n, x % n);
                let d1 = (x1 + n + n / 2 - y1) % n;
                let d2 = (x2 + n + n / 2 - y2) % n;
                self.rho[d1 * n + d2]
            };
            self.lap.apply(&f.s2[k], &mut lap);
            for x in 0..np {
                let inc = kappa2 * f.s2[k][x] * pooled[x];
                out.s2[k][x] = lap[x] - alpha * f.s2[k][x] + gamma * rho_at(x) * s1 - inc;
            }
            self.lap.apply(&f.i2[k], &mut lap);
            for x in 0..np {
                let inc = kappa2 * f.s2[k][x] * pooled[x];
                out.i2[k][x] =
                    lap[x] - alpha * f.i2[k][x] + gamma * rho_at(x) * i1 + inc - nu2 * f.i2[k][x];
            }
        }
        out
    }

    /// States at each requested time (ascending, > 0), marching with `dt`.
    pub fn solve(&mut self, state0: &EpidemicState, times: &[f64], dt: f64) -> Result<Vec<EpidemicState>> {
        let mut f = self.flatten(state0)?;
        let mut t = 0.0;
        let mut out = Vec::with_capacity(times.len());
        for &target in times {
            let steps = ((target - t) / dt).round().max(1.0) as usize;
            let h = (target - t) / steps as f64;
            for _ in 0..steps {
                let k1 = self.rhs(&f);
                let k2 = self.rhs(&f.axpy(0.5 * h, &k1));
                let k3 = self.rhs(&f.axpy(0.5 * h, &k2));
                let k4 = self.rhs(&f.axpy(h, &k3));
                f = f
                    .axpy(h / 6.0, &k1)
                    .axpy(h / 3.0, &k2)
                    .axpy(h / 3.0, &k3)
                    .axpy(h / 6.0, &k4);
            }
            t = target;
            out.push(self.unflatten(&f, t)?);
        }
        Ok(out)
    }
}

fn to_euler(v: &TravelerField) -> Result<TravelerField> {
    match v.frame() {
        Frame::Eulerian => Ok(v.clone()),
        Frame::Lagrangian => rhsim_core::grid::to_eulerian(v),
    }
}

/// Composite midpoint rule on `[0, t]` with `nodes` panels.
pub fn midpoint(t: f64, nodes: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = t / nodes as f64;
    (0..nodes).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>() * h
}

/// The two deposit symbols of the transient solution, by time quadrature of
/// their defining integrals.
pub fn transient_symbols_by_quadrature(
    t: f64,
    params: &CoreParams,
    grid: GridSpec,
    nodes: usize,
) -> (SpectralSymbol, SpectralSymbol) {
    let t0 = matching_time(params);
    let d = params.diffusivity();
    let (alpha, gamma) = (params.alpha, params.gamma);
    let relaxing = SpectralSymbol::from_fn(grid, |k2| {
        let lam = d * k2;
        (-alpha * t).exp() * midpoint(t, nodes, |s| (-gamma * s - lam * (t + t0 - s)).exp())
    });
    let filling = SpectralSymbol::from_fn(grid, |k2| {
        let lam = d * k2;
        midpoint(t, nodes, |s| alpha * (-alpha * s - lam * (s + t0)).exp())
    });
    (relaxing, filling)
}

/// Transient traveler density assembled from quadrature symbols in the
/// Eulerian frame.
pub fn v_by_quadrature(
    t: f64,
    u0: &ScalarField,
    v0: &TravelerField,
    h0: &ScalarField,
    params: &CoreParams,
    nodes: usize,
) -> Result<TravelerField> {
    let grid = u0.grid();
    let (relax, fill) = transient_symbols_by_quadrature(t, params, grid, nodes);
    let frac = params.alpha / (params.alpha + params.gamma);
    let a = u0.axpby(params.gamma, h0, -params.gamma * frac)?;
    let b = h0.scale(params.gamma / (params.alpha + params.gamma));
    let transported = heat_propagate(v0, t, params.epsilon)?.scale((-params.alpha * t).exp());
    transported
        .axpby(1.0, &TravelerField::from_profile(&relax.to_field(), &a)?, 1.0)?
        .axpby(1.0, &TravelerField::from_profile(&fill.to_field(), &b)?, 1.0)
}

/// Observed orders `log(eᵢ/eᵢ₊₁)/log(ratio)` for successive refinements.
pub fn observed_orders(errors: &[f64], ratio: f64) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| (w[0] / w[1]).ln() / ratio.ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rhsim_core::kernels::laplacian;
    use rhsim_core::init::gaussian_blob;

    #[test]
    fn orders_of_synthetic_sequences() {
        let e: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|h: &f64| 3.0 * h * h).collect();
        for p in observed_orders(&e, 2.0) {
            assert!((p - 2.0).abs() < 1e-12);
        }
        let e: Vec<f64> = [0.1, 0.05].iter().map(|h: &f64| 0.5 * h).collect();
        assert!((observed_orders(&e, 2.0)[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn midpoint_is_exact_for_lines_and_second_order() {
        assert!((midpoint(2.0, 3, |s| 3.0 * s + 1.0) - 8.0).abs() < 1e-14);
        let exact = 1.0 - (-1.0f64).exp();
        let e1 = (midpoint(1.0, 100, |s| (-s).exp()) - exact).abs();
        let e2 = (midpoint(1.0, 200, |s| (-s).exp()) - exact).abs();
        assert!((e1 / e2 - 4.0).abs() < 1e-3);
    }

    #[test]
    fn laplacian_agrees_with_solver() {
        let g = GridSpec::new(9.0, 16).unwrap();
        let f = gaussian_blob(g, (1.0, -0.5), 1.4, 1.0).unwrap();
        let mut lap = SpectralLaplacian::new(g, 1.0);
        let mut out = vec![0.0; g.points()];
        lap.apply(f.values(), &mut out);
        let reference = laplacian(&f);
        let err = out
            .iter()
            .zip(reference.values())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "{err}");
    }
}
