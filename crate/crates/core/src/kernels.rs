//! Home profile, heat kernel and equilibrium kernel, all defined on the grid
//! through their Fourier symbols.
//!
//! A discrete kernel is the inverse transform of its symbol, which makes it the
//! exact periodization of the continuous kernel up to the truncation of modes
//! beyond Nyquist. Mass normalization, the semigroup property and the matching
//! identity `ρ = K(t₀)` then hold on the grid to round-off.

use log::warn;

use crate::error::{positive, Error, Result};
use crate::grid::{GridSpec, ScalarField, TravelerField};
use crate::spectral::{roll_half, wavenumber_sq, Fourier};

/// Constants of the linear return-to-home model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreParams {
    /// Return-home rate.
    pub alpha: f64,
    /// Leave-home rate.
    pub gamma: f64,
    /// Square root of the traveler diffusion coefficient.
    pub epsilon: f64,
    /// Width of the Gaussian home profile.
    pub sigma: f64,
}

impl CoreParams {
    pub fn new(alpha: f64, gamma: f64, epsilon: f64, sigma: f64) -> Result<Self> {
        let p = Self {
            alpha,
            gamma,
            epsilon,
            sigma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("alpha", self.alpha)?;
        positive("gamma", self.gamma)?;
        positive("epsilon", self.epsilon)?;
        positive("sigma", self.sigma)
    }

    pub fn diffusivity(&self) -> f64 {
        self.epsilon * self.epsilon
    }

    /// Fraction of the population at home at equilibrium, `α / (α + γ)`.
    pub fn home_fraction(&self) -> f64 {
        self.alpha / (self.alpha + self.gamma)
    }
}

/// Real Fourier symbol over the grid's wavenumbers, in FFT bin order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSymbol {
    grid: GridSpec,
    values: Vec<f64>,
}

impl SpectralSymbol {
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values = wavenumber_sq(&grid).into_iter().map(f).collect();
        Self { grid, values }
    }

    /// `e^{-ε² |k|² t}`.
    pub fn heat(grid: GridSpec, epsilon: f64, t: f64) -> Self {
        let d = epsilon * epsilon;
        Self::from_fn(grid, |k2| (-d * k2 * t).exp())
    }

    /// `e^{-σ² |k|² / 2}`.
    pub fn gaussian(grid: GridSpec, sigma: f64) -> Self {
        Self::from_fn(grid, |k2| (-0.5 * sigma * sigma * k2).exp())
    }

    /// `γ e^{-ε²|k|² t₀} / (α + ε²|k|²)`.
    pub fn chi(params: &CoreParams, grid: GridSpec) -> Self {
        let t0 = matching_time(params);
        let d = params.diffusivity();
        Self::from_fn(grid, |k2| {
            let lam = d * k2;
            params.gamma * (-lam * t0).exp() / (params.alpha + lam)
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the centered integer wavenumber `(m1, m2)`.
    pub fn value_at(&self, m1: i64, m2: i64) -> f64 {
        let n = self.grid.n() as i64;
        let q1 = m1.rem_euclid(n) as usize;
        let q2 = m2.rem_euclid(n) as usize;
        self.values[q1 * n as usize + q2]
    }

    /// Kernel whose symbol this is, on the grid nodes (offset zero at the
    /// centre node).
    pub fn to_field(&self) -> ScalarField {
        let fourier = Fourier::new(self.grid);
        let coeffs = self
            .values
            .iter()
            .map(|&s| rustfft::num_complex::Complex64::new(s, 0.0))
            .collect();
        let origin_first = fourier.inverse_real(coeffs);
        ScalarField::from_vec_unchecked(self.grid, roll_half(&origin_first, self.grid.n()))
    }
}

/// Discrete Gaussian home profile `ρ_d`.
pub fn gaussian_rho(grid: GridSpec, sigma: f64) -> Result<ScalarField> {
    positive("sigma", sigma)?;
    if sigma < 2.0 * grid.spacing() {
        warn!(
            "home profile under-resolved: sigma = {sigma} < 2h = {}",
            2.0 * grid.spacing()
        );
    }
    Ok(SpectralSymbol::gaussian(grid, sigma).to_field())
}

/// Discrete heat kernel `K_d(t)` for `t > 0`.
pub fn heat_kernel(grid: GridSpec, epsilon: f64, t: f64) -> Result<ScalarField> {
    positive("t", t)?;
    positive("epsilon", epsilon)?;
    Ok(SpectralSymbol::heat(grid, epsilon, t).to_field())
}

/// Time `t₀ = σ² / (2ε²)` at which the heat kernel equals the home profile.
pub fn matching_time(params: &CoreParams) -> f64 {
    params.sigma * params.sigma / (2.0 * params.diffusivity())
}

/// Equilibrium traveler kernel `χ(z) = γ ∫₀^∞ e^{-αt} K(t + t₀, z) dt`.
pub fn chi_kernel(params: &CoreParams, grid: GridSpec) -> ScalarField {
    SpectralSymbol::chi(params, grid).to_field()
}

/// Fields that can be filtered by a Fourier symbol along their position axis.
pub trait SpectralField: Sized {
    fn spectral_grid(&self) -> GridSpec;
    fn filtered(&self, fourier: &Fourier, symbol: &[f64]) -> Self;
}

impl SpectralField for ScalarField {
    fn spectral_grid(&self) -> GridSpec {
        self.grid()
    }

    fn filtered(&self, fourier: &Fourier, symbol: &[f64]) -> Self {
        let mut values = self.values().to_vec();
        fourier.apply_symbol(&mut values, symbol);
        ScalarField::from_vec_unchecked(self.grid(), values)
    }
}

impl SpectralField for TravelerField {
    fn spectral_grid(&self) -> GridSpec {
        self.grid()
    }

    // Each home slice is filtered along its first axis; in the Lagrangian frame
    // that axis is the offset z, and a per-home shift commutes with the filter.
    fn filtered(&self, fourier: &Fourier, symbol: &[f64]) -> Self {
        let mut out = self.clone();
        fourier.apply_symbol_slices(out.values_mut(), symbol);
        out
    }
}

/// Heat semigroup `T_{ε²Δ}(t)` applied along the position axis.
pub fn heat_propagate<F: SpectralField>(field: &F, t: f64, epsilon: f64) -> Result<F> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    positive("epsilon", epsilon)?;
    let grid = field.spectral_grid();
    let symbol = SpectralSymbol::heat(grid, epsilon, t);
    Ok(field.filtered(&Fourier::new(grid), symbol.values()))
}

/// Spectral Laplacian along the position axis.
pub fn laplacian<F: SpectralField>(field: &F) -> F {
    let grid = field.spectral_grid();
    let symbol: Vec<f64> = wavenumber_sq(&grid).into_iter().map(|k2| -k2).collect();
    field.filtered(&Fourier::new(grid), &symbol)
}
