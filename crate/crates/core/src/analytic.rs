//! Closed-form transient solution and equilibrium of the linear model.
//!
//! With `h₀ = u₀ + ∫ v₀ dx` and `ū = α/(α+γ) h₀`,
//!
//! ```text
//! u(t) = u₀ e^{−(α+γ)t} + ū (1 − e^{−(α+γ)t})
//! v(t) = e^{−αt} T(t) v₀
//!      + γ (u₀ − ū)(y) · e^{−αt} ∫₀ᵗ e^{−γs} K(t + t₀ − s, x − y) ds
//!      + γ/(α+γ) h₀(y) · ∫₀ᵗ α e^{−αs} K(s + t₀, x − y) ds
//! ```
//!
//! The two time integrals are evaluated per Fourier mode in closed form. Both
//! multiply a home weight by a profile of `x − y`, so they are assembled in the
//! Lagrangian frame and shifted back.

use crate::error::{Error, Result};
use crate::grid::{to_eulerian, Frame, GridSpec, ScalarField, TravelerField};
use crate::kernels::{
    chi_kernel, gaussian_rho, heat_propagate, laplacian, matching_time, CoreParams, SpectralSymbol,
};

/// Below this exponent gap the divided difference switches to its series.
const SERIES_THRESHOLD: f64 = 1e-8;

pub fn u_exact(t: f64, u0: &ScalarField, h0: &ScalarField, params: &CoreParams) -> Result<ScalarField> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let decay = (-(params.alpha + params.gamma) * t).exp();
    let frac = params.home_fraction();
    u0.axpby(decay, h0, frac * (1.0 - decay))
}

/// Per-mode symbols of the two deposit profiles at time `t`:
/// `e^{−αt} ∫₀ᵗ e^{−γs} e^{−λ(t+t₀−s)} ds` and `∫₀ᵗ α e^{−αs} e^{−λ(s+t₀)} ds`,
/// with `λ = ε²|k|²`.
pub fn transient_symbols(t: f64, params: &CoreParams, grid: GridSpec) -> (SpectralSymbol, SpectralSymbol) {
    let t0 = matching_time(params);
    let d = params.diffusivity();
    let (alpha, gamma) = (params.alpha, params.gamma);
    let relaxing = SpectralSymbol::from_fn(grid, |k2| {
        let lam = d * k2;
        let gap = lam - gamma;
        let base = (-alpha * t).exp();
        if gap.abs() < SERIES_THRESHOLD {
            base * (-lam * (t + t0)).exp() * (t + 0.5 * gap * t * t)
        } else {
            base * ((-gamma * t - lam * t0).exp() - (-lam * (t + t0)).exp()) / gap
        }
    });
    let filling = SpectralSymbol::from_fn(grid, |k2| {
        let lam = d * k2;
        alpha * (-lam * t0).exp() * -(-(alpha + lam) * t).exp_m1() / (alpha + lam)
    });
    (relaxing, filling)
}

pub fn v_exact(
    t: f64,
    u0: &ScalarField,
    v0: &TravelerField,
    h0: &ScalarField,
    params: &CoreParams,
) -> Result<TravelerField> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    v0.require_frame(Frame::Eulerian)?;
    let grid = v0.grid();
    if u0.grid() != grid || h0.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let transported = heat_propagate(v0, t, params.epsilon)?.scale((-params.alpha * t).exp());
    if t == 0.0 {
        return Ok(transported);
    }

    let (relaxing, filling) = transient_symbols(t, params, grid);
    let p_relax = relaxing.to_field();
    let p_fill = filling.to_field();
    let frac = params.home_fraction();
    let g = params.gamma;
    let np = grid.points();
    let mut w = Vec::with_capacity(np * np);
    for y in 0..np {
        let a = g * (u0.values()[y] - frac * h0.values()[y]);
        let b = g / (params.alpha + g) * h0.values()[y];
        w.extend(
            p_relax
                .values()
                .iter()
                .zip(p_fill.values())
                .map(|(r, f)| a * r + b * f),
        );
    }
    let deposits = to_eulerian(&TravelerField::from_vec_unchecked(grid, Frame::Lagrangian, w))?;
    transported.axpby(1.0, &deposits, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPair {
    pub u_bar: ScalarField,
    pub v_bar: TravelerField,
}

/// `ū = α/(α+γ) h₀`, `v̄(x, y) = χ(x − y) ū(y)`.
pub fn equilibrium(h0: &ScalarField, params: &CoreParams) -> Result<EquilibriumPair> {
    params.validate()?;
    let u_bar = h0.scale(params.home_fraction());
    let chi = chi_kernel(params, h0.grid());
    let v_bar = TravelerField::from_profile(&chi, &u_bar)?;
    Ok(EquilibriumPair { u_bar, v_bar })
}

/// Sup norm of `ε²Δₓv̄ − αv̄ + γρ(x − y)ū(y)`.
pub fn stationary_residual(pair: &EquilibriumPair, params: &CoreParams) -> Result<f64> {
    let grid = pair.u_bar.grid();
    let rho = gaussian_rho(grid, params.sigma)?;
    let source = TravelerField::from_profile(&rho, &pair.u_bar)?;
    let lap = laplacian(&pair.v_bar);
    let r = lap
        .axpby(params.diffusivity(), &pair.v_bar, -params.alpha)?
        .axpby(1.0, &source, params.gamma)?;
    Ok(r.sup_norm())
}
