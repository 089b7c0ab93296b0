//! Return-to-home model with colonization and logistic vital dynamics.
//!
//! When travelers stop traveling, a fraction `p` returns to its own home `y`
//! and the rest settles at its current position, which becomes its new home.
//! Settlers are indistinguishable from residents afterwards: they join `u` and
//! leave again with the home profile of their new location.
//!
//! The exchange sub-step is linear but couples homes through the settling
//! flux. Writing `v(s) = e^{−αs} v(0) + ρ(x − y) D(s, y)` reduces it to
//!
//! ```text
//! u' = −γu + αp D + α(1−p) ρ∗D + α e^{−αs} [p V₀ + (1−p) C₀]
//! D' = −αD + γu,      D(0) = 0
//! ```
//!
//! where `C₀(y) = ∫ v₀(y, y′) dy′` and `ρ∗` is convolution over homes. Every
//! home Fourier mode then evolves by a 3×3 linear system (the forcing is
//! carried as a third, decaying component), integrated exactly by its matrix
//! exponential.

use std::sync::{Arc, Mutex};

use nalgebra::Matrix3;

use crate::error::{non_negative, Error, Result};
use crate::exchange::decay_and_deposit;
use crate::grid::{
    home_integral, integrate_home, position_integral, Frame, GridSpec, ScalarField, TravelerField,
};
use crate::kernels::{gaussian_rho, CoreParams, SpectralSymbol};
use crate::model::{home_distribution, CoreState};
use crate::spectral::Fourier;
use crate::trajectory::{march, Diagnostics, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColonizationParams {
    /// Fraction of ending travelers that return to their own home.
    pub p: f64,
    /// Birth rate at home.
    pub beta: f64,
    /// Death rate at home.
    pub mu: f64,
    /// Crowding coefficient.
    pub kappa: f64,
    /// Traveler death rate.
    pub nu: f64,
}

impl ColonizationParams {
    /// Pure colonization, no vital dynamics.
    pub fn colonization_only(p: f64) -> Self {
        Self {
            p,
            beta: 0.0,
            mu: 0.0,
            kappa: 0.0,
            nu: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: format!("must lie in [0, 1], got {}", self.p),
            });
        }
        non_negative("beta", self.beta)?;
        non_negative("mu", self.mu)?;
        non_negative("kappa", self.kappa)?;
        non_negative("nu", self.nu)
    }

    /// `f(u) = (β − μ) u − κ u²`.
    pub fn vital(&self, u: f64) -> f64 {
        (self.beta - self.mu) * u - self.kappa * u * u
    }

    /// Logistic fixed point `(β − μ)/κ`, when it exists.
    pub fn carrying_capacity(&self) -> Option<f64> {
        (self.kappa > 0.0 && self.beta > self.mu).then(|| (self.beta - self.mu) / self.kappa)
    }

    fn has_vital_dynamics(&self) -> bool {
        self.beta != self.mu || self.kappa != 0.0
    }
}

/// Settling flux `α(1−p) ∫ v(y, y′) dy′` into every home node `y`.
pub fn colonize_flux(v: &TravelerField, core: &CoreParams, ext: &ColonizationParams) -> Result<ScalarField> {
    Ok(integrate_home(v)?.scale(core.alpha * (1.0 - ext.p)))
}

/// Home-mode propagator entries `(E₁₁, E₁₃, E₂₁, E₂₃)`.
type ModeEntries = [f64; 4];

#[derive(Debug)]
pub struct ColonizationStepper {
    core: CoreParams,
    ext: ColonizationParams,
    grid: GridSpec,
    fourier: Fourier,
    rho: ScalarField,
    rho_symbol: SpectralSymbol,
    cache: Mutex<Vec<(f64, Arc<Vec<ModeEntries>>)>>,
}

impl ColonizationStepper {
    pub fn new(core: CoreParams, ext: ColonizationParams, grid: GridSpec) -> Result<Self> {
        core.validate()?;
        ext.validate()?;
        Ok(Self {
            core,
            ext,
            grid,
            fourier: Fourier::new(grid),
            rho: gaussian_rho(grid, core.sigma)?,
            rho_symbol: SpectralSymbol::gaussian(grid, core.sigma),
            cache: Mutex::new(Vec::new()),
        })
    }

    fn mode_entries(&self, tau: f64) -> Arc<Vec<ModeEntries>> {
        let mut cache = self.cache.lock().expect("cache lock");
        if let Some((_, e)) = cache.iter().find(|(t, _)| *t == tau) {
            return Arc::clone(e);
        }
        let (a, g, p) = (self.core.alpha, self.core.gamma, self.ext.p);
        let entries: Vec<ModeEntries> = self
            .rho_symbol
            .values()
            .iter()
            .map(|&r| {
                let mix = p + (1.0 - p) * r;
                #[rustfmt::skip]
                let m = Matrix3::new(
                    -g, a * mix, 1.0,
                    g,  -a,      0.0,
                    0.0, 0.0,    -a,
                ) * tau;
                let e = m.exp();
                [e[(0, 0)], e[(0, 2)], e[(1, 0)], e[(1, 2)]]
            })
            .collect();
        let entries = Arc::new(entries);
        if cache.len() >= 4 {
            cache.remove(0);
        }
        cache.push((tau, Arc::clone(&entries)));
        entries
    }

    /// Exact linear exchange with colonization over `tau`.
    fn exchange(&self, u: &mut [f64], v: &mut TravelerField, tau: f64) {
        let (a, p) = (self.core.alpha, self.ext.p);
        let returning = position_integral(v);
        let settling = home_integral(v);
        let forcing: Vec<f64> = returning
            .values()
            .iter()
            .zip(settling.values())
            .map(|(r, s)| a * (p * r + (1.0 - p) * s))
            .collect();
        let u_hat = self.fourier.forward(u);
        let f_hat = self.fourier.forward(&forcing);
        let entries = self.mode_entries(tau);
        let mut new_u = Vec::with_capacity(u.len());
        let mut deposit = Vec::with_capacity(u.len());
        for ((uh, fh), e) in u_hat.iter().zip(&f_hat).zip(entries.iter()) {
            new_u.push(uh * e[0] + fh * e[1]);
            deposit.push(uh * e[2] + fh * e[3]);
        }
        let new_u = self.fourier.inverse_real(new_u);
        let deposit = self.fourier.inverse_real(deposit);
        u.copy_from_slice(&new_u);
        decay_and_deposit(v, &self.rho, (-a * tau).exp(), &deposit);
    }

    fn react(&self, u: &mut [f64], tau: f64) {
        for x in u.iter_mut() {
            let mid = *x + 0.5 * tau * self.ext.vital(*x);
            *x += tau * self.ext.vital(mid);
        }
    }

    /// Exchange plus vital dynamics over `tau`.
    fn local(&self, u: &mut [f64], v: &mut TravelerField, tau: f64) {
        if self.ext.has_vital_dynamics() {
            self.exchange(u, v, 0.5 * tau);
            self.react(u, tau);
            self.exchange(u, v, 0.5 * tau);
        } else {
            self.exchange(u, v, tau);
        }
    }

    pub fn step(&self, state: &CoreState, dt: f64) -> Result<CoreState> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::NonPositiveStep(dt));
        }
        if state.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        state.v.require_frame(Frame::Eulerian)?;
        let nu = self.ext.nu;
        let diffusion = SpectralSymbol::from_fn(self.grid, |k2| {
            (-(self.core.diffusivity() * k2 + nu) * dt).exp()
        });
        let mut u = state.u.values().to_vec();
        let mut v = state.v.clone();
        self.local(&mut u, &mut v, 0.5 * dt);
        self.fourier.apply_symbol_slices(v.values_mut(), diffusion.values());
        self.local(&mut u, &mut v, 0.5 * dt);
        let next = CoreState {
            t: state.t + dt,
            u: ScalarField::from_vec_unchecked(self.grid, u),
            v,
        };
        next.check_finite("colonization")?;
        Ok(next)
    }

    /// Trajectory; the conservation residual tracks the global population
    /// `∫u + ∫∫v` relative to its initial value.
    pub fn simulate(
        &self,
        state0: &CoreState,
        duration: f64,
        dt: f64,
        sample_every: usize,
    ) -> Result<Trajectory<CoreState>> {
        let total0 = global_population(state0);
        let scale = total0.abs().max(f64::MIN_POSITIVE);
        march(
            state0.clone(),
            duration,
            dt,
            sample_every,
            |s, h| self.step(s, h),
            |s| Diagnostics {
                t: s.t,
                norm_state: s.norm(),
                conservation_residual: (global_population(s) - total0) / scale,
                min_value: s.min_value(),
            },
        )
    }
}

/// `h² Σ u + h⁴ ΣΣ v`.
pub fn global_population(state: &CoreState) -> f64 {
    home_distribution(state).integral()
}

pub fn step_colonization(
    state: &CoreState,
    dt: f64,
    core: &CoreParams,
    ext: &ColonizationParams,
) -> Result<CoreState> {
    ColonizationStepper::new(*core, *ext, state.grid())?.step(state, dt)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    /// Why the pair was not evolved, if the ordering precondition failed.
    pub precondition_violation: Option<String>,
    /// `max_t max(0, lo − hi)` over all components.
    pub max_violation: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn ordering_gap(lo: &CoreState, hi: &CoreState) -> f64 {
    lo.u
        .values()
        .iter()
        .zip(hi.u.values())
        .chain(lo.v.values().iter().zip(hi.v.values()))
        .fold(0.0_f64, |m, (a, b)| m.max(a - b))
}

/// Evolves an ordered pair and reports the worst order violation.
pub fn check_monotone(
    lo: &CoreState,
    hi: &CoreState,
    duration: f64,
    dt: f64,
    core: &CoreParams,
    ext: &ColonizationParams,
) -> Result<MonotoneReport> {
    const RELATIVE_TOLERANCE: f64 = 1e-9;
    let scale = hi.sup_norm().max(lo.sup_norm()).max(f64::MIN_POSITIVE);
    let tolerance = RELATIVE_TOLERANCE * scale;
    let precondition = if lo.grid() != hi.grid() {
        Some("states live on different grids".to_string())
    } else if lo.min_value() < 0.0 {
        Some(format!("lower state has a negative entry ({})", lo.min_value()))
    } else if ordering_gap(lo, hi) > 0.0 {
        Some(format!("states are not ordered (gap {})", ordering_gap(lo, hi)))
    } else {
        None
    };
    if precondition.is_some() {
        return Ok(MonotoneReport {
            precondition_violation: precondition,
            max_violation: f64::NAN,
            scale,
            tolerance,
            passed: false,
        });
    }
    let stepper = ColonizationStepper::new(*core, *ext, lo.grid())?;
    let lo_traj = stepper.simulate(lo, duration, dt, 1)?;
    let hi_traj = stepper.simulate(hi, duration, dt, 1)?;
    let max_violation = lo_traj
        .states
        .iter()
        .zip(&hi_traj.states)
        .map(|(a, b)| ordering_gap(a, b).max(0.0))
        .fold(0.0, f64::max);
    Ok(MonotoneReport {
        precondition_violation: None,
        max_violation,
        scale,
        tolerance,
        passed: max_violation <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::gaussian_blob;
    use crate::model::CoreStepper;

    fn grid() -> GridSpec {
        GridSpec::new(10.0, 16).unwrap()
    }

    fn core() -> CoreParams {
        CoreParams::new(1.0, 0.8, 0.5, 1.0).unwrap()
    }

    fn state(g: GridSpec) -> CoreState {
        let u = gaussian_blob(g, (1.0, -0.5), 1.4, 1.5).unwrap();
        let prof = gaussian_blob(g, (0.4, 0.0), 1.3, 1.0).unwrap();
        let v = TravelerField::from_profile(&prof, &u.scale(0.5)).unwrap();
        CoreState::new(u, v).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ColonizationParams::colonization_only(1.2).validate().is_err());
        assert!(ColonizationParams { beta: -1.0, ..ColonizationParams::colonization_only(0.5) }
            .validate()
            .is_err());
        assert!(ColonizationParams::colonization_only(0.0).validate().is_ok());
    }

    #[test]
    fn flux_examples() {
        let g = grid();
        let c = core();
        let v = TravelerField::from_fn(g, |_, _| 0.2).unwrap();
        let full_return = colonize_flux(&v, &c, &ColonizationParams::colonization_only(1.0)).unwrap();
        assert!(full_return.values().iter().all(|&x| x == 0.0));
        let settle = colonize_flux(&v, &c, &ColonizationParams::colonization_only(0.0)).unwrap();
        let expect = c.alpha * 0.2 * g.length() * g.length();
        assert!(settle.values().iter().all(|x| (x - expect).abs() < 1e-12));
        let rho = gaussian_rho(g, c.sigma).unwrap();
        let v = TravelerField::from_profile(&rho, &ScalarField::constant(g, 0.7)).unwrap();
        let half = colonize_flux(&v, &c, &ColonizationParams::colonization_only(0.5)).unwrap();
        assert!(half.values().iter().all(|x| (x - 0.5 * c.alpha * 0.7).abs() < 1e-12));
        let w = crate::grid::to_lagrangian(&v).unwrap();
        assert!(colonize_flux(&w, &c, &ColonizationParams::colonization_only(0.5)).is_err());
    }

    #[test]
    fn full_return_reduces_to_core_model() {
        let g = grid();
        let s = state(g);
        let ext = ColonizationParams::colonization_only(1.0);
        let col = ColonizationStepper::new(core(), ext, g).unwrap();
        let base = CoreStepper::new(core(), g).unwrap();
        let (mut a, mut b) = (s.clone(), s);
        for _ in 0..10 {
            a = col.step(&a, 0.1).unwrap();
            b = base.step(&b, 0.1).unwrap();
            assert!(a.u.max_abs_diff(&b.u) <= 1e-12);
            assert!(a.v.max_abs_diff(&b.v) <= 1e-12);
        }
    }

    #[test]
    fn logistic_fixed_point_is_stationary() {
        let g = grid();
        let c = CoreParams { gamma: 1e-300, ..core() };
        let ext = ColonizationParams {
            p: 0.5,
            beta: 1.0,
            mu: 0.2,
            kappa: 0.4,
            nu: 0.0,
        };
        let k = ext.carrying_capacity().unwrap();
        let s = CoreState::new(ScalarField::constant(g, k), TravelerField::zeros(g, Frame::Eulerian)).unwrap();
        let out = step_colonization(&s, 0.05, &c, &ext).unwrap();
        assert!(out.u.values().iter().all(|x| (x - k).abs() < 1e-12));
    }

    #[test]
    fn settling_conserves_global_population() {
        let g = grid();
        let s = state(g);
        for p in [0.0, 0.3] {
            let stepper =
                ColonizationStepper::new(core(), ColonizationParams::colonization_only(p), g).unwrap();
            let traj = stepper.simulate(&s, 2.0, 0.1, 5).unwrap();
            for d in &traj.diagnostics {
                assert!(d.conservation_residual.abs() <= 1e-10, "{d:?}");
                assert!(d.min_value >= -1e-10 * s.sup_norm());
            }
        }
    }

    #[test]
    fn logistic_growth_stays_below_capacity() {
        let g = grid();
        let c = CoreParams { gamma: 1e-300, ..core() };
        let ext = ColonizationParams {
            p: 1.0,
            beta: 1.5,
            mu: 0.5,
            kappa: 2.0,
            nu: 0.0,
        };
        let u0 = gaussian_blob(g, (0.0, 0.0), 1.0, 1.0).unwrap();
        let bound = u0.sup_norm().max(ext.carrying_capacity().unwrap());
        let s = CoreState::new(u0, TravelerField::zeros(g, Frame::Eulerian)).unwrap();
        let stepper = ColonizationStepper::new(c, ext, g).unwrap();
        let traj = stepper.simulate(&s, 5.0, 0.05, 10).unwrap();
        for st in &traj.states {
            assert!(st.u.max() <= bound + 1e-12);
        }
    }

    #[test]
    fn monotone_report_edges() {
        let g = grid();
        let s = state(g);
        let ext = ColonizationParams {
            p: 0.5,
            beta: 0.5,
            mu: 0.1,
            kappa: 0.2,
            nu: 0.1,
        };
        let same = check_monotone(&s, &s, 0.3, 0.05, &core(), &ext).unwrap();
        assert_eq!(same.max_violation, 0.0);
        assert!(same.passed);
        let zero = CoreState::zeros(g);
        let pos = check_monotone(&zero, &s, 0.3, 0.05, &core(), &ext).unwrap();
        assert!(pos.passed, "{pos:?}");
        let bad = check_monotone(&s, &zero, 0.3, 0.05, &core(), &ext).unwrap();
        assert!(bad.precondition_violation.is_some());
        assert!(!bad.passed);
    }
}
