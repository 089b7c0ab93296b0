//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every field crosses the boundary as a flat `Vec<f64>` of length `N²`,
//! row-major with the first coordinate as the row.

use wasm_bindgen::prelude::*;

use rhsim_core::epidemic::{force_of_infection, EpidemicParams, EpidemicState, EpidemicStepper};
use rhsim_core::grid::integrate_home;
use rhsim_core::init::{gaussian_blob, point_column};
use rhsim_core::kernels::chi_kernel;
use rhsim_core::model::{home_distribution, total_distribution};
use rhsim_core::{CoreParams, CoreState, CoreStepper, Frame, GridSpec, ScalarField, TravelerField};

fn js(e: rhsim_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn setup(n: usize, length: f64, alpha: f64, gamma: f64, epsilon: f64, sigma: f64) -> Result<(GridSpec, CoreParams), JsError> {
    Ok((
        GridSpec::new(length, n).map_err(js)?,
        CoreParams::new(alpha, gamma, epsilon, sigma).map_err(js)?,
    ))
}

/// The base model started from residents only.
#[wasm_bindgen]
pub struct CoreDemo {
    stepper: CoreStepper,
    state: CoreState,
    h0: ScalarField,
}

#[wasm_bindgen]
impl CoreDemo {
    /// Residents form a Gaussian blob of unit mass and width `width` at the centre.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, length: f64, alpha: f64, gamma: f64, epsilon: f64, sigma: f64, width: f64) -> Result<CoreDemo, JsError> {
        let (grid, params) = setup(n, length, alpha, gamma, epsilon, sigma)?;
        let u0 = gaussian_blob(grid, (0.0, 0.0), width, 1.0).map_err(js)?;
        let state = CoreState::new(u0.clone(), TravelerField::zeros(grid, Frame::Eulerian)).map_err(js)?;
        Ok(CoreDemo {
            stepper: CoreStepper::new(params, grid).map_err(js)?,
            state,
            h0: u0,
        })
    }

    pub fn advance(&mut self, steps: usize, dt: f64) -> Result<(), JsError> {
        for _ in 0..steps {
            self.state = self.stepper.step(&self.state, dt).map_err(js)?;
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    /// `u(y)`.
    pub fn at_home(&self) -> Vec<f64> {
        self.state.u.values().to_vec()
    }

    /// `∫ v(x, y) dy`.
    pub fn travelers(&self) -> Vec<f64> {
        integrate_home(&self.state.v).map(|f| f.into_values()).unwrap_or_default()
    }

    /// Everybody, at home or travelling, by location.
    pub fn total(&self) -> Result<Vec<f64>, JsError> {
        let sigma = self.stepper.params().sigma;
        Ok(total_distribution(&self.state, sigma).map_err(js)?.into_values())
    }

    /// `max_y |h(t, y) − h(0, y)| / max h(0)`.
    pub fn conservation_residual(&self) -> f64 {
        home_distribution(&self.state).max_abs_diff(&self.h0) / self.h0.sup_norm()
    }
}

/// Equilibrium traveler profile per unit resident density.
#[wasm_bindgen]
pub fn equilibrium_profile(n: usize, length: f64, alpha: f64, gamma: f64, epsilon: f64, sigma: f64) -> Result<Vec<f64>, JsError> {
    let (grid, params) = setup(n, length, alpha, gamma, epsilon, sigma)?;
    Ok(chi_kernel(&params, grid).into_values())
}

/// SI epidemic seeded in the centre column.
#[wasm_bindgen]
pub struct EpidemicDemo {
    stepper: EpidemicStepper,
    state: EpidemicState,
}

#[wasm_bindgen]
impl EpidemicDemo {
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        length: f64,
        alpha: f64,
        gamma: f64,
        epsilon: f64,
        sigma: f64,
        kappa1: f64,
        kappa2: f64,
        nu: f64,
    ) -> Result<EpidemicDemo, JsError> {
        let (grid, core) = setup(n, length, alpha, gamma, epsilon, sigma)?;
        let params = EpidemicParams {
            core,
            kappa1,
            kappa2,
            nu1: nu,
            nu2: nu,
        };
        let s1 = gaussian_blob(grid, (0.0, 0.0), 0.25 * length, 1.0).map_err(js)?;
        let i1 = point_column(grid, (n / 2, n / 2), 0.01).map_err(js)?;
        Ok(EpidemicDemo {
            stepper: EpidemicStepper::new(params, grid).map_err(js)?,
            state: EpidemicState::at_home(s1, i1).map_err(js)?,
        })
    }

    pub fn advance(&mut self, steps: usize, dt: f64) -> Result<(), JsError> {
        for _ in 0..steps {
            self.state = self.stepper.step(&self.state, dt).map_err(js)?;
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    /// Infected residents `i₁(y)`.
    pub fn infected_at_home(&self) -> Vec<f64> {
        self.state.i1.values().to_vec()
    }

    /// Pooled infected travelers `I(x)`.
    pub fn infected_travelers(&self) -> Vec<f64> {
        force_of_infection(&self.state.i2).map(|f| f.into_values()).unwrap_or_default()
    }

    /// `[∫s₁, ∫i₁, ∫∫s₂, ∫∫i₂]`.
    pub fn totals(&self) -> Vec<f64> {
        let c = self.state.totals();
        vec![c.s1, c.i1, c.s2, c.i2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_demo_conserves_and_spreads() {
        let mut d = CoreDemo::new(16, 10.0, 1.0, 1.0, 0.5, 1.5, 1.5).unwrap();
        d.advance(10, 0.1).unwrap();
        assert!((d.time() - 1.0).abs() < 1e-12);
        assert!(d.conservation_residual() < 1e-12);
        let total: f64 = d.total().unwrap().iter().sum::<f64>() * (10.0f64 / 16.0).powi(2);
        assert!((total - 1.0).abs() < 1e-12);
        assert!(d.travelers().iter().any(|&x| x > 0.0));
    }

    #[test]
    fn profile_has_mass_gamma_over_alpha() {
        let chi = equilibrium_profile(32, 10.0, 2.0, 0.5, 0.5, 1.0).unwrap();
        let mass: f64 = chi.iter().sum::<f64>() * (10.0f64 / 32.0).powi(2);
        assert!((mass - 0.25).abs() < 1e-12);
    }

    #[test]
    fn epidemic_demo_grows_infection() {
        let mut d = EpidemicDemo::new(16, 10.0, 1.0, 1.0, 0.5, 1.5, 5.0, 5.0, 0.05).unwrap();
        let i0 = d.totals()[1];
        d.advance(20, 0.05).unwrap();
        let t = d.totals();
        assert!(t[1] + t[3] > i0);
        assert_eq!(d.infected_at_home().len(), 256);
        assert_eq!(d.infected_travelers().len(), 256);
    }
}
