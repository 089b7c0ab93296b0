//! Time integration of the linear return-to-home system.
//!
//! One step is a Strang composition: exact exchange over `dt/2`, exact heat
//! propagation of the travelers over `dt`, exact exchange over `dt/2`. The
//! traveler decay `e^{−αt}` lives inside the exchange, so the diffusion factor
//! is the pure heat symbol. Because diffusion leaves `V = ∫ v dx` untouched,
//! the composite `u` update reproduces the exact `(u, V)` flow.

use crate::error::{Error, Result};
use crate::exchange::{exchange, ExchangeMatrix, ExchangeRates};
use crate::grid::{
    home_integral, norm_state, position_integral, Frame, GridSpec, ScalarField, TravelerField,
};
use crate::kernels::{gaussian_rho, CoreParams, SpectralSymbol};
use crate::spectral::Fourier;
use crate::trajectory::{march, Diagnostics, Timed, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct CoreState {
    pub t: f64,
    /// At-home density.
    pub u: ScalarField,
    /// Traveler density; Eulerian by default.
    pub v: TravelerField,
}

impl CoreState {
    pub fn new(u: ScalarField, v: TravelerField) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { t: 0.0, u, v })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            t: 0.0,
            u: ScalarField::zeros(grid),
            v: TravelerField::zeros(grid, Frame::Eulerian),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.u.grid()
    }

    pub fn min_value(&self) -> f64 {
        self.u.min().min(self.v.min())
    }

    pub fn sup_norm(&self) -> f64 {
        self.u.sup_norm().max(self.v.sup_norm())
    }

    pub fn norm(&self) -> f64 {
        norm_state(&self.u, &self.v)
    }

    /// `a * self + b * other` at this state's time.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        Ok(Self {
            t: self.t,
            u: self.u.axpby(a, &other.u, b)?,
            v: self.v.axpby(a, &other.v, b)?,
        })
    }

    pub(crate) fn check_finite(&self, component: &'static str) -> Result<()> {
        let bad = self.u.values().iter().chain(self.v.values()).any(|x| !x.is_finite());
        if bad {
            Err(Error::SolverAbort {
                component,
                t: self.t,
            })
        } else {
            Ok(())
        }
    }
}

impl Timed for CoreState {
    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }
}

/// Home distribution `h(y) = u(y) + ∫ v(x, y) dx`.
pub fn home_distribution(state: &CoreState) -> ScalarField {
    let big_v = position_integral(&state.v);
    state
        .u
        .axpby(1.0, &big_v, 1.0)
        .expect("state fields share a grid")
}

/// Total distribution in space, `w̄(x) = ∫ v(x, y) dy + ∫ u(y) ρ(x − y) dy`.
pub fn total_distribution(state: &CoreState, sigma: f64) -> Result<ScalarField> {
    let grid = state.grid();
    let travelers = home_integral(&state.v);
    let mut at_home = state.u.values().to_vec();
    Fourier::new(grid).apply_symbol(&mut at_home, SpectralSymbol::gaussian(grid, sigma).values());
    let at_home = ScalarField::from_vec_unchecked(grid, at_home);
    travelers.axpby(1.0, &at_home, 1.0)
}

/// Reusable integrator for one grid and parameter set.
#[derive(Debug, Clone)]
pub struct CoreStepper {
    params: CoreParams,
    grid: GridSpec,
    fourier: Fourier,
    rho: ScalarField,
}

impl CoreStepper {
    pub fn new(params: CoreParams, grid: GridSpec) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            grid,
            fourier: Fourier::new(grid),
            rho: gaussian_rho(grid, params.sigma)?,
        })
    }

    pub fn params(&self) -> &CoreParams {
        &self.params
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    /// One Strang step; the state may be stored in either frame.
    pub fn step(&self, state: &CoreState, dt: f64) -> Result<CoreState> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::NonPositiveStep(dt));
        }
        if state.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let half = ExchangeMatrix::new(
            ExchangeRates::lossless(self.params.alpha, self.params.gamma),
            0.5 * dt,
        );
        let heat = SpectralSymbol::heat(self.grid, self.params.epsilon, dt);

        let mut u = state.u.values().to_vec();
        let mut v = state.v.clone();
        exchange(&mut u, &mut v, &self.rho, &half);
        self.fourier.apply_symbol_slices(v.values_mut(), heat.values());
        exchange(&mut u, &mut v, &self.rho, &half);

        let next = CoreState {
            t: state.t + dt,
            u: ScalarField::from_vec_unchecked(self.grid, u),
            v,
        };
        next.check_finite("core")?;
        Ok(next)
    }

    pub fn simulate(
        &self,
        state0: &CoreState,
        duration: f64,
        dt: f64,
        sample_every: usize,
    ) -> Result<Trajectory<CoreState>> {
        let h0 = home_distribution(state0);
        let scale = h0.sup_norm().max(f64::MIN_POSITIVE);
        march(
            state0.clone(),
            duration,
            dt,
            sample_every,
            |s, h| self.step(s, h),
            |s| Diagnostics {
                t: s.t,
                norm_state: s.norm(),
                conservation_residual: home_distribution(s).max_abs_diff(&h0) / scale,
                min_value: s.min_value(),
            },
        )
    }
}

pub fn step(state: &CoreState, dt: f64, params: &CoreParams) -> Result<CoreState> {
    CoreStepper::new(*params, state.grid())?.step(state, dt)
}

pub fn simulate(
    state0: &CoreState,
    duration: f64,
    dt: f64,
    params: &CoreParams,
    sample_every: usize,
) -> Result<Trajectory<CoreState>> {
    CoreStepper::new(*params, state0.grid())?.simulate(state0, duration, dt, sample_every)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{integrate_home, to_eulerian, to_lagrangian};
    use crate::init::gaussian_blob;

    fn grid() -> GridSpec {
        GridSpec::new(10.0, 16).unwrap()
    }

    fn params() -> CoreParams {
        CoreParams::new(1.0, 1.0, 0.5, 1.0).unwrap()
    }

    fn sample_state(g: GridSpec) -> CoreState {
        let u = gaussian_blob(g, (0.5, -1.0), 1.5, 2.0).unwrap();
        // smooth and periodic in x, so spectral diffusion keeps it positive
        let k = 2.0 * std::f64::consts::PI / g.length();
        let v = TravelerField::from_fn(g, |x, y| {
            0.05 * (1.0 + 0.5 * (k * x.0 + y.1).sin())
                * (1.0 + 0.3 * (k * x.1).cos())
                * (1.0 + 0.1 * (k * y.0).cos())
        })
        .unwrap();
        CoreState::new(u, v).unwrap()
    }

    #[test]
    fn zero_state_stays_zero() {
        let s = CoreState::zeros(grid());
        let out = step(&s, 0.1, &params()).unwrap();
        assert_eq!(out.u.sup_norm(), 0.0);
        assert_eq!(out.v.sup_norm(), 0.0);
    }

    #[test]
    fn rejects_bad_steps() {
        let s = CoreState::zeros(grid());
        assert_eq!(step(&s, 0.0, &params()).unwrap_err(), Error::NonPositiveStep(0.0));
        assert!(step(&s, -0.5, &params()).is_err());
    }

    #[test]
    fn u_follows_closed_form_from_home_start() {
        let g = grid();
        let h0 = gaussian_blob(g, (0.0, 0.0), 1.2, 1.0).unwrap();
        let stepper = CoreStepper::new(params(), g).unwrap();
        let mut s = CoreState::new(h0.clone(), TravelerField::zeros(g, Frame::Eulerian)).unwrap();
        let dt = 0.1;
        for _ in 0..20 {
            s = stepper.step(&s, dt).unwrap();
        }
        let t = s.t;
        let expect = h0.map(|h| (-2.0 * t).exp() * h + 0.5 * (1.0 - (-2.0 * t).exp()) * h);
        assert!(s.u.max_abs_diff(&expect) <= 1e-10);
    }

    #[test]
    fn conservation_over_many_steps() {
        let g = grid();
        let s0 = sample_state(g);
        let traj = simulate(&s0, 5.0, 0.05, &params(), 10).unwrap();
        for d in &traj.diagnostics {
            assert!(d.conservation_residual <= 1e-10, "{d:?}");
            assert!(d.min_value >= -1e-10 * s0.sup_norm());
        }
    }

    #[test]
    fn step_is_linear() {
        let g = grid();
        let a = sample_state(g);
        let b = CoreState::new(
            gaussian_blob(g, (-2.0, 2.0), 1.0, 0.7).unwrap(),
            a.v.scale(0.3),
        )
        .unwrap();
        let p = params();
        let lhs = step(&a.combine(2.0, &b, -0.5).unwrap(), 0.2, &p).unwrap();
        let rhs = step(&a, 0.2, &p)
            .unwrap()
            .combine(2.0, &step(&b, 0.2, &p).unwrap(), -0.5)
            .unwrap();
        assert!(lhs.u.max_abs_diff(&rhs.u) < 1e-13);
        assert!(lhs.v.max_abs_diff(&rhs.v) < 1e-13);
    }

    #[test]
    fn lagrangian_storage_gives_the_same_evolution() {
        let g = grid();
        let s = sample_state(g);
        let p = params();
        let euler = step(&s, 0.15, &p).unwrap();
        let lag_state = CoreState {
            v: to_lagrangian(&s.v).unwrap(),
            ..s.clone()
        };
        let lag = step(&lag_state, 0.15, &p).unwrap();
        assert!(lag.u.max_abs_diff(&euler.u) < 1e-13);
        assert!(to_eulerian(&lag.v).unwrap().max_abs_diff(&euler.v) < 1e-13);
    }

    #[test]
    fn distribution_diagnostics() {
        let g = grid();
        let p = params();
        let rho = gaussian_rho(g, p.sigma).unwrap();
        // v = 0: h = u, w̄ = ρ * u
        let u = gaussian_blob(g, (1.0, 1.0), 1.3, 1.0).unwrap();
        let s = CoreState::new(u.clone(), TravelerField::zeros(g, Frame::Eulerian)).unwrap();
        assert_eq!(home_distribution(&s), u);
        let wbar = total_distribution(&s, p.sigma).unwrap();
        assert!((wbar.integral() - u.integral()).abs() < 1e-12);
        // u = 0, v = ρ(x − y): h ≡ 1, w̄ = ∫ v dy
        let v = TravelerField::from_profile(&rho, &ScalarField::constant(g, 1.0)).unwrap();
        let s = CoreState::new(ScalarField::zeros(g), v.clone()).unwrap();
        let h = home_distribution(&s);
        assert!(h.values().iter().all(|x| (x - 1.0).abs() < 1e-12));
        let wbar = total_distribution(&s, p.sigma).unwrap();
        assert!(wbar.max_abs_diff(&integrate_home(&v).unwrap()) < 1e-15);
        // total population consistency
        let s = sample_state(g);
        let wbar = total_distribution(&s, p.sigma).unwrap();
        assert!((wbar.integral() - home_distribution(&s).integral()).abs() < 1e-12);
    }
}
