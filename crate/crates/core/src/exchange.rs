//! Exact solution of the local home/traveler exchange over a sub-step.
//!
//! Without diffusion the system decouples per home node `y`:
//!
//! ```text
//! u' = α V − (γ + ν_h) u,        V = ∫ v dx
//! v' = −(α + ν_t) v + γ ρ(x − y) u
//! ```
//!
//! `(u, V)` follows a 2×2 linear system solved by its matrix exponential, and
//! `v(τ) = e^{−(α+ν_t)τ} v(0) + ρ(x − y) D` with deposit `D = V(τ) − e^{−(α+ν_t)τ} V(0)`.
//! Returning travelers therefore leave every column in proportion to its own
//! profile, and leavers arrive with the home profile.

use crate::grid::{Frame, GridSpec, ScalarField, TravelerField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ExchangeRates {
    pub ret: f64,
    pub leave: f64,
    pub home_loss: f64,
    pub traveler_loss: f64,
}

impl ExchangeRates {
    pub fn lossless(ret: f64, leave: f64) -> Self {
        Self {
            ret,
            leave,
            home_loss: 0.0,
            traveler_loss: 0.0,
        }
    }
}

/// Propagator of `(u, V)` over one sub-step, plus the traveler decay factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ExchangeMatrix {
    pub e: [[f64; 2]; 2],
    pub decay: f64,
}

impl ExchangeMatrix {
    pub fn new(rates: ExchangeRates, tau: f64) -> Self {
        let a = rates.ret;
        let g = rates.leave;
        let c = g + rates.home_loss;
        let b = a + rates.traveler_loss;
        // M = [[-c, a], [g, -b]]; eigenvalues m ± d with d > 0 whenever a g > 0.
        let m = -0.5 * (b + c);
        let half_gap = 0.5 * (b - c);
        let d = (half_gap * half_gap + a * g).sqrt();
        let (lp, lm) = (m + d, m - d);
        let (ep, em) = ((lp * tau).exp(), (lm * tau).exp());
        let e = if d > 0.0 {
            // exp(Mτ) = [e⁺ (M − λ⁻) − e⁻ (M − λ⁺)] / (λ⁺ − λ⁻)
            let inv = 1.0 / (2.0 * d);
            [
                [
                    (ep * (-c - lm) - em * (-c - lp)) * inv,
                    a * (ep - em) * inv,
                ],
                [
                    g * (ep - em) * inv,
                    (ep * (-b - lm) - em * (-b - lp)) * inv,
                ],
            ]
        } else {
            // a g = 0 and b = c: M = m I + nilpotent part.
            let f = (m * tau).exp();
            [[f, a * tau * f], [g * tau * f, f]]
        };
        Self {
            e,
            decay: (-b * tau).exp(),
        }
    }

    #[inline]
    pub fn apply(&self, u: f64, big_v: f64) -> (f64, f64) {
        (
            self.e[0][0] * u + self.e[0][1] * big_v,
            self.e[1][0] * u + self.e[1][1] * big_v,
        )
    }
}

/// Deposit profile value for (slot, home) in the given frame.
#[inline]
pub(crate) fn profile_at(grid: &GridSpec, frame: Frame, profile: &[f64], slot: usize, home: usize) -> f64 {
    match frame {
        Frame::Eulerian => profile[grid.offset_index(slot, home)],
        Frame::Lagrangian => profile[slot],
    }
}

/// Adds `deposit[y] * ρ(x − y)` to every home slice after scaling by `decay`.
pub(crate) fn decay_and_deposit(v: &mut TravelerField, rho: &ScalarField, decay: f64, deposit: &[f64]) {
    let grid = v.grid();
    let frame = v.frame();
    let np = grid.points();
    let profile = rho.values();
    for (y, slice) in v.values_mut().chunks_exact_mut(np).enumerate() {
        let dep = deposit[y];
        if dep == 0.0 {
            if decay != 1.0 {
                slice.iter_mut().for_each(|s| *s *= decay);
            }
            continue;
        }
        for (slot, s) in slice.iter_mut().enumerate() {
            *s = decay * *s + dep * profile_at(&grid, frame, profile, slot, y);
        }
    }
}

/// Applies the exact exchange to `(u, v)` in place.
pub(crate) fn exchange(u: &mut [f64], v: &mut TravelerField, rho: &ScalarField, m: &ExchangeMatrix) {
    let grid = v.grid();
    let w = grid.cell_area();
    let np = grid.points();
    let mut deposit = vec![0.0; np];
    for (y, slice) in v.values().chunks_exact(np).enumerate() {
        let big_v = w * slice.iter().sum::<f64>();
        let (u_new, v_new) = m.apply(u[y], big_v);
        u[y] = u_new;
        deposit[y] = v_new - m.decay * big_v;
    }
    decay_and_deposit(v, rho, m.decay, &deposit);
}
