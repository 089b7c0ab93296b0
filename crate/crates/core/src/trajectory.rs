use crate::error::{Error, Result};

/// Per-sample diagnostic record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    /// `‖u‖∞ + ‖v‖_{Y1} + ‖v‖_{Y2}` (summed over compartments for multi-pair models).
    pub norm_state: f64,
    /// Largest drift of the per-home conserved total, relative to its initial sup norm.
    /// Signed for models with losses: positive means growth.
    pub conservation_residual: f64,
    /// Smallest entry over all components.
    pub min_value: f64,
}

pub trait Timed {
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
}

#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub states: Vec<S>,
    pub diagnostics: Vec<Diagnostics>,
}

impl<S> Trajectory<S> {
    pub fn times(&self) -> Vec<f64> {
        self.diagnostics.iter().map(|d| d.t).collect()
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory always holds the initial state")
    }

    /// Smallest entry seen across all samples.
    pub fn min_value(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.min_value)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Number of steps and the length of the final (possibly shortened) step.
pub fn step_plan(duration: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::NonPositiveStep(dt));
    }
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidParameter {
            name: "T",
            reason: format!("must be > 0, got {duration}"),
        });
    }
    if dt > duration * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must not exceed T = {duration}, got {dt}"),
        });
    }
    let ratio = duration / dt;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let last = duration - (steps - 1) as f64 * dt;
    Ok((steps, last))
}

/// Marches `state0` to `state0.time() + duration`, recording every
/// `sample_every`-th state together with the initial and final ones.
pub fn march<S, F, D>(
    state0: S,
    duration: f64,
    dt: f64,
    sample_every: usize,
    mut step: F,
    diagnose: D,
) -> Result<Trajectory<S>>
where
    S: Clone + Timed,
    F: FnMut(&S, f64) -> Result<S>,
    D: Fn(&S) -> Diagnostics,
{
    if sample_every == 0 {
        return Err(Error::InvalidParameter {
            name: "sample_every",
            reason: "must be >= 1".into(),
        });
    }
    let (steps, last) = step_plan(duration, dt)?;
    let t0 = state0.time();
    let mut traj = Trajectory {
        diagnostics: vec![diagnose(&state0)],
        states: vec![state0.clone()],
    };
    let mut state = state0;
    for k in 1..=steps {
        let h = if k == steps { last } else { dt };
        let mut next = step(&state, h)?;
        next.set_time(if k == steps {
            t0 + duration
        } else {
            t0 + k as f64 * dt
        });
        state = next;
        if k % sample_every == 0 || k == steps {
            traj.diagnostics.push(diagnose(&state));
            traj.states.push(state.clone());
        }
    }
    Ok(traj)
}
