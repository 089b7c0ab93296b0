//! Random nonnegative initial data.
//!
//! Spectral diffusion of a field with a kink rings below zero, so "random"
//! here means random superpositions of Gaussian blobs at least three grid
//! spacings wide: resolved to round-off, hence positivity is a property of the
//! scheme and not of the data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhsim_core::init::gaussian_blob;
use rhsim_core::{Frame, GridSpec, Result, ScalarField, TravelerField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn blob(rng: &mut impl Rng, grid: GridSpec) -> Result<ScalarField> {
    let l = grid.length();
    let h = grid.spacing();
    let c = (rng.random_range(-0.5 * l..0.5 * l), rng.random_range(-0.5 * l..0.5 * l));
    let width = rng.random_range(3.0 * h..3.0 * h + 0.1 * l);
    gaussian_blob(grid, c, width, rng.random_range(0.2..1.0))
}

/// Sum of `count` blobs.
pub fn home_density(rng: &mut impl Rng, grid: GridSpec, count: usize) -> Result<ScalarField> {
    let mut f = ScalarField::zeros(grid);
    for _ in 0..count {
        f = f.axpby(1.0, &blob(rng, grid)?, 1.0)?;
    }
    Ok(f)
}

/// `Σₖ fₖ(x) gₖ(y)` with blobs `fₖ`, `gₖ`, scaled by `amplitude`.
pub fn traveler_density(rng: &mut impl Rng, grid: GridSpec, terms: usize, amplitude: f64) -> Result<TravelerField> {
    let np = grid.points();
    let mut values = vec![0.0; np * np];
    for _ in 0..terms {
        let f = blob(rng, grid)?;
        let g = blob(rng, grid)?;
        for (slice, w) in values.chunks_exact_mut(np).zip(g.values()) {
            for (o, x) in slice.iter_mut().zip(f.values()) {
                *o += amplitude * w * x;
            }
        }
    }
    TravelerField::new(grid, Frame::Eulerian, values)
}
