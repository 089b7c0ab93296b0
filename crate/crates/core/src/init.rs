//! Initial-condition presets.

use std::f64::consts::PI;

use crate::error::{non_negative, positive, Error, Result};
use crate::grid::{GridSpec, ScalarField};

pub fn uniform(grid: GridSpec, value: f64) -> Result<ScalarField> {
    non_negative("value", value)?;
    Ok(ScalarField::constant(grid, value))
}

/// Periodized Gaussian of the given width centred at `center`, rescaled so that
/// `h² Σ f = mass` exactly.
pub fn gaussian_blob(grid: GridSpec, center: (f64, f64), width: f64, mass: f64) -> Result<ScalarField> {
    positive("width", width)?;
    non_negative("mass", mass)?;
    let l = grid.length();
    let var = width * width;
    let wrap = |d: f64| (d + 0.5 * l).rem_euclid(l) - 0.5 * l;
    let field = ScalarField::from_fn(grid, |a, b| {
        let (da, db) = (wrap(a - center.0), wrap(b - center.1));
        let mut s = 0.0;
        for i in -2..=2 {
            for j in -2..=2 {
                let x = da + i as f64 * l;
                let y = db + j as f64 * l;
                s += (-(x * x + y * y) / (2.0 * var)).exp();
            }
        }
        s / (2.0 * PI * var)
    })?;
    let total = field.integral();
    Ok(field.scale(mass / total))
}

/// All mass on the single home node `node = (i1, i2)`.
pub fn point_column(grid: GridSpec, node: (usize, usize), mass: f64) -> Result<ScalarField> {
    non_negative("mass", mass)?;
    let n = grid.n();
    if node.0 >= n || node.1 >= n {
        return Err(Error::InvalidParameter {
            name: "node",
            reason: format!("({}, {}) outside a {n}x{n} grid", node.0, node.1),
        });
    }
    let mut values = vec![0.0; grid.points()];
    values[node.0 * n + node.1] = mass / grid.cell_area();
    ScalarField::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blob_mass_and_peak() {
        let g = GridSpec::new(10.0, 32).unwrap();
        let f = gaussian_blob(g, (0.0, 0.0), 1.0, 3.0).unwrap();
        assert!((f.integral() - 3.0).abs() < 1e-13);
        let imax = f
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(g.node(imax), (0.0, 0.0));
        assert!(f.min() > 0.0);
    }

    #[test]
    fn point_column_mass() {
        let g = GridSpec::new(4.0, 8).unwrap();
        let f = point_column(g, (2, 5), 1.5).unwrap();
        assert!((f.integral() - 1.5).abs() < 1e-15);
        assert!(point_column(g, (8, 0), 1.0).is_err());
    }
}
