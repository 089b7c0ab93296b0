//! Periodic square grids, field containers, rectangle-rule quadrature and the
//! traveler-field norms.
//!
//! Position and home coordinates share one [`GridSpec`]. Nodes sit at
//! `x_m = -L/2 + m h` along each axis, and a 2-D node is addressed by the flat
//! index `p = i1 * N + i2`.
//!
//! Traveler fields are stored home-major: the slice for home node `y` is the
//! contiguous block `values[y * N² .. (y + 1) * N²]`, indexed by position
//! node (Eulerian) or by offset node (Lagrangian). In the Lagrangian frame the
//! offset slot `z` of home `y` corresponds to the position node `x` with
//! `x = z + y - N/2` per axis (mod N), so offset slots carry the same node
//! coordinates as every other axis and `z = 0` lives at index `N/2`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    length: f64,
    n: usize,
}

impl GridSpec {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "L must be positive, got {length}"
            )));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("N must be even, >=4 (got {n})")));
        }
        Ok(Self { length, n })
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Domain side length.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight `h²`.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Number of 2-D nodes, `N²`.
    pub fn points(&self) -> usize {
        self.n * self.n
    }

    pub fn coordinate(&self, m: usize) -> f64 {
        -0.5 * self.length + m as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.coordinate(m)).collect()
    }

    /// Coordinates of the flat node index `p`.
    pub fn node(&self, p: usize) -> (f64, f64) {
        (self.coordinate(p / self.n), self.coordinate(p % self.n))
    }

    /// Position node occupied by Lagrangian slot `z` of home `y`.
    #[inline]
    pub fn lagrangian_to_position(&self, z: usize, y: usize) -> usize {
        let n = self.n;
        let half = n / 2;
        let a = (z / n + y / n + n - half) % n;
        let b = (z % n + y % n + n - half) % n;
        a * n + b
    }

    /// Lagrangian slot of position node `x` for home `y`.
    #[inline]
    pub fn position_to_lagrangian(&self, x: usize, y: usize) -> usize {
        let n = self.n;
        let half = n / 2;
        let a = (x / n + n - y / n + half) % n;
        let b = (x % n + n - y % n + half) % n;
        a * n + b
    }

    /// Node index holding the value of a kernel at offset `x - y`.
    #[inline]
    pub fn offset_index(&self, x: usize, y: usize) -> usize {
        self.position_to_lagrangian(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    Eulerian,
    Lagrangian,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Eulerian => f.write_str("eulerian"),
            Frame::Lagrangian => f.write_str("lagrangian"),
        }
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Density over home nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::LengthMismatch {
                expected: grid.points(),
                found: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.points());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.points()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.points())
            .map(|p| {
                let (a, b) = grid.node(p);
                f(a, b)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `h² Σ f`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().sum::<f64>()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Density over (position-or-offset, home) node pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelerField {
    grid: GridSpec,
    frame: Frame,
    values: Vec<f64>,
}

impl TravelerField {
    /// Builds a field from home-major storage.
    pub fn new(grid: GridSpec, frame: Frame, values: Vec<f64>) -> Result<Self> {
        let expected = grid.points() * grid.points();
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(Self {
            grid,
            frame,
            values,
        })
    }

    pub(crate) fn from_vec_unchecked(grid: GridSpec, frame: Frame, values: Vec<f64>) -> Self {
        Self {
            grid,
            frame,
            values,
        }
    }

    pub fn zeros(grid: GridSpec, frame: Frame) -> Self {
        Self {
            grid,
            frame,
            values: vec![0.0; grid.points() * grid.points()],
        }
    }

    /// Eulerian field from `f(x, y)` evaluated at node coordinates.
    pub fn from_fn(
        grid: GridSpec,
        mut f: impl FnMut((f64, f64), (f64, f64)) -> f64,
    ) -> Result<Self> {
        let np = grid.points();
        let mut values = Vec::with_capacity(np * np);
        for y in 0..np {
            let yc = grid.node(y);
            for x in 0..np {
                values.push(f(grid.node(x), yc));
            }
        }
        Self::new(grid, Frame::Eulerian, values)
    }

    /// Eulerian field `profile(x - y) * weight(y)`, with the profile given on
    /// the grid's nodes (offset zero at the centre node).
    pub fn from_profile(profile: &ScalarField, weight: &ScalarField) -> Result<Self> {
        let grid = profile.grid();
        if weight.grid() != grid {
            return Err(Error::GridMismatch);
        }
        let np = grid.points();
        let mut values = vec![0.0; np * np];
        for (y, slice) in values.chunks_exact_mut(np).enumerate() {
            let w = weight.values()[y];
            for (x, out) in slice.iter_mut().enumerate() {
                *out = profile.values()[grid.offset_index(x, y)] * w;
            }
        }
        Ok(Self::from_vec_unchecked(grid, Frame::Eulerian, values))
    }

    /// Reorders position-major data (first index position, second home).
    pub fn from_position_major(grid: GridSpec, frame: Frame, data: &[f64]) -> Result<Self> {
        let np = grid.points();
        if data.len() != np * np {
            return Err(Error::LengthMismatch {
                expected: np * np,
                found: data.len(),
            });
        }
        let mut values = vec![0.0; np * np];
        for x in 0..np {
            for y in 0..np {
                values[y * np + x] = data[x * np + y];
            }
        }
        Self::new(grid, frame, values)
    }

    pub fn to_position_major(&self) -> Vec<f64> {
        let np = self.grid.points();
        let mut out = vec![0.0; np * np];
        for y in 0..np {
            for x in 0..np {
                out[x * np + y] = self.values[y * np + x];
            }
        }
        out
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Slice of home node `y`.
    pub fn home_slice(&self, y: usize) -> &[f64] {
        let np = self.grid.points();
        &self.values[y * np..(y + 1) * np]
    }

    /// Value at (slot, home), where slot is `x` or `z` depending on the frame.
    pub fn get(&self, slot: usize, home: usize) -> f64 {
        self.values[home * self.grid.points() + slot]
    }

    /// Value at Eulerian position `x` for home `y`, whatever the storage frame.
    #[inline]
    pub fn at_position(&self, x: usize, y: usize) -> f64 {
        let slot = match self.frame {
            Frame::Eulerian => x,
            Frame::Lagrangian => self.grid.position_to_lagrangian(x, y),
        };
        self.values[y * self.grid.points() + slot]
    }

    /// Value at Lagrangian offset `z` for home `y`, whatever the storage frame.
    #[inline]
    pub fn at_offset(&self, z: usize, y: usize) -> f64 {
        let slot = match self.frame {
            Frame::Eulerian => self.grid.lagrangian_to_position(z, y),
            Frame::Lagrangian => z,
        };
        self.values[y * self.grid.points() + slot]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `h⁴ ΣΣ v`.
    pub fn total(&self) -> f64 {
        let w = self.grid.cell_area();
        w * w * self.values.iter().sum::<f64>()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            frame: self.frame,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    /// `a * self + b * other`; both fields must share grid and frame.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.frame != other.frame {
            return Err(Error::FrameMismatch {
                expected: self.frame,
                found: other.frame,
            });
        }
        Ok(Self {
            grid: self.grid,
            frame: self.frame,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub(crate) fn require_frame(&self, expected: Frame) -> Result<()> {
        if self.frame == expected {
            Ok(())
        } else {
            Err(Error::FrameMismatch {
                expected,
                found: self.frame,
            })
        }
    }
}

/// `∫ v(x, y) dx` for every home node.
pub fn integrate_position(v: &TravelerField) -> Result<ScalarField> {
    v.require_frame(Frame::Eulerian)?;
    Ok(position_integral(v))
}

// Frame-agnostic: the offset transform permutes nodes within a home slice.
pub(crate) fn position_integral(v: &TravelerField) -> ScalarField {
    let grid = v.grid();
    let w = grid.cell_area();
    let values = v
        .values()
        .chunks_exact(grid.points())
        .map(|s| w * s.iter().sum::<f64>())
        .collect();
    ScalarField::from_vec_unchecked(grid, values)
}

/// `∫ v(x, y) dy`, returned over position nodes.
pub fn integrate_home(v: &TravelerField) -> Result<ScalarField> {
    v.require_frame(Frame::Eulerian)?;
    Ok(home_integral(v))
}

/// Home integral for either storage frame, indexed by Eulerian position.
pub(crate) fn home_integral(v: &TravelerField) -> ScalarField {
    let grid = v.grid();
    let np = grid.points();
    let mut acc = vec![0.0; np];
    match v.frame() {
        Frame::Eulerian => {
            for slice in v.values().chunks_exact(np) {
                for (a, s) in acc.iter_mut().zip(slice) {
                    *a += s;
                }
            }
        }
        Frame::Lagrangian => {
            for (y, slice) in v.values().chunks_exact(np).enumerate() {
                for (z, s) in slice.iter().enumerate() {
                    acc[grid.lagrangian_to_position(z, y)] += s;
                }
            }
        }
    }
    let w = grid.cell_area();
    acc.iter_mut().for_each(|a| *a *= w);
    ScalarField::from_vec_unchecked(grid, acc)
}

fn reindex(v: &TravelerField, frame: Frame, map: impl Fn(&GridSpec, usize, usize) -> usize) -> TravelerField {
    let grid = v.grid();
    let np = grid.points();
    let mut out = vec![0.0; np * np];
    for (y, (dst, src)) in out
        .chunks_exact_mut(np)
        .zip(v.values().chunks_exact(np))
        .enumerate()
    {
        for (slot, d) in dst.iter_mut().enumerate() {
            *d = src[map(&grid, slot, y)];
        }
    }
    TravelerField::from_vec_unchecked(grid, frame, out)
}

/// `w(z, y) = v(z + y, y)`; an exact index permutation.
pub fn to_lagrangian(v: &TravelerField) -> Result<TravelerField> {
    v.require_frame(Frame::Eulerian)?;
    Ok(reindex(v, Frame::Lagrangian, |g, z, y| {
        g.lagrangian_to_position(z, y)
    }))
}

/// Inverse of [`to_lagrangian`].
pub fn to_eulerian(w: &TravelerField) -> Result<TravelerField> {
    w.require_frame(Frame::Lagrangian)?;
    Ok(reindex(w, Frame::Eulerian, |g, x, y| {
        g.position_to_lagrangian(x, y)
    }))
}

/// `max_x ∫ |v(x, y)| dy`.
pub fn norm_y1(v: &TravelerField) -> f64 {
    let grid = v.grid();
    let np = grid.points();
    let mut acc = vec![0.0; np];
    for y in 0..np {
        for (x, a) in acc.iter_mut().enumerate() {
            *a += v.at_position(x, y).abs();
        }
    }
    grid.cell_area() * acc.iter().fold(0.0_f64, |m, &a| m.max(a))
}

/// `∫ max_y |w(z, y)| dz` in the Lagrangian frame.
pub fn norm_y2(v: &TravelerField) -> f64 {
    let grid = v.grid();
    let np = grid.points();
    let mut acc = vec![0.0_f64; np];
    for y in 0..np {
        for (z, a) in acc.iter_mut().enumerate() {
            *a = a.max(v.at_offset(z, y).abs());
        }
    }
    grid.cell_area() * acc.iter().sum::<f64>()
}

pub fn norm_sup(u: &ScalarField) -> f64 {
    u.sup_norm()
}

/// `‖u‖∞ + ‖v‖_{Y1} + ‖v‖_{Y2}`.
pub fn norm_state(u: &ScalarField, v: &TravelerField) -> f64 {
    norm_sup(u) + norm_y1(v) + norm_y2(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid8() -> GridSpec {
        GridSpec::new(4.0, 8).unwrap()
    }

    fn field_from(grid: GridSpec, seed: &[f64]) -> TravelerField {
        let np = grid.points();
        let values = (0..np * np).map(|i| seed[i % seed.len()] * ((i * 7 % 13) as f64 - 6.0)).collect();
        TravelerField::new(grid, Frame::Eulerian, values).unwrap()
    }

    #[test]
    fn make_grid_examples() {
        let g = GridSpec::new(10.0, 4).unwrap();
        assert_eq!(g.spacing(), 2.5);
        assert_eq!(g.coordinates(), vec![-5.0, -2.5, 0.0, 2.5]);
        assert_eq!(GridSpec::new(20.0, 64).unwrap().spacing(), 0.3125);
        let err = GridSpec::new(10.0, 3).unwrap_err();
        assert!(err.to_string().contains("N must be even, >=4"));
        assert!(GridSpec::new(10.0, 2).is_err());
        assert!(GridSpec::new(0.0, 8).is_err());
        assert!(GridSpec::new(-1.0, 8).is_err());
    }

    #[test]
    fn scalar_field_rejects_bad_input() {
        let g = grid8();
        assert!(matches!(
            ScalarField::new(g, vec![0.0; 3]),
            Err(Error::LengthMismatch { .. })
        ));
        let mut vals = vec![0.0; g.points()];
        vals[5] = f64::NAN;
        assert_eq!(
            ScalarField::new(g, vals).unwrap_err(),
            Error::NonFinite { index: 5 }
        );
    }

    #[test]
    fn constant_quadrature() {
        let g = grid8();
        let c = 0.7;
        let v = TravelerField::from_fn(g, |_, _| c).unwrap();
        let ip = integrate_position(&v).unwrap();
        let ih = integrate_home(&v).unwrap();
        let expect = c * g.length() * g.length();
        for (a, b) in ip.values().iter().zip(ih.values()) {
            assert!((a - expect).abs() < 1e-12);
            assert!((b - expect).abs() < 1e-12);
        }
        let zero = TravelerField::zeros(g, Frame::Eulerian);
        assert!(integrate_position(&zero).unwrap().values().iter().all(|&x| x == 0.0));
        assert_eq!(norm_y1(&zero), 0.0);
        assert_eq!(norm_y2(&zero), 0.0);
        assert_eq!(norm_state(&ScalarField::zeros(g), &zero), 0.0);
    }

    #[test]
    fn quadrature_rejects_lagrangian() {
        let w = TravelerField::zeros(grid8(), Frame::Lagrangian);
        assert!(matches!(
            integrate_position(&w),
            Err(Error::FrameMismatch { .. })
        ));
        assert!(integrate_home(&w).is_err());
        assert!(to_lagrangian(&w).is_err());
    }

    #[test]
    fn shift_of_difference_kernel_is_home_independent() {
        let g = grid8();
        // Any function of x - y on the torus.
        let profile = ScalarField::from_fn(g, |a, b| (a * 0.3).cos() + b * b * 0.01).unwrap();
        let ones = ScalarField::constant(g, 1.0);
        let v = TravelerField::from_profile(&profile, &ones).unwrap();
        let w = to_lagrangian(&v).unwrap();
        for y in 0..g.points() {
            assert_eq!(w.home_slice(y), profile.values());
        }
    }

    #[test]
    fn home_independent_field_stays_slot_independent() {
        let g = grid8();
        let v = TravelerField::from_fn(g, |_, y| y.0 + 2.0 * y.1).unwrap();
        let w = to_lagrangian(&v).unwrap();
        for y in 0..g.points() {
            let s = w.home_slice(y);
            assert!(s.iter().all(|&e| e == s[0]));
        }
    }

    #[test]
    fn lagrangian_slot_coordinates_are_offsets() {
        let g = grid8();
        let v = TravelerField::from_fn(g, |x, y| {
            // encode x - y wrapped to the torus
            let wrap = |d: f64| {
                let l = g.length();
                (d + 0.5 * l).rem_euclid(l) - 0.5 * l
            };
            10.0 * wrap(x.0 - y.0) + wrap(x.1 - y.1)
        })
        .unwrap();
        let w = to_lagrangian(&v).unwrap();
        for y in [0, 9, 63] {
            for z in 0..g.points() {
                let (a, b) = g.node(z);
                assert!((w.get(z, y) - (10.0 * a + b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn home_integral_is_bounded_by_y1() {
        let g = grid8();
        let v = field_from(g, &[0.3, -1.2, 2.0]);
        let ih = integrate_home(&v).unwrap();
        assert!(ih.sup_norm() <= norm_y1(&v) + 1e-12);
    }

    proptest! {
        #[test]
        fn frame_round_trip_is_exact(seed in proptest::collection::vec(-5.0f64..5.0, 1..16)) {
            let g = grid8();
            let v = field_from(g, &seed);
            let back = to_eulerian(&to_lagrangian(&v).unwrap()).unwrap();
            prop_assert_eq!(back.values(), v.values());
            let w = to_lagrangian(&v).unwrap();
            prop_assert_eq!(norm_y2(&w), norm_y2(&v));
            prop_assert_eq!(norm_y1(&w), norm_y1(&v));
        }

        #[test]
        fn norms_obey_triangle_inequality(
            a in proptest::collection::vec(-3.0f64..3.0, 1..12),
            b in proptest::collection::vec(-3.0f64..3.0, 1..12),
        ) {
            let g = grid8();
            let va = field_from(g, &a);
            let vb = TravelerField::new(g, Frame::Eulerian, va.values().iter().rev().zip(b.iter().cycle()).map(|(x, y)| x * y).collect()).unwrap();
            let sum = va.axpby(1.0, &vb, 1.0).unwrap();
            prop_assert!(norm_y1(&sum) <= norm_y1(&va) + norm_y1(&vb) + 1e-12);
            prop_assert!(norm_y2(&sum) <= norm_y2(&va) + norm_y2(&vb) + 1e-12);
            let ua = ScalarField::new(g, a.iter().cycle().take(g.points()).copied().collect()).unwrap();
            let ub = ScalarField::new(g, b.iter().cycle().take(g.points()).copied().collect()).unwrap();
            let us = ua.axpby(1.0, &ub, 1.0).unwrap();
            prop_assert!(norm_sup(&us) <= norm_sup(&ua) + norm_sup(&ub) + 1e-12);
        }

        #[test]
        fn quadrature_is_linear_and_positive(
            a in -2.0f64..2.0, b in -2.0f64..2.0,
            s in proptest::collection::vec(0.0f64..3.0, 1..10),
        ) {
            let g = grid8();
            let v = TravelerField::new(g, Frame::Eulerian, (0..g.points().pow(2)).map(|i| s[i % s.len()]).collect()).unwrap();
            let w = to_eulerian(&to_lagrangian(&v).unwrap()).unwrap().scale(0.5).axpby(1.0, &field_from(g, &s), 1.0).unwrap();
            let lhs = integrate_position(&v.axpby(a, &w, b).unwrap()).unwrap();
            let rhs = integrate_position(&v).unwrap().axpby(a, &integrate_position(&w).unwrap(), b).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
            prop_assert!(integrate_position(&v).unwrap().min() >= 0.0);
            prop_assert!(integrate_home(&v).unwrap().min() >= 0.0);
        }
    }
}
