//! Heatmap rendering of snapshots.

use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use plotters::prelude::*;
use plotters::style::{register_font, FontStyle};

use rhsim_core::grid::{integrate_home, integrate_position, to_eulerian};
use rhsim_core::{Frame, ScalarField, Snapshot, TravelerField};

use crate::error::CliError;

const DEFAULT_FONT: &str = "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf";

/// How a traveler field is reduced to a 2-D image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduce {
    /// `∫ v(x, y) dy`, a density over positions.
    Home,
    /// `∫ v(x, y) dx`, a density over homes.
    Position,
    /// `v(·, y)` for the home node `(i1, i2)`.
    Slice(usize, usize),
}

impl FromStr for Reduce {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "home" => Ok(Reduce::Home),
            "position" => Ok(Reduce::Position),
            _ => {
                let rest = s
                    .strip_prefix("slice:")
                    .ok_or_else(|| format!("unknown reduction `{s}` (home | position | slice:I,J)"))?;
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| format!("slice needs two indices, got `{rest}`"))?;
                let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad index `{x}`"));
                Ok(Reduce::Slice(parse(a)?, parse(b)?))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSummary {
    /// `h² Σ` of the rendered field.
    pub integral: f64,
    pub min: f64,
    pub max: f64,
}

/// The 2-D field an image of `snap` shows.
pub fn reduce(snap: &Snapshot, how: Reduce) -> Result<ScalarField, CliError> {
    let v = match snap {
        Snapshot::Scalar(f) => return Ok(f.clone()),
        Snapshot::Traveler(v) => eulerian(v)?,
    };
    let grid = v.grid();
    Ok(match how {
        Reduce::Home => integrate_home(&v)?,
        Reduce::Position => integrate_position(&v)?,
        Reduce::Slice(i, j) => {
            let n = grid.n();
            if i >= n || j >= n {
                return Err(CliError::Config(format!("slice ({i}, {j}) outside a {n}x{n} grid")));
            }
            ScalarField::new(grid, v.home_slice(i * n + j).to_vec())?
        }
    })
}

fn eulerian(v: &TravelerField) -> Result<TravelerField, CliError> {
    Ok(match v.frame() {
        Frame::Eulerian => v.clone(),
        Frame::Lagrangian => to_eulerian(v)?,
    })
}

/// Registers a font for labels once; images are drawn without text if none
/// is found.
fn font_available() -> bool {
    static FONT: OnceLock<bool> = OnceLock::new();
    *FONT.get_or_init(|| {
        let path = std::env::var("RHSIM_FONT").unwrap_or_else(|_| DEFAULT_FONT.to_string());
        match std::fs::read(&path) {
            Ok(bytes) => {
                let bytes: &'static [u8] = Box::leak(bytes.into_boxed_slice());
                register_font("sans-serif", FontStyle::Normal, bytes).is_ok()
            }
            Err(_) => {
                log::info!("no font at {path}; rendering without labels");
                false
            }
        }
    })
}

fn color(value: f64, min: f64, max: f64) -> RGBColor {
    if max - min <= f64::EPSILON * max.abs().max(1.0) {
        ViridisRGB::get_color(0.5)
    } else {
        ViridisRGB::get_color_normalized(value, min, max)
    }
}

fn draw(field: &ScalarField, out: &Path, title: &str, min: f64, max: f64) -> Result<(), Box<dyn std::error::Error>> {
    let n = field.grid().n();
    let cell = (512 / n).max(2) as u32;
    let side = cell * n as u32;
    let (margin, top, bar) = (16u32, 36u32, 96u32);
    let size = (margin + side + bar, top + side + margin);
    let root = BitMapBackend::new(out, size).into_drawing_area();
    root.fill(&WHITE)?;
    let x0 = margin as i32;
    let y0 = top as i32;
    let c = cell as i32;
    for (p, v) in field.values().iter().enumerate() {
        // first index runs left to right, second bottom to top
        let (i1, i2) = ((p / n) as i32, (p % n) as i32);
        let x = x0 + i1 * c;
        let y = y0 + (n as i32 - 1 - i2) * c;
        root.draw(&Rectangle::new([(x, y), (x + c, y + c)], color(*v, min, max).filled()))?;
    }
    let bx = x0 + side as i32 + 12;
    let steps = side as i32;
    for k in 0..steps {
        let frac = 1.0 - k as f64 / (steps - 1).max(1) as f64;
        let col = color(min + frac * (max - min), min, max);
        root.draw(&Rectangle::new([(bx, y0 + k), (bx + 14, y0 + k + 1)], col.filled()))?;
    }
    if font_available() {
        let style = ("sans-serif", 15).into_font().color(&BLACK);
        root.draw_text(title, &style, (x0, 10))?;
        let small = ("sans-serif", 12).into_font().color(&BLACK);
        root.draw_text(&format!("{max:.3e}"), &small, (bx + 18, y0))?;
        root.draw_text(&format!("{min:.3e}"), &small, (bx + 18, y0 + steps - 12))?;
    }
    root.present()?;
    Ok(())
}

/// Renders `snap` (reduced with `how` if it is a traveler field) to `out`.
pub fn render_snapshot(snap: &Snapshot, out: &Path, how: Reduce, title: &str) -> Result<RenderSummary, CliError> {
    let field = reduce(snap, how)?;
    let (min, max) = (field.min(), field.max());
    draw(&field, out, title, min, max).map_err(|e| CliError::Io(format!("cannot render {}: {e}", out.display())))?;
    Ok(RenderSummary {
        integral: field.integral(),
        min,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rhsim_core::GridSpec;

    #[test]
    fn parses_reductions() {
        assert_eq!("home".parse::<Reduce>(), Ok(Reduce::Home));
        assert_eq!("position".parse::<Reduce>(), Ok(Reduce::Position));
        assert_eq!("slice:3, 4".parse::<Reduce>(), Ok(Reduce::Slice(3, 4)));
        assert!("slice:3".parse::<Reduce>().is_err());
        assert!("diagonal".parse::<Reduce>().is_err());
    }

    #[test]
    fn reductions_of_a_separable_field() {
        let g = GridSpec::new(6.0, 8).unwrap();
        let v = TravelerField::from_fn(g, |x, y| (1.0 + 0.5 * x.0.cos()) * (2.0 + y.1.sin())).unwrap();
        let snap = Snapshot::from(v.clone());
        let total = v.total();
        for how in [Reduce::Home, Reduce::Position] {
            let f = reduce(&snap, how).unwrap();
            assert!((f.integral() - total).abs() < 1e-10 * total);
        }
        let slice = reduce(&snap, Reduce::Slice(2, 5)).unwrap();
        assert_eq!(slice.values(), v.home_slice(2 * 8 + 5));
        assert!(reduce(&snap, Reduce::Slice(8, 0)).is_err());
    }

    #[test]
    fn constant_field_renders_in_one_color() {
        assert_eq!(color(0.0, 0.0, 0.0), color(1.0, 1.0, 1.0));
        assert_ne!(color(0.0, 0.0, 1.0), color(1.0, 0.0, 1.0));
    }
}
