//! Output directory bookkeeping: every file written goes through [`Emitter`]
//! so that the manifest lists it exactly once.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rhsim_core::trajectory::Diagnostics;
use rhsim_core::Snapshot;

use crate::config::Format;
use crate::error::CliError;
use crate::render::{render_snapshot, Reduce};

pub const MANIFEST: &str = "manifest.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub file: String,
    pub t: f64,
    /// Quadrature integral of the field, for snapshots and images.
    pub integral: Option<f64>,
}

pub struct Emitter {
    dir: PathBuf,
    formats: Vec<Format>,
    entries: Vec<ManifestEntry>,
    names: BTreeSet<String>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Emitter {
    /// Prepares `dir`. Files listed by a previous manifest are removed; any
    /// other existing file is an error, since the manifest must cover the
    /// whole directory.
    pub fn create(dir: &Path, formats: &[Format]) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        let previous = dir.join(MANIFEST);
        if previous.exists() {
            for entry in read_manifest(&previous)? {
                let path = dir.join(&entry.file);
                if path.is_file() {
                    fs::remove_file(path)?;
                }
            }
        }
        let leftovers: Vec<String> = fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .collect();
        if !leftovers.is_empty() {
            return Err(CliError::Config(format!(
                "output directory {} holds files not produced by a previous run: {}",
                dir.display(),
                leftovers.join(", ")
            )));
        }
        let mut formats = formats.to_vec();
        formats.dedup();
        Ok(Self {
            dir: dir.to_path_buf(),
            formats,
            entries: Vec::new(),
            names: BTreeSet::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn record(&mut self, file: String, t: f64, integral: Option<f64>) {
        assert!(self.names.insert(file.clone()), "{file} emitted twice");
        self.entries.push(ManifestEntry { file, t, integral });
    }

    /// Writes `stem` in every configured format.
    pub fn snapshot(&mut self, stem: &str, t: f64, snap: &Snapshot) -> Result<(), CliError> {
        let integral = snap.integral();
        for format in self.formats.clone() {
            let file = match format {
                Format::Bin => format!("{stem}.bin"),
                Format::Csv => format!("{stem}.csv"),
                Format::Png => format!("{stem}.png"),
            };
            let path = self.dir.join(&file);
            match format {
                Format::Bin => snap.save(&path)?,
                Format::Csv => fs::write(&path, snap.to_csv()?)?,
                Format::Png => {
                    render_snapshot(snap, &path, Reduce::Home, &format!("{stem}  t = {t:.4}"))?;
                }
            }
            self.record(file, t, Some(integral));
        }
        Ok(())
    }

    pub fn table(&mut self, file: &str, t: f64, contents: &str) -> Result<(), CliError> {
        fs::write(self.dir.join(file), contents)?;
        self.record(file.to_string(), t, None);
        Ok(())
    }

    /// Writes the manifest, which lists itself last.
    pub fn finish(mut self, t: f64) -> Result<Vec<ManifestEntry>, CliError> {
        self.record(MANIFEST.to_string(), t, None);
        let mut s = String::from("file,t,integral\n");
        for e in &self.entries {
            let integral = e.integral.map(num).unwrap_or_default();
            writeln!(s, "{},{},{}", e.file, num(e.t), integral).expect("write to String");
        }
        fs::write(self.dir.join(MANIFEST), s)?;
        Ok(self.entries)
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let text = fs::read_to_string(path)?;
    let bad = |line: &str| CliError::Config(format!("malformed manifest line `{line}`"));
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|line| {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(bad(line));
            }
            let t = parts[1].parse().map_err(|_| bad(line))?;
            let integral = if parts[2].is_empty() {
                None
            } else {
                Some(parts[2].parse().map_err(|_| bad(line))?)
            };
            Ok(ManifestEntry {
                file: parts[0].to_string(),
                t,
                integral,
            })
        })
        .collect()
}

/// `t, norm_X, conservation_residual, min`.
pub fn diagnostics_csv(diagnostics: &[Diagnostics]) -> String {
    let mut s = String::from("t,norm_X,conservation_residual,min\n");
    for d in diagnostics {
        writeln!(
            s,
            "{},{},{},{}",
            num(d.t),
            num(d.norm_state),
            num(d.conservation_residual),
            num(d.min_value)
        )
        .expect("write to String");
    }
    s
}

/// `t, S1, I1, S2, I2` compartment totals.
pub fn epidemic_curve_csv(rows: &[(f64, rhsim_core::epidemic::EpidemicTotals)]) -> String {
    let mut s = String::from("t,S1,I1,S2,I2\n");
    for (t, c) in rows {
        writeln!(s, "{},{},{},{},{}", num(*t), num(c.s1), num(c.i1), num(c.s2), num(c.i2))
            .expect("write to String");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rhsim_core::{GridSpec, ScalarField};

    #[test]
    fn manifest_round_trips_and_lists_itself() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(4.0, 8).unwrap();
        let mut em = Emitter::create(dir.path(), &[Format::Bin, Format::Csv]).unwrap();
        em.snapshot("u_0000", 0.5, &ScalarField::constant(g, 2.0).into()).unwrap();
        em.table("diagnostics.csv", 0.5, "t\n").unwrap();
        let entries = em.finish(0.5).unwrap();
        let back = read_manifest(&dir.path().join(MANIFEST)).unwrap();
        assert_eq!(entries, back);
        assert_eq!(back.len(), 4);
        assert_eq!(back[0].integral, Some(32.0));
        // a second run into the same directory replaces the first
        let em = Emitter::create(dir.path(), &[Format::Bin]).unwrap();
        em.finish(0.0).unwrap();
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn refuses_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("notes.txt"), "keep").unwrap();
        let err = Emitter::create(dir.path(), &[Format::Bin]).err().unwrap();
        assert_eq!(err.exit_code(), 2);
    }
}
