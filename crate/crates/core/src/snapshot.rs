//! Binary field snapshots and CSV export.
//!
//! A snapshot is one ASCII header line `RHSIM1 <N> <L> <frame>` followed by the
//! values as little-endian `f64`. Scalar fields use the frame token `scalar`;
//! traveler fields are written position-major (the home index varies fastest).

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{to_eulerian, Frame, GridSpec, ScalarField, TravelerField};

const MAGIC: &str = "RHSIM1";

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Scalar(ScalarField),
    Traveler(TravelerField),
}

impl Snapshot {
    pub fn grid(&self) -> GridSpec {
        match self {
            Snapshot::Scalar(f) => f.grid(),
            Snapshot::Traveler(f) => f.grid(),
        }
    }

    fn frame_token(&self) -> String {
        match self {
            Snapshot::Scalar(_) => "scalar".to_string(),
            Snapshot::Traveler(f) => f.frame().to_string(),
        }
    }

    /// `h² Σ` for scalar fields, `h⁴ ΣΣ` for traveler fields.
    pub fn integral(&self) -> f64 {
        match self {
            Snapshot::Scalar(f) => f.integral(),
            Snapshot::Traveler(f) => f.total(),
        }
    }

    pub fn write_to(&self, mut out: impl Write) -> Result<()> {
        let grid = self.grid();
        writeln!(out, "{MAGIC} {} {} {}", grid.n(), grid.length(), self.frame_token())?;
        let data = match self {
            Snapshot::Scalar(f) => f.values().to_vec(),
            Snapshot::Traveler(f) => f.to_position_major(),
        };
        let mut bytes = Vec::with_capacity(8 * data.len());
        for v in data {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_from(input: impl Read) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut header = Vec::new();
        reader.read_until(b'\n', &mut header)?;
        let header = std::str::from_utf8(&header)
            .map_err(|_| Error::Format("header is not UTF-8".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != MAGIC {
            return Err(Error::Format(format!("bad header `{}`", header.trim_end())));
        }
        let n: usize = parts[1]
            .parse()
            .map_err(|_| Error::Format(format!("bad N `{}`", parts[1])))?;
        let length: f64 = parts[2]
            .parse()
            .map_err(|_| Error::Format(format!("bad L `{}`", parts[2])))?;
        let grid = GridSpec::new(length, n)?;
        let frame = match parts[3] {
            "scalar" => None,
            "eulerian" => Some(Frame::Eulerian),
            "lagrangian" => Some(Frame::Lagrangian),
            other => return Err(Error::Format(format!("unknown frame `{other}`"))),
        };
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        let expected = match frame {
            None => grid.points(),
            Some(_) => grid.points() * grid.points(),
        };
        if bytes.len() != 8 * expected {
            return Err(Error::LengthMismatch {
                expected,
                found: bytes.len() / 8,
            });
        }
        let data: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        match frame {
            None => Ok(Snapshot::Scalar(ScalarField::new(grid, data)?)),
            Some(frame) => Ok(Snapshot::Traveler(TravelerField::from_position_major(grid, frame, &data)?)),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }

    /// One row per node: coordinates then value, 17 significant digits.
    /// Traveler fields are exported in Eulerian coordinates `x1,x2,y1,y2`.
    pub fn to_csv(&self) -> Result<String> {
        let mut s = String::new();
        match self {
            Snapshot::Scalar(f) => {
                s.push_str("x1,x2,value\n");
                let g = f.grid();
                for (p, v) in f.values().iter().enumerate() {
                    let (a, b) = g.node(p);
                    writeln!(s, "{a:.16e},{b:.16e},{v:.16e}").expect("write to String");
                }
            }
            Snapshot::Traveler(f) => {
                let e = match f.frame() {
                    Frame::Eulerian => f.clone(),
                    Frame::Lagrangian => to_eulerian(f)?,
                };
                s.push_str("x1,x2,y1,y2,value\n");
                let g = e.grid();
                let np = g.points();
                for x in 0..np {
                    let (a, b) = g.node(x);
                    for y in 0..np {
                        let (c, d) = g.node(y);
                        let v = e.get(x, y);
                        writeln!(s, "{a:.16e},{b:.16e},{c:.16e},{d:.16e},{v:.16e}").expect("write to String");
                    }
                }
            }
        }
        Ok(s)
    }
}

impl From<ScalarField> for Snapshot {
    fn from(f: ScalarField) -> Self {
        Snapshot::Scalar(f)
    }
}

impl From<TravelerField> for Snapshot {
    fn from(f: TravelerField) -> Self {
        Snapshot::Traveler(f)
    }
}
