//! Acceptance harness for `rhsim-core`: independent oracles and the ten
//! acceptance criteria, shared by the `acceptance` test target and
//! `rhsim verify`.

use std::fmt;
use std::time::{Duration, Instant};

pub mod criteria;
pub mod data;
pub mod oracles;

pub use criteria::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// N = 16 everywhere.
    Quick,
    /// Production sizes: N = 32, and N = 64 for the kernel identity.
    Full,
}

type CriterionFn = fn(Level) -> rhsim_core::Result<Outcome>;

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget: Duration,
    pub run: CriterionFn,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "kernel identity", budget: Duration::from_secs(1), run: criteria::kernel_identity },
    Criterion { id: 2, name: "exact u-dynamics", budget: Duration::from_secs(5), run: criteria::exact_u_dynamics },
    Criterion { id: 3, name: "conservation", budget: Duration::from_secs(10), run: criteria::conservation },
    Criterion { id: 4, name: "oracle convergence order", budget: Duration::from_secs(60), run: criteria::convergence_order },
    Criterion { id: 5, name: "equilibrium", budget: Duration::from_secs(5), run: criteria::equilibrium_identities },
    Criterion { id: 6, name: "positivity", budget: Duration::from_secs(120), run: criteria::positivity },
    Criterion { id: 7, name: "reduction identities", budget: Duration::from_secs(30), run: criteria::reductions },
    Criterion { id: 8, name: "monotone semiflow", budget: Duration::from_secs(60), run: criteria::monotone_semiflow },
    Criterion { id: 9, name: "epidemic oracle", budget: Duration::from_secs(300), run: criteria::epidemic_oracle },
    Criterion { id: 10, name: "transient quadrature", budget: Duration::from_secs(30), run: criteria::transient_quadrature },
];

#[derive(Debug, Clone)]
pub struct Report {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let over = if self.elapsed > self.budget { " over budget" } else { "" };
        write!(
            f,
            "[{}] {:>2} {:<26} {} ({:.2} s / {} s{})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            over
        )
    }
}

impl Criterion {
    pub fn evaluate(&self, level: Level) -> Report {
        let start = Instant::now();
        let (passed, detail) = match (self.run)(level) {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        Report {
            id: self.id,
            name: self.name,
            passed,
            detail,
            elapsed: start.elapsed(),
            budget: self.budget,
        }
    }
}

/// Runs every criterion, calling `each` as soon as one finishes.
pub fn run_all(level: Level, mut each: impl FnMut(&Report)) -> Vec<Report> {
    CRITERIA
        .iter()
        .map(|c| {
            let r = c.evaluate(level);
            each(&r);
            r
        })
        .collect()
}
