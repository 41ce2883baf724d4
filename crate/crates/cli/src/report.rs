//! Deterministic report and CSV emission. Reports are key-value lines;
//! solution files carry one row per grid node with 16 significant digits.
//! Nothing time- or path-dependent goes into a file, so identical runs are
//! byte-identical.

use anyhow::{Context, Result};
use nivp_core::matrix::{ConvergenceReport, NonnegMatrix};
use nivp_core::space::SystemState;
use std::fmt::Write as _;
use std::path::Path;

/// Accumulates `key = value` lines destined for stdout, a file, or both.
#[derive(Default)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key} = {value}");
    }

    pub fn matrix(&mut self, key: &str, m: &NonnegMatrix) {
        for i in 0..m.dim() {
            let row: Vec<String> = (0..m.dim()).map(|j| m.entry(i, j).to_string()).collect();
            let _ = writeln!(self.text, "{key}_row{i} = [{}]", row.join(", "));
        }
    }

    pub fn convergence(&mut self, report: &ConvergenceReport) {
        self.line("spectral_radius", report.spectral_radius);
        self.line("verdict", report.verdict);
        self.line("criterion_matrix_powers", report.by_power_iteration);
        self.line("criterion_neumann_series", report.by_neumann);
        self.line("criterion_eigenvalues", report.by_eigenvalues);
        self.line("criterion_inverse_positivity", report.by_inverse_positivity);
    }

    pub fn print(&self) {
        print!("{}", self.text);
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.text)
            .with_context(|| format!("cannot write report {}", path.display()))
    }
}

/// CSV with header `t,x,y`, one row per node, 16 significant digits.
pub fn write_solution_csv(path: &Path, state: &SystemState) -> Result<()> {
    let x = state.first().func();
    let y = state.second().func();
    let mut out = String::from("t,x,y\n");
    for i in 0..=state.n_intervals() {
        let _ = writeln!(
            out,
            "{:.15e},{:.15e},{:.15e}",
            x.node(i),
            x.value_at_node(i),
            y.value_at_node(i)
        );
    }
    std::fs::write(path, out).with_context(|| format!("cannot write CSV {}", path.display()))
}
