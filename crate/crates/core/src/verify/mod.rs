//! Viterbo reports, the inequality chain for the explicit `n`-dimensional
//! trajectories, configuration documents, report pipelines and figure data.

pub mod config;
pub mod figures;
pub mod ineq;
pub mod report;

use serde::Serialize;

use crate::special::{factorial, ln_factorial};

pub use config::{BodyConfig, ConfigDocument, Family};
pub use figures::{emit_figure_data, FigureKind};
pub use ineq::{
    check_ineq, ineq_chain_grid, log_step_holds, sine_cubic_bound_holds, stirling_bound_holds,
    ChainGridReport, IneqCheck,
};
pub use report::{exit_code, run_report, run_simulation, square_l2sum_capacity, RunOptions, SimulationSummary};

/// `volume * n! / capacity^n`
pub fn viterbo_ratio(volume: f64, capacity: f64, n: usize) -> f64 {
    volume * factorial(n as f64) / capacity.powi(n as i32)
}

/// `4 (((n/2)!)^2 / n!)^(1/n)`, the capacity bound for the L2-sum of the
/// square and the cross-polytope stated without derivation in the source
/// material. Equal to `(n! vol)^(1/n)` for that body, i.e. the largest
/// capacity compatible with Viterbo's inequality.
pub fn l2sum_capacity_upper_bound(n: usize) -> f64 {
    let n = n as f64;
    4.0 * ((2.0 * ln_factorial(n / 2.0) - ln_factorial(n)) / n).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolumeMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapacityKind {
    Exact,
    UpperBound,
    PaperAsserted,
}

/// One row of a Viterbo report.
#[derive(Debug, Clone, Serialize)]
pub struct ViterboReport {
    pub body_label: String,
    pub family: String,
    pub n: usize,
    pub level: f64,
    pub volume: f64,
    pub volume_method: VolumeMethod,
    pub volume_std_error: f64,
    pub capacity_or_bound: f64,
    pub capacity_kind: CapacityKind,
    /// `volume n! / capacity^n`
    pub ratio: f64,
    /// Standard error of the ratio propagated from the volume.
    pub ratio_std_error: f64,
    pub ok: bool,
}

/// Slack added to the propagated error so that exact equality cases survive
/// rounding.
pub const RATIO_ROUNDING: f64 = 1e-12;

impl ViterboReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        body_label: impl Into<String>,
        family: impl Into<String>,
        n: usize,
        level: f64,
        volume: f64,
        volume_method: VolumeMethod,
        volume_std_error: f64,
        capacity_or_bound: f64,
        capacity_kind: CapacityKind,
    ) -> Self {
        let ratio = viterbo_ratio(volume, capacity_or_bound, n);
        let ratio_std_error = ratio * volume_std_error / volume;
        let ok = ratio >= 1.0 - 3.0 * ratio_std_error - RATIO_ROUNDING;
        Self {
            body_label: body_label.into(),
            family: family.into(),
            n,
            level,
            volume,
            volume_method,
            volume_std_error,
            capacity_or_bound,
            capacity_kind,
            ratio,
            ratio_std_error,
            ok,
        }
    }
}

/// `x` with 12 significant digits, without trailing zeros.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}
