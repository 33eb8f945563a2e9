//! Report pipelines: one [`ViterboReport`] row per configured body.

use std::f64::consts::PI;

use serde::Serialize;

use super::config::{Body, BodyConfig, ConfigDocument, StartSpec};
use super::{l2sum_capacity_upper_bound, CapacityKind, ViterboReport, VolumeMethod};
use crate::bodies::{l1_linf_l2_sum_volume, l2_sum_volume, monte_carlo_volume, L2SumSpec, NormKind, SplitHamiltonian};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pl_flow::{
    explicit_nd_start, nd_period_formula, one_cycle_minimal, simulate, trajectory_csv, PhasePoint, Simulation,
    SimulationMode,
};
use crate::profiles::{viterbo_bound_split, SplitOptions};
use crate::quadratic::{ellipsoid_capacity, ellipsoid_volume, verify_theorem_even_2hom, verify_theorem_sandwich, TheoremOptions};

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
    /// Monte Carlo samples per volume estimate.
    pub samples: u64,
    /// Closure tolerance reported for simulations.
    pub tol: f64,
    pub exec: Execution,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: 0, samples: 1_000_000, tol: 1e-8, exec: Execution::Sequential }
    }
}

/// 0 when every row is ok, 1 when some row is not, 2 for configuration
/// errors and 3 for numerical failures.
pub fn exit_code(result: &Result<Vec<ViterboReport>>) -> i32 {
    match result {
        Ok(rows) if rows.iter().all(|r| r.ok) => 0,
        Ok(_) => 1,
        Err(Error::Config(_)) => 2,
        Err(_) => 3,
    }
}

pub fn run_report(doc: &ConfigDocument, opts: &RunOptions) -> Result<Vec<ViterboReport>> {
    let mut rows = Vec::new();
    for cfg in &doc.bodies {
        rows.extend(report_body(cfg, opts)?);
    }
    Ok(rows)
}

fn is_square_pair(spec: &L2SumSpec) -> bool {
    matches!(spec.norm.kind(), NormKind::LInf) && matches!(spec.dual_norm.kind(), NormKind::L1)
}

fn is_euclidean_pair(spec: &L2SumSpec) -> bool {
    match (spec.norm.kind(), spec.dual_norm.kind()) {
        (NormKind::L2, NormKind::L2) => true,
        (NormKind::WeightedL2(w), NormKind::WeightedL2(v)) => {
            w.iter().zip(v).all(|(a, b)| (a * b - 1.0).abs() <= 1e-14)
        }
        _ => false,
    }
}

/// Smallest known action for `|p|_1^2 + |q|_inf^2 <= 1`: exact for
/// `n <= 2`, otherwise the least of the actions of the oscillation through
/// the origin, the planar one-cycle orbit and the explicit `n`-dimensional
/// orbit.
pub fn square_l2sum_capacity(n: usize) -> (f64, CapacityKind) {
    match n {
        1 => (PI, CapacityKind::Exact),
        2 => (4.0 * 0.6f64.asin(), CapacityKind::Exact),
        _ => (PI.min(4.0 * 0.6f64.asin()).min(nd_period_formula(n)), CapacityKind::UpperBound),
    }
}

fn report_body(cfg: &BodyConfig, opts: &RunOptions) -> Result<Vec<ViterboReport>> {
    let label = cfg.label();
    let family = cfg.family.name();
    let n = cfg.dimension;
    let e = cfg.level;
    let body = cfg.build()?;
    let row = |volume, method, err, cap, kind| ViterboReport::new(label.clone(), family, n, e, volume, method, err, cap, kind);
    match body {
        Body::Quadratic(a) => {
            let cap = ellipsoid_capacity(&a, e)?;
            let vol = ellipsoid_volume(&a, e)?;
            Ok(vec![row(vol, VolumeMethod::Exact, 0.0, cap, CapacityKind::Exact)])
        }
        Body::L2Sum(spec) => {
            let scale = e.powi(n as i32);
            let (volume, method, err) = if is_square_pair(&spec) {
                (l1_linf_l2_sum_volume(n) * scale, VolumeMethod::Exact, 0.0)
            } else if spec.norm.exact_unit_ball_volume().is_some() && spec.dual_norm.exact_unit_ball_volume().is_some() {
                (l2_sum_volume(&spec)? * scale, VolumeMethod::Exact, 0.0)
            } else {
                let h = SplitHamiltonian::l2_sum(&spec);
                let v = monte_carlo_volume(&h, e, opts.samples, opts.seed, opts.exec)?;
                (v.estimate, VolumeMethod::MonteCarlo, v.std_error)
            };
            let mut rows = Vec::new();
            if is_square_pair(&spec) {
                let (c, kind) = square_l2sum_capacity(n);
                rows.push(row(volume, method, err, c * e, kind));
                if n >= 2 {
                    let mut asserted = row(volume, method, err, l2sum_capacity_upper_bound(n) * e, CapacityKind::PaperAsserted);
                    asserted.body_label = format!("{label} (asserted bound)");
                    rows.push(asserted);
                }
            } else {
                // the oscillation in the plane of q0 and its dual vector has action pi
                let kind = if is_euclidean_pair(&spec) { CapacityKind::Exact } else { CapacityKind::UpperBound };
                rows.push(row(volume, method, err, PI * e, kind));
            }
            Ok(rows)
        }
        Body::Split { kinetic, potential, euclidean_kinetic, sandwich } => {
            let topts = TheoremOptions {
                level: e,
                mc_samples: opts.samples,
                seed: opts.seed,
                exec: opts.exec,
                ..TheoremOptions::default()
            };
            if euclidean_kinetic && sandwich.is_none() {
                let r = verify_theorem_even_2hom(&potential, &topts)?;
                if r.containment_ok && r.gradient_agreement_ok && r.shared_characteristic_ok && !r.nonsmooth_maximizer {
                    return Ok(vec![row(r.volume, VolumeMethod::MonteCarlo, r.volume_std_error, r.capacity, CapacityKind::Exact)]);
                }
            }
            let r = verify_theorem_sandwich(&kinetic, &potential, sandwich, &topts)?;
            if r.holds && r.containment_ok && r.gradient_agreement_ok && r.shared_characteristic_ok {
                Ok(vec![row(r.volume, VolumeMethod::MonteCarlo, r.volume_std_error, r.capacity, CapacityKind::Exact)])
            } else {
                Err(Error::numeric(format!(
                    "{label}: no capacity certificate (sandwich holds: {}, containment: {}, gradients: {}, closure error {:e})",
                    r.holds, r.containment_ok, r.gradient_agreement_ok, r.closure_error
                )))
            }
        }
        Body::DirectSum(systems) => {
            let sopts = SplitOptions { mc_samples: opts.samples, seed: opts.seed, exec: opts.exec, ..SplitOptions::default() };
            let r = viterbo_bound_split(&systems, e, &sopts)?;
            Ok(vec![row(r.volume_mc, VolumeMethod::MonteCarlo, r.volume_std_error, r.a_e, CapacityKind::UpperBound)])
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSummary {
    pub label: String,
    pub n: usize,
    pub energy: f64,
    pub start: PhasePoint,
    pub closed: bool,
    pub events: usize,
    pub period: Option<f64>,
    pub action: Option<f64>,
    pub cycles: Option<usize>,
    pub closure_error: Option<f64>,
    pub closed_within_tol: bool,
    /// Event rows plus `dense` samples per arc, as delimited text.
    #[serde(skip)]
    pub trajectory: Option<String>,
}

/// Runs the event-driven simulator for an `l2-sum` body of the square and
/// cross-polytope, from the start named in its `[simulation]` table.
pub fn run_simulation(cfg: &BodyConfig, opts: &RunOptions) -> Result<SimulationSummary> {
    let Body::L2Sum(spec) = cfg.build()? else {
        return Err(Error::Config("simulation needs an l2-sum body".into()));
    };
    if !is_square_pair(&spec) {
        return Err(Error::Config("simulation supports the ell-infinity norm with its ell-1 dual only".into()));
    }
    let n = cfg.dimension;
    let sim = cfg.simulation.clone().unwrap_or_default();
    let scale = cfg.level.sqrt();
    let start = match &sim.start {
        StartSpec::Named(s) if s == "explicit" => explicit_nd_start(n)?.scaled(scale),
        StartSpec::Named(s) if s == "one-cycle" => {
            if n != 2 {
                return Err(Error::Config("the one-cycle start exists for dimension 2".into()));
            }
            one_cycle_minimal()?.start.scaled(scale)
        }
        StartSpec::Named(s) => return Err(Error::Config(format!("unknown start '{s}'"))),
        StartSpec::Point { p, q } => {
            if p.len() != n || q.len() != n {
                return Err(Error::Config("start point has the wrong dimension".into()));
            }
            PhasePoint::new(p.clone(), q.clone()).map_err(|e| Error::Config(e.to_string()))?
        }
    };
    let energy = start.energy();
    let label = cfg.label();
    match simulate(&start, SimulationMode::UntilClosed { max_events: sim.max_events })? {
        Simulation::Closed(t) => Ok(SimulationSummary {
            label,
            n,
            energy,
            closed: true,
            events: t.events.len(),
            period: Some(t.period),
            action: Some(t.action),
            cycles: t.cycles,
            closure_error: Some(t.closure_error),
            closed_within_tol: t.closure_error <= opts.tol,
            trajectory: Some(trajectory_csv(&t, sim.dense)),
            start,
        }),
        Simulation::Open(o) => Ok(SimulationSummary {
            label,
            n,
            energy,
            closed: false,
            events: o.events.len(),
            period: None,
            action: None,
            cycles: None,
            closure_error: None,
            closed_within_tol: false,
            trajectory: None,
            start,
        }),
    }
}
