//! Delimited trajectory data for plots of the `|p|_1^2 + |q|_inf^2` orbits.

use std::str::FromStr;

use super::format_sig;
use crate::error::{Error, Result};
use crate::pl_flow::{explicit_nd_start, one_cycle_minimal, simulate, ClosedTrajectory, PhasePoint, SimulationMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    /// The planar one-cycle orbit with its `p` and `q` projections, plus the
    /// rotated coordinates `x_1 = (q_1 - q_2)/2`, `x_2 = (q_1 + q_2)/2`.
    Trajectory2d,
    /// The explicit closed orbit in dimension `n`.
    TrajectoryNd,
    /// Coordinates against time along the explicit orbit, with the two norms
    /// and an event marker.
    CoordinateEvolution,
}

impl FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trajectory-2d" => Ok(FigureKind::Trajectory2d),
            "trajectory-nd" => Ok(FigureKind::TrajectoryNd),
            "coordinate-evolution" => Ok(FigureKind::CoordinateEvolution),
            other => Err(Error::Config(format!("unknown figure kind '{other}'"))),
        }
    }
}

fn explicit_orbit(n: usize) -> Result<ClosedTrajectory> {
    let start = explicit_nd_start(n)?;
    simulate(&start, SimulationMode::UntilClosed { max_events: 16 * n })?
        .closed()
        .ok_or_else(|| Error::numeric(format!("explicit orbit for n = {n} did not close")))
}

/// Rows `(t, state, is_event)` with `dense` samples per arc.
fn rows(traj: &ClosedTrajectory, dense: usize) -> Vec<(f64, PhasePoint, bool)> {
    let per = dense.max(1);
    let mut out = Vec::new();
    for seg in &traj.segments {
        for j in 0..per {
            let tau = seg.duration * j as f64 / per as f64;
            out.push((seg.t0 + tau, seg.state_at(tau), j == 0));
        }
    }
    if let Some(last) = traj.segments.last() {
        out.push((last.t0 + last.duration, last.end(), true));
    }
    out
}

fn header(n: usize, prefix: &[&str], extra: &[&str]) -> String {
    let mut cols: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    cols.extend((1..=n).map(|i| format!("p_{i}")));
    cols.extend((1..=n).map(|i| format!("q_{i}")));
    cols.extend(extra.iter().map(|s| s.to_string()));
    cols.join(",")
}

fn push_row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let line: Vec<String> = values.into_iter().map(format_sig).collect();
    out.push_str(&line.join(","));
    out.push('\n');
}

/// Figure data as comma-separated text. `n` defaults to 3 for the
/// `n`-dimensional kinds and is ignored by `Trajectory2d`.
pub fn emit_figure_data(kind: FigureKind, n: Option<usize>, dense: usize) -> Result<String> {
    let mut out = String::new();
    match kind {
        FigureKind::Trajectory2d => {
            let traj = one_cycle_minimal()?;
            out.push_str(&header(2, &["t"], &["x_1", "x_2", "event"]));
            out.push('\n');
            for (t, x, ev) in rows(&traj, dense) {
                let [x1, x2] = x.rotated_x().expect("planar orbit");
                push_row(&mut out, [t].into_iter().chain(x.p.clone()).chain(x.q.clone()).chain([x1, x2, ev as u8 as f64]));
            }
        }
        FigureKind::TrajectoryNd | FigureKind::CoordinateEvolution => {
            let n = n.unwrap_or(3);
            let traj = explicit_orbit(n)?;
            let extra: &[&str] = if kind == FigureKind::CoordinateEvolution { &["p_norm", "q_norm", "event"] } else { &["event"] };
            out.push_str(&header(n, &["t"], extra));
            out.push('\n');
            for (t, x, ev) in rows(&traj, dense) {
                let tail = if kind == FigureKind::CoordinateEvolution {
                    vec![x.p_norm(), x.q_norm(), ev as u8 as f64]
                } else {
                    vec![ev as u8 as f64]
                };
                push_row(&mut out, [t].into_iter().chain(x.p.clone()).chain(x.q.clone()).chain(tail));
            }
        }
    }
    Ok(out)
}
