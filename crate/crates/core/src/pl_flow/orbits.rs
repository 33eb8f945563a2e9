use std::f64::consts::PI;

use serde::Serialize;

use super::segment::EventKind;
use super::{simulate, ClosedTrajectory, PhasePoint, SimulationMode, TrajectoryKind};
use crate::error::{Error, Result};
use crate::verify::format_sig;

/// One step of the turning-point recurrence `a_(m+1) = sqrt(1 - a_m^2) - a_(m-1)`.
/// A negative result means the sequence cannot continue.
pub fn recurrence_step(a_prev: f64, a_cur: f64) -> f64 {
    (1.0 - a_cur * a_cur).max(0.0).sqrt() - a_prev
}

/// Time to traverse an arc between turning angles `alpha >= beta`.
pub fn segment_time(alpha: f64, beta: f64) -> f64 {
    0.5 * (alpha - beta)
}

/// Turning angles of a closed trajectory: `alpha_i` at the zeros of `p_k`
/// (`cos alpha = |p|_1 / sqrt(E)`), `beta_i` at the hand-overs of the maximum
/// of `|q|` (`sin beta = |q|_inf / sqrt(E)`). The arc from `alpha_i` to
/// `beta_i` is followed by the arc from `beta_i` to `alpha_(i+1)`.
#[derive(Debug, Clone, Serialize)]
pub struct AngleSequence {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Set for trajectories outside the generic region structure; the
    /// sequences are empty then.
    pub degenerate: bool,
}

impl AngleSequence {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if alphas.len() != betas.len() {
            return Err(Error::invalid("alpha and beta sequences differ in length"));
        }
        let acute = |a: &f64| (-1e-12..=PI / 2.0 + 1e-12).contains(a);
        if !alphas.iter().chain(&betas).all(acute) {
            return Err(Error::invalid("turning angles must lie in [0, pi/2]"));
        }
        Ok(Self { alphas, betas, degenerate: false })
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// `a_1, a_2, ... = cos alpha_1, sin beta_1, cos alpha_2, ...`
    pub fn a_values(&self) -> Vec<f64> {
        self.alphas
            .iter()
            .zip(&self.betas)
            .flat_map(|(a, b)| [a.cos(), b.sin()])
            .collect()
    }

    /// Sum of the arc times, `sum alpha_i - sum beta_i` over a full cycle.
    pub fn period(&self) -> f64 {
        let m = self.len();
        (0..m)
            .map(|i| segment_time(self.alphas[i], self.betas[i]) + segment_time(self.alphas[(i + 1) % m], self.betas[i]))
            .sum()
    }

    /// Largest residual of the cyclic planar relations
    /// `cos alpha_i + cos alpha_(i+1) = cos beta_i` and
    /// `sin beta_(i-1) + sin beta_i = sin alpha_i`.
    pub fn relation_residual(&self) -> f64 {
        let m = self.len();
        (0..m)
            .map(|i| {
                let r1 = self.alphas[i].cos() + self.alphas[(i + 1) % m].cos() - self.betas[i].cos();
                let r2 = self.betas[(i + m - 1) % m].sin() + self.betas[i].sin() - self.alphas[i].sin();
                r1.abs().max(r2.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Largest residual of the recurrence along the cyclic `a` sequence.
    pub fn recurrence_residual(&self) -> f64 {
        let a = self.a_values();
        let m = a.len();
        (0..m)
            .map(|i| (a[(i + 2) % m] - recurrence_step(a[i], a[(i + 1) % m])).abs())
            .fold(0.0, f64::max)
    }
}

/// Turning angles of `traj`, after checking that every turning point lies on
/// the energy surface.
pub fn angle_sequence(traj: &ClosedTrajectory) -> Result<AngleSequence> {
    if traj.is_degenerate() {
        return Ok(AngleSequence { alphas: Vec::new(), betas: Vec::new(), degenerate: true });
    }
    let e = traj.energy;
    let r = e.sqrt();
    let mut marks: Vec<(bool, f64)> = Vec::with_capacity(traj.events.len());
    for ev in &traj.events {
        let (pn, qn) = (ev.point.p_norm(), ev.point.q_norm());
        let residual = (pn * pn + qn * qn - e).abs();
        if residual > 1e-9 * e.max(1.0) {
            return Err(Error::DataCorruption(format!(
                "turning point at t = {} is off the energy surface by {residual:e}",
                ev.time
            )));
        }
        match ev.kind {
            EventKind::PZero { .. } => marks.push((true, (pn / r).clamp(0.0, 1.0).acos())),
            EventKind::MaxTie { .. } => marks.push((false, (qn / r).clamp(0.0, 1.0).asin())),
        }
    }
    // start the cycle at an alpha
    if let Some(first_alpha) = marks.iter().position(|m| m.0) {
        marks.rotate_left(first_alpha);
    }
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    for pair in marks.chunks(2) {
        match pair {
            [(true, a), (false, b)] => {
                alphas.push(*a);
                betas.push(*b);
            }
            _ => return Err(Error::DataCorruption("turning events do not alternate".into())),
        }
    }
    AngleSequence::new(alphas, betas)
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    /// `S = (1/2) sum over arcs (alpha - beta)`.
    pub s: f64,
    pub cycles: usize,
    /// `sum cos alpha_i + (1/2) sum sin alpha_i`
    pub middle: f64,
    /// `m / 2` for `m` alphas.
    pub floor: f64,
    /// `2S >= middle >= m/2` and `S >= k`.
    pub bound_holds: bool,
    pub s_at_least_k: bool,
    /// `|2 sum cos alpha - sum cos beta|`
    pub cos_sum_residual: f64,
    /// `|2 sum sin beta - sum sin alpha|`
    pub sin_sum_residual: f64,
    pub summed_relations_hold: bool,
}

/// Evaluates the chain of estimates behind the bound "action >= number of
/// cycles" on a given angle sequence. The angle relations it uses are those
/// of planar orbits; for n > 2 only `s` and `s_at_least_k` are meaningful.
pub fn lemma_lower_bound(angles: &AngleSequence, k: usize) -> LemmaReport {
    let tol = 1e-9;
    let m = angles.len();
    let s = angles.period();
    let sum = |f: &dyn Fn(f64) -> f64, v: &[f64]| v.iter().map(|&x| f(x)).sum::<f64>();
    let (ca, sa) = (sum(&f64::cos, &angles.alphas), sum(&f64::sin, &angles.alphas));
    let (cb, sb) = (sum(&f64::cos, &angles.betas), sum(&f64::sin, &angles.betas));
    let middle = ca + 0.5 * sa;
    let floor = m as f64 / 2.0;
    let s_at_least_k = s >= k as f64 - tol;
    let cos_sum_residual = (2.0 * ca - cb).abs();
    let sin_sum_residual = (2.0 * sb - sa).abs();
    LemmaReport {
        s,
        cycles: k,
        middle,
        floor,
        bound_holds: 2.0 * s >= middle - tol && middle >= floor - tol && s_at_least_k,
        s_at_least_k,
        cos_sum_residual,
        sin_sum_residual,
        summed_relations_hold: cos_sum_residual <= tol * m.max(1) as f64
            && sin_sum_residual <= tol * m.max(1) as f64,
    }
}

fn nd_scale(n: usize) -> f64 {
    let n = n as f64;
    (n * n + (n - 1.0) * (n - 1.0)).sqrt()
}

/// Start of the explicit closed trajectory in dimension `n`:
/// `q_i = (n - 2(i-1)) / D`, `p_1 = 0`, `p_j = 1/D` with `D^2 = n^2 + (n-1)^2`.
pub fn explicit_nd_start(n: usize) -> Result<PhasePoint> {
    if n < 2 {
        return Err(Error::invalid("the explicit trajectory needs n >= 2"));
    }
    let d = nd_scale(n);
    let q = (0..n).map(|i| (n as f64 - 2.0 * i as f64) / d).collect();
    let p = (0..n).map(|j| if j == 0 { 0.0 } else { 1.0 / d }).collect();
    PhasePoint::new(p, q)
}

/// `2n arcsin((2n - 1) / (n^2 + (n-1)^2))`
pub fn nd_period_formula(n: usize) -> f64 {
    let nf = n as f64;
    let d2 = nf * nf + (nf - 1.0) * (nf - 1.0);
    2.0 * nf * ((2.0 * nf - 1.0) / d2).asin()
}

/// The oscillation `p = v p0`, `q = u q0` on `{H = energy}` with
/// `p0 = dir / |dir|_1` and `q0 = sgn(dir)`, so `<p0, q0> = 1`. Along it all
/// nonzero `|q_i|` tie, and `(u, v)` rotates with angular speed 2: period
/// `pi`, action `pi E`.
pub fn forth_and_back(dir: &[f64], energy: f64) -> Result<ClosedTrajectory> {
    if !(energy > 0.0) {
        return Err(Error::invalid("energy must be positive"));
    }
    let l1: f64 = dir.iter().map(|v| v.abs()).sum();
    if dir.is_empty() || !(l1 > 0.0) || !l1.is_finite() {
        return Err(Error::invalid("direction must be finite and nonzero"));
    }
    let p0: Vec<f64> = dir.iter().map(|v| v / l1).collect();
    let q0: Vec<f64> = dir
        .iter()
        .map(|&v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 })
        .collect();
    let start = PhasePoint::new(vec![0.0; dir.len()], q0.iter().map(|v| v * energy.sqrt()).collect())?;
    Ok(ClosedTrajectory {
        start,
        energy,
        kind: TrajectoryKind::ForthAndBack { p0, q0 },
        segments: Vec::new(),
        events: Vec::new(),
        period: PI,
        action: PI * energy,
        cycles: Some(1),
        closure_error: 0.0,
    })
}

/// The centrally symmetric one-cycle trajectory in dimension 2, built from
/// the fixed point `a = 1/sqrt(5)` of the recurrence and checked by
/// simulation.
pub fn one_cycle_minimal() -> Result<ClosedTrajectory> {
    let a = 1.0 / 5f64.sqrt();
    if (recurrence_step(a, a) - a).abs() > 1e-15 {
        return Err(Error::InternalConsistency("1/sqrt(5) is not a recurrence fixed point".into()));
    }
    // first turning point (0, p_2, x_1, x_2) with p_2 = x_1 = x_2 = a, mapped
    // back through q_1 = x_1 + x_2, q_2 = x_2 - x_1
    let start = PhasePoint::new(vec![0.0, a], vec![2.0 * a, 0.0])?;
    let traj = simulate(&start, SimulationMode::UntilClosed { max_events: 64 })?
        .closed()
        .ok_or_else(|| Error::InternalConsistency("one-cycle trajectory did not close".into()))?;
    let expected = 4.0 * 0.6f64.asin();
    if traj.events.len() != 8 || (traj.period - expected).abs() > 1e-10 {
        return Err(Error::InternalConsistency(format!(
            "one-cycle trajectory has {} events and period {}, expected 8 and {expected}",
            traj.events.len(),
            traj.period
        )));
    }
    Ok(traj)
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalActionReport {
    pub one_cycle_action: f64,
    pub forth_and_back_action: f64,
    /// Lower bound for trajectories with three or more cycles.
    pub multi_cycle_lower_bound: f64,
    pub minimal_action: f64,
    pub one_cycle_is_minimal: bool,
    pub below_two_sqrt2: bool,
}

/// Case analysis for the smallest action on `{H = 1}` in dimension 2 among
/// centrally symmetric candidates: one cycle, three or more cycles (bounded
/// below by the cycle count), and the forth-and-back oscillations.
pub fn minimal_action_analysis() -> Result<MinimalActionReport> {
    let one = one_cycle_minimal()?;
    let angles = angle_sequence(&one)?;
    let lemma_one = lemma_lower_bound(&angles, 1);
    if !lemma_one.bound_holds {
        return Err(Error::InternalConsistency("cycle bound fails on the one-cycle orbit".into()));
    }
    let fb = forth_and_back(&[1.0, 0.0], 1.0)?;
    let multi = 3.0;
    let minimal = one.action.min(fb.action).min(multi);
    Ok(MinimalActionReport {
        one_cycle_action: one.action,
        forth_and_back_action: fb.action,
        multi_cycle_lower_bound: multi,
        minimal_action: minimal,
        one_cycle_is_minimal: one.action < fb.action && one.action < multi,
        below_two_sqrt2: one.action < 2.0 * 2f64.sqrt(),
    })
}

/// Sample rows `(t, x(t))`: `dense` evenly spaced points per arc (at least
/// the arc start), and the final point.
pub fn trajectory_rows(traj: &ClosedTrajectory, dense: usize) -> Vec<(f64, PhasePoint)> {
    let per = dense.max(1);
    if traj.is_degenerate() {
        let m = 4 * per;
        return (0..=m)
            .map(|i| {
                let t = traj.period * i as f64 / m as f64;
                (t, traj.state_at(t))
            })
            .collect();
    }
    let mut rows: Vec<(f64, PhasePoint)> = Vec::new();
    for seg in &traj.segments {
        for j in 0..per {
            let tau = seg.duration * j as f64 / per as f64;
            rows.push((seg.t0 + tau, seg.state_at(tau)));
        }
    }
    if let Some(last) = traj.segments.last() {
        rows.push((last.t0 + last.duration, last.end()));
    }
    rows
}

/// Delimited text with header `t,p_1..p_n,q_1..q_n`.
pub fn trajectory_csv(traj: &ClosedTrajectory, dense: usize) -> String {
    let n = traj.n();
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",p_{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",q_{i}"));
    }
    out.push('\n');
    let rows = trajectory_rows(traj, dense);
    for (t, x) in rows {
        out.push_str(&format_sig(t));
        for v in x.p.iter().chain(&x.q) {
            out.push(',');
            out.push_str(&format_sig(*v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_examples() {
        let a = 1.0 / 5f64.sqrt();
        assert!((recurrence_step(a, a) - a).abs() < 1e-15);
        assert_eq!(recurrence_step(0.0, 0.0), 1.0);
        assert_eq!(recurrence_step(1.0, 0.0), 0.0);
    }

    #[test]
    fn segment_time_examples() {
        assert!((segment_time(PI / 2.0, 0.0) - PI / 4.0).abs() < 1e-15);
        let s = 5f64.sqrt();
        let (a, b) = ((1.0 / s).acos(), (1.0 / s).asin());
        assert!((segment_time(a, b) - 0.5 * 0.6f64.asin()).abs() < 1e-15);
    }

    #[test]
    fn explicit_start_examples() {
        let s = 5f64.sqrt();
        let x = explicit_nd_start(2).unwrap();
        assert_eq!(x.p, vec![0.0, 1.0 / s]);
        assert_eq!(x.q, vec![2.0 / s, 0.0]);
        let t = 13f64.sqrt();
        let y = explicit_nd_start(3).unwrap();
        for (a, b) in y.q.iter().zip([3.0 / t, 1.0 / t, -1.0 / t]) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in y.p.iter().zip([0.0, 1.0 / t, 1.0 / t]) {
            assert!((a - b).abs() < 1e-15);
        }
        for n in 2..=50 {
            assert!((explicit_nd_start(n).unwrap().energy() - 1.0).abs() <= 1e-12);
        }
        assert!(explicit_nd_start(1).is_err());
    }

    #[test]
    fn period_formula_examples() {
        assert!((nd_period_formula(2) - 4.0 * 0.6f64.asin()).abs() < 1e-15);
        assert!((nd_period_formula(3) - 6.0 * (5.0f64 / 13.0).asin()).abs() < 1e-15);
        assert!((nd_period_formula(4) - 8.0 * (7.0f64 / 25.0).asin()).abs() < 1e-15);
        assert!((nd_period_formula(1) - PI).abs() < 1e-15);
    }

    #[test]
    fn lemma_on_extreme_angles() {
        let m = 8;
        let angles = AngleSequence::new(vec![PI / 2.0; m], vec![0.0; m]).unwrap();
        let r = lemma_lower_bound(&angles, 2);
        assert!(r.bound_holds);
        assert!((r.s - m as f64 * PI / 2.0).abs() < 1e-12);
        assert!((r.middle - r.floor).abs() < 1e-12);
        assert!(!r.summed_relations_hold);
    }

    #[test]
    fn forth_and_back_values() {
        let fb = forth_and_back(&[0.0, 2.0, -1.0], 2.0).unwrap();
        assert!((fb.action - 2.0 * PI).abs() < 1e-15);
        let x = fb.state_at(0.3);
        assert!((x.energy() - 2.0).abs() < 1e-12);
        assert!(fb.state_at(PI).max_distance(&fb.start) < 1e-12);
        let a = angle_sequence(&fb).unwrap();
        assert!(a.degenerate && a.is_empty());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let traj = one_cycle_minimal().unwrap();
        let csv = trajectory_csv(&traj, 4);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,p_1,p_2,q_1,q_2"));
        assert_eq!(lines.count(), 8 * 4 + 1);
    }
}
