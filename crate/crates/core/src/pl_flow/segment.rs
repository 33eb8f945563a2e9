use std::f64::consts::PI;

use serde::Serialize;

use super::{hamiltonian, sign, PhasePoint, RegionSignature};
use crate::error::{Error, Result};

/// Closure tolerance in the max-norm of `(p, q)`.
pub(crate) const CLOSURE_TOL: f64 = 1e-8;
const GUARD_TIME: f64 = 10.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum EventKind {
    /// `p_index` reaches zero and changes sign.
    PZero { index: usize },
    /// `|q_to|` catches up with `|q_from|` and takes over as the maximum.
    MaxTie { from: usize, to: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct TurningEvent {
    pub time: f64,
    pub kind: EventKind,
    pub point: PhasePoint,
}

/// Region data with every sign resolved; `p_signs[argmax]` is never zero.
#[derive(Debug, Clone, PartialEq)]
struct Active {
    signs: Vec<i8>,
    k: usize,
    sigma: i8,
}

impl Active {
    /// `+1` when `|q_k|` grows (and `|p|_1` shrinks), `-1` otherwise.
    fn c(&self) -> f64 {
        (self.sigma * self.signs[self.k]) as f64
    }

    fn signature(&self) -> RegionSignature {
        RegionSignature { p_signs: self.signs.clone(), argmax: self.k, qk_sign: self.sigma }
    }
}

/// Resolves the region a trajectory enters from `x`. A zero `p_k` takes the
/// sign of its derivative `-2 q_k`; a two-way tie of `|q|` is handed to the
/// index whose `|q_j|` increases.
fn resolve(x: &PhasePoint) -> Result<Active> {
    let n = x.n();
    if n < 2 {
        return Err(Error::invalid("the flow needs n >= 2"));
    }
    let qn = x.q_norm();
    if qn == 0.0 || x.p_norm() == 0.0 {
        return Err(Error::Stratum { indices: (0..n).collect() });
    }
    let ties: Vec<usize> = (0..n).filter(|&j| x.q[j].abs() == qn).collect();
    let mut signs: Vec<i8> = x.p.iter().map(|&v| sign(v)).collect();
    let k = match ties.as_slice() {
        [k] => *k,
        [a, b] => {
            let growing: Vec<usize> = [*a, *b]
                .into_iter()
                .filter(|&j| signs[j] != 0 && signs[j] == sign(x.q[j]))
                .collect();
            match growing.as_slice() {
                [j] => *j,
                _ => return Err(Error::Stratum { indices: ties }),
            }
        }
        _ => return Err(Error::Stratum { indices: ties }),
    };
    let sigma = sign(x.q[k]);
    if signs[k] == 0 {
        signs[k] = -sigma;
    }
    let flat: Vec<usize> = (0..n).filter(|&j| j != k && signs[j] == 0).collect();
    if !flat.is_empty() {
        // q_j' is undefined on p_j = 0 unless j is the active index
        return Err(Error::Stratum { indices: flat });
    }
    Ok(Active { signs, k, sigma })
}

/// One closed-form arc between turning points.
#[derive(Debug, Clone, Serialize)]
pub struct Segment {
    /// Time at which the arc starts, measured from the trajectory start.
    pub t0: f64,
    pub duration: f64,
    pub start: PhasePoint,
    pub region: RegionSignature,
    pub energy: f64,
    /// Angle of `(|p|_1, |q|_inf)` at the start, in `[0, pi/2]`.
    pub theta0: f64,
}

impl Segment {
    fn c(&self) -> f64 {
        (self.region.qk_sign * self.region.p_signs[self.region.argmax]) as f64
    }

    fn pq_at_theta(&self, theta: f64) -> PhasePoint {
        let r = self.energy.sqrt();
        let (big_p, big_q) = (r * theta.cos(), r * theta.sin());
        let p0 = self.start.p_norm();
        let q0 = self.start.q[self.region.argmax].abs();
        let c = self.c();
        let k = self.region.argmax;
        let q = self
            .start
            .q
            .iter()
            .zip(&self.region.p_signs)
            .map(|(qi, &s)| qi + s as f64 * c * (big_q - q0))
            .collect();
        let mut p = self.start.p.clone();
        p[k] = self.start.p[k] + self.region.p_signs[k] as f64 * (big_p - p0);
        PhasePoint { p, q }
    }

    pub fn theta_at(&self, tau: f64) -> f64 {
        self.theta0 + 2.0 * self.c() * tau
    }

    /// State `tau` time units into the arc.
    pub fn state_at(&self, tau: f64) -> PhasePoint {
        self.pq_at_theta(self.theta_at(tau))
    }

    /// `int sum p_i dq_i` over the first `tau` time units of the arc. Along
    /// the arc `sum p_i dq_i = c P dQ = c E cos^2(theta) dtheta`.
    pub fn action_until(&self, tau: f64) -> f64 {
        let prim = |th: f64| th / 2.0 + (2.0 * th).sin() / 4.0;
        self.c() * self.energy * (prim(self.theta_at(tau)) - prim(self.theta0))
    }

    pub fn action(&self) -> f64 {
        self.action_until(self.duration)
    }

    pub fn end(&self) -> PhasePoint {
        self.state_at(self.duration)
    }
}

/// Root of `g` near `guess` by bisection on a bracket of width `1e-6`,
/// stopping at width `1e-12`. Falls back to `guess` without a sign change.
fn refine_root<G: Fn(f64) -> f64>(g: G, guess: f64) -> f64 {
    let (mut lo, mut hi) = (guess - 5e-7, guess + 5e-7);
    let (mut glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return lo;
    }
    if ghi == 0.0 {
        return hi;
    }
    if glo.signum() == ghi.signum() {
        return guess;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(-1.0, 1.0)
}

/// Follows the arc that starts at `x` in region `act` up to the next
/// turning point. Returns the arc, the event and the region entered there.
fn advance(x: &PhasePoint, act: &Active, energy: f64, t0: f64) -> Result<(Segment, TurningEvent, Active)> {
    let n = x.n();
    let k = act.k;
    let r = energy.sqrt();
    let p0 = x.p_norm();
    let q0 = x.q[k].abs();
    let theta0 = q0.atan2(p0);
    let c = act.c();
    let seg = Segment {
        t0,
        duration: 0.0,
        start: x.clone(),
        region: act.signature(),
        energy,
        theta0,
    };
    let (theta1, kind, next) = if c > 0.0 {
        // |p|_1 shrinks until p_k vanishes
        let p1 = p0 - x.p[k].abs();
        let theta1 = clamp_unit(p1 / r).acos();
        let mut signs = act.signs.clone();
        signs[k] = -act.sigma;
        (theta1, EventKind::PZero { index: k }, Active { signs, k, sigma: act.sigma })
    } else {
        // |q_k| shrinks; the first |q_j| growing towards it takes over
        let mut meets: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != k)
            .map(|j| (0.5 * (act.signs[j] as f64 * x.q[j] + q0), j))
            .collect();
        meets.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (q1, j) = meets[0];
        if meets.len() > 1 && (meets[1].0 - q1).abs() <= 1e-13 * q0 {
            return Err(Error::Stratum { indices: vec![k, j, meets[1].1] });
        }
        let theta1 = clamp_unit(q1 / r).asin();
        (
            theta1,
            EventKind::MaxTie { from: k, to: j },
            Active { signs: act.signs.clone(), k: j, sigma: act.signs[j] },
        )
    };
    let guess = (theta1 - theta0) / (2.0 * c);
    if !(guess >= -1e-12) || guess > GUARD_TIME {
        return Err(Error::Runaway { guard: GUARD_TIME });
    }
    let guess = guess.max(0.0);
    let duration = match kind {
        EventKind::PZero { .. } => refine_root(|tau| seg.state_at(tau).p[k], guess),
        EventKind::MaxTie { to, .. } => refine_root(
            |tau| {
                let s = seg.state_at(tau);
                s.q[to].abs() - s.q[k].abs()
            },
            guess,
        ),
    };
    let duration = duration.max(0.0);

    // the event state from the closed form at theta1, with the event
    // condition imposed exactly
    let mut point = seg.pq_at_theta(theta1);
    match kind {
        EventKind::PZero { index } => {
            point.p[index] = 0.0;
            if point.q[k] == 0.0 {
                // p_k' = -2 q_k vanishes too: a grazing contact, not a crossing
                return Err(Error::Stratum { indices: vec![index] });
            }
        }
        EventKind::MaxTie { from, to } => {
            let m = 0.5 * (point.q[from].abs() + point.q[to].abs());
            point.q[from] = m * act.sigma as f64;
            point.q[to] = m * act.signs[to] as f64;
        }
    }
    let seg = Segment { duration, ..seg };
    let event = TurningEvent { time: t0 + duration, kind, point };
    Ok((seg, event, next))
}

/// Follows the flow from `x` (on `{H = energy}`) to its next turning point.
/// The event time is measured from `x`.
pub fn advance_segment(x: &PhasePoint, energy: f64) -> Result<(TurningEvent, PhasePoint)> {
    check_on_surface(x, energy)?;
    let act = resolve(x)?;
    let (_, ev, _) = advance(x, &act, energy, 0.0)?;
    let point = ev.point.clone();
    Ok((ev, point))
}

fn check_on_surface(x: &PhasePoint, energy: f64) -> Result<()> {
    if !(energy > 0.0) {
        return Err(Error::invalid("energy must be positive"));
    }
    let h = hamiltonian(x);
    if (h - energy).abs() > 1e-10 * energy.max(1.0) {
        return Err(Error::invalid(format!("point is not on the energy surface (H = {h}, E = {energy})")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    /// Stop when the trajectory returns to its start, or give up after this
    /// many events.
    UntilClosed { max_events: usize },
    /// Record exactly this many events without looking for closure.
    FixedEvents(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum TrajectoryKind {
    /// A chain of closed-form arcs from the event-driven simulator.
    Regular,
    /// The oscillation `p = v p0`, `q = u q0`, `u^2 + v^2 = E`, along which
    /// `|q|` ties in every coordinate. Outside the generic region logic.
    ForthAndBack { p0: Vec<f64>, q0: Vec<f64> },
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedTrajectory {
    pub start: PhasePoint,
    pub energy: f64,
    pub kind: TrajectoryKind,
    /// Arcs traversed in one period; the last one is cut where the start is
    /// reached again.
    pub segments: Vec<Segment>,
    pub events: Vec<TurningEvent>,
    pub period: f64,
    pub action: f64,
    /// `events / (4n)` when divisible; `None` marks an irregular orbit.
    pub cycles: Option<usize>,
    pub closure_error: f64,
}

impl ClosedTrajectory {
    pub fn n(&self) -> usize {
        self.start.n()
    }

    pub fn is_degenerate(&self) -> bool {
        !matches!(self.kind, TrajectoryKind::Regular)
    }

    /// State at time `t`, taken modulo the period.
    pub fn state_at(&self, t: f64) -> PhasePoint {
        let t = t.rem_euclid(self.period);
        match &self.kind {
            TrajectoryKind::ForthAndBack { p0, q0 } => {
                let r = self.energy.sqrt();
                let (u, v) = (r * (2.0 * t).cos(), -r * (2.0 * t).sin());
                PhasePoint { p: p0.iter().map(|a| v * a).collect(), q: q0.iter().map(|a| u * a).collect() }
            }
            TrajectoryKind::Regular => {
                let seg = self
                    .segments
                    .iter()
                    .rev()
                    .find(|s| s.t0 <= t)
                    .unwrap_or(&self.segments[0]);
                seg.state_at(t - seg.t0)
            }
        }
    }

    /// The same orbit traversed `m` times.
    pub fn iterate(&self, m: usize) -> Self {
        let mut out = self.clone();
        if m <= 1 || self.segments.is_empty() && self.events.is_empty() {
            out.period *= m.max(1) as f64;
            out.action *= m.max(1) as f64;
            return out;
        }
        for lap in 1..m {
            let shift = lap as f64 * self.period;
            out.segments.extend(self.segments.iter().map(|s| Segment { t0: s.t0 + shift, ..s.clone() }));
            out.events.extend(self.events.iter().map(|e| TurningEvent { time: e.time + shift, ..e.clone() }));
        }
        out.period *= m as f64;
        out.action *= m as f64;
        out.cycles = self.cycles.map(|k| k * m);
        out
    }
}

/// Events recorded without closing (or before closure was detected).
#[derive(Debug, Clone, Serialize)]
pub struct OpenTrajectory {
    pub start: PhasePoint,
    pub energy: f64,
    pub segments: Vec<Segment>,
    pub events: Vec<TurningEvent>,
    pub elapsed: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum Simulation {
    Closed(ClosedTrajectory),
    Open(OpenTrajectory),
}

impl Simulation {
    pub fn closed(self) -> Option<ClosedTrajectory> {
        match self {
            Simulation::Closed(c) => Some(c),
            Simulation::Open(_) => None,
        }
    }

    pub fn events(&self) -> &[TurningEvent] {
        match self {
            Simulation::Closed(c) => &c.events,
            Simulation::Open(o) => &o.events,
        }
    }
}

/// Time within `seg` at which it passes through `target`, if it does.
fn passes_through(seg: &Segment, target: &PhasePoint) -> Option<(f64, f64)> {
    let theta = target.q_norm().atan2(target.p_norm());
    let tau = (theta - seg.theta0) / (2.0 * seg.c());
    if tau < -1e-12 || tau > seg.duration + 1e-12 {
        return None;
    }
    let tau = tau.clamp(0.0, seg.duration);
    let err = seg.state_at(tau).max_distance(target);
    (err <= CLOSURE_TOL).then_some((tau, err))
}

/// Chains closed-form arcs from `start`, recording turning events.
pub fn simulate(start: &PhasePoint, mode: SimulationMode) -> Result<Simulation> {
    let energy = hamiltonian(start);
    if !(energy > 0.0) {
        return Err(Error::invalid("start must have positive energy"));
    }
    let mut act = resolve(start)?;
    let mut x = start.clone();
    let mut t = 0.0;
    let mut segments = Vec::new();
    let mut events: Vec<TurningEvent> = Vec::new();
    let limit = match mode {
        SimulationMode::UntilClosed { max_events } => max_events,
        SimulationMode::FixedEvents(m) => m,
    };
    while events.len() < limit {
        let (seg, ev, next) = advance(&x, &act, energy, t)?;
        if let SimulationMode::UntilClosed { .. } = mode {
            if !events.is_empty() {
                if let Some((tau, err)) = passes_through(&seg, start) {
                    let period = seg.t0 + tau;
                    let at_event = tau >= seg.duration - 1e-12;
                    let mut seg = seg;
                    let mut events = events;
                    if at_event {
                        events.push(ev);
                    }
                    seg.duration = tau;
                    segments.push(seg);
                    let action = segments.iter().map(Segment::action).sum();
                    let per_cycle = 4 * start.n();
                    let cycles = events.len().is_multiple_of(per_cycle).then(|| events.len() / per_cycle);
                    return Ok(Simulation::Closed(ClosedTrajectory {
                        start: start.clone(),
                        energy,
                        kind: TrajectoryKind::Regular,
                        segments,
                        events,
                        period,
                        action,
                        cycles,
                        closure_error: err,
                    }));
                }
            }
        }
        t = ev.time;
        x = ev.point.clone();
        act = next;
        segments.push(seg);
        events.push(ev);
    }
    Ok(Simulation::Open(OpenTrajectory { start: start.clone(), energy, segments, events, elapsed: t }))
}

/// `int sum p_i dq_i` over one period, from the exact arc integrals. Equals
/// `E * period` for this 2-homogeneous Hamiltonian.
pub fn trajectory_action(traj: &Simulation) -> Result<f64> {
    match traj {
        Simulation::Closed(c) => Ok(match c.kind {
            TrajectoryKind::Regular => c.segments.iter().map(Segment::action).sum(),
            TrajectoryKind::ForthAndBack { .. } => c.action,
        }),
        Simulation::Open(_) => Err(Error::invalid("action needs a closed trajectory")),
    }
}

/// Time-`t` flow map. Negative times use the reversal `(p, q) -> (-p, q)`.
pub fn flow(x: &PhasePoint, t: f64) -> Result<PhasePoint> {
    if t < 0.0 {
        return flow(&x.reversed(), -t).map(|y| y.reversed());
    }
    let energy = hamiltonian(x);
    let mut act = resolve(x)?;
    let mut cur = x.clone();
    let mut elapsed = 0.0;
    loop {
        let (seg, ev, next) = advance(&cur, &act, energy, elapsed)?;
        if ev.time >= t {
            return Ok(seg.state_at(t - seg.t0));
        }
        elapsed = ev.time;
        cur = ev.point;
        act = next;
    }
}
