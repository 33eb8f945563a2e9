//! Hamiltonians that split into one-degree-of-freedom pieces,
//! `H = sum_i H_i(p_i, q_i)`.
//!
//! Each planar piece is summarized by its action/energy profile `E_i(A_i)`,
//! where `A_i` is the area enclosed by the orbit at energy `E_i`. Closed orbits
//! of the sum with equal periods on every active coordinate are the critical
//! points of `sum A_i` on `{sum E_i(A_i) = E}`, and the smallest critical value
//! bounds the capacity from above.

mod quad;

use std::f64::consts::TAU;

use serde::Serialize;

use crate::bodies::hamiltonian::radial_crossing;
use crate::bodies::{monte_carlo_volume, DirectSum, SharedHamiltonian};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::special::factorial;

pub use quad::adaptive_simpson;

/// A planar Hamiltonian with argument order `(p, q)`, shifted so that it
/// vanishes at the origin.
#[derive(Debug, Clone)]
pub struct OneDofSystem {
    pub h: SharedHamiltonian,
    pub label: String,
    offset: f64,
}

impl OneDofSystem {
    /// Checks that `h` is planar, has its minimum at the origin and grows
    /// along sampled rays.
    pub fn new(h: SharedHamiltonian, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if h.dim() != 2 {
            return Err(Error::InvalidSystem(format!("{label}: subsystem must be planar")));
        }
        let offset = h.evaluate(&[0.0, 0.0]);
        if !offset.is_finite() {
            return Err(Error::InvalidSystem(format!("{label}: h(0, 0) is not finite")));
        }
        for j in 0..64 {
            let t = TAU * j as f64 / 64.0;
            let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
            let (c, s) = (snap(t.cos()), snap(t.sin()));
            let mut prev = 0.0;
            for k in 0..40 {
                let r = 1e-3 * 1.4f64.powi(k);
                let v = h.evaluate(&[r * c, r * s]) - offset;
                if !(v > prev) {
                    return Err(Error::InvalidSystem(format!(
                        "{label}: not increasing along the ray at angle {t:.3} (radius {r:.3e})"
                    )));
                }
                prev = v;
            }
        }
        Ok(Self { h, label, offset })
    }

    pub fn evaluate(&self, p: f64, q: f64) -> f64 {
        self.h.evaluate(&[p, q]) - self.offset
    }

    fn radius(&self, theta: f64, energy: f64) -> Result<f64> {
        let u = [theta.cos(), theta.sin()];
        match self.h.homogeneity_degree() {
            Some(m) if self.offset == 0.0 => Ok((energy / self.h.evaluate(&u)).powf(1.0 / m)),
            _ => radial_crossing(|x| self.h.evaluate(x) - self.offset, &u, energy),
        }
    }
}

/// Area of `{h <= E}`: half the integral of `r(theta)^2` over the polar angle,
/// with `r` the boundary radius, by adaptive Simpson on 64 initial panels.
pub fn sublevel_area(sys: &OneDofSystem, energy: f64) -> Result<f64> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::invalid("sublevel area needs a positive energy"));
    }
    let mut failure = None;
    let area = adaptive_simpson(
        |t| match sys.radius(t, energy) {
            Ok(r) if r.is_finite() => 0.5 * r * r,
            Ok(_) => {
                failure.get_or_insert(Error::InvalidSystem(format!(
                    "{}: sublevel set is unbounded",
                    sys.label
                )));
                0.0
            }
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        TAU,
        64,
        1e-11,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(area),
    }
}

/// `dA/dE`, the period of the orbit at `energy`: the integral of
/// `r / (d/dr h(r u))` over the polar angle.
fn area_derivative(sys: &OneDofSystem, energy: f64, area: f64) -> Result<f64> {
    if let (Some(m), 0.0) = (sys.h.homogeneity_degree(), sys.offset) {
        return Ok(2.0 / m * area / energy);
    }
    let mut failure = None;
    let period = adaptive_simpson(
        |t| {
            let u = [t.cos(), t.sin()];
            let r = match sys.radius(t, energy) {
                Ok(r) => r,
                Err(e) => {
                    failure.get_or_insert(e);
                    return 0.0;
                }
            };
            match sys.h.gradient(&[r * u[0], r * u[1]]) {
                Ok(g) => r / (g[0] * u[0] + g[1] * u[1]),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        TAU,
        64,
        1e-11,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(period),
    }
}

/// Tabulated `E(A)` with a monotone cubic Hermite interpolant in
/// `(ln A, ln E)`.
///
/// Nodes carry the computed orbit period `dA/dE`, so the nodal slopes are
/// exact up to quadrature error; the Fritsch-Carlson limiter is applied on
/// top. Working in logarithms makes power laws (in particular linear
/// profiles) exact, and continues the profile as a power law through the
/// origin below the first node and beyond the last.
#[derive(Debug, Clone, Serialize)]
pub struct ActionEnergyProfile {
    pub label: String,
    /// `(A, E)` nodes, increasing in both coordinates.
    pub grid: Vec<(f64, f64)>,
    /// `dE/dA` at the nodes.
    pub derivative: Vec<f64>,
}

/// Smallest energy of the grid relative to its largest.
const GRID_SPAN: f64 = 1e-4;

pub fn profile_build(sys: &OneDofSystem, energy_max: f64, grid_size: usize) -> Result<ActionEnergyProfile> {
    if grid_size < 8 {
        return Err(Error::invalid("profile grid needs at least 8 nodes"));
    }
    if !(energy_max > 0.0 && energy_max.is_finite()) {
        return Err(Error::invalid("profile needs a positive maximal energy"));
    }
    let mut grid: Vec<(f64, f64)> = Vec::with_capacity(grid_size);
    let mut derivative = Vec::with_capacity(grid_size);
    for j in 0..grid_size {
        let e = energy_max * GRID_SPAN.powf(1.0 - j as f64 / (grid_size - 1) as f64);
        let a = sublevel_area(sys, e)?;
        let period = area_derivative(sys, e, a)?;
        if let Some(&(a_prev, _)) = grid.last() {
            if !(a > a_prev) {
                return Err(Error::InvalidSystem(format!(
                    "{}: enclosed area not increasing with energy near E = {e:e}",
                    sys.label
                )));
            }
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidSystem(format!(
                "{}: non-positive period at E = {e:e}",
                sys.label
            )));
        }
        grid.push((a, e));
        derivative.push(1.0 / period);
    }
    let logs: Vec<(f64, f64)> = grid.iter().map(|&(a, e)| (a.ln(), e.ln())).collect();
    let mut s: Vec<f64> = grid.iter().zip(&derivative).map(|(&(a, e), d)| d * a / e).collect();
    limit_slopes(&logs, &mut s);
    let derivative = grid.iter().zip(&s).map(|(&(a, e), s)| s * e / a).collect();
    Ok(ActionEnergyProfile { label: sys.label.clone(), grid, derivative })
}

/// Fritsch-Carlson: keep each interval's Hermite cubic monotone.
fn limit_slopes(nodes: &[(f64, f64)], d: &mut [f64]) {
    for i in 0..nodes.len() - 1 {
        let secant = (nodes[i + 1].1 - nodes[i].1) / (nodes[i + 1].0 - nodes[i].0);
        let a = d[i] / secant;
        let b = d[i + 1] / secant;
        let s = a * a + b * b;
        if s > 9.0 {
            let t = 3.0 / s.sqrt();
            d[i] = t * a * secant;
            d[i + 1] = t * b * secant;
        }
    }
}

impl ActionEnergyProfile {
    pub fn energy_max(&self) -> f64 {
        self.grid.last().expect("nonempty grid").1
    }

    pub fn action_max(&self) -> f64 {
        self.grid.last().expect("nonempty grid").0
    }

    /// `d ln E / d ln A` at node `i`.
    fn log_slope(&self, i: usize) -> f64 {
        let (a, e) = self.grid[i];
        self.derivative[i] * a / e
    }

    /// `(ln E, d ln E / d ln A)` at `u = ln A`.
    fn log_hermite(&self, u: f64) -> (f64, f64) {
        let last = self.grid.len() - 1;
        let (a0, e0) = self.grid[0];
        let (a1, e1) = self.grid[last];
        if u <= a0.ln() {
            let s = self.log_slope(0);
            return (e0.ln() + s * (u - a0.ln()), s);
        }
        if u >= a1.ln() {
            let s = self.log_slope(last);
            return (e1.ln() + s * (u - a1.ln()), s);
        }
        let i = self.grid.partition_point(|&(x, _)| x.ln() <= u).clamp(1, last) - 1;
        let (x0, y0) = (self.grid[i].0.ln(), self.grid[i].1.ln());
        let (x1, y1) = (self.grid[i + 1].0.ln(), self.grid[i + 1].1.ln());
        let (d0, d1) = (self.log_slope(i), self.log_slope(i + 1));
        let h = x1 - x0;
        let t = (u - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * d1;
        let slope = (6.0 * t2 - 6.0 * t) / h * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (-6.0 * t2 + 6.0 * t) / h * y1
            + (3.0 * t2 - 2.0 * t) * d1;
        (value, slope)
    }

    /// `E(A)`, with `E(0) = 0`.
    pub fn energy_at(&self, a: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        self.log_hermite(a.ln()).0.exp()
    }

    /// `dE/dA`, the orbit frequency divided by `2 pi`.
    pub fn slope_at(&self, a: f64) -> f64 {
        let a = a.max(1e-300);
        let (v, s) = self.log_hermite(a.ln());
        s * v.exp() / a
    }

    /// Inverse of [`energy_at`](Self::energy_at) by bisection in `ln A`.
    pub fn action_at(&self, e: f64) -> f64 {
        if e <= 0.0 {
            return 0.0;
        }
        let target = e.ln();
        let (mut lo, mut hi) = (self.grid[0].0.ln(), self.action_max().ln());
        while self.log_hermite(lo).0 > target {
            lo -= 1.0;
        }
        while self.log_hermite(hi).0 < target {
            hi += 1.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.log_hermite(mid).0 < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 {
                break;
            }
        }
        (0.5 * (lo + hi)).exp()
    }

    /// Constant slope if the nodal slopes agree to `1e-9` relative, as they do
    /// for 2-homogeneous subsystems.
    pub fn linear_slope(&self) -> Option<f64> {
        let lo = self.derivative.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.derivative.iter().copied().fold(0.0, f64::max);
        (hi - lo <= 1e-9 * hi).then(|| self.energy_max() / self.action_max())
    }

    /// `+1`, `-1` or `0` for increasing, decreasing or constant nodal slopes;
    /// `None` if the slopes are not monotone.
    fn slope_trend(&self) -> Option<i8> {
        if self.linear_slope().is_some() {
            return Some(0);
        }
        let tol = 1e-9 * self.derivative.iter().copied().fold(0.0, f64::max);
        let w = &self.derivative;
        if w.windows(2).all(|p| p[1] >= p[0] - tol) {
            Some(1)
        } else if w.windows(2).all(|p| p[1] <= p[0] + tol) {
            Some(-1)
        } else {
            None
        }
    }

    /// The action in `[A_0, A(cap)]` where the slope equals `l`, if any.
    fn action_with_slope(&self, l: f64, trend: i8, cap: f64) -> Option<f64> {
        let mut lo = self.grid[0].0;
        let mut hi = self.action_at(cap);
        let g = |a: f64| (self.slope_at(a) - l) * trend as f64;
        if g(lo) > 0.0 || g(hi) < 0.0 {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// A critical point of `sum A_i` on `{sum E_i(A_i) = E}`.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalActionResult {
    pub a_e: f64,
    /// Subsystems with positive action.
    pub support: Vec<usize>,
    /// Common slope `dE_i/dA_i` on the support.
    pub l: f64,
    pub per_index_actions: Vec<f64>,
    /// Every critical configuration found, smallest first.
    pub candidates: Vec<CriticalPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub action: f64,
    pub support: Vec<usize>,
    pub l: f64,
    pub actions: Vec<f64>,
    pub energy_residual: f64,
}

/// Slope brackets in the scan.
pub const SLOPE_BRACKETS: usize = 256;
/// Maximal number of subsystems (supports are enumerated explicitly).
pub const MAX_SUBSYSTEMS: usize = 16;

pub const DEFAULT_GRID: usize = 96;

/// Build the profiles up to `energy` (in parallel) and return the minimal
/// critical action.
pub fn minimal_critical_action(systems: &[OneDofSystem], energy: f64) -> Result<CriticalActionResult> {
    let profiles = build_profiles(systems, energy, DEFAULT_GRID, Execution::default())?;
    critical_action_from_profiles(&profiles, energy)
}

pub fn build_profiles(
    systems: &[OneDofSystem],
    energy: f64,
    grid_size: usize,
    exec: Execution,
) -> Result<Vec<ActionEnergyProfile>> {
    exec.map_collect(0..systems.len() as u64, |i| {
        profile_build(&systems[i as usize], energy, grid_size)
    })
    .into_iter()
    .collect()
}

/// All critical configurations over all supports, and the smallest one.
///
/// For a support with a linear member the common slope is forced; otherwise
/// the slope range of the support is split into [`SLOPE_BRACKETS`] brackets
/// and every sign change of the energy-sum residual is bisected to `1e-10`.
pub fn critical_action_from_profiles(profiles: &[ActionEnergyProfile], energy: f64) -> Result<CriticalActionResult> {
    let n = profiles.len();
    if n == 0 {
        return Err(Error::invalid("need at least one subsystem"));
    }
    if n > MAX_SUBSYSTEMS {
        return Err(Error::invalid(format!("at most {MAX_SUBSYSTEMS} subsystems")));
    }
    if !(energy > 0.0) {
        return Err(Error::invalid("energy must be positive"));
    }
    if let Some(p) = profiles.iter().find(|p| p.energy_max() < energy * (1.0 - 1e-12)) {
        return Err(Error::invalid(format!("profile {} does not reach the energy", p.label)));
    }
    let trends: Vec<i8> = profiles
        .iter()
        .map(|p| {
            p.slope_trend().ok_or_else(|| {
                Error::InvalidSystem(format!("{}: orbit period is not monotone in energy", p.label))
            })
        })
        .collect::<Result<_>>()?;

    let mut found = Vec::new();
    let mut scanned = 0usize;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if support.len() == 1 {
            // vertex of the simplex: everything in one subsystem
            let i = support[0];
            let mut actions = vec![0.0; n];
            actions[i] = profiles[i].action_at(energy);
            found.push(CriticalPoint {
                action: actions[i],
                l: profiles[i].slope_at(actions[i]),
                energy_residual: profiles[i].energy_at(actions[i]) - energy,
                support,
                actions,
            });
            continue;
        }
        scanned += 1;
        found.extend(face_critical_points(profiles, &trends, &support, energy));
    }
    found.sort_by(|a, b| a.action.total_cmp(&b.action));
    let best = found.first().cloned().ok_or_else(|| {
        Error::numeric(format!("no critical configuration found ({scanned} faces scanned)"))
    })?;
    Ok(CriticalActionResult {
        a_e: best.action,
        support: best.support,
        l: best.l,
        per_index_actions: best.actions,
        candidates: found,
    })
}

fn face_critical_points(
    profiles: &[ActionEnergyProfile],
    trends: &[i8],
    support: &[usize],
    energy: f64,
) -> Vec<CriticalPoint> {
    let n = profiles.len();
    let (linear, curved): (Vec<usize>, Vec<usize>) =
        support.iter().partition(|&&i| trends[i] == 0);

    // actions of the curved members at slope l, all within the energy budget
    let curved_actions = |l: f64| -> Option<Vec<f64>> {
        curved
            .iter()
            .map(|&i| profiles[i].action_with_slope(l, trends[i], energy))
            .collect()
    };

    if !linear.is_empty() {
        let l = profiles[linear[0]].linear_slope().expect("linear profile");
        if linear
            .iter()
            .any(|&i| (profiles[i].linear_slope().expect("linear profile") - l).abs() > 1e-9 * l)
        {
            return Vec::new();
        }
        let Some(ac) = curved_actions(l) else { return Vec::new() };
        let used: f64 = curved.iter().zip(&ac).map(|(&i, &a)| profiles[i].energy_at(a)).sum();
        let rest = energy - used;
        if rest <= 0.0 {
            return Vec::new();
        }
        // the linear members share `rest` in any proportion; the total is the same
        let mut actions = vec![0.0; n];
        for (&i, &a) in curved.iter().zip(&ac) {
            actions[i] = a;
        }
        for &i in &linear {
            actions[i] = rest / l / linear.len() as f64;
        }
        return vec![CriticalPoint {
            action: actions.iter().sum(),
            support: support.to_vec(),
            l,
            actions,
            energy_residual: 0.0,
        }];
    }

    let lo = curved.iter().map(|&i| profiles[i].derivative.iter().copied().fold(f64::INFINITY, f64::min)).fold(f64::INFINITY, f64::min);
    let hi = curved.iter().map(|&i| profiles[i].derivative.iter().copied().fold(0.0, f64::max)).fold(0.0, f64::max);
    let residual = |l: f64| -> Option<(f64, Vec<f64>)> {
        let ac = curved_actions(l)?;
        let e: f64 = curved.iter().zip(&ac).map(|(&i, &a)| profiles[i].energy_at(a)).sum();
        Some((e - energy, ac))
    };
    let mut out = Vec::new();
    let ls: Vec<f64> = (0..=SLOPE_BRACKETS)
        .map(|j| lo * (hi / lo).powf(j as f64 / SLOPE_BRACKETS as f64))
        .collect();
    for w in ls.windows(2) {
        let (Some((r0, _)), Some((r1, _))) = (residual(w[0]), residual(w[1])) else { continue };
        if r0.signum() == r1.signum() && r0 != 0.0 {
            continue;
        }
        let (mut a, mut b, mut ra) = (w[0], w[1], r0);
        while b - a > 1e-10 * b {
            let m = 0.5 * (a + b);
            let Some((rm, _)) = residual(m) else { break };
            if rm.signum() == ra.signum() {
                a = m;
                ra = rm;
            } else {
                b = m;
            }
        }
        let l = 0.5 * (a + b);
        let Some((r, ac)) = residual(l) else { continue };
        let mut actions = vec![0.0; n];
        for (&i, &x) in curved.iter().zip(&ac) {
            actions[i] = x;
        }
        out.push(CriticalPoint {
            action: actions.iter().sum(),
            support: support.to_vec(),
            l,
            actions,
            energy_residual: r,
        });
    }
    out
}

/// Minimum of `sum A_i` over a lattice of energy splits `E_i = E k_i / m`
/// (`sum k_i = m`), with `A_i` read off the profiles.
pub fn brute_force_simplex(profiles: &[ActionEnergyProfile], energy: f64, resolution: usize) -> Result<f64> {
    let n = profiles.len();
    if n == 0 || resolution == 0 {
        return Err(Error::invalid("need subsystems and a positive resolution"));
    }
    let count = crate::special::gamma_binomial((resolution + n - 1) as f64, (n - 1) as f64)?;
    if count > 5e7 {
        return Err(Error::invalid(format!("simplex lattice too large ({count:.0} points)")));
    }
    let tables: Vec<Vec<f64>> = profiles
        .iter()
        .map(|p| (0..=resolution).map(|k| p.action_at(energy * k as f64 / resolution as f64)).collect())
        .collect();
    let mut best = f64::INFINITY;
    let mut k = vec![0usize; n];
    lattice_min(&tables, &mut k, 0, resolution, &mut best);
    Ok(best)
}

fn lattice_min(tables: &[Vec<f64>], k: &mut [usize], i: usize, left: usize, best: &mut f64) {
    if i + 1 == tables.len() {
        k[i] = left;
        let s: f64 = k.iter().zip(tables).map(|(&ki, t)| t[ki]).sum();
        *best = best.min(s);
        return;
    }
    for ki in 0..=left {
        k[i] = ki;
        lattice_min(tables, k, i + 1, left - ki, best);
    }
}

/// `vol {sum E_i(A_i) <= E}` in the action coordinates of two subsystems:
/// the integral of `A_2(E - E_1(A_1))` over `A_1`.
pub fn action_coordinate_volume_2(profiles: &[ActionEnergyProfile], energy: f64) -> Result<f64> {
    let [p1, p2] = profiles else {
        return Err(Error::invalid("action-coordinate volume implemented for two subsystems"));
    };
    let top = p1.action_at(energy);
    Ok(adaptive_simpson(|a| p2.action_at((energy - p1.energy_at(a)).max(0.0)), 0.0, top, 32, 1e-10))
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitViterboReport {
    pub n: usize,
    pub level: f64,
    pub a_e: f64,
    pub support: Vec<usize>,
    /// `A_E^n / n!`
    pub volume_lower: f64,
    pub volume_mc: f64,
    pub volume_std_error: f64,
    /// `volume_mc n! / A_E^n`
    pub ratio: f64,
    pub viterbo_ok: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SplitOptions {
    pub grid_size: usize,
    pub mc_samples: u64,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self { grid_size: DEFAULT_GRID, mc_samples: 1_000_000, seed: 0, exec: Execution::default() }
    }
}

/// Minimal critical action, the simplex volume bound and a Monte Carlo
/// volume of `{sum H_i <= E}`; `viterbo_ok` iff the estimate is at least the
/// bound minus three standard errors.
pub fn viterbo_bound_split(systems: &[OneDofSystem], energy: f64, opts: &SplitOptions) -> Result<SplitViterboReport> {
    let profiles = build_profiles(systems, energy, opts.grid_size, opts.exec)?;
    let crit = critical_action_from_profiles(&profiles, energy)?;
    let n = systems.len();
    let volume_lower = crit.a_e.powi(n as i32) / factorial(n as f64);
    let shifted: Vec<SharedHamiltonian> = systems.iter().map(|s| s.h.clone()).collect();
    let offset: f64 = systems.iter().map(|s| s.offset).sum();
    let sum = DirectSum::new(shifted)?;
    let mc = monte_carlo_volume(&sum, energy + offset, opts.mc_samples, opts.seed, opts.exec)?;
    Ok(SplitViterboReport {
        n,
        level: energy,
        a_e: crit.a_e,
        support: crit.support,
        volume_lower,
        volume_mc: mc.estimate,
        volume_std_error: mc.std_error,
        ratio: crate::verify::viterbo_ratio(mc.estimate, crit.a_e, n),
        viterbo_ok: mc.estimate >= volume_lower - 3.0 * mc.std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::SeparablePower;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn power(a: f64, m: f64, b: f64, k: f64) -> OneDofSystem {
        OneDofSystem::new(Arc::new(SeparablePower::new(a, m, b, k).unwrap()), "power").unwrap()
    }

    fn harmonic(w: f64) -> OneDofSystem {
        OneDofSystem::new(Arc::new(SeparablePower::harmonic(w).unwrap()), format!("w={w}")).unwrap()
    }

    #[test]
    fn area_examples() {
        assert!((sublevel_area(&harmonic(1.0), 1.0).unwrap() - TAU).abs() < 1e-10);
        let ellipse = sublevel_area(&power(0.5, 2.0, 1.0, 2.0), 1.0).unwrap();
        assert!((ellipse - PI * 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn quartic_area_matches_beta_integral() {
        // 4 int_0^1 sqrt(2 (1 - q^4)) dq = sqrt(2) B(1/4, 3/2)
        let b = statrs::function::beta::beta(0.25, 1.5);
        let expected = 2f64.sqrt() * b;
        let area = sublevel_area(&power(0.5, 2.0, 1.0, 4.0), 1.0).unwrap();
        assert!((area - expected).abs() < 1e-8 * expected, "{area} vs {expected}");
    }

    #[test]
    fn non_homogeneous_area_uses_radial_search() {
        // 1/2 p^2 + q^2 + q^4 encloses less than the ellipse 1/2 p^2 + q^2
        let sys = OneDofSystem::new(
            Arc::new(crate::bodies::FnHamiltonian {
                dim: 2,
                f: Arc::new(|x: &[f64]| 0.5 * x[0] * x[0] + x[1] * x[1] + x[1].powi(4)),
                grad: None,
                degree: None,
                even: true,
            }),
            "anharmonic",
        )
        .unwrap();
        // q_max solves q^2 + q^4 = 1; area = 4 int_0^qmax sqrt(2 (1 - q^2 - q^4)) dq
        let qmax = ((5f64.sqrt() - 1.0) / 2.0).sqrt();
        let f = |q: f64| (2.0 * (1.0 - q * q - q.powi(4))).max(0.0).sqrt();
        // substitution q = qmax sin(t) removes the endpoint singularity
        let m = 20_000;
        let expected: f64 = 4.0 * (0..m)
            .map(|j| {
                let t = (j as f64 + 0.5) / m as f64 * PI / 2.0;
                f(qmax * t.sin()) * qmax * t.cos() * PI / 2.0 / m as f64
            })
            .sum::<f64>();
        let area = sublevel_area(&sys, 1.0).unwrap();
        assert!((area - expected).abs() < 1e-6 * expected, "{area} vs {expected}");
    }

    #[test]
    fn rejects_bad_systems() {
        let flat = crate::bodies::FnHamiltonian {
            dim: 2,
            f: Arc::new(|x: &[f64]| x[0] * x[0]),
            grad: None,
            degree: Some(2.0),
            even: true,
        };
        assert!(matches!(OneDofSystem::new(Arc::new(flat), "flat"), Err(Error::InvalidSystem(_))));
        let sys = harmonic(1.0);
        assert!(profile_build(&sys, 1.0, 4).is_err());
        assert!(sublevel_area(&sys, -1.0).is_err());
    }

    #[test]
    fn harmonic_profile_is_linear() {
        let p = profile_build(&harmonic(3.0), 2.0, 16).unwrap();
        let c = 3.0 / TAU;
        assert!((p.linear_slope().unwrap() - c).abs() < 1e-9 * c);
        assert_eq!(p.energy_at(0.0), 0.0);
        for a in [1e-6, 0.01, 0.5, 1.0, 4.0] {
            assert!((p.energy_at(a) - c * a).abs() < 1e-9 * (1.0 + a));
            assert!((p.slope_at(a) - c).abs() < 1e-9);
        }
        assert!((p.action_at(1.0) - 1.0 / c).abs() < 1e-9);
    }

    #[test]
    fn quartic_profile_follows_power_law() {
        // A = c E^(3/4), so E = (A / c)^(4/3)
        let sys = power(0.5, 2.0, 1.0, 4.0);
        let p = profile_build(&sys, 1.0, DEFAULT_GRID).unwrap();
        let c = sublevel_area(&sys, 1.0).unwrap();
        for a in [0.3 * c, 0.55 * c, 0.9 * c] {
            let e = (a / c).powf(4.0 / 3.0);
            let s = 4.0 / 3.0 * e / a;
            assert!((p.energy_at(a) - e).abs() < 1e-9 * e);
            assert!((p.slope_at(a) - s).abs() < 1e-7 * s);
        }
        assert!(p.linear_slope().is_none());
    }

    #[test]
    fn harmonic_pair_picks_fastest() {
        let sys = [harmonic(1.0), harmonic(2.0)];
        let r = minimal_critical_action(&sys, 1.0).unwrap();
        assert!((r.a_e - PI).abs() < 1e-9);
        assert_eq!(r.support, vec![1]);
    }

    #[test]
    fn single_system_capacity_is_area() {
        let sys = [power(0.5, 2.0, 1.0, 4.0)];
        let r = minimal_critical_action(&sys, 1.0).unwrap();
        let area = sublevel_area(&sys[0], 1.0).unwrap();
        assert!((r.a_e - area).abs() < 1e-9 * area);
    }

    #[test]
    fn identical_quartic_pair_prefers_vertex() {
        // with A ~ E^(3/4) concave, splitting energy increases the total action
        let sys = [power(0.5, 2.0, 1.0, 4.0), power(0.5, 2.0, 1.0, 4.0)];
        let profiles = build_profiles(&sys, 1.0, DEFAULT_GRID, Execution::Sequential).unwrap();
        let r = critical_action_from_profiles(&profiles, 1.0).unwrap();
        let single = sublevel_area(&sys[0], 1.0).unwrap();
        assert!((r.a_e - single).abs() < 1e-8 * single);
        // the symmetric split is also critical, with action 2 A(1/2)
        let split = 2.0 * sublevel_area(&sys[0], 0.5).unwrap();
        assert!(r.candidates.iter().any(|c| c.support.len() == 2 && (c.action - split).abs() < 1e-6 * split));
        let brute = brute_force_simplex(&profiles, 1.0, 400).unwrap();
        assert!((brute - r.a_e).abs() < 1e-8 * single);
    }

    #[test]
    fn soft_pair_prefers_split() {
        // a |q|^1.5 potential gives A ~ E^(7/6), convex, so the symmetric
        // split wins
        let sys = [power(0.5, 2.0, 1.0, 1.5), power(0.5, 2.0, 1.0, 1.5)];
        let profiles = build_profiles(&sys, 1.0, DEFAULT_GRID, Execution::Sequential).unwrap();
        let r = critical_action_from_profiles(&profiles, 1.0).unwrap();
        let split = 2.0 * sublevel_area(&sys[0], 0.5).unwrap();
        assert_eq!(r.support, vec![0, 1]);
        assert!((r.a_e - split).abs() < 1e-6 * split, "{} vs {split}", r.a_e);
        let brute = brute_force_simplex(&profiles, 1.0, 1000).unwrap();
        assert!(brute >= r.a_e - 1e-9 && brute - r.a_e < 1e-5 * split);
    }

    #[test]
    fn split_report_for_quadratic_pair() {
        let sys = [power(0.5, 2.0, 1.0, 2.0), power(0.5, 2.0, 2.0, 2.0)];
        let rep = viterbo_bound_split(&sys, 1.0, &SplitOptions::default()).unwrap();
        // frequencies sqrt(2) and 2, so A_E = 2 pi / 2 = pi
        assert!((rep.a_e - PI).abs() < 1e-9);
        assert!(rep.viterbo_ok);
        // exact ellipsoid volume: product of the two ellipse areas / 2
        let exact = (TAU / 2f64.sqrt()) * (TAU / 2.0) / 2.0;
        assert!((rep.volume_mc - exact).abs() < 3.0 * rep.volume_std_error);
    }

    #[test]
    fn action_map_preserves_volume() {
        let sys = [harmonic(1.0), power(0.5, 2.0, 1.0, 4.0)];
        let profiles = build_profiles(&sys, 1.0, DEFAULT_GRID, Execution::Sequential).unwrap();
        let v = action_coordinate_volume_2(&profiles, 1.0).unwrap();
        let hs: Vec<SharedHamiltonian> = sys.iter().map(|s| s.h.clone()).collect();
        let mc = monte_carlo_volume(&DirectSum::new(hs).unwrap(), 1.0, 1_000_000, 3, Execution::default()).unwrap();
        assert!(mc.agrees_with(v, 3.0), "{v} vs {mc:?}");
    }
}
