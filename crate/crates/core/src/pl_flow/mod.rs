//! Exact event-driven flow of `H(p, q) = |p|_1^2 + |q|_inf^2` on `R^(2n)`.
//!
//! Inside a smooth region (fixed signs of `p`, fixed argmax `k` of `|q|`) the
//! pair `(P, Q) = (|p|_1, |q_k|)` rotates on the circle `P^2 + Q^2 = E` with
//! angular speed 2, and every coordinate is an affine function of `P` or `Q`.
//! Trajectories are therefore chains of closed-form arcs joined at turning
//! points, where either `p_k` crosses zero or another `|q_j|` catches up with
//! `|q_k|`.

mod orbits;
mod segment;

pub use orbits::{
    angle_sequence, explicit_nd_start, forth_and_back, lemma_lower_bound, minimal_action_analysis,
    nd_period_formula, one_cycle_minimal, recurrence_step, segment_time, trajectory_csv,
    trajectory_rows, AngleSequence, LemmaReport, MinimalActionReport,
};
pub use segment::{
    advance_segment, flow, simulate, trajectory_action, ClosedTrajectory, EventKind,
    OpenTrajectory, Segment, Simulation, SimulationMode, TrajectoryKind, TurningEvent,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// A point `(p, q)` of phase space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePoint {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl PhasePoint {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() || p.is_empty() {
            return Err(Error::invalid("p and q must be nonempty and of equal length"));
        }
        if p.iter().chain(&q).any(|v| !v.is_finite()) {
            return Err(Error::invalid("phase point has non-finite entries"));
        }
        Ok(Self { p, q })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    /// `|p|_1`
    pub fn p_norm(&self) -> f64 {
        self.p.iter().map(|v| v.abs()).sum()
    }

    /// `|q|_inf`
    pub fn q_norm(&self) -> f64 {
        self.q.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn energy(&self) -> f64 {
        hamiltonian(self)
    }

    pub fn neg(&self) -> Self {
        Self { p: self.p.iter().map(|v| -v).collect(), q: self.q.iter().map(|v| -v).collect() }
    }

    /// `(p, q) -> (-p, q)`, which reverses the direction of time.
    pub fn reversed(&self) -> Self {
        Self { p: self.p.iter().map(|v| -v).collect(), q: self.q.clone() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { p: self.p.iter().map(|v| s * v).collect(), q: self.q.iter().map(|v| s * v).collect() }
    }

    /// Apply the same coordinate permutation to `p` and `q`: entry `i` of the
    /// result is entry `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            p: perm.iter().map(|&i| self.p[i]).collect(),
            q: perm.iter().map(|&i| self.q[i]).collect(),
        }
    }

    /// Flip the sign of `(p_i, q_i)` wherever `flips[i]`.
    pub fn sign_flipped(&self, flips: &[bool]) -> Self {
        let s = |i: usize| if flips[i] { -1.0 } else { 1.0 };
        Self {
            p: (0..self.n()).map(|i| s(i) * self.p[i]).collect(),
            q: (0..self.n()).map(|i| s(i) * self.q[i]).collect(),
        }
    }

    /// Concatenated `(p, q)`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.p.iter().chain(&self.q).copied().collect()
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .chain(self.q.iter().zip(&other.q))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Planar coordinates `x_1 = (q_1 - q_2)/2`, `x_2 = (q_1 + q_2)/2`, in
    /// which `|q|_inf = |x|_1`. Only for `n = 2`.
    pub fn rotated_x(&self) -> Option<[f64; 2]> {
        (self.n() == 2).then(|| [(self.q[0] - self.q[1]) / 2.0, (self.q[0] + self.q[1]) / 2.0])
    }
}

/// `|p|_1^2 + |q|_inf^2`
pub fn hamiltonian(x: &PhasePoint) -> f64 {
    let a = x.p_norm();
    let b = x.q_norm();
    a * a + b * b
}

/// Smooth piece of phase space containing a point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionSignature {
    /// Sign of each `p_i`; 0 marks a coordinate sitting on a turning stratum.
    pub p_signs: Vec<i8>,
    /// Index (0-based) of the coordinate with the largest `|q_j|`.
    pub argmax: usize,
    pub qk_sign: i8,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Region of `x`, or a stratum error listing the tying indices when the
/// maximum of `|q_j|` is attained more than once.
pub fn region_of(x: &PhasePoint) -> Result<RegionSignature> {
    let qn = x.q_norm();
    if qn == 0.0 {
        return Err(Error::Stratum { indices: (0..x.n()).collect() });
    }
    let ties: Vec<usize> = (0..x.n()).filter(|&j| x.q[j].abs() == qn).collect();
    if ties.len() > 1 {
        return Err(Error::Stratum { indices: ties });
    }
    let k = ties[0];
    Ok(RegionSignature { p_signs: x.p.iter().map(|&v| sign(v)).collect(), argmax: k, qk_sign: sign(x.q[k]) })
}

/// Hamiltonian velocity `(p', q')` at `x`: `q_i' = 2 |p|_1 sgn(p_i)` (zero
/// where `p_i = 0`), `p_k' = -2 q_k` for the argmax `k`, other `p_j' = 0`.
pub fn vector_field(x: &PhasePoint) -> Result<PhasePoint> {
    let r = region_of(x)?;
    let pn = x.p_norm();
    let mut dp = vec![0.0; x.n()];
    dp[r.argmax] = -2.0 * x.q[r.argmax];
    let dq = r.p_signs.iter().map(|&s| 2.0 * pn * s as f64).collect();
    Ok(PhasePoint { p: dp, q: dq })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(p: &[f64], q: &[f64]) -> PhasePoint {
        PhasePoint::new(p.to_vec(), q.to_vec()).unwrap()
    }

    #[test]
    fn region_examples() {
        let r = region_of(&pt(&[0.0, 0.6], &[0.8, 0.0])).unwrap();
        assert_eq!(r.p_signs, vec![0, 1]);
        assert_eq!((r.argmax, r.qk_sign), (0, 1));
        match region_of(&pt(&[0.1, 0.2], &[0.5, -0.5])) {
            Err(Error::Stratum { indices }) => assert_eq!(indices, vec![0, 1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn first_cycle_point_in_rotated_coordinates() {
        let s = 5f64.sqrt();
        let x = pt(&[0.0, 1.0 / s], &[2.0 / s, 0.0]);
        let [x1, x2] = x.rotated_x().unwrap();
        assert!(x1 > 0.0 && x2 > 0.0 && x.p[1] > 0.0 && x.p[0] == 0.0);
        assert!((x1.abs() + x2.abs() - x.q_norm()).abs() < 1e-15);
        assert!((x.energy() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vector_field_examples() {
        let v = vector_field(&pt(&[0.0, 1.0], &[0.5, 0.2])).unwrap();
        assert_eq!(v.q, vec![0.0, 2.0]);
        assert_eq!(v.p, vec![-1.0, 0.0]);
        let x = pt(&[0.3, -0.2], &[0.1, -0.7]);
        let a = vector_field(&x).unwrap();
        let b = vector_field(&x.neg()).unwrap();
        assert_eq!(a.neg(), b);
    }

    #[test]
    fn rotated_system_matches_planar_equations() {
        // first segment: p_1 < 0, p_2, x_1, x_2 > 0, so p_1' = -2 (x_1 + x_2)
        // and x_1' = 2 p_1 - 2 p_2 in terms of signed values
        let x = pt(&[-0.1, 0.3], &[0.6, 0.2]);
        let [x1, x2] = x.rotated_x().unwrap();
        let v = vector_field(&x).unwrap();
        assert!((v.p[0] - (-2.0 * (x1 + x2))).abs() < 1e-15);
        let dx1 = (v.q[0] - v.q[1]) / 2.0;
        assert!((dx1 - (2.0 * x.p[0] - 2.0 * x.p[1])).abs() < 1e-15);
    }
}
