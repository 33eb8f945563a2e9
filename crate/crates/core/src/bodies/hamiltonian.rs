use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::norm::NormDescriptor;
use super::sphere::{dot, norm2, sphere_directions};
use crate::error::{Error, Result};

/// A proper Hamiltonian on `R^dim` (usually convex and positive off the
/// origin). Phase-space vectors are ordered `(p_1..p_n, q_1..q_n)`.
pub trait ConvexHamiltonian: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn evaluate(&self, x: &[f64]) -> f64;

    /// Closed-form gradient, if available. Nonsmooth points report
    /// [`Error::Stratum`] instead of picking a subgradient.
    fn analytic_gradient(&self, _x: &[f64]) -> Option<Result<Vec<f64>>> {
        None
    }

    /// `Some(m)` if `H(t x) = t^m H(x)` for `t > 0`.
    fn homogeneity_degree(&self) -> Option<f64>;

    fn is_even(&self) -> bool;

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self.analytic_gradient(x) {
            Some(g) => g,
            None => Ok(finite_difference_gradient(|y| self.evaluate(y), x)),
        }
    }

    /// Half-widths of an axis-aligned box containing `{H <= level}`.
    fn bounding_box(&self, level: f64) -> Result<Vec<f64>> {
        let r = sublevel_radius(self, level)?;
        Ok(vec![r; self.dim()])
    }
}

pub type SharedHamiltonian = Arc<dyn ConvexHamiltonian>;

impl<H: ConvexHamiltonian + ?Sized> ConvexHamiltonian for Arc<H> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        (**self).analytic_gradient(x)
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        (**self).homogeneity_degree()
    }

    fn is_even(&self) -> bool {
        (**self).is_even()
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).gradient(x)
    }

    fn bounding_box(&self, level: f64) -> Result<Vec<f64>> {
        (**self).bounding_box(level)
    }
}

/// Central differences with step `1e-6 * (1 + |x|)`.
pub fn finite_difference_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> Vec<f64> {
    let h = 1e-6 * (1.0 + norm2(x));
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let up = f(&y);
            y[i] = x[i] - h;
            let down = f(&y);
            y[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Radius of a Euclidean ball containing `{H <= level}` (10% guard added).
///
/// Homogeneous `H`: `(level / min_u H(u))^(1/m)` with the minimum over
/// sampled unit directions. Otherwise: radial bisection along each sampled
/// direction.
pub fn sublevel_radius<H: ConvexHamiltonian + ?Sized>(h: &H, level: f64) -> Result<f64> {
    if !(level > 0.0) {
        return Err(Error::invalid("sublevel needs a positive level"));
    }
    let dim = h.dim();
    let count = match dim {
        1 => 2,
        2 => 720,
        3 => 4000,
        _ => 8000,
    };
    let mut dirs = sphere_directions(dim, count, 11);
    for i in 0..dim {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = s;
            dirs.push(e);
        }
    }
    let r = match h.homogeneity_degree() {
        Some(m) => {
            let min = dirs.iter().map(|u| h.evaluate(u)).fold(f64::INFINITY, f64::min);
            if !(min > 0.0) {
                return Err(Error::InvalidSystem(
                    "Hamiltonian vanishes on a sampled direction; sublevel unbounded".into(),
                ));
            }
            (level / min).powf(1.0 / m)
        }
        None => dirs
            .iter()
            .map(|u| radial_crossing(|x| h.evaluate(x), u, level))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max),
    };
    Ok(1.1 * r)
}

/// Distance `r` along unit direction `u` where `f(r u) = level`, for `f`
/// increasing along rays. Errors if no crossing is found before `1e8`.
pub fn radial_crossing<F: Fn(&[f64]) -> f64>(f: F, u: &[f64], level: f64) -> Result<f64> {
    let at = |r: f64| -> f64 {
        let x: Vec<f64> = u.iter().map(|v| r * v).collect();
        f(&x)
    };
    let mut hi = 1.0;
    while at(hi) <= level {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::InvalidSystem(
                "sublevel set appears unbounded along a sampled ray".into(),
            ));
        }
    }
    // Illinois variant of regula falsi on g(r) = f(r u) - level
    let (mut a, mut ga) = (0.0, at(0.0) - level);
    let (mut b, mut gb) = (hi, at(hi) - level);
    if ga > 0.0 {
        return Err(Error::InvalidSystem("level below the value at the origin".into()));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = if gb > ga { b - gb * (b - a) / (gb - ga) } else { 0.5 * (a + b) };
        let c = if c > a && c < b { c } else { 0.5 * (a + b) };
        let gc = at(c) - level;
        if gc == 0.0 {
            return Ok(c);
        }
        if gc < 0.0 {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
        if b - a <= 1e-15 * b {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// `scale * |x|^2` for a norm.
#[derive(Debug, Clone)]
pub struct NormSquared {
    pub norm: NormDescriptor,
    pub scale: f64,
}

impl NormSquared {
    pub fn new(norm: NormDescriptor, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid("norm-squared scale must be positive"));
        }
        Ok(Self { norm, scale })
    }
}

impl ConvexHamiltonian for NormSquared {
    fn dim(&self) -> usize {
        self.norm.dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let n = self.norm.eval(x);
        self.scale * n * n
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        let n = self.norm.eval(x);
        if n == 0.0 {
            // |x|^2 is differentiable at the origin with zero gradient
            return Some(Ok(vec![0.0; x.len()]));
        }
        self.norm
            .gradient(x)
            .map(|g| g.map(|g| g.into_iter().map(|gi| 2.0 * self.scale * n * gi).collect()))
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        Some(2.0)
    }

    fn is_even(&self) -> bool {
        true
    }

    fn bounding_box(&self, level: f64) -> Result<Vec<f64>> {
        match self.norm.unit_ball_half_widths() {
            Some(w) => {
                let r = (level / self.scale).sqrt();
                Ok(w.into_iter().map(|v| v * r).collect())
            }
            None => Ok(vec![sublevel_radius(self, level)?; self.dim()]),
        }
    }
}

/// `H(p, q) = T(p) + V(q)` on `R^(2n)`.
#[derive(Debug, Clone)]
pub struct SplitHamiltonian {
    pub kinetic: SharedHamiltonian,
    pub potential: SharedHamiltonian,
}

impl SplitHamiltonian {
    pub fn new(kinetic: SharedHamiltonian, potential: SharedHamiltonian) -> Result<Self> {
        if kinetic.dim() != potential.dim() {
            return Err(Error::invalid("kinetic and potential dimensions differ"));
        }
        Ok(Self { kinetic, potential })
    }

    /// `|p|_*^2 + |q|^2` for an L2-sum pair.
    pub fn l2_sum(spec: &super::norm::L2SumSpec) -> Self {
        Self {
            kinetic: Arc::new(NormSquared { norm: spec.dual_norm.clone(), scale: 1.0 }),
            potential: Arc::new(NormSquared { norm: spec.norm.clone(), scale: 1.0 }),
        }
    }

    pub fn n(&self) -> usize {
        self.kinetic.dim()
    }
}

impl ConvexHamiltonian for SplitHamiltonian {
    fn dim(&self) -> usize {
        2 * self.n()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let n = self.n();
        self.kinetic.evaluate(&x[..n]) + self.potential.evaluate(&x[n..])
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        let n = self.n();
        let gp = self.kinetic.gradient(&x[..n]);
        let gq = self.potential.gradient(&x[n..]);
        Some(match (gp, gq) {
            (Ok(mut a), Ok(b)) => {
                a.extend(b);
                Ok(a)
            }
            (Err(Error::Stratum { indices }), _) => Err(Error::Stratum { indices }),
            (_, Err(Error::Stratum { indices })) => Err(Error::Stratum {
                indices: indices.into_iter().map(|i| i + n).collect(),
            }),
            (Err(e), _) | (_, Err(e)) => Err(e),
        })
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        match (self.kinetic.homogeneity_degree(), self.potential.homogeneity_degree()) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        }
    }

    fn is_even(&self) -> bool {
        self.kinetic.is_even() && self.potential.is_even()
    }

    fn bounding_box(&self, level: f64) -> Result<Vec<f64>> {
        // both summands are nonnegative, so each is at most `level` on the sublevel
        let mut b = self.kinetic.bounding_box(level)?;
        b.extend(self.potential.bounding_box(level)?);
        Ok(b)
    }
}

/// `H = sum_i H_i(p_i, q_i)`, each `H_i` a Hamiltonian on the plane with
/// argument order `(p_i, q_i)`.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub systems: Vec<SharedHamiltonian>,
}

impl DirectSum {
    pub fn new(systems: Vec<SharedHamiltonian>) -> Result<Self> {
        if systems.is_empty() {
            return Err(Error::invalid("direct sum needs at least one subsystem"));
        }
        if systems.iter().any(|s| s.dim() != 2) {
            return Err(Error::invalid("direct-sum subsystems must be planar"));
        }
        Ok(Self { systems })
    }

    pub fn n(&self) -> usize {
        self.systems.len()
    }
}

impl ConvexHamiltonian for DirectSum {
    fn dim(&self) -> usize {
        2 * self.n()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let n = self.n();
        self.systems
            .iter()
            .enumerate()
            .map(|(i, h)| h.evaluate(&[x[i], x[n + i]]))
            .sum()
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        let n = self.n();
        let mut g = vec![0.0; 2 * n];
        for (i, h) in self.systems.iter().enumerate() {
            match h.gradient(&[x[i], x[n + i]]) {
                Ok(gi) => {
                    g[i] = gi[0];
                    g[n + i] = gi[1];
                }
                Err(e) => return Some(Err(e)),
            }
        }
        Some(Ok(g))
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        let first = self.systems[0].homogeneity_degree()?;
        self.systems
            .iter()
            .all(|s| s.homogeneity_degree() == Some(first))
            .then_some(first)
    }

    fn is_even(&self) -> bool {
        self.systems.iter().all(|s| s.is_even())
    }

    fn bounding_box(&self, level: f64) -> Result<Vec<f64>> {
        let n = self.n();
        let mut b = vec![0.0; 2 * n];
        for (i, h) in self.systems.iter().enumerate() {
            let bi = h.bounding_box(level)?;
            b[i] = bi[0];
            b[n + i] = bi[1];
        }
        Ok(b)
    }
}

/// `x -> scale * inner(M x)` for an invertible linear map `M` (row-major).
#[derive(Debug, Clone)]
pub struct LinearPullback {
    pub inner: SharedHamiltonian,
    matrix: Vec<f64>,
    pub scale: f64,
}

impl LinearPullback {
    pub fn new(inner: SharedHamiltonian, matrix: Vec<f64>, scale: f64) -> Result<Self> {
        let d = inner.dim();
        if matrix.len() != d * d {
            return Err(Error::invalid("pullback matrix has the wrong size"));
        }
        Ok(Self { inner, matrix, scale })
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        (0..d)
            .map(|i| dot(&self.matrix[i * d..(i + 1) * d], x))
            .collect()
    }
}

impl ConvexHamiltonian for LinearPullback {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.scale * self.inner.evaluate(&self.apply(x))
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        let d = x.len();
        let g = match self.inner.gradient(&self.apply(x)) {
            Ok(g) => g,
            Err(e) => return Some(Err(e)),
        };
        Some(Ok((0..d)
            .map(|j| self.scale * (0..d).map(|i| self.matrix[i * d + j] * g[i]).sum::<f64>())
            .collect()))
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        self.inner.homogeneity_degree()
    }

    fn is_even(&self) -> bool {
        self.inner.is_even()
    }
}

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A Hamiltonian given by closures.
#[derive(Clone)]
pub struct FnHamiltonian {
    pub dim: usize,
    pub f: ScalarFn,
    pub grad: Option<VectorFn>,
    pub degree: Option<f64>,
    pub even: bool,
}

impl fmt::Debug for FnHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnHamiltonian")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("even", &self.even)
            .finish()
    }
}

impl ConvexHamiltonian for FnHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        self.grad.as_ref().map(|g| Ok(g(x)))
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        self.degree
    }

    fn is_even(&self) -> bool {
        self.even
    }
}

/// Planar `a |p|^m + b |q|^k`, argument order `(p, q)`.
#[derive(Debug, Clone, Copy)]
pub struct SeparablePower {
    pub p_coeff: f64,
    pub p_exp: f64,
    pub q_coeff: f64,
    pub q_exp: f64,
}

impl SeparablePower {
    pub fn new(p_coeff: f64, p_exp: f64, q_coeff: f64, q_exp: f64) -> Result<Self> {
        if [p_coeff, q_coeff].iter().any(|c| !(*c > 0.0 && c.is_finite()))
            || [p_exp, q_exp].iter().any(|e| !(*e > 1.0 && e.is_finite()))
        {
            return Err(Error::invalid(
                "power system needs positive coefficients and exponents above 1",
            ));
        }
        Ok(Self { p_coeff, p_exp, q_coeff, q_exp })
    }

    /// `omega/2 (p^2 + q^2)`.
    pub fn harmonic(omega: f64) -> Result<Self> {
        Self::new(0.5 * omega, 2.0, 0.5 * omega, 2.0)
    }
}

impl ConvexHamiltonian for SeparablePower {
    fn dim(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        self.p_coeff * x[0].abs().powf(self.p_exp) + self.q_coeff * x[1].abs().powf(self.q_exp)
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        let d = |c: f64, e: f64, v: f64| c * e * v.abs().powf(e - 1.0) * v.signum();
        Some(Ok(vec![
            d(self.p_coeff, self.p_exp, x[0]),
            d(self.q_coeff, self.q_exp, x[1]),
        ]))
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        (self.p_exp == self.q_exp).then_some(self.p_exp)
    }

    fn is_even(&self) -> bool {
        true
    }

    fn bounding_box(&self, level: f64) -> Result<Vec<f64>> {
        Ok(vec![
            (level / self.p_coeff).powf(1.0 / self.p_exp),
            (level / self.q_coeff).powf(1.0 / self.q_exp),
        ])
    }
}

/// Largest violations of the descriptor invariants found at random samples.
#[derive(Debug, Clone, Default)]
pub struct InvariantReport {
    pub min_value_off_origin: f64,
    pub value_at_origin: f64,
    pub homogeneity_residual: f64,
    pub evenness_residual: f64,
    pub euler_residual: f64,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.value_at_origin == 0.0
            && self.min_value_off_origin > 0.0
            && self.homogeneity_residual <= 1e-9
            && self.evenness_residual <= 1e-12
            && self.euler_residual <= 1e-7
    }
}

/// Samples the Hamiltonian invariants: positivity, homogeneity for
/// `t in (0, 10)`, evenness and the Euler relation at smooth points. Residuals
/// are relative to `1 + |value|`.
pub fn check_invariants<H: ConvexHamiltonian + ?Sized>(h: &H, samples: usize, seed: u64) -> InvariantReport {
    let dim = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = InvariantReport {
        min_value_off_origin: f64::INFINITY,
        value_at_origin: h.evaluate(&vec![0.0; dim]),
        ..Default::default()
    };
    for _ in 0..samples {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        let hx = h.evaluate(&x);
        rep.min_value_off_origin = rep.min_value_off_origin.min(hx);
        if let Some(m) = h.homogeneity_degree() {
            let t: f64 = rng.random_range(0.0..10.0);
            let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
            let htx = h.evaluate(&tx);
            let r = (htx - t.powf(m) * hx).abs() / (1.0 + htx.abs());
            rep.homogeneity_residual = rep.homogeneity_residual.max(r);
            if let Ok(g) = h.gradient(&x) {
                let r = (dot(&x, &g) - m * hx).abs() / (1.0 + hx.abs());
                rep.euler_residual = rep.euler_residual.max(r);
            }
        }
        if h.is_even() {
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let r = (h.evaluate(&neg) - hx).abs() / (1.0 + hx.abs());
            rep.evenness_residual = rep.evenness_residual.max(r);
        }
    }
    rep
}
