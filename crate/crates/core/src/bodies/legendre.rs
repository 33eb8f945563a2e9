//! Legendre transforms of 2-homogeneous functions and the quadratic
//! comparisons built on them.
//!
//! For 2-homogeneous `f` the supremum in `f^L(p) = sup_q <p, q> - f(q)` can be
//! taken along rays `q = t u`, where it equals `<p, u>^2 / (4 f(u))` for
//! `<p, u> > 0`. What remains is a maximization over unit directions.

use serde::Serialize;

use super::hamiltonian::ConvexHamiltonian;
use super::sphere::{
    dot, maximize_on_sphere, norm2, polish_critical_direction, sphere_directions, SphereSearch,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::quadratic::QuadraticForm;

fn require_2hom<H: ConvexHamiltonian + ?Sized>(f: &H, what: &str) -> Result<()> {
    match f.homogeneity_degree() {
        Some(d) if (d - 2.0).abs() < 1e-12 => Ok(()),
        _ => Err(Error::invalid(format!("{what} needs a 2-homogeneous function"))),
    }
}

/// Value of a Legendre transform together with the maximizing point `q*`
/// (the gradient of `f^L` at `p` where it is smooth).
#[derive(Debug, Clone)]
pub struct LegendrePoint {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// Starting directions that catch the kinks of polyhedral gauges: the
/// direction of `p`, its sign vector and the coordinate axes.
fn structural_starts(p: &[f64]) -> Vec<Vec<f64>> {
    let d = p.len();
    let mut starts = vec![p.to_vec(), p.iter().map(|v| v.signum()).collect()];
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = p[i].signum().max(0.0) * 2.0 - 1.0;
        starts.push(e);
    }
    starts
}

pub fn legendre_2hom_point<H: ConvexHamiltonian + ?Sized>(f: &H, p: &[f64]) -> Result<LegendrePoint> {
    require_2hom(f, "legendre_2hom")?;
    if p.len() != f.dim() {
        return Err(Error::invalid("point dimension does not match the function"));
    }
    if norm2(p) == 0.0 {
        return Ok(LegendrePoint { value: 0.0, argmax: vec![0.0; p.len()] });
    }
    let objective = |u: &[f64]| {
        let s = dot(p, u).max(0.0);
        s * s / (4.0 * f.evaluate(u))
    };
    let opts = SphereSearch::for_dim(p.len());
    let best = maximize_on_sphere(objective, p.len(), &structural_starts(p), &opts)?;
    if !best.converged {
        return Err(Error::numeric(format!(
            "Legendre direction search did not converge after {} evaluations (best value {})",
            best.evaluations, best.value
        )));
    }
    let u = best.argmax;
    let t = dot(p, &u) / (2.0 * f.evaluate(&u));
    Ok(LegendrePoint { value: best.value, argmax: u.iter().map(|v| t * v).collect() })
}

/// `f^L(p)` for a 2-homogeneous `f`.
pub fn legendre_2hom<H: ConvexHamiltonian + ?Sized>(f: &H, p: &[f64]) -> Result<f64> {
    legendre_2hom_point(f, p).map(|r| r.value)
}

/// The Legendre transform of a 2-homogeneous function, as a Hamiltonian.
/// Each evaluation runs the direction search; failures evaluate to NaN.
#[derive(Debug, Clone)]
pub struct Legendre2Hom<H> {
    pub inner: H,
}

impl<H: ConvexHamiltonian> ConvexHamiltonian for Legendre2Hom<H> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        legendre_2hom(&self.inner, x).unwrap_or(f64::NAN)
    }

    fn analytic_gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        Some(legendre_2hom_point(&self.inner, x).map(|r| r.argmax))
    }

    fn homogeneity_degree(&self) -> Option<f64> {
        Some(2.0)
    }

    fn is_even(&self) -> bool {
        self.inner.is_even()
    }
}

/// Optimal constant in `V(q) <= alpha |q|^2` and a direction attaining it.
#[derive(Debug, Clone, Serialize)]
pub struct QuadraticBound {
    pub alpha: f64,
    pub q0: Vec<f64>,
    /// `V` is not differentiable at `q0`.
    pub nonsmooth_at_q0: bool,
}

pub fn tightest_quadratic_bound<H: ConvexHamiltonian + ?Sized>(v: &H) -> Result<QuadraticBound> {
    require_2hom(v, "tightest_quadratic_bound")?;
    if !v.is_even() {
        return Err(Error::invalid("tightest_quadratic_bound needs an even function"));
    }
    let d = v.dim();
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e
        })
        .collect();
    let best = maximize_on_sphere(|u| v.evaluate(u), d, &axes, &SphereSearch::for_dim(d))?;
    if !best.converged {
        return Err(Error::numeric(format!(
            "quadratic bound search did not converge after {} evaluations (best value {})",
            best.evaluations, best.value
        )));
    }
    let nonsmooth_at_q0 = matches!(v.gradient(&best.argmax), Err(Error::Stratum { .. }));
    let q0 = if nonsmooth_at_q0 {
        best.argmax.clone()
    } else {
        polish_critical_direction(|u| v.evaluate(u), |u| v.gradient(u).ok(), &best.argmax)
    };
    let alpha = v.evaluate(&q0);
    if alpha < best.value * (1.0 - 1e-12) {
        return Ok(QuadraticBound { alpha: best.value, q0: best.argmax, nonsmooth_at_q0 });
    }
    Ok(QuadraticBound { alpha, q0, nonsmooth_at_q0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SandwichViolation {
    /// `T^L(u) < Q(u)`
    UpperSide,
    /// `Q(u) < C V(u)`
    LowerSide,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichWitness {
    pub direction: Vec<f64>,
    pub side: SandwichViolation,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    /// Largest `C` with `T^L >= C V`.
    pub c: f64,
    pub q0: Vec<f64>,
    pub holds: bool,
    /// Smallest sampled `T^L(u) - Q(u)` over unit directions.
    pub min_upper_gap: f64,
    /// Smallest sampled `Q(u) - C V(u)` over unit directions.
    pub min_lower_gap: f64,
    pub witness: Option<SandwichWitness>,
    pub directions_checked: usize,
}

/// Largest `C` with `T^L >= C V` and a direction `q0` where equality holds.
pub fn legendre_ratio_constant<T, V>(t: &T, v: &V) -> Result<(f64, Vec<f64>)>
where
    T: ConvexHamiltonian + ?Sized,
    V: ConvexHamiltonian + ?Sized,
{
    require_2hom(t, "sandwich")?;
    require_2hom(v, "sandwich")?;
    if t.dim() != v.dim() {
        return Err(Error::invalid("T and V act on spaces of different dimension"));
    }
    let d = t.dim();
    let mut opts = SphereSearch::for_dim(d);
    opts.grid = opts.grid.min(200);
    let ratio = |u: &[f64]| v.evaluate(u) / legendre_2hom(t, u).unwrap_or(f64::NAN);
    let best = maximize_on_sphere(ratio, d, &[], &opts)?;
    if !(best.value > 0.0) {
        return Err(Error::numeric("V / T^L has no positive maximum"));
    }
    Ok((1.0 / best.value, best.argmax))
}

/// Checks `T^L >= Q >= C V` on `directions` sampled unit vectors, where `C` is
/// the largest constant with `T^L >= C V` (equality at the reported `q0`).
/// Both sides are 2-homogeneous, so unit directions suffice.
pub fn sandwich_check<T, V>(
    t: &T,
    v: &V,
    q: &QuadraticForm,
    directions: usize,
    exec: Execution,
) -> Result<SandwichReport>
where
    T: ConvexHamiltonian + ?Sized,
    V: ConvexHamiltonian + ?Sized,
{
    if q.dim() != t.dim() {
        return Err(Error::invalid("Q acts on a space of the wrong dimension"));
    }
    let (c, q0) = legendre_ratio_constant(t, v)?;
    let mut dirs = sphere_directions(t.dim(), directions, 3);
    dirs.push(q0.clone());
    let gaps: Vec<Result<(f64, f64)>> = exec.map_collect(0..dirs.len() as u64, |i| {
        let u = &dirs[i as usize];
        let tl = legendre_2hom(t, u)?;
        let qu = q.evaluate(u);
        Ok((tl - qu, qu - c * v.evaluate(u)))
    });
    let mut report = SandwichReport {
        c,
        q0,
        holds: true,
        min_upper_gap: f64::INFINITY,
        min_lower_gap: f64::INFINITY,
        witness: None,
        directions_checked: dirs.len(),
    };
    let tol = 1e-9;
    for (u, g) in dirs.iter().zip(gaps) {
        let (upper, lower) = g?;
        report.min_upper_gap = report.min_upper_gap.min(upper);
        report.min_lower_gap = report.min_lower_gap.min(lower);
        let worst = if upper < lower {
            (upper, SandwichViolation::UpperSide)
        } else {
            (lower, SandwichViolation::LowerSide)
        };
        if worst.0 < -tol
            && report.witness.as_ref().is_none_or(|w| worst.0 < w.margin)
        {
            report.witness = Some(SandwichWitness {
                direction: u.clone(),
                side: worst.1,
                margin: worst.0,
            });
        }
    }
    report.holds = report.witness.is_none();
    Ok(report)
}
