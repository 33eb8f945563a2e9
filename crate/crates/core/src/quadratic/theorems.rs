//! Executable versions of the two ellipsoid-inside-the-body arguments for
//! Hamiltonians `T(p) + V(q)`: put a symplectic ball (after a linear change
//! of coordinates) inside the body so that both boundaries share a closed
//! characteristic. Then the capacities agree and the volume inequality
//! follows from the inclusion.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::flow::integrate_hamiltonian;
use super::QuadraticForm;
use crate::bodies::legendre::{legendre_2hom, legendre_ratio_constant, sandwich_check};
use crate::bodies::sphere::{dot, maximize_on_sphere, nelder_mead_max, norm2, normalized, sphere_directions, SphereSearch};
use crate::bodies::volume::MC_BATCH;
use crate::bodies::{
    monte_carlo_volume, tightest_quadratic_bound, ConvexHamiltonian, LinearPullback, NormDescriptor,
    NormSquared, SharedHamiltonian, SplitHamiltonian,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::special::factorial;

#[derive(Debug, Clone, Copy)]
pub struct TheoremOptions {
    /// Energy level `E` of the body `{H <= E}`.
    pub level: f64,
    /// Points sampled on the boundary of the inscribed ellipsoid.
    pub boundary_samples: u64,
    /// Monte Carlo samples for the body volume.
    pub mc_samples: u64,
    /// Points sampled on the shared two-plane for gradient agreement.
    pub plane_points: usize,
    /// RK4 steps used to follow the shared characteristic for one period.
    pub flow_steps: usize,
    /// Directions used to certify a sandwich quadratic.
    pub sandwich_directions: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        Self {
            level: 1.0,
            boundary_samples: 100_000,
            mc_samples: 1_000_000,
            plane_points: 64,
            flow_steps: 20_000,
            sandwich_directions: 2_000,
            seed: 0,
            exec: Execution::Parallel,
        }
    }
}

/// A sampled point where a check failed, with the size of the violation.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvenTheoremReport {
    pub n: usize,
    pub level: f64,
    pub alpha: f64,
    pub q0: Vec<f64>,
    /// `V` is not differentiable at the maximizer, so the gradient argument
    /// does not apply there.
    pub nonsmooth_maximizer: bool,
    pub capacity: f64,
    pub volume_lower_bound: f64,
    pub containment_ok: bool,
    pub containment_witness: Option<Witness>,
    pub gradient_agreement_ok: bool,
    pub max_gradient_mismatch: f64,
    pub gradient_witness: Option<Witness>,
    pub shared_characteristic_ok: bool,
    pub closure_error: f64,
    pub volume: f64,
    pub volume_std_error: f64,
    /// `vol(X) n! / c^n` from the Monte Carlo volume.
    pub viterbo_ratio: f64,
    pub viterbo_ok: bool,
}

impl EvenTheoremReport {
    pub fn all_checks_pass(&self) -> bool {
        !self.nonsmooth_maximizer
            && self.containment_ok
            && self.gradient_agreement_ok
            && self.shared_characteristic_ok
            && self.viterbo_ok
    }
}

fn euclidean_half(n: usize) -> SharedHamiltonian {
    Arc::new(NormSquared { norm: NormDescriptor::l2(n), scale: 0.5 })
}

/// Samples points `x` of a hypersurface `{g = level}` of a 2-homogeneous `g`
/// by rescaling Gaussian directions, and returns the largest `h(x) - level`.
fn boundary_excess<G, H>(
    g: G,
    h: H,
    dim: usize,
    level: f64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> (f64, Vec<f64>)
where
    G: Fn(&[f64]) -> f64 + Sync + Send,
    H: Fn(&[f64]) -> f64 + Sync + Send,
{
    let batches = samples.div_ceil(MC_BATCH);
    exec.map_reduce(
        0..batches,
        (f64::NEG_INFINITY, Vec::new()),
        |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let mut worst = (f64::NEG_INFINITY, Vec::new());
            for _ in 0..count {
                let d: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                let s = (level / g(&d)).sqrt();
                let x: Vec<f64> = d.iter().map(|v| v * s).collect();
                let excess = h(&x) - level;
                if excess > worst.0 {
                    worst = (excess, x);
                }
            }
            worst
        },
        |a, b| if b.0 > a.0 { b } else { a },
    )
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

const CONTAINMENT_MARGIN: f64 = 1e-9;
const GRADIENT_TOL: f64 = 1e-6;
const CLOSURE_TOL: f64 = 1e-8;

/// Checks the inscribed-ellipsoid argument for `H = |p|^2/2 + V(q)` with an
/// even 2-homogeneous `V`: the ellipsoid `{|p|^2/2 + alpha |q|^2 <= E}` built
/// from the optimal `V <= alpha |q|^2` lies in `{H <= E}` and shares the
/// planar closed characteristic through `(0, q0)`.
///
/// Failing sub-checks are reported in the result; errors are returned only
/// for invalid input or numerical breakdown.
pub fn verify_theorem_even_2hom(
    v: &SharedHamiltonian,
    opts: &TheoremOptions,
) -> Result<EvenTheoremReport> {
    let n = v.dim();
    let e = opts.level;
    if !(e > 0.0) {
        return Err(Error::invalid("level must be positive"));
    }
    let bound = tightest_quadratic_bound(v.as_ref())?;
    let alpha = bound.alpha;
    let q0 = bound.q0.clone();
    let h = SplitHamiltonian::new(euclidean_half(n), v.clone())?;
    let h_ellipsoid = |x: &[f64]| 0.5 * dot(&x[..n], &x[..n]) + alpha * dot(&x[n..], &x[n..]);

    let (excess, at) = boundary_excess(
        h_ellipsoid,
        |x| h.evaluate(x),
        2 * n,
        e,
        opts.boundary_samples,
        opts.seed ^ 0x5eed,
        opts.exec,
    );
    let containment_ok = excess <= CONTAINMENT_MARGIN;
    let containment_witness = (!containment_ok).then_some(Witness { point: at, margin: excess });

    // the shared plane: p = a q0, q = b q0 on the ellipse a^2/2 + alpha b^2 = E
    let mut max_gradient_mismatch: f64 = 0.0;
    let mut gradient_witness = None;
    let mut nonsmooth = bound.nonsmooth_at_q0;
    for k in 0..opts.plane_points.max(1) {
        let th = 2.0 * PI * (k as f64 + 0.25) / opts.plane_points.max(1) as f64;
        let a = (2.0 * e).sqrt() * th.cos();
        let b = (e / alpha).sqrt() * th.sin();
        let mut x: Vec<f64> = q0.iter().map(|c| a * c).collect();
        x.extend(q0.iter().map(|c| b * c));
        let reference: Vec<f64> = x[..n]
            .iter()
            .copied()
            .chain(x[n..].iter().map(|c| 2.0 * alpha * c))
            .collect();
        let mismatch = match h.gradient(&x) {
            Ok(g) => max_abs_diff(&g, &reference) / max_abs(&reference).max(f64::MIN_POSITIVE),
            Err(Error::Stratum { .. }) => {
                nonsmooth = true;
                f64::INFINITY
            }
            Err(err) => return Err(err),
        };
        let value_gap = (h.evaluate(&x) - e).abs() / e;
        let mismatch = mismatch.max(value_gap);
        if mismatch > max_gradient_mismatch {
            max_gradient_mismatch = mismatch;
            if mismatch > GRADIENT_TOL {
                gradient_witness = Some(Witness { point: x, margin: mismatch });
            }
        }
    }
    let gradient_agreement_ok = max_gradient_mismatch <= GRADIENT_TOL;

    // follow H from a point of the planar ellipse for one period of H'
    let period = 2.0 * PI / (2.0 * alpha).sqrt();
    let mut x0 = vec![0.0; n];
    x0.extend(q0.iter().map(|c| c * (e / alpha).sqrt()));
    let closure_error = match integrate_hamiltonian(&h, &x0, period, opts.flow_steps) {
        Ok(x1) => max_abs_diff(&x1, &x0) / max_abs(&x0),
        Err(Error::Stratum { .. }) => {
            nonsmooth = true;
            f64::INFINITY
        }
        Err(err) => return Err(err),
    };
    let shared_characteristic_ok = closure_error <= CLOSURE_TOL;

    let nf = n as f64;
    let capacity = e * PI * (2.0 / alpha).sqrt();
    let volume_lower_bound = PI.powi(n as i32) * (2.0 / alpha).powf(nf / 2.0) * e.powi(n as i32) / factorial(nf);
    let vol = monte_carlo_volume(&h, e, opts.mc_samples, opts.seed, opts.exec)?;
    let threshold = capacity.powi(n as i32) / factorial(nf);
    Ok(EvenTheoremReport {
        n,
        level: e,
        alpha,
        q0,
        nonsmooth_maximizer: nonsmooth,
        capacity,
        volume_lower_bound,
        containment_ok,
        containment_witness,
        gradient_agreement_ok,
        max_gradient_mismatch,
        gradient_witness,
        shared_characteristic_ok,
        closure_error,
        volume: vol.estimate,
        volume_std_error: vol.std_error,
        viterbo_ratio: vol.estimate / threshold,
        viterbo_ok: vol.estimate >= threshold - 3.0 * vol.std_error,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichTheoremReport {
    pub n: usize,
    pub level: f64,
    /// Largest `C` with `T^L >= C V`.
    pub c: f64,
    pub q0: Vec<f64>,
    /// A certified quadratic `Q` with `T^L >= Q >= C V` was found.
    pub holds: bool,
    /// Matrix `M` of `Q(q) = q . M q`, when found.
    pub q_matrix: Option<Vec<Vec<f64>>>,
    /// Where `Q` came from: `supplied`, a fit, or the minimax search.
    pub q_source: Option<String>,
    /// Sandwich violation found while certifying a supplied `Q`.
    pub sandwich_witness: Option<Witness>,
    pub containment_ok: bool,
    pub containment_witness: Option<Witness>,
    pub gradient_agreement_ok: bool,
    pub max_gradient_mismatch: f64,
    pub shared_characteristic_ok: bool,
    pub closure_error: f64,
    /// Capacity of `{T + V <= E}`: `2 pi E sqrt(C)`.
    pub capacity: f64,
    /// The same capacity from the action of the shared circle in the
    /// original coordinates.
    pub capacity_from_circle: f64,
    /// Capacity after normalizing to `Q = |q|^2/2`, `C = 1`, level 1/2.
    pub normalized_capacity: f64,
    pub volume: f64,
    pub volume_std_error: f64,
    pub viterbo_ratio: f64,
    pub viterbo_ok: bool,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn symmetric_from_params(n: usize, params: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = params[k];
            m[(j, i)] = params[k];
            k += 1;
        }
    }
    m
}

fn params_from_symmetric(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Least-squares symmetric `M` with `u . M u ~ values` over unit directions,
/// and the largest relative residual.
fn fit_quadratic(dirs: &[Vec<f64>], values: &[f64]) -> Option<(DMatrix<f64>, f64)> {
    let n = dirs.first()?.len();
    let k = n * (n + 1) / 2;
    let mut design = DMatrix::zeros(dirs.len(), k);
    for (r, u) in dirs.iter().enumerate() {
        let mut c = 0;
        for i in 0..n {
            for j in i..n {
                design[(r, c)] = if i == j { u[i] * u[i] } else { 2.0 * u[i] * u[j] };
                c += 1;
            }
        }
    }
    let rhs = DVector::from_column_slice(values);
    let sol = design.clone().svd(true, true).solve(&rhs, 1e-14).ok()?;
    let m = symmetric_from_params(n, sol.as_slice());
    let fitted = design * sol;
    let residual = fitted
        .iter()
        .zip(values)
        .map(|(f, v)| (f - v).abs() / v.abs().max(1e-300))
        .fold(0.0, f64::max);
    Some((m, residual))
}

struct SandwichSamples {
    dirs: Vec<Vec<f64>>,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

/// Smallest relative gap `min(T^L - Q, Q - C V) / |Q|` on the cached samples.
fn sandwich_margin(s: &SandwichSamples, m: &DMatrix<f64>) -> f64 {
    s.dirs
        .iter()
        .zip(s.upper.iter().zip(&s.lower))
        .map(|(u, (up, lo))| {
            let uv = DVector::from_column_slice(u);
            let q = uv.dot(&(m * &uv));
            (up - q).min(q - lo) / up.abs().max(1e-300)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Candidate quadratics between `T^L` and `C V`, most specific first.
fn candidate_quadratics(s: &SandwichSamples) -> Vec<(String, DMatrix<f64>)> {
    let mut out = Vec::new();
    let mid: Vec<f64> = s.upper.iter().zip(&s.lower).map(|(a, b)| 0.5 * (a + b)).collect();
    if let Some((m, r)) = fit_quadratic(&s.dirs, &s.upper) {
        if r < 1e-8 {
            out.push(("fit-upper".to_string(), m));
        }
    }
    if let Some((m, r)) = fit_quadratic(&s.dirs, &s.lower) {
        if r < 1e-8 {
            out.push(("fit-lower".to_string(), m));
        }
    }
    if let Some((m, _)) = fit_quadratic(&s.dirs, &mid) {
        out.push(("fit-midpoint".to_string(), m.clone()));
        // maximize the smallest sampled gap over symmetric matrices
        let scale = m.abs().max().max(1e-12);
        let p0 = params_from_symmetric(&m);
        let k = p0.len();
        let objective = |y: &[f64]| {
            let p: Vec<f64> = p0.iter().zip(y).map(|(a, b)| a + scale * b).collect();
            sandwich_margin(s, &symmetric_from_params(m.nrows(), &p))
        };
        let mut best_y = vec![0.0; k];
        let mut best_v = objective(&best_y);
        let mut step = 0.1;
        for _ in 0..8 {
            let shifted = |y: &[f64]| {
                let z: Vec<f64> = best_y.iter().zip(y).map(|(a, b)| a + b).collect();
                objective(&z)
            };
            let (y, v, _) = nelder_mead_max(shifted, k, step, 1e-12, 4000);
            if v > best_v {
                best_y = best_y.iter().zip(&y).map(|(a, b)| a + b).collect();
                best_v = v;
            }
            step *= 0.3;
        }
        let p: Vec<f64> = p0.iter().zip(&best_y).map(|(a, b)| a + scale * b).collect();
        out.push(("minimax".to_string(), symmetric_from_params(m.nrows(), &p)));
    }
    out
}

fn sym_sqrt_and_inverse(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::numeric("quadratic form lost positive definiteness"));
    }
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let dinv = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Ok((v * d * v.transpose(), v * dinv * v.transpose()))
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

/// Checks the sandwich argument for `H = T(p) + V(q)`: a quadratic `Q` with
/// `T^L >= Q >= C V` (supplied, or searched for) turns into a symplectic ball
/// inside the body sharing the circle characteristic through `q0`.
///
/// A missing `Q` is reported as `holds = false` with the remaining checks
/// skipped; that is a failed hypothesis, not an error.
pub fn verify_theorem_sandwich(
    t: &SharedHamiltonian,
    v: &SharedHamiltonian,
    q: Option<QuadraticForm>,
    opts: &TheoremOptions,
) -> Result<SandwichTheoremReport> {
    let n = t.dim();
    let e = opts.level;
    if !(e > 0.0) {
        return Err(Error::invalid("level must be positive"));
    }
    if !t.is_even() || !v.is_even() {
        return Err(Error::invalid("T and V must be even"));
    }
    let (c, q0_raw) = legendre_ratio_constant(t.as_ref(), v.as_ref())?;
    let h = SplitHamiltonian::new(t.clone(), v.clone())?;
    let capacity = 2.0 * PI * e * c.sqrt();
    let vol = monte_carlo_volume(&h, e, opts.mc_samples, opts.seed, opts.exec)?;
    let nf = n as f64;
    let threshold = capacity.powi(n as i32) / factorial(nf);

    let mut report = SandwichTheoremReport {
        n,
        level: e,
        c,
        q0: q0_raw.clone(),
        holds: false,
        q_matrix: None,
        q_source: None,
        sandwich_witness: None,
        containment_ok: false,
        containment_witness: None,
        gradient_agreement_ok: false,
        max_gradient_mismatch: f64::INFINITY,
        shared_characteristic_ok: false,
        closure_error: f64::INFINITY,
        capacity,
        capacity_from_circle: f64::NAN,
        normalized_capacity: PI,
        volume: vol.estimate,
        volume_std_error: vol.std_error,
        viterbo_ratio: vol.estimate / threshold,
        viterbo_ok: vol.estimate >= threshold - 3.0 * vol.std_error,
    };

    let directions = opts.sandwich_directions.max(16);
    let found = match q {
        Some(q) => {
            if q.dim() != n {
                return Err(Error::invalid("Q acts on a space of the wrong dimension"));
            }
            let check = sandwich_check(t.as_ref(), v.as_ref(), &q, directions, opts.exec)?;
            if !check.holds {
                report.sandwich_witness = check
                    .witness
                    .map(|w| Witness { point: w.direction, margin: w.margin });
                return Ok(report);
            }
            Some((q, "supplied".to_string()))
        }
        None => {
            let mut dirs = sphere_directions(n, 240, opts.seed ^ 0x51de);
            dirs.push(q0_raw.clone());
            let upper: Vec<Result<f64>> =
                opts.exec.map_collect(0..dirs.len() as u64, |i| legendre_2hom(t.as_ref(), &dirs[i as usize]));
            let upper = upper.into_iter().collect::<Result<Vec<f64>>>()?;
            let lower: Vec<f64> = dirs.iter().map(|u| c * v.evaluate(u)).collect();
            let samples = SandwichSamples { dirs, upper, lower };
            let mut found = None;
            for (source, m) in candidate_quadratics(&samples) {
                if sandwich_margin(&samples, &m) < -1e-9 {
                    continue;
                }
                let Ok(qf) = QuadraticForm::symmetrized(m) else { continue };
                let check = sandwich_check(t.as_ref(), v.as_ref(), &qf, directions, opts.exec)?;
                if check.holds {
                    found = Some((qf, source));
                    break;
                }
            }
            found
        }
    };
    let Some((qf, source)) = found else {
        return Ok(report);
    };
    report.holds = true;
    report.q_matrix = Some(matrix_rows(qf.matrix()));
    report.q_source = Some(source);

    // q0 maximizes C V / Q; that quotient has a smooth denominator
    let m = qf.matrix().clone();
    let ratio = |u: &[f64]| c * v.evaluate(u) / qf.evaluate(u);
    let mut search = SphereSearch::for_dim(n);
    search.grid = search.grid.min(200);
    let best = maximize_on_sphere(ratio, n, std::slice::from_ref(&q0_raw), &search)?;
    let q0 = normalized(&best.argmax);
    report.q0 = q0.clone();

    // normalization: q~ = L q, p = L p~ with L = (2M)^(1/2), so Q = |q~|^2/2
    let (l, l_inv) = sym_sqrt_and_inverse(&(&m * 2.0))?;
    let t_tilde: SharedHamiltonian = Arc::new(LinearPullback::new(t.clone(), row_major(&l), 1.0)?);
    let v_tilde: SharedHamiltonian = Arc::new(LinearPullback::new(v.clone(), row_major(&l_inv), c)?);
    let h_tilde = SplitHamiltonian::new(t_tilde, v_tilde)?;

    let (excess, at) = boundary_excess(
        |x| 0.5 * dot(x, x),
        |x| h_tilde.evaluate(x),
        2 * n,
        0.5,
        opts.boundary_samples,
        opts.seed ^ 0x5eed,
        opts.exec,
    );
    report.containment_ok = excess <= CONTAINMENT_MARGIN;
    report.containment_witness = (!report.containment_ok).then_some(Witness { point: at, margin: excess });

    let q0v = DVector::from_column_slice(&q0);
    let qt = &l * &q0v;
    let qt: Vec<f64> = (&qt / qt.norm()).iter().copied().collect();
    let mut mismatch: f64 = 0.0;
    for k in 0..opts.plane_points.max(1) {
        let th = 2.0 * PI * (k as f64 + 0.25) / opts.plane_points.max(1) as f64;
        let mut x: Vec<f64> = qt.iter().map(|c| th.sin() * c).collect();
        x.extend(qt.iter().map(|c| th.cos() * c));
        let gap = match h_tilde.gradient(&x) {
            Ok(g) => max_abs_diff(&g, &x).max((h_tilde.evaluate(&x) - 0.5).abs() * 2.0),
            Err(Error::Stratum { .. }) => f64::INFINITY,
            Err(err) => return Err(err),
        };
        mismatch = mismatch.max(gap);
    }
    report.max_gradient_mismatch = mismatch;
    report.gradient_agreement_ok = mismatch <= GRADIENT_TOL;

    let mut x0 = vec![0.0; n];
    x0.extend(qt.iter().copied());
    report.closure_error = match integrate_hamiltonian(&h_tilde, &x0, 2.0 * PI, opts.flow_steps) {
        Ok(x1) => max_abs_diff(&x1, &x0),
        Err(Error::Stratum { .. }) => f64::INFINITY,
        Err(err) => return Err(err),
    };
    report.shared_characteristic_ok = report.closure_error <= CLOSURE_TOL;

    // action of the circle through q0 and p0 = 2 M q0 on {T + V = E}
    let p0: Vec<f64> = (&m * &q0v * 2.0).iter().copied().collect();
    report.capacity_from_circle =
        PI * e * dot(&p0, &q0) / (t.evaluate(&p0) * v.evaluate(&q0)).sqrt();
    debug_assert!(norm2(&p0) > 0.0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{FnHamiltonian, NormDescriptor};

    fn quick() -> TheoremOptions {
        TheoremOptions {
            boundary_samples: 20_000,
            mc_samples: 200_000,
            sandwich_directions: 500,
            ..TheoremOptions::default()
        }
    }

    fn diag_quadratic(d: Vec<f64>) -> SharedHamiltonian {
        let dim = d.len();
        let d2 = d.clone();
        Arc::new(FnHamiltonian {
            dim,
            f: Arc::new(move |x: &[f64]| x.iter().zip(&d).map(|(a, w)| w * a * a).sum()),
            grad: Some(Arc::new(move |x: &[f64]| x.iter().zip(&d2).map(|(a, w)| 2.0 * w * a).collect())),
            degree: Some(2.0),
            even: true,
        })
    }

    #[test]
    fn even_theorem_on_ellipsoid_potential() {
        let v = diag_quadratic(vec![0.5, 2.0]);
        let r = verify_theorem_even_2hom(&v, &quick()).unwrap();
        assert!((r.alpha - 2.0).abs() < 1e-10);
        assert!(r.q0[1].abs() > 1.0 - 1e-8);
        assert!((r.capacity - PI).abs() < 1e-9);
        assert!(r.all_checks_pass(), "{r:?}");
    }

    #[test]
    fn even_theorem_equality_case() {
        let v = diag_quadratic(vec![1.5, 1.5]);
        let r = verify_theorem_even_2hom(&v, &quick()).unwrap();
        assert!(r.all_checks_pass());
        assert!((r.viterbo_ratio - 1.0).abs() < 4.0 * r.volume_std_error / r.volume);
    }

    #[test]
    fn even_theorem_sup_norm() {
        let v: SharedHamiltonian = Arc::new(NormSquared { norm: NormDescriptor::linf(2), scale: 1.0 });
        let r = verify_theorem_even_2hom(&v, &quick()).unwrap();
        assert!((r.alpha - 1.0).abs() < 1e-9);
        assert!(r.containment_ok && r.viterbo_ok);
    }

    #[test]
    fn sandwich_on_diagonal_pair() {
        let t = diag_quadratic(vec![0.5, 1.0]);
        let v = diag_quadratic(vec![0.25, 0.25]);
        let r = verify_theorem_sandwich(&t, &v, None, &quick()).unwrap();
        assert!(r.holds, "{r:?}");
        assert!((r.c - 1.0).abs() < 1e-8);
        assert!(r.containment_ok && r.gradient_agreement_ok && r.shared_characteristic_ok);
        assert!((r.capacity - r.capacity_from_circle).abs() < 1e-7 * r.capacity);
        assert!(r.viterbo_ok);
    }

    #[test]
    fn sandwich_rejects_bad_supplied_q() {
        let t = diag_quadratic(vec![0.5, 0.5]);
        let v = diag_quadratic(vec![0.5, 0.5]);
        let q = QuadraticForm::diagonal(&[1.0, 1.0]).unwrap();
        let r = verify_theorem_sandwich(&t, &v, Some(q), &quick()).unwrap();
        assert!(!r.holds);
        assert!(r.sandwich_witness.is_some());
    }

    #[test]
    fn parameter_round_trip() {
        let m = symmetric_from_params(3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(m, m.transpose());
        assert_eq!(params_from_symmetric(&m), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }
}
