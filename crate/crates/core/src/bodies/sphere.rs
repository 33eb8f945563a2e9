//! Direction sets on the unit sphere and a multi-start derivative-free
//! maximizer for functions on the sphere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm2(a);
    a.iter().map(|v| v / n).collect()
}

/// Deterministic, roughly uniform unit vectors in `R^dim`.
///
/// Dimension 2 uses equally spaced angles, dimension 3 the Fibonacci lattice,
/// higher dimensions normalized Gaussians from a seeded stream.
pub fn sphere_directions(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let t = std::f64::consts::TAU * (i as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * i as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| loop {
                    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
                    if norm2(&v) > 1e-12 {
                        break normalized(&v);
                    }
                })
                .collect()
        }
    }
}

/// Orthonormal basis of the tangent space at a unit vector `u`, from the
/// Householder reflection that maps the last axis onto `u`.
fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let s = if u[d - 1] >= 0.0 { 1.0 } else { -1.0 };
    // reflection H with H e_d = s u
    let mut v: Vec<f64> = u.iter().map(|x| s * x).collect();
    v[d - 1] -= 1.0;
    let vv = dot(&v, &v);
    (0..d - 1)
        .map(|j| {
            let mut col = vec![0.0; d];
            col[j] = 1.0;
            if vv > 0.0 {
                let c = 2.0 * v[j] / vv;
                for (ci, vi) in col.iter_mut().zip(&v) {
                    *ci -= c * vi;
                }
            }
            col
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct SphereSearch {
    /// Number of lattice directions scanned before local refinement.
    pub grid: usize,
    /// How many of the best grid points are refined.
    pub starts: usize,
    pub max_evals: usize,
    pub xtol: f64,
    pub seed: u64,
}

impl Default for SphereSearch {
    fn default() -> Self {
        Self { grid: 256, starts: 3, max_evals: 4000, xtol: 1e-11, seed: 7 }
    }
}

impl SphereSearch {
    pub fn for_dim(dim: usize) -> Self {
        let grid = match dim {
            0..=2 => 96,
            3 => 400,
            _ => 1500,
        };
        Self { grid, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SphereMax {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub evaluations: usize,
    pub converged: bool,
}

/// Maximize `f` over the unit sphere in `R^dim`.
///
/// Scans a direction lattice (plus any `extra_starts`), then refines the best
/// few points by Nelder-Mead in a Householder chart centred at each point,
/// re-centring until the value stops improving.
pub fn maximize_on_sphere<F>(
    f: F,
    dim: usize,
    extra_starts: &[Vec<f64>],
    opts: &SphereSearch,
) -> Result<SphereMax>
where
    F: Fn(&[f64]) -> f64,
{
    if dim == 0 {
        return Err(Error::invalid("sphere dimension must be positive"));
    }
    let mut evals = 0usize;
    let mut eval = |u: &[f64]| {
        evals += 1;
        f(u)
    };
    let mut candidates: Vec<(f64, Vec<f64>)> = sphere_directions(dim, opts.grid, opts.seed)
        .into_iter()
        .chain(extra_starts.iter().filter(|s| norm2(s) > 0.0).map(|s| normalized(s)))
        .map(|u| (eval(&u), u))
        .filter(|(v, _)| v.is_finite())
        .collect();
    if candidates.is_empty() {
        return Err(Error::numeric("objective not finite at any start direction"));
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    if dim == 1 {
        let (value, argmax) = candidates.swap_remove(0);
        return Ok(SphereMax { value, argmax, evaluations: evals, converged: true });
    }

    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for (v0, u0) in candidates.into_iter().take(opts.starts.max(1)) {
        let (v, u, ok) = refine(&mut eval, u0, v0, opts);
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, u, ok));
        }
    }
    let (value, argmax, converged) = best.expect("at least one start");
    if !value.is_finite() {
        return Err(Error::numeric("sphere maximization produced a non-finite value"));
    }
    Ok(SphereMax { value, argmax, evaluations: evals, converged })
}

fn refine<F: FnMut(&[f64]) -> f64>(
    eval: &mut F,
    mut u: Vec<f64>,
    mut value: f64,
    opts: &SphereSearch,
) -> (f64, Vec<f64>, bool) {
    let mut step = 0.2;
    let mut converged = false;
    for _ in 0..6 {
        let basis = tangent_basis(&u);
        let chart = |y: &[f64]| -> Vec<f64> {
            let mut x = u.clone();
            for (b, yi) in basis.iter().zip(y) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += yi * bi;
                }
            }
            normalized(&x)
        };
        let (y, v, ok) = nelder_mead_max(
            |y| eval(&chart(y)),
            basis.len(),
            step,
            opts.xtol,
            opts.max_evals,
        );
        let improved = v > value;
        if improved {
            let gain = v - value;
            u = chart(&y);
            value = v;
            converged = ok;
            if gain <= 1e-15 * value.abs().max(1e-300) {
                break;
            }
        } else {
            converged = converged || ok;
            break;
        }
        step = 1e-3;
    }
    (value, u, converged)
}

/// Nelder-Mead maximization in `R^n` from the origin. Returns the best point,
/// its value and whether the simplex shrank below `xtol` within the budget.
pub(crate) fn nelder_mead_max<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    n: usize,
    step: f64,
    xtol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, bool) {
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let origin = vec![0.0; n];
    let v0 = f(&origin);
    simplex.push((origin, v0));
    for i in 0..n {
        let mut x = vec![0.0; n];
        x[i] = step;
        let v = f(&x);
        simplex.push((x, v));
    }
    let mut evals = n + 1;
    let mut converged = false;
    while evals < max_evals {
        // descending by value: best first
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < xtol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let vr = f(&xr);
        evals += 1;
        if vr > simplex[0].1 {
            let xe = along(2.0);
            let ve = f(&xe);
            evals += 1;
            simplex[n] = if ve > vr { (xe, ve) } else { (xr, vr) };
        } else if vr > simplex[n - 1].1 {
            simplex[n] = (xr, vr);
        } else {
            let (xc, vc) = if vr > worst.1 {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            };
            evals += 1;
            if vc > worst.1.max(vr) {
                simplex[n] = (xc, vc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = item
                        .0
                        .iter()
                        .zip(&best)
                        .map(|(a, b)| b + 0.5 * (a - b))
                        .collect();
                    let v = f(&x);
                    *item = (x, v);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v, converged)
}

/// Newton refinement of a smooth critical point of a 0-homogeneous
/// objective on the sphere, starting from `u0`.
///
/// `grad` returns the ambient gradient of `f` (or `None` where `f` is not
/// differentiable, which stops the refinement). The Hessian in the
/// Householder chart is built by central differences of the chart gradient.
pub fn polish_critical_direction<F, G>(f: F, grad: G, u0: &[f64]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let d = u0.len();
    if d < 2 {
        return u0.to_vec();
    }
    let u0 = normalized(u0);
    let basis = tangent_basis(&u0);
    let m = d - 1;
    let point = |y: &[f64]| -> (Vec<f64>, f64) {
        let mut w = u0.clone();
        for (b, yi) in basis.iter().zip(y) {
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi += yi * bi;
            }
        }
        let len = norm2(&w);
        (w.iter().map(|v| v / len).collect(), len)
    };
    let chart_grad = |y: &[f64]| -> Option<Vec<f64>> {
        let (u, len) = point(y);
        let g = grad(&u)?;
        let radial = dot(&g, &u);
        let tangential: Vec<f64> = g.iter().zip(&u).map(|(gi, ui)| (gi - radial * ui) / len).collect();
        Some(basis.iter().map(|b| dot(b, &tangential)).collect())
    };
    let scale = f(&u0).abs().max(1e-300);
    let mut y = vec![0.0; m];
    let Some(mut g) = chart_grad(&y) else {
        return u0;
    };
    for _ in 0..8 {
        let gnorm = norm2(&g);
        if gnorm <= 1e-15 * scale {
            break;
        }
        let h = 1e-6;
        let mut hess = nalgebra::DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            let mut yp = y.clone();
            let mut ym = y.clone();
            yp[j] += h;
            ym[j] -= h;
            let (Some(gp), Some(gm)) = (chart_grad(&yp), chart_grad(&ym)) else {
                return point(&y).0;
            };
            for i in 0..m {
                hess[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        let hess = 0.5 * (&hess + hess.transpose());
        let rhs = nalgebra::DVector::from_iterator(m, g.iter().map(|v| -v));
        let Some(step) = hess.lu().solve(&rhs) else {
            break;
        };
        let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        match chart_grad(&trial) {
            Some(gt) if norm2(&gt) < gnorm => {
                y = trial;
                g = gt;
            }
            _ => break,
        }
    }
    point(&y).0
}
