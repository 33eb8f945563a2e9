use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::hamiltonian::ConvexHamiltonian;
use super::norm::{L2SumSpec, NormDescriptor};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::special::gamma_binomial;

/// Samples per RNG stream. Stream `b` covers sample indices
/// `[b * BATCH, (b + 1) * BATCH)`, so estimates do not depend on how batches
/// are distributed over threads.
pub const MC_BATCH: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
}

impl VolumeEstimate {
    /// Whether `exact` lies within `k` standard errors of the estimate.
    pub fn agrees_with(&self, exact: f64, k: f64) -> bool {
        (self.estimate - exact).abs() <= k * self.std_error
    }
}

/// Volume of `{x in R^m : |x| <= 1}`; closed form where known, hit-or-miss
/// Monte Carlo otherwise (with its standard error).
pub fn norm_ball_volume(norm: &NormDescriptor, m: usize) -> Result<VolumeEstimate> {
    if m == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if norm.dim() != m {
        return Err(Error::invalid(format!(
            "norm acts on R^{} but volume requested in R^{m}",
            norm.dim()
        )));
    }
    if let Some(v) = norm.exact_unit_ball_volume() {
        return Ok(VolumeEstimate { estimate: v, std_error: 0.0, samples: 0, hits: 0 });
    }
    let h = super::hamiltonian::NormSquared::new(norm.clone(), 1.0)?;
    monte_carlo_volume(&h, 1.0, 1_000_000, 0, Execution::default())
}

/// `vol(K°) vol(K) / binom(n, n/2)`.
pub fn l2_sum_volume(spec: &L2SumSpec) -> Result<f64> {
    let n = spec.n();
    let vk = norm_ball_volume(&spec.norm, n)?;
    let vd = norm_ball_volume(&spec.dual_norm, n)?;
    let b = gamma_binomial(n as f64, n as f64 / 2.0)?;
    Ok(vk.estimate * vd.estimate / b)
}

/// Closed form for the square/cross-polytope pair: `((n/2)!)^2 4^n / (n!)^2`.
pub fn l1_linf_l2_sum_volume(n: usize) -> f64 {
    use crate::special::ln_factorial;
    let n = n as f64;
    (2.0 * ln_factorial(n / 2.0) + n * 4f64.ln() - 2.0 * ln_factorial(n)).exp()
}

/// Hit-or-miss estimate of `vol {h <= level}` from `samples` uniform points in
/// the Hamiltonian's bounding box. Deterministic in `(seed, samples)`.
pub fn monte_carlo_volume<H: ConvexHamiltonian + ?Sized>(
    h: &H,
    level: f64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo volume needs at least one sample"));
    }
    if !(level > 0.0) {
        return Err(Error::invalid("level must be positive"));
    }
    let half = h.bounding_box(level)?;
    let box_volume: f64 = half.iter().map(|w| 2.0 * w).product();
    let dists: Vec<Uniform<f64>> = half
        .iter()
        .map(|&w| Uniform::new_inclusive(-w, w).map_err(|e| Error::numeric(e.to_string())))
        .collect::<Result<_>>()?;
    let batches = samples.div_ceil(MC_BATCH);
    let hits = exec.map_reduce(
        0..batches,
        0u64,
        |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let mut x = vec![0.0; half.len()];
            let mut hits = 0u64;
            for _ in 0..count {
                for (xi, d) in x.iter_mut().zip(&dists) {
                    *xi = d.sample(&mut rng);
                }
                if h.evaluate(&x) <= level {
                    hits += 1;
                }
            }
            hits
        },
        |a, b| a + b,
    );
    let n = samples as f64;
    let frac = hits as f64 / n;
    let var = (frac * (1.0 - frac)).max(1.0 / n);
    Ok(VolumeEstimate {
        estimate: box_volume * frac,
        std_error: box_volume * (var / n).sqrt(),
        samples,
        hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::hamiltonian::{NormSquared, SplitHamiltonian};
    use crate::bodies::norm::NormKind;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn exact_ball_volumes() {
        let v = |n: NormDescriptor, m| norm_ball_volume(&n, m).unwrap().estimate;
        assert!((v(NormDescriptor::linf(2), 2) - 4.0).abs() < 1e-14);
        assert!((v(NormDescriptor::l2(2), 2) - PI).abs() < 1e-14);
        assert!((v(NormDescriptor::l1(3), 3) - 4.0 / 3.0).abs() < 1e-14);
        let w = NormDescriptor::new(NormKind::WeightedL2(vec![4.0, 1.0]), 2).unwrap();
        assert!((v(w, 2) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(matches!(
            norm_ball_volume(&NormDescriptor::l1(2), 0),
            Err(Error::InvalidArgument(_))
        ));
        let h = NormSquared::new(NormDescriptor::l2(2), 1.0).unwrap();
        assert!(matches!(
            monte_carlo_volume(&h, 1.0, 0, 0, Execution::Sequential),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn l2_sum_examples() {
        assert!((l2_sum_volume(&L2SumSpec::l1_linf(2)).unwrap() - 4.0).abs() < 1e-12);
        assert!((l2_sum_volume(&L2SumSpec::l1_linf(3)).unwrap() - PI).abs() < 1e-12);
        for n in 1..=6 {
            let euclid = L2SumSpec::with_dual(NormDescriptor::l2(n)).unwrap();
            let expect = crate::special::ball_volume_2n(n);
            assert!((l2_sum_volume(&euclid).unwrap() - expect).abs() < 1e-12 * expect);
            let closed = l1_linf_l2_sum_volume(n);
            let general = l2_sum_volume(&L2SumSpec::l1_linf(n)).unwrap();
            assert!((closed - general).abs() < 1e-12 * closed);
        }
    }

    #[test]
    fn custom_norm_uses_monte_carlo() {
        let f = Arc::new(|x: &[f64]| (x[0].abs().powi(3) + x[1].abs().powi(3)).cbrt());
        let n = NormDescriptor::new(NormKind::Custom(f), 2).unwrap();
        let v = norm_ball_volume(&n, 2).unwrap();
        // l3 unit disk: 4 Gamma(1 + 1/3)^2 / Gamma(1 + 2/3)
        use statrs::function::gamma::gamma;
        let exact = 4.0 * gamma(4.0 / 3.0).powi(2) / gamma(5.0 / 3.0);
        assert!(v.std_error > 0.0);
        assert!(v.agrees_with(exact, 4.0), "{v:?} vs {exact}");
    }

    #[test]
    fn monte_carlo_is_split_independent() {
        let h = SplitHamiltonian::l2_sum(&L2SumSpec::l1_linf(2));
        let a = monte_carlo_volume(&h, 1.0, 100_000, 5, Execution::Sequential).unwrap();
        let b = monte_carlo_volume(&h, 1.0, 100_000, 5, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_volume(&h, 1.0, 100_000, 6, Execution::Parallel).unwrap();
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn unit_four_ball() {
        let h = NormSquared::new(NormDescriptor::l2(4), 0.5).unwrap();
        let v = monte_carlo_volume(&h, 0.5, 400_000, 1, Execution::default()).unwrap();
        assert!(v.agrees_with(PI * PI / 2.0, 3.0), "{v:?}");
    }
}
