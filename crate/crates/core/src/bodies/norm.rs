use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::special::factorial;

pub type NormFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Which norm a [`NormDescriptor`] evaluates.
#[derive(Clone)]
pub enum NormKind {
    L1,
    L2,
    LInf,
    /// `sqrt(sum w_i x_i^2)` with positive weights.
    WeightedL2(Vec<f64>),
    /// Any symmetric norm given by an evaluator. Volumes fall back to Monte Carlo.
    Custom(NormFn),
}

impl fmt::Debug for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::L1 => write!(f, "L1"),
            NormKind::L2 => write!(f, "L2"),
            NormKind::LInf => write!(f, "LInf"),
            NormKind::WeightedL2(w) => write!(f, "WeightedL2({w:?})"),
            NormKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A norm on `R^dim`.
#[derive(Debug, Clone)]
pub struct NormDescriptor {
    kind: NormKind,
    dim: usize,
}

impl NormDescriptor {
    pub fn new(kind: NormKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("norm dimension must be positive"));
        }
        if let NormKind::WeightedL2(w) = &kind {
            if w.len() != dim {
                return Err(Error::invalid(format!(
                    "weighted norm has {} weights for dimension {dim}",
                    w.len()
                )));
            }
            if w.iter().any(|&wi| !(wi > 0.0 && wi.is_finite())) {
                return Err(Error::invalid("norm weights must be positive and finite"));
            }
        }
        Ok(Self { kind, dim })
    }

    pub fn l1(dim: usize) -> Self {
        Self::new(NormKind::L1, dim).expect("positive dimension")
    }

    pub fn l2(dim: usize) -> Self {
        Self::new(NormKind::L2, dim).expect("positive dimension")
    }

    pub fn linf(dim: usize) -> Self {
        Self::new(NormKind::LInf, dim).expect("positive dimension")
    }

    /// Parses the names used in configuration documents.
    pub fn from_name(name: &str, dim: usize) -> Result<Self> {
        let kind = match name {
            "ell-1" | "l1" => NormKind::L1,
            "ell-2" | "l2" => NormKind::L2,
            "ell-infinity" | "linf" => NormKind::LInf,
            other => return Err(Error::Config(format!("unknown norm kind '{other}'"))),
        };
        Self::new(kind, dim)
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            NormKind::L1 => "ell-1",
            NormKind::L2 => "ell-2",
            NormKind::LInf => "ell-infinity",
            NormKind::WeightedL2(_) => "weighted-ell-2",
            NormKind::Custom(_) => "custom",
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            NormKind::L1 => x.iter().map(|v| v.abs()).sum(),
            NormKind::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::LInf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormKind::WeightedL2(w) => x
                .iter()
                .zip(w)
                .map(|(v, wi)| wi * v * v)
                .sum::<f64>()
                .sqrt(),
            NormKind::Custom(f) => f(x),
        }
    }

    /// Gradient of the norm at `x != 0`. Points where the norm is not
    /// differentiable are reported as [`Error::Stratum`]. Custom norms return
    /// `None` (callers fall back to finite differences).
    pub fn gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        let n = self.eval(x);
        if n == 0.0 {
            return Some(Err(Error::Stratum { indices: (0..self.dim).collect() }));
        }
        let g = match &self.kind {
            NormKind::L1 => {
                let zeros: Vec<usize> = (0..self.dim).filter(|&i| x[i] == 0.0).collect();
                if !zeros.is_empty() {
                    return Some(Err(Error::Stratum { indices: zeros }));
                }
                x.iter().map(|v| v.signum()).collect()
            }
            NormKind::L2 => x.iter().map(|v| v / n).collect(),
            NormKind::LInf => {
                let ties: Vec<usize> = (0..self.dim).filter(|&i| x[i].abs() == n).collect();
                if ties.len() > 1 {
                    return Some(Err(Error::Stratum { indices: ties }));
                }
                let mut g = vec![0.0; self.dim];
                g[ties[0]] = x[ties[0]].signum();
                g
            }
            NormKind::WeightedL2(w) => x.iter().zip(w).map(|(v, wi)| wi * v / n).collect(),
            NormKind::Custom(_) => return None,
        };
        Some(Ok(g))
    }

    /// The dual norm `sup <x, y> / |y|`, when it has a closed form.
    pub fn dual(&self) -> Option<NormDescriptor> {
        let kind = match &self.kind {
            NormKind::L1 => NormKind::LInf,
            NormKind::L2 => NormKind::L2,
            NormKind::LInf => NormKind::L1,
            NormKind::WeightedL2(w) => NormKind::WeightedL2(w.iter().map(|v| 1.0 / v).collect()),
            NormKind::Custom(_) => return None,
        };
        Some(NormDescriptor { kind, dim: self.dim })
    }

    /// Closed-form volume of the unit ball in `R^dim`, if known.
    pub fn exact_unit_ball_volume(&self) -> Option<f64> {
        let m = self.dim as f64;
        match &self.kind {
            NormKind::L1 => Some(2f64.powf(m) / factorial(m)),
            NormKind::LInf => Some(2f64.powf(m)),
            NormKind::L2 => Some(euclidean_ball_volume(self.dim)),
            NormKind::WeightedL2(w) => {
                let det: f64 = w.iter().product();
                Some(euclidean_ball_volume(self.dim) / det.sqrt())
            }
            NormKind::Custom(_) => None,
        }
    }

    /// Half-widths of the axis-aligned box containing the unit ball:
    /// `sup { x_i : |x| <= 1 } = |e_i|_*`.
    pub fn unit_ball_half_widths(&self) -> Option<Vec<f64>> {
        match &self.kind {
            NormKind::L1 | NormKind::L2 | NormKind::LInf => Some(vec![1.0; self.dim]),
            NormKind::WeightedL2(w) => Some(w.iter().map(|v| 1.0 / v.sqrt()).collect()),
            NormKind::Custom(_) => None,
        }
    }
}

/// `pi^(m/2) / Gamma(m/2 + 1)`.
pub fn euclidean_ball_volume(m: usize) -> f64 {
    let m = m as f64;
    std::f64::consts::PI.powf(m / 2.0) / factorial(m / 2.0)
}

/// The L2-sum `{ |p|_*^2 + |q|^2 <= 1 }` of a norm (acting on `q`) and its
/// dual (acting on `p`).
#[derive(Debug, Clone)]
pub struct L2SumSpec {
    pub norm: NormDescriptor,
    pub dual_norm: NormDescriptor,
}

impl L2SumSpec {
    pub fn new(norm: NormDescriptor, dual_norm: NormDescriptor) -> Result<Self> {
        if norm.dim() != dual_norm.dim() {
            return Err(Error::invalid("norm and dual norm dimensions differ"));
        }
        Ok(Self { norm, dual_norm })
    }

    /// The pair with its closed-form dual.
    pub fn with_dual(norm: NormDescriptor) -> Result<Self> {
        let dual = norm
            .dual()
            .ok_or_else(|| Error::invalid("no closed-form dual for this norm"))?;
        Self::new(norm, dual)
    }

    /// `|q|_inf` with `|p|_1`, the square and its polar.
    pub fn l1_linf(n: usize) -> Self {
        Self::new(NormDescriptor::linf(n), NormDescriptor::l1(n)).expect("same dimension")
    }

    pub fn n(&self) -> usize {
        self.norm.dim()
    }

    /// Largest sampled value of `<p, q> / (|p|_* |q|)`; equals 1 when the two
    /// norms are dual to each other.
    pub fn duality_ratio(&self, directions: &[Vec<f64>]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for q in directions {
            let qn = self.norm.eval(q);
            for p in directions {
                let dot: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
                best = best.max(dot / (self.dual_norm.eval(p) * qn));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluations() {
        let x = [3.0, -4.0];
        assert_eq!(NormDescriptor::l1(2).eval(&x), 7.0);
        assert_eq!(NormDescriptor::l2(2).eval(&x), 5.0);
        assert_eq!(NormDescriptor::linf(2).eval(&x), 4.0);
        let w = NormDescriptor::new(NormKind::WeightedL2(vec![4.0, 1.0]), 2).unwrap();
        assert!((w.eval(&x) - (36.0f64 + 16.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn strata() {
        let l1 = NormDescriptor::l1(2);
        assert!(matches!(l1.gradient(&[1.0, 0.0]), Some(Err(Error::Stratum { .. }))));
        let linf = NormDescriptor::linf(3);
        match linf.gradient(&[1.0, -1.0, 0.5]) {
            Some(Err(Error::Stratum { indices })) => assert_eq!(indices, vec![0, 1]),
            other => panic!("expected stratum, got {other:?}"),
        }
        assert_eq!(linf.gradient(&[0.2, -1.0, 0.5]).unwrap().unwrap(), vec![0.0, -1.0, 0.0]);
    }

    #[test]
    fn bad_construction() {
        assert!(NormDescriptor::new(NormKind::L1, 0).is_err());
        assert!(NormDescriptor::new(NormKind::WeightedL2(vec![1.0, -1.0]), 2).is_err());
        assert!(NormDescriptor::new(NormKind::WeightedL2(vec![1.0]), 2).is_err());
        assert!(NormDescriptor::from_name("ell-7", 2).is_err());
    }

    #[test]
    fn dual_pairs_attain_ratio_one() {
        use crate::bodies::sphere::sphere_directions;
        let dirs = sphere_directions(2, 720, 0);
        for norm in [
            NormDescriptor::l1(2),
            NormDescriptor::linf(2),
            NormDescriptor::l2(2),
            NormDescriptor::new(NormKind::WeightedL2(vec![2.0, 0.5]), 2).unwrap(),
        ] {
            let pair = L2SumSpec::with_dual(norm).unwrap();
            let r = pair.duality_ratio(&dirs);
            assert!(r <= 1.0 + 1e-12 && r > 1.0 - 1e-4, "ratio {r}");
        }
    }
}
