//! Flow integrators used as oracles: the matrix exponential for linear flows
//! and classical Runge-Kutta for general Hamiltonians.

use nalgebra::{DMatrix, DVector};

use super::{flow_matrix, QuadraticForm, SymplecticStructure};
use crate::bodies::ConvexHamiltonian;
use crate::error::{Error, Result};

/// `exp(M)` by scaling and squaring of a degree-24 Taylor polynomial.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let norm1 = (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let b = m / 2f64.powi(squarings);
    let dim = m.nrows();
    let mut term = DMatrix::<f64>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..=24 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `x(t)` for `x' = 2 J A x`, `x(0) = x0`.
pub fn linear_flow(a: &QuadraticForm, x0: &[f64], t: f64) -> Result<Vec<f64>> {
    let f = flow_matrix(a)?;
    let e = expm(&(f * t));
    Ok((e * DVector::from_column_slice(x0)).iter().copied().collect())
}

/// Integrates `x' = J grad H(x)` from `x0` over `[0, t]` with `steps` RK4 steps.
/// Returns the final state; gradient failures (strata) are propagated.
pub fn integrate_hamiltonian<H: ConvexHamiltonian + ?Sized>(
    h: &H,
    x0: &[f64],
    t: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    if !h.dim().is_multiple_of(2) || x0.len() != h.dim() {
        return Err(Error::invalid("phase-space dimension mismatch"));
    }
    if steps == 0 {
        return Err(Error::invalid("at least one step required"));
    }
    let sym = SymplecticStructure::new(h.dim() / 2);
    let field = |x: &[f64]| -> Result<Vec<f64>> { Ok(sym.velocity(&h.gradient(x)?)) };
    let dt = t / steps as f64;
    let mut x = x0.to_vec();
    let shifted = |x: &[f64], k: &[f64], c: f64| -> Vec<f64> {
        x.iter().zip(k).map(|(a, b)| a + c * b).collect()
    };
    for _ in 0..steps {
        let k1 = field(&x)?;
        let k2 = field(&shifted(&x, &k1, 0.5 * dt))?;
        let k3 = field(&shifted(&x, &k2, 0.5 * dt))?;
        let k4 = field(&shifted(&x, &k3, dt))?;
        for i in 0..x.len() {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(x)
}
