//! Gamma-function helpers: real factorials and Gamma-extended binomials.

use crate::error::{Error, Result};
use statrs::function::gamma::{gamma, ln_gamma};

/// `x!` for real `x >= 0`, i.e. `Gamma(x + 1)`. Integer arguments up to 170
/// use the running product.
pub fn factorial(x: f64) -> f64 {
    if x.fract() == 0.0 && (0.0..=170.0).contains(&x) {
        return (2..=x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    gamma(x + 1.0)
}

/// `ln(x!)` for real `x >= 0`.
pub fn ln_factorial(x: f64) -> f64 {
    ln_gamma(x + 1.0)
}

/// Binomial coefficient extended to real arguments through Gamma:
/// `Gamma(n + 1) / (Gamma(k + 1) * Gamma(n - k + 1))`.
pub fn gamma_binomial(n: f64, k: f64) -> Result<f64> {
    if !(n.is_finite() && k.is_finite()) || n < 0.0 || k < 0.0 {
        return Err(Error::invalid(format!(
            "binomial needs nonnegative arguments, got ({n}, {k})"
        )));
    }
    if k > n {
        return Err(Error::invalid(format!("binomial needs n >= k, got ({n}, {k})")));
    }
    Ok((ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp())
}

/// `pi^n / n!`, the volume of the unit ball in dimension `2n`.
pub fn ball_volume_2n(n: usize) -> f64 {
    (n as f64 * std::f64::consts::PI.ln() - ln_factorial(n as f64)).exp()
}
