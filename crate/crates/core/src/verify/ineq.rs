//! The comparison between the Viterbo threshold `4 (((n/2)!)^2/n!)^(1/n)` and
//! the period `2n asin((2n-1)/(n^2+(n-1)^2))` of the explicit trajectory, and
//! the auxiliary estimates used to prove it for all `n`.

use std::f64::consts::PI;

use serde::Serialize;

use super::l2sum_capacity_upper_bound;
use crate::pl_flow::nd_period_formula;
use crate::special::ln_factorial;

#[derive(Debug, Clone, Serialize)]
pub struct IneqCheck {
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `|lhs - rhs| <= 1e-12`
    pub equality: bool,
    /// Central binomial estimate at this `n`.
    pub stirling: bool,
    /// `sin x >= x - x^3/6` at `x = (pi n/2)^(1/2n) / n`.
    pub sine: bool,
    /// The logarithmic estimate at `x = 2n`; `None` when `2n < 10`.
    pub log_step: Option<bool>,
}

pub fn check_ineq(n: usize) -> IneqCheck {
    assert!(n >= 1, "check_ineq needs n >= 1");
    let lhs = l2sum_capacity_upper_bound(n);
    let rhs = nd_period_formula(n);
    let nf = n as f64;
    let x = (PI * nf / 2.0).powf(1.0 / (2.0 * nf)) / nf;
    IneqCheck {
        n,
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-12,
        equality: (lhs - rhs).abs() <= 1e-12,
        stirling: stirling_bound_holds(n),
        sine: sine_cubic_bound_holds(x),
        log_step: (2.0 * nf >= 10.0).then(|| log_step_holds(2.0 * nf)),
    }
}

/// `n! / ((n/2)!)^2 <= 2^n / sqrt(pi n / 2)`, compared in logarithms.
pub fn stirling_bound_holds(n: usize) -> bool {
    let nf = n as f64;
    let lhs = ln_factorial(nf) - 2.0 * ln_factorial(nf / 2.0);
    let rhs = nf * 2f64.ln() - 0.5 * (PI * nf / 2.0).ln();
    lhs <= rhs + 1e-12
}

/// `sin x >= x - x^3/6` for `x >= 0`.
pub fn sine_cubic_bound_holds(x: f64) -> bool {
    x >= 0.0 && x.sin() >= x - x.powi(3) / 6.0 - 1e-15
}

/// `ln x - ln(4/pi) >= 1 + (2/3) (pi/4)^(3/x) x^(3/x) / x`, the last step of
/// the chain, claimed for `x >= 10`.
pub fn log_step_holds(x: f64) -> bool {
    let lhs = x.ln() - (4.0 / PI).ln();
    let rhs = 1.0 + 2.0 / 3.0 * (PI / 4.0).powf(3.0 / x) * x.powf(3.0 / x) / x;
    lhs >= rhs
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainGridReport {
    pub n_max: usize,
    pub main_holds: bool,
    pub equality_only_at_one: bool,
    pub stirling_holds: bool,
    pub sine_holds: bool,
    pub log_step_holds: bool,
    pub first_failure: Option<usize>,
}

/// Evaluates the main inequality and the three estimates: `n = 1..=n_max`,
/// `x` on a grid of `[0, 4]` with step `1e-3` for the sine bound, and `x` on
/// `[10, 2 n_max]` with step `1/16` for the logarithmic step.
pub fn ineq_chain_grid(n_max: usize) -> ChainGridReport {
    let checks: Vec<IneqCheck> = (1..=n_max).map(check_ineq).collect();
    let first_failure = checks.iter().find(|c| !c.holds).map(|c| c.n);
    let x_top = (2 * n_max).max(10) as f64;
    let log_points = ((x_top - 10.0) * 16.0) as usize;
    ChainGridReport {
        n_max,
        main_holds: first_failure.is_none(),
        equality_only_at_one: checks.iter().all(|c| c.equality == (c.n == 1)),
        stirling_holds: checks.iter().all(|c| c.stirling),
        sine_holds: (0..=4000).all(|i| sine_cubic_bound_holds(i as f64 * 1e-3)) && checks.iter().all(|c| c.sine),
        log_step_holds: (0..=log_points).all(|i| log_step_holds(10.0 + i as f64 / 16.0)),
        first_failure,
    }
}
