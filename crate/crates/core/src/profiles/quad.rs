/// Adaptive Simpson quadrature of `f` over `[a, b]`, starting from `panels`
/// equal panels. `tol` is relative to the magnitude of the integral.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut pieces = Vec::with_capacity(panels);
    for i in 0..panels {
        let x0 = a + h * i as f64;
        let x1 = if i + 1 == panels { b } else { x0 + h };
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0), f(xm), f(x1));
        pieces.push((x0, x1, f0, fm, f1, (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1)));
    }
    let scale = pieces.iter().map(|p| p.5.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let eps = tol * scale / panels as f64;
    pieces
        .into_iter()
        .map(|(x0, x1, f0, fm, f1, whole)| refine(&mut f, x0, x1, f0, fm, f1, whole, eps, 48))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_kinked_and_smooth() {
        let v = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 4, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
        let v = adaptive_simpson(|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1, 1e-12);
        assert!((v - 0.29).abs() < 1e-12);
    }
}
