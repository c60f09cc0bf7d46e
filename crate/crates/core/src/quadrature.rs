//! Panel-adaptive Gauss–Legendre quadrature.
//!
//! Panels are bisected until a panel's rule and the sum over its two halves
//! agree. Integrable endpoint singularities at zero are handled by
//! [`graded_from_zero`], which lays geometric panels `[b 2^-(m+1), b 2^-m]`
//! down to a cutoff and delegates the remaining sliver to an analytic head.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 20;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton iteration.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Fixed-order Gauss–Legendre estimate on `[a, b]`.
pub fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    /// Sum of the accepted panels' bisection discrepancies (a pessimistic bound).
    pub error: f64,
    pub converged: bool,
}

impl Quad {
    fn zero() -> Self {
        Quad { value: 0.0, error: 0.0, converged: true }
    }

    fn add(self, other: Quad) -> Quad {
        Quad {
            value: self.value + other.value,
            error: self.error + other.error,
            converged: self.converged && other.converged,
        }
    }

    /// Converts a non-converged result into a quadrature error.
    pub fn into_result(self, requested: f64) -> Result<f64> {
        if self.converged && self.value.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::Quadrature { achieved: self.error, requested })
        }
    }
}

/// Tolerance settings for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_depth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-14, rel: 1e-12, max_depth: 30 }
    }
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Tolerance { rel, ..Default::default() }
    }
}

/// Adaptive bisection on `[a, b]`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Quad {
    if a == b {
        return Quad::zero();
    }
    let whole = panel(f, a, b);
    let target = tol.abs.max(tol.rel * whole.abs());
    refine(f, a, b, whole, target, b - a, tol.max_depth)
}

fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    target: f64,
    span: f64,
    depth: u32,
) -> Quad {
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    let refined = left + right;
    let diff = (refined - whole).abs();
    let budget = target * ((b - a) / span).max(1e-3);
    if diff <= budget || !diff.is_finite() {
        return Quad { value: refined, error: diff, converged: diff.is_finite() };
    }
    if depth == 0 {
        return Quad { value: refined, error: diff, converged: false };
    }
    refine(f, a, mid, left, target, span, depth - 1).add(refine(f, mid, b, right, target, span, depth - 1))
}

/// Integral over `(0, b]` of a function with an integrable singularity at zero.
///
/// Geometric panels cover `[b 2^-levels, b]`; `head(eps)` must return the
/// integral over `(0, eps]`, typically from the leading asymptotic form.
pub fn graded_from_zero<F, G>(f: &F, b: f64, levels: u32, head: G, tol: Tolerance) -> Quad
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut total = Quad::zero();
    let mut hi = b;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        total = total.add(adaptive(f, lo, hi, tol));
        hi = lo;
    }
    total.value += head(hi);
    total
}

/// Integral over `[b, inf)` with geometric panels `[b 2^m, b 2^(m+1)]` and an
/// analytic `tail(x_max)` for the remainder.
pub fn graded_to_infinity<F, G>(f: &F, b: f64, levels: u32, tail: G, tol: Tolerance) -> Quad
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut total = Quad::zero();
    let mut lo = b;
    for _ in 0..levels {
        let hi = 2.0 * lo;
        total = total.add(adaptive(f, lo, hi, tol));
        lo = hi;
    }
    total.value += tail(lo);
    total
}

/// `∫_0^eps x^s ln^j x dx` for `s > -1`.
pub fn power_log_head(s: f64, j: u32, eps: f64) -> f64 {
    let l = eps.ln();
    let q = s + 1.0;
    let mut acc = 0.0;
    let mut falling = 1.0;
    for i in 0..=j {
        if i > 0 {
            falling *= (j - i + 1) as f64;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * falling * l.powi((j - i) as i32) / q.powi(i as i32 + 1);
    }
    eps.powf(q) * acc
}

/// `∫_x^inf t^-q ln^j t dt` for `q > 1`.
pub fn power_log_tail(q: f64, j: u32, x: f64) -> f64 {
    let l = x.ln();
    let r = q - 1.0;
    let mut acc = 0.0;
    let mut falling = 1.0;
    for i in 0..=j {
        if i > 0 {
            falling *= (j - i + 1) as f64;
        }
        acc += falling * l.powi((j - i) as i32) / r.powi(i as i32 + 1);
    }
    x.powf(1.0 - q) * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in 0..(2 * ORDER) {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-13, "degree {deg}");
        }
    }

    #[test]
    fn odd_order_rule_has_zero_node() {
        let (x, w) = gauss_legendre(5);
        assert!(x[2].abs() < 1e-15);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let q = adaptive(&|x: f64| (20.0 * x).cos(), 0.0, std::f64::consts::PI, Tolerance::default());
        assert!(q.converged);
        assert!(q.value.abs() < 1e-12);
    }

    #[test]
    fn graded_power_singularity() {
        let s = -0.6;
        let q = graded_from_zero(&|x: f64| x.powf(s), 1.0, 40, |e| power_log_head(s, 0, e), Tolerance::default());
        assert!((q.value - 1.0 / (1.0 + s)).abs() < 1e-11, "{}", q.value);
    }

    #[test]
    fn graded_log_singularity() {
        // ∫_0^1 ln^2 x dx = 2
        let q = graded_from_zero(&|x: f64| x.ln().powi(2), 1.0, 40, |e| power_log_head(0.0, 2, e), Tolerance::default());
        assert!((q.value - 2.0).abs() < 1e-11);
    }

    #[test]
    fn algebraic_tail() {
        // ∫_1^inf x^-1.6 ln x dx = 1/0.6^2
        let f = |x: f64| x.powf(-1.6) * x.ln();
        let q = graded_to_infinity(&f, 1.0, 30, |x| power_log_tail(1.6, 1, x), Tolerance::default());
        assert!((q.value - 1.0 / 0.36).abs() < 1e-10);
    }

    #[test]
    fn non_convergence_is_reported() {
        let tol = Tolerance { abs: 0.0, rel: 1e-15, max_depth: 1 };
        let q = adaptive(&|x: f64| (1.0 / (x + 1e-9)).sin(), 0.0, 1.0, tol);
        assert!(!q.converged);
        assert!(matches!(q.into_result(1e-15), Err(Error::Quadrature { .. })));
    }
}
