//! Gauss–Legendre rules and composite rules on intervals.

use crate::{Error, Result};

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[−1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order < 2 {
        return Err(Error::QuadratureOrder(order));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule on `[a, b]`: equal panels no wider than `max_panel`, each
/// with an `order`-point Gauss–Legendre rule. Returns `(node, weight)` pairs.
pub fn composite(a: f64, b: f64, order: usize, max_panel: f64) -> Result<Vec<(f64, f64)>> {
    if !(b > a) {
        return Err(Error::DegenerateInterval(a, b));
    }
    let (x, w) = gauss_legendre(order)?;
    let panels = ((b - a) / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + h / 2.0;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((mid + xi * h / 2.0, wi * h / 2.0));
        }
    }
    Ok(out)
}
