//! Reference states on a grid: the Gaussian family, Hermite functions and
//! random low-rank mixtures of them.

use std::f64::consts::PI;

use rand::Rng;

use crate::grid::GridState;
use crate::{Grid1D, Result, WaveFunction, C64};

/// `φ_{a,b}(x) = (2a/π)^{1/4} e^{−(a+ib)x²}`; `a = 1/2, b = 0` is the
/// ground state.
pub fn gaussian(grid: Grid1D, a: f64, b: f64) -> WaveFunction {
    let c = (2.0 * a / PI).powf(0.25);
    WaveFunction::from_fn(grid, |x| C64::new(c, 0.0) * (-C64::new(a, b) * x * x).exp())
}

/// The ground state as a pure grid state.
pub fn ground_state(grid: Grid1D) -> GridState {
    GridState::pure(gaussian(grid, 0.5, 0.0)).expect("nonzero Gaussian")
}

/// Position density of `φ_{a,b}`: `√(2a/π) e^{−2ax²}`.
pub fn gaussian_position_density(a: f64, x: f64) -> f64 {
    (2.0 * a / PI).sqrt() * (-2.0 * a * x * x).exp()
}

/// Momentum density of `φ_{a,b}`:
/// `(a/(2π(a²+b²)))^{1/2} exp(−a p²/(2(a²+b²)))`.
pub fn gaussian_momentum_density(a: f64, b: f64, p: f64) -> f64 {
    let s = a * a + b * b;
    (a / (2.0 * PI * s)).sqrt() * (-a * p * p / (2.0 * s)).exp()
}

/// Hermite functions `h_0, …, h_{count−1}` sampled on the grid.
pub fn hermite_functions(grid: Grid1D, count: usize) -> Vec<WaveFunction> {
    let xs = grid.positions();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    for k in 0..count {
        let row = match k {
            0 => xs.iter().map(|x| PI.powf(-0.25) * (-x * x / 2.0).exp()).collect(),
            1 => xs.iter().zip(&out[0]).map(|(x, h0)| 2f64.sqrt() * x * h0).collect(),
            _ => {
                let (a, b) = ((2.0 / k as f64).sqrt(), ((k - 1) as f64 / k as f64).sqrt());
                xs.iter()
                    .zip(&out[k - 1])
                    .zip(&out[k - 2])
                    .map(|((x, h1), h2)| a * x * h1 - b * h2)
                    .collect()
            }
        };
        out.push(row);
    }
    out.into_iter()
        .map(|v| WaveFunction { grid, values: v.into_iter().map(|r| C64::new(r, 0.0)).collect() })
        .collect()
}

/// A random state of rank at most `max_rank`, built from random complex
/// combinations of the first `modes` Hermite functions, squeezed and
/// displaced by random amounts so that the ensemble is not confined to one
/// scale.
pub fn random_state<R: Rng>(rng: &mut R, grid: Grid1D, max_rank: usize, modes: usize) -> Result<GridState> {
    let rank = rng.random_range(1..=max_rank.max(1));
    let scale: f64 = rng.random_range(0.6..1.6);
    let centre: f64 = rng.random_range(-1.5..1.5);
    let boost: f64 = rng.random_range(-1.5..1.5);
    let terms = (0..rank)
        .map(|_| {
            let coeffs: Vec<C64> = (0..modes)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let values: Vec<C64> = grid
                .positions()
                .iter()
                .map(|&x| {
                    let h = hermite_at(modes, (x - centre) / scale);
                    let amp: C64 = coeffs.iter().zip(&h).map(|(c, v)| c * v).sum();
                    amp * C64::from_polar(1.0 / scale.sqrt(), boost * x)
                })
                .collect();
            (rng.random_range(0.05..1.0), values)
        })
        .collect();
    GridState::new(grid, terms)
}

/// Values of the first `count` Hermite functions at one point.
pub fn hermite_at(count: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(count);
    for k in 0..count {
        let v = match k {
            0 => PI.powf(-0.25) * (-x * x / 2.0).exp(),
            1 => 2f64.sqrt() * x * h[0],
            _ => (2.0 / k as f64).sqrt() * x * h[k - 1] - ((k - 1) as f64 / k as f64).sqrt() * h[k - 2],
        };
        h.push(v);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let g = Grid1D::symmetric(512, 20.0).unwrap();
        let h = hermite_functions(g, 12);
        for i in 0..12 {
            for j in 0..12 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((h[i].inner(&h[j]) - target).norm() < 1e-12, "({i},{j})");
            }
        }
        let idx = g.nearest_index(0.7);
        let x = g.x(idx);
        let at = hermite_at(12, x);
        for k in 0..12 {
            assert!((h[k].values[idx].re - at[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_family_is_normalised() {
        let g = Grid1D::symmetric(1024, 20.0).unwrap();
        for (a, b) in [(0.5, 0.0), (1.0, 1.0), (5.0, -2.0)] {
            let psi = gaussian(g, a, b);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
            let phi = psi.momentum();
            for k in (0..g.n()).step_by(37) {
                let p = g.p(k);
                assert!((phi[k].norm_sqr() - gaussian_momentum_density(a, b, p)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn random_states_are_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = Grid1D::symmetric(1024, 20.0).unwrap();
        for _ in 0..5 {
            let s = random_state(&mut rng, g, 3, 6).unwrap();
            assert!(s.trace_defect() < 1e-12);
            // Negligible mass near the window edges.
            let d = s.position_density();
            let edge: f64 = d[..64].iter().chain(&d[g.n() - 64..]).sum::<f64>() * g.dx();
            assert!(edge < 1e-12);
        }
    }
}
