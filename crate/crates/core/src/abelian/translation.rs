//! Translation-covariant localisation observables on a periodic grid.
//!
//! The Hilbert space is realised on the momentum side: vectors are indexed
//! by the momentum nodes `p_k` and carry a generating unit vector `h_k`.
//! Outcomes are sets of position nodes.

use rustfft::FftPlanner;

use crate::{CMatrix, CVector, Effect, Error, Grid1D, Operator, Result, C64};

/// Indicator of the position nodes in a union of half-open intervals.
pub fn grid_indicator(grid: &Grid1D, intervals: &[(f64, f64)]) -> Result<Vec<bool>> {
    let hi_edge = grid.x0() + grid.length();
    for &(a, b) in intervals {
        if !(a < b) {
            return Err(Error::DegenerateInterval(a, b));
        }
        if a < grid.x0() - 1e-12 || b > hi_edge + 1e-12 {
            return Err(Error::OutsideGrid(format!("[{a}, {b}) leaves [{}, {hi_edge})", grid.x0())));
        }
    }
    Ok((0..grid.n())
        .map(|j| {
            let x = grid.x(j);
            intervals.iter().any(|&(a, b)| x >= a - 1e-12 * grid.dx() && x < b - 1e-12 * grid.dx())
        })
        .collect())
}

/// `E(X)_{k,k'} = c(k − k')·⟨h_k, h_{k'}⟩` with
/// `c(Δ) = (1/n) Σ_{j : x_j ∈ X} e^{−iΔ·dp·x_j}`.
///
/// Conjugating by the grid Fourier map sends `E(X)` to multiplication by
/// `χ_X` when all `h_k` coincide; see [`to_position_side`].
pub fn translation_covariant_effect(grid: &Grid1D, h: &[CVector], intervals: &[(f64, f64)]) -> Result<Effect> {
    let n = grid.n();
    if h.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: h.len() });
    }
    let m = h[0].len();
    for (k, v) in h.iter().enumerate() {
        if v.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: v.len() });
        }
        if (v.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("h at momentum node {k} is not a unit vector")));
        }
    }
    let chi = grid_indicator(grid, intervals)?;

    // FFT of the indicator gives c(Δ mod n) up to the origin phase.
    let mut buf: Vec<C64> = chi.iter().map(|&b| C64::new(if b { 1.0 } else { 0.0 }, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dp = grid.dp();
    let coeff = |delta: i64| -> C64 {
        let r = delta.rem_euclid(n as i64) as usize;
        buf[r] * C64::from_polar(1.0 / n as f64, -(delta as f64) * dp * grid.x0())
    };
    let mat = CMatrix::from_fn(n, n, |k, kp| coeff(k as i64 - kp as i64) * h[k].dotc(&h[kp]));
    Ok(Effect::new_unchecked(Operator::new(mat)?))
}

/// `F* A F`: an operator on the momentum side viewed in position
/// coordinates.
pub fn to_position_side(grid: &Grid1D, a: &Operator) -> Operator {
    let f = grid.fourier_matrix();
    Operator::new(f.adjoint() * a.matrix() * f).expect("square")
}

/// The family `h_k = (cos θ(p_k), sin θ(p_k))`.
pub fn rotating_family(grid: &Grid1D, angle: impl Fn(f64) -> f64) -> Vec<CVector> {
    grid.momenta()
        .into_iter()
        .map(|p| {
            let t = angle(p);
            CVector::from_vec(vec![C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)])
        })
        .collect()
}

/// The constant family `h_k = (1)`.
pub fn constant_family(grid: &Grid1D) -> Vec<CVector> {
    vec![CVector::from_element(1, C64::new(1.0, 0.0)); grid.n()]
}
