use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Grid1D, WaveFunction, C64};

/// How far a requested phase-space point moved when snapped to the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snap {
    pub q: f64,
    pub p: f64,
    pub q_shift: f64,
    pub p_shift: f64,
}

/// Snaps `q` to a multiple of `dx` and `p` to a multiple of `dp`.
pub fn snap(grid: &Grid1D, q: f64, p: f64) -> (i64, i64, Snap) {
    let m = (q / grid.dx()).round() as i64;
    let l = (p / grid.dp()).round() as i64;
    let (qs, ps) = (m as f64 * grid.dx(), l as f64 * grid.dp());
    (m, l, Snap { q: qs, p: ps, q_shift: qs - q, p_shift: ps - p })
}

/// `(W(q,p)ψ)(x) = e^{ip(x − q/2)} ψ(x − q)` on the periodic grid.
///
/// `q` and `p` are snapped to the lattice first, which keeps the map exactly
/// unitary and the composition law exact up to a phase.
pub fn weyl_apply(q: f64, p: f64, psi: &WaveFunction) -> (WaveFunction, Snap) {
    let grid = psi.grid;
    let n = grid.n();
    let (m, _, s) = snap(&grid, q, p);
    let values = (0..n)
        .map(|j| {
            let src = (j as i64 - m).rem_euclid(n as i64) as usize;
            C64::from_polar(1.0, s.p * (grid.x(j) - s.q / 2.0)) * psi.values[src]
        })
        .collect();
    (WaveFunction { grid, values }, s)
}

/// Weyl translation without snapping: `ψ(x − q)` by a Fourier phase, then the
/// boost. Accurate for states well inside the window and band-limited on the
/// grid.
pub fn weyl_apply_spectral(q: f64, p: f64, psi: &WaveFunction) -> WaveFunction {
    let grid = psi.grid;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(grid.n());
    let inv = planner.plan_fft_inverse(grid.n());
    let shifted = shift_spectral(&grid, &*fwd, &*inv, q, &psi.values);
    let values = shifted
        .iter()
        .enumerate()
        .map(|(j, v)| C64::from_polar(1.0, p * (grid.x(j) - q / 2.0)) * v)
        .collect();
    WaveFunction { grid, values }
}

pub(crate) fn shift_spectral(
    grid: &Grid1D,
    fwd: &dyn rustfft::Fft<f64>,
    inv: &dyn rustfft::Fft<f64>,
    q: f64,
    values: &[C64],
) -> Vec<C64> {
    let mut phi = grid.to_momentum_with(fwd, values);
    for (k, v) in phi.iter_mut().enumerate() {
        *v *= C64::from_polar(1.0, -grid.p(k) * q);
    }
    grid.from_momentum_with(inv, &phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::states::gaussian;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid1D {
        Grid1D::symmetric(256, 12.0).unwrap()
    }

    fn random_wave(rng: &mut ChaCha8Rng, g: Grid1D) -> WaveFunction {
        let v = (0..g.n()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        WaveFunction::new(g, v).unwrap().normalized().unwrap()
    }

    #[test]
    fn identity_and_boost() {
        let g = grid();
        let psi = gaussian(g, 0.5, 0.3);
        let (same, _) = weyl_apply(0.0, 0.0, &psi);
        assert_eq!(same, psi);
        let (boosted, s) = weyl_apply(0.0, 2.0, &psi);
        for j in 0..g.n() {
            let expected = C64::from_polar(1.0, s.p * g.x(j)) * psi.values[j];
            assert!((boosted.values[j] - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn shifted_gaussian() {
        let g = grid();
        let psi = gaussian(g, 0.5, 0.0);
        let (moved, s) = weyl_apply(2.0, 0.0, &psi);
        assert!(s.q_shift.abs() <= g.dx() / 2.0);
        let expected = WaveFunction::from_fn(g, |x| C64::new((1.0 / std::f64::consts::PI).powf(0.25) * (-(x - s.q).powi(2) / 2.0).exp(), 0.0));
        for j in 0..g.n() {
            assert!((moved.values[j] - expected.values[j]).norm() < 1e-12);
        }
        assert!((moved.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_matches_snapped_on_lattice() {
        let g = grid();
        let psi = gaussian(g, 0.8, 0.2);
        let (q, p) = (10.0 * g.dx(), 3.0 * g.dp());
        let (a, _) = weyl_apply(q, p, &psi);
        let b = weyl_apply_spectral(q, p, &psi);
        for j in 0..g.n() {
            assert!((a.values[j] - b.values[j]).norm() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn unitary_and_projective(seed in any::<u64>(), q1 in -5.0f64..5.0, p1 in -3.0f64..3.0, q2 in -5.0f64..5.0, p2 in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = grid();
            let psi = random_wave(&mut rng, g);
            let (a, s1) = weyl_apply(q1, p1, &psi);
            prop_assert!((a.norm() - 1.0).abs() < 1e-12);
            let (ab, s2) = weyl_apply(q2, p2, &a);
            let (direct, _) = weyl_apply(s1.q + s2.q, s1.p + s2.p, &psi);
            // W(q₂,p₂)W(q₁,p₁) = e^{i(p₂q₁ − q₂p₁)/2} W(q₁+q₂, p₁+p₂).
            let phase = C64::from_polar(1.0, (s2.p * s1.q - s2.q * s1.p) / 2.0);
            for j in 0..g.n() {
                prop_assert!((ab.values[j] - phase * direct.values[j]).norm() < 1e-10);
            }
        }
    }
}
