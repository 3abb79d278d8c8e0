//! Fixtures shared by the benchmarks.

use covpom::grid::GridState;
use covpom::phasespace::random_state;
use covpom::posmom::ProbMeasure1D;
use covpom::{make_state, CVector, Grid1D, State, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The production grid: 4096 points on [−20, 20).
pub fn production_grid() -> Grid1D {
    Grid1D::symmetric(4096, 20.0).expect("valid grid")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Full-rank random density operator on `C^d`.
pub fn random_density_matrix(rng: &mut ChaCha8Rng, d: usize) -> State {
    let terms = (0..d)
        .map(|_| {
            let v = CVector::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            (rng.random_range(0.0..1.0), v)
        })
        .collect();
    make_state(terms).expect("positive weights")
}

pub fn random_grid_state(seed: u64, grid: Grid1D) -> GridState {
    random_state(&mut rng(seed), grid, 3, 4).expect("nonzero state")
}

/// Unit Gaussian sampled with spacing `0.002`.
pub fn fine_gaussian() -> ProbMeasure1D {
    let dx = 0.002;
    ProbMeasure1D::gaussian_on(0.0, 1.0, -6000.0 * dx, dx, 12_001).expect("valid lattice")
}
