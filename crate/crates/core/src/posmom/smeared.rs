use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::measure::ProbMeasure1D;
use crate::hilbert::{Effect, ProbVector};
use crate::{CMatrix, Error, Grid1D, Operator, Result, WaveFunction, C64};

/// Which canonical observable is smeared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Position,
    Momentum,
}

/// `E_ρ` (position kind) or `F_ν` (momentum kind) on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmearedObservable {
    pub kind: Kind,
    pub measure: ProbMeasure1D,
    pub grid: Grid1D,
}

/// Measure mass allowed outside the grid window.
pub const MEASURE_LEAKAGE_LIMIT: f64 = 1e-6;

impl SmearedObservable {
    pub fn position(measure: ProbMeasure1D, grid: Grid1D) -> Self {
        Self { kind: Kind::Position, measure, grid }
    }

    pub fn momentum(measure: ProbMeasure1D, grid: Grid1D) -> Self {
        Self { kind: Kind::Momentum, measure, grid }
    }

    /// Position or momentum nodes, as appropriate.
    pub fn nodes(&self) -> Vec<f64> {
        match self.kind {
            Kind::Position => self.grid.positions(),
            Kind::Momentum => self.grid.momenta(),
        }
    }

    fn spacing(&self) -> f64 {
        match self.kind {
            Kind::Position => self.grid.dx(),
            Kind::Momentum => self.grid.dp(),
        }
    }

    fn check_leakage(&self) -> Result<()> {
        let reach = self.spacing() * self.grid.n() as f64;
        let leakage = 1.0 - self.measure.mass_closed(-reach, reach);
        if leakage > MEASURE_LEAKAGE_LIMIT {
            return Err(Error::WindowLeakage { leakage, limit: MEASURE_LEAKAGE_LIMIT });
        }
        Ok(())
    }

    /// Probability masses of `ψ` at the nodes of the relevant lattice.
    fn node_masses(&self, psi: &WaveFunction) -> Vec<f64> {
        match self.kind {
            Kind::Position => psi.values.iter().map(|v| v.norm_sqr() * self.grid.dx()).collect(),
            Kind::Momentum => psi.momentum().iter().map(|v| v.norm_sqr() * self.grid.dp()).collect(),
        }
    }
}

/// Sorts half-open intervals and rejects empty or overlapping ones.
pub fn validate_intervals(xs: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut out = xs.to_vec();
    for &(a, b) in &out {
        if !(a < b) {
            return Err(Error::DegenerateInterval(a, b));
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    if let Some(w) = out.windows(2).find(|w| w[1].0 < w[0].1) {
        return Err(Error::OverlappingCells(format!("{:?} and {:?}", w[0], w[1])));
    }
    Ok(out)
}

/// The multiplier of a smeared effect: `ρ(X − z)` at every node `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmearedEffect {
    pub kind: Kind,
    pub grid: Grid1D,
    /// Clipped to `[0, 1]`.
    pub values: Vec<f64>,
    /// Largest amount clipped.
    pub clip_defect: f64,
}

impl SmearedEffect {
    /// Dense operator in orthonormal coordinates; `n × n`, so only for small
    /// grids.
    pub fn to_effect(&self) -> Effect {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| C64::new(v, 0.0)),
        ));
        let mat = match self.kind {
            Kind::Position => d,
            Kind::Momentum => {
                let f = self.grid.fourier_matrix();
                f.adjoint() * d * f
            }
        };
        Effect::new_unchecked(Operator::new(mat).expect("square"))
    }

    /// `⟨ψ, E ψ⟩`.
    pub fn expectation(&self, psi: &WaveFunction) -> f64 {
        let obs = SmearedObservable { kind: self.kind, measure: ProbMeasure1D::dirac(0.0), grid: self.grid };
        obs.node_masses(psi).iter().zip(&self.values).map(|(m, v)| m * v).sum()
    }
}

/// `E_ρ(X)` for a union `X` of half-open intervals (infinite endpoints
/// allowed). An empty union gives the zero effect.
pub fn smeared_effect(obs: &SmearedObservable, intervals: &[(f64, f64)]) -> Result<SmearedEffect> {
    let xs = validate_intervals(intervals)?;
    obs.check_leakage()?;
    let mut clip_defect = 0.0f64;
    let values = obs
        .nodes()
        .iter()
        .map(|&z| {
            let v: f64 = xs.iter().map(|&(a, b)| obs.measure.mass_half_open(a - z, b - z)).sum();
            clip_defect = clip_defect.max(v - 1.0).max(-v);
            v.clamp(0.0, 1.0)
        })
        .collect();
    Ok(SmearedEffect { kind: obs.kind, grid: obs.grid, values, clip_defect })
}

/// Linear convolution of two real sequences by FFT.
pub(crate) fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |v: &[f64]| {
        let mut out = vec![C64::new(0.0, 0.0); size];
        for (o, x) in out.iter_mut().zip(v) {
            o.re = *x;
        }
        out
    };
    let (mut fa, mut fb) = (pad(a), pad(b));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let mut prod: Vec<C64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    inv.process(&mut prod);
    prod[..len].iter().map(|v| v.re / size as f64).collect()
}

/// `(μ_ψ ∗ ρ)(X)` for each cell of a disjoint family of half-open intervals,
/// computed by convolving the node masses of `ψ` with the measure.
///
/// The measure's density, if any, must share the lattice spacing of the
/// observable's nodes.
pub fn distribution(psi: &WaveFunction, obs: &SmearedObservable, partition: &[(f64, f64)]) -> Result<ProbVector> {
    if psi.grid != obs.grid {
        return Err(Error::GridMismatch("state and observable live on different grids".into()));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("wave function norm {norm}")));
    }
    validate_intervals(partition)?;
    obs.check_leakage()?;
    let nodes = obs.nodes();
    let dz = obs.spacing();
    let masses = obs.node_masses(psi);
    let mut prefix = vec![0.0];
    prefix.extend(masses.iter().scan(0.0, |acc, m| {
        *acc += m;
        Some(*acc)
    }));

    let conv = match obs.measure.density() {
        None => None,
        Some(d) => {
            if (d.dx - dz).abs() > 1e-12 * dz {
                return Err(Error::GridMismatch(format!("measure spacing {} differs from lattice spacing {dz}", d.dx)));
            }
            Some(CellDensity::new(nodes[0] + d.x0, dz, convolve(&masses, &d.values)))
        }
    };

    let raw = partition
        .iter()
        .map(|&(a, b)| {
            let mut p = conv.as_ref().map_or(0.0, |c| c.cdf(b) - c.cdf(a));
            for &(t, w) in obs.measure.atoms() {
                let lo = nodes.partition_point(|&z| !(a - z <= t));
                let hi = nodes.partition_point(|&z| t < b - z);
                if hi > lo {
                    p += w * (prefix[hi] - prefix[lo]);
                }
            }
            p
        })
        .collect();
    Ok(ProbVector::from_raw(raw))
}

/// Piecewise-constant density on cells centred at `x0 + k·dx`.
struct CellDensity {
    left: f64,
    dx: f64,
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl CellDensity {
    fn new(x0: f64, dx: f64, values: Vec<f64>) -> Self {
        let mut prefix = vec![0.0];
        let mut acc = 0.0;
        for v in &values {
            acc += v * dx;
            prefix.push(acc);
        }
        Self { left: x0 - dx / 2.0, dx, values, prefix }
    }

    fn cdf(&self, t: f64) -> f64 {
        let u = (t - self.left) / self.dx;
        if u <= 0.0 {
            return 0.0;
        }
        let n = self.values.len();
        if u >= n as f64 {
            return self.prefix[n];
        }
        let i = u.floor() as usize;
        self.prefix[i] + self.values[i] * self.dx * (u - i as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{outcome_distribution, Cell, Outcome, Pom};
    use crate::phasespace::states::gaussian;
    use crate::posmom::measure::Density;
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn grid() -> Grid1D {
        Grid1D::symmetric(512, 20.0).unwrap()
    }

    fn unit_gaussian(g: &Grid1D) -> ProbMeasure1D {
        ProbMeasure1D::gaussian_on(0.0, 1.0, g.x0(), g.dx(), g.n()).unwrap()
    }

    #[test]
    fn dirac_gives_sharp_position() {
        let g = grid();
        let obs = SmearedObservable::position(ProbMeasure1D::dirac(0.0), g);
        let e = smeared_effect(&obs, &[(-1.0, 2.0)]).unwrap();
        for (j, v) in e.values.iter().enumerate() {
            let x = g.x(j);
            assert_eq!(*v, if (-1.0..2.0).contains(&x) { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn gaussian_half_line_is_normal_cdf() {
        let g = Grid1D::symmetric(4096, 20.0).unwrap();
        let obs = SmearedObservable::position(unit_gaussian(&g), g);
        let e = smeared_effect(&obs, &[(0.0, f64::INFINITY)]).unwrap();
        let normal = Normal::standard();
        for j in (0..g.n()).step_by(97) {
            assert!((e.values[j] - normal.cdf(g.x(j))).abs() < 1e-5);
        }
        assert!((e.values[g.nearest_index(0.0)] - 0.5).abs() < 1e-12);
        let whole = smeared_effect(&obs, &[(f64::NEG_INFINITY, f64::INFINITY)]).unwrap();
        assert!(whole.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let empty = smeared_effect(&obs, &[]).unwrap();
        assert!(empty.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dirac_shift_translates_distribution() {
        let g = grid();
        let psi = gaussian(g, 0.5, 0.0);
        let t = 3.0 * g.dx();
        let shifted = distribution(&psi, &SmearedObservable::position(ProbMeasure1D::dirac(t), g), &[(0.0, 2.0)]).unwrap();
        let sharp = distribution(&psi, &SmearedObservable::position(ProbMeasure1D::dirac(0.0), g), &[(-t, 2.0 - t)]).unwrap();
        assert!((shifted.raw[0] - sharp.raw[0]).abs() < 1e-14);
    }

    #[test]
    fn gaussian_convolution_is_n02() {
        let g = Grid1D::symmetric(4096, 20.0).unwrap();
        let psi = gaussian(g, 0.25, 0.0); // |ψ|² is N(0, 1)
        let obs = SmearedObservable::position(unit_gaussian(&g), g);
        let cells = [(f64::NEG_INFINITY, -1.0), (-1.0, 0.3), (0.3, 2.0), (2.0, f64::INFINITY)];
        let dist = distribution(&psi, &obs, &cells).unwrap();
        let n02 = Normal::new(0.0, 2f64.sqrt()).unwrap();
        for (p, &(a, b)) in dist.raw.iter().zip(&cells) {
            assert!((p - (n02.cdf(b) - n02.cdf(a))).abs() < 1e-5);
        }
        assert!((dist.raw.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fourier_duality() {
        // dx = dp makes the position and momentum lattices coincide.
        let n = 64;
        let dx = (std::f64::consts::TAU / n as f64).sqrt();
        let g = Grid1D::new(n, -(n as f64 / 2.0) * dx, dx).unwrap();
        let rho = ProbMeasure1D::gaussian_on(0.0, 0.6, g.x0(), dx, n).unwrap();
        let x = [(-1.0, 0.5), (1.2, 3.0)];
        let pos = smeared_effect(&SmearedObservable::position(rho.clone(), g), &x).unwrap();
        let mom = smeared_effect(&SmearedObservable::momentum(rho, g), &x).unwrap();
        let f = g.fourier_matrix();
        let conj = f.adjoint() * pos.to_effect().op().matrix() * &f;
        assert!((conj - mom.to_effect().op().matrix()).norm() < 1e-9);
    }

    #[test]
    fn leakage_and_bad_partitions() {
        let g = grid();
        let far = SmearedObservable::position(ProbMeasure1D::dirac(100.0), g);
        assert!(matches!(smeared_effect(&far, &[(0.0, 1.0)]), Err(Error::WindowLeakage { .. })));
        let obs = SmearedObservable::position(ProbMeasure1D::dirac(0.0), g);
        let psi = gaussian(g, 0.5, 0.0);
        assert!(matches!(distribution(&psi, &obs, &[(0.0, 2.0), (1.0, 3.0)]), Err(Error::OverlappingCells(_))));
        let coarse = SmearedObservable::position(ProbMeasure1D::uniform(-1.0, 1.0, 3).unwrap(), g);
        assert!(matches!(distribution(&psi, &coarse, &[(0.0, 1.0)]), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn null_sets() {
        let g = grid();
        let obs = SmearedObservable::position(unit_gaussian(&g), g);
        let tiny = smeared_effect(&obs, &[(0.1, 0.1 + 1e-3)]).unwrap();
        assert!(tiny.values.iter().any(|&v| v > 0.0));
        let sharp = SmearedObservable::position(ProbMeasure1D::dirac(0.0), g);
        // No node falls in this gap, so the sharp effect vanishes.
        let between = smeared_effect(&sharp, &[(g.x(300) + 0.1 * g.dx(), g.x(300) + 0.2 * g.dx())]).unwrap();
        assert!(between.values.iter().all(|&v| v == 0.0));
    }

    fn mixed_measure(g: &Grid1D, w: f64, t: f64, sigma: f64) -> ProbMeasure1D {
        let d = ProbMeasure1D::gaussian_on(0.3, sigma, g.x0(), g.dx(), g.n()).unwrap();
        let atom = ProbMeasure1D::dirac(t);
        d.mix(1.0 - w, &atom).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn two_routes_agree(a in 0.2f64..2.0, b in -1.0f64..1.0, w in 0.0f64..1.0, t in -2.0f64..2.0, sigma in 0.3f64..2.0,
                            cut1 in -3.0f64..-0.1, cut2 in 0.1f64..3.0, momentum in any::<bool>()) {
            let g = Grid1D::symmetric(64, 12.0).unwrap();
            let psi = gaussian(g, a, b).normalized().unwrap();
            let lattice = if momentum { Grid1D::new(64, g.p(0), g.dp()).unwrap() } else { g };
            let rho = mixed_measure(&lattice, w, t, sigma);
            let obs = SmearedObservable { kind: if momentum { Kind::Momentum } else { Kind::Position }, measure: rho, grid: g };
            let cells = [(f64::NEG_INFINITY, cut1), (cut1, cut2), (cut2, f64::INFINITY)];
            let conv = distribution(&psi, &obs, &cells).unwrap();
            let mut outcomes = Vec::new();
            let mut effects = Vec::new();
            for &(lo, hi) in &cells {
                outcomes.push(Outcome::new(format!("[{lo},{hi})"), Cell::Interval { lo, hi }));
                effects.push(smeared_effect(&obs, &[(lo, hi)]).unwrap().to_effect());
            }
            let pom = Pom::new("R", outcomes, effects).unwrap();
            let state = crate::grid::GridState::pure(psi).unwrap().to_state().unwrap();
            let dense = outcome_distribution(&state, &pom).unwrap();
            for (x, y) in conv.raw.iter().zip(&dense.raw) {
                prop_assert!((x - y).abs() < 1e-10, "{} vs {}", x, y);
            }
            prop_assert!((conv.raw.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn density_lattice_offsets_are_respected() {
        let g = grid();
        let psi = gaussian(g, 0.5, 0.0);
        // A one-cell density centred at 2.0 acts like a box kernel there.
        let rho = ProbMeasure1D::new(vec![], Some(Density { x0: 32.0 * g.dx(), dx: g.dx(), values: vec![1.0 / g.dx()] })).unwrap();
        let obs = SmearedObservable::position(rho, g);
        let conv = distribution(&psi, &obs, &[(0.0, 1.5)]).unwrap();
        let via = smeared_effect(&obs, &[(0.0, 1.5)]).unwrap().expectation(&psi);
        assert!((conv.raw[0] - via).abs() < 1e-12);
    }
}
