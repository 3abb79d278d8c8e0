use serde::{Deserialize, Serialize};

use super::measure::ProbMeasure1D;
use super::resolution::{resolution_limit, window_max};
use super::smeared::{convolve, smeared_effect, SmearedObservable};
use crate::grid::GridState;
use crate::hilbert::commutator_norm;
use crate::{Error, Grid1D, Result};

/// Outcome of the three equivalent sharpness conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    /// Location of the single atom when the measure is a point mass.
    pub sharp_at: Option<f64>,
    /// The measure is a single atom of full weight.
    pub point_mass: bool,
    /// Every sampled open interval has an effect of norm one.
    pub full_norm: bool,
    /// Every sampled effect is a projection.
    pub projections: bool,
    pub consistent: bool,
}

const SHARP_TOL: f64 = 1e-9;

/// Interval lengths probed by [`sharpness_test`].
pub const PROBE_LENGTHS: [f64; 5] = [1e-4, 1e-3, 1e-2, 0.1, 1.0];

/// Decides whether `E_ρ` is sharp by three independent routes.
pub fn sharpness_test(rho: &ProbMeasure1D) -> SharpnessReport {
    let point_mass = rho.atoms().len() == 1 && rho.atoms()[0].1 >= 1.0 - SHARP_TOL && rho.density_mass() <= SHARP_TOL;
    // ‖E_ρ(U)‖ for an open interval of length ℓ is the largest open window
    // mass; a slightly shrunken closed window stands in for it.
    let full_norm = PROBE_LENGTHS.iter().all(|&l| window_max(rho, l * (1.0 - SHARP_TOL)) >= 1.0 - SHARP_TOL);
    let projections = effects_are_projections(rho);
    let consistent = point_mass == full_norm && full_norm == projections;
    SharpnessReport { sharp_at: point_mass.then(|| rho.atoms()[0].0), point_mass, full_norm, projections, consistent }
}

fn effects_are_projections(rho: &ProbMeasure1D) -> bool {
    let centre = rho.mean();
    let grid = Grid1D::new(256, centre - 8.0, 1.0 / 16.0).expect("valid grid");
    let obs = SmearedObservable::position(rho.clone(), grid);
    let probes = [(centre - 0.5, centre + 0.5), (centre - 1.3, centre + 0.2), (centre, centre + 3.7)];
    probes.iter().all(|&x| match smeared_effect(&obs, &[x]) {
        Ok(e) => e.values.iter().all(|&v| v.min(1.0 - v).abs() <= SHARP_TOL),
        // Mass reaching beyond the probe grid means the measure is spread
        // out far beyond a point.
        Err(_) => false,
    })
}

/// Variances along the two routes and their product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub value: f64,
    pub var_position: f64,
    pub var_momentum: f64,
    pub var_rho: f64,
    pub var_nu: f64,
    /// Variance of the smeared position distribution by convolution.
    pub var_e: f64,
    pub var_f: f64,
    /// Largest disagreement between the convolution and the sum rule.
    pub route_gap: f64,
    pub pass: bool,
    pub tol: f64,
}

pub const UNCERTAINTY_TOL: f64 = 1e-3;

/// `(mass, mean, variance)` of `Σ m_j δ_{z_j} ∗ ρ`, reading density samples
/// as point masses at their nodes.
fn convolved_moments(z0: f64, dz: f64, masses: &[f64], rho: &ProbMeasure1D) -> Result<(f64, f64, f64)> {
    let mut m = [0.0f64; 3];
    let mut add = |x: f64, w: f64| {
        m[0] += w;
        m[1] += w * x;
        m[2] += w * x * x;
    };
    if let Some(d) = rho.density() {
        if (d.dx - dz).abs() > 1e-12 * dz {
            return Err(Error::GridMismatch(format!("measure spacing {} differs from lattice spacing {dz}", d.dx)));
        }
        let conv = convolve(masses, &d.values);
        for (k, c) in conv.iter().enumerate() {
            add(z0 + d.x0 + k as f64 * dz, c * dz);
        }
    }
    for &(t, w) in rho.atoms() {
        for (j, mj) in masses.iter().enumerate() {
            add(z0 + j as f64 * dz + t, w * mj);
        }
    }
    let mean = m[1] / m[0];
    let var = m[2] / m[0] - mean * mean;
    if !var.is_finite() {
        return Err(Error::NonFiniteMoments(var));
    }
    Ok((m[0], mean, var))
}

fn lattice_variance(z0: f64, dz: f64, masses: &[f64]) -> f64 {
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (j, w) in masses.iter().enumerate() {
        let z = z0 + j as f64 * dz;
        m0 += w;
        m1 += w * z;
        m2 += w * z * z;
    }
    m2 / m0 - (m1 / m0).powi(2)
}

/// `Var(p_S^{E_ρ})·Var(p_S^{F_ν})`, with each variance computed from the
/// convolved distribution and checked against
/// `Var(p_S^{Q}) + Var(ρ)`.
///
/// The densities of `ρ` and `ν` must sit on the position and momentum
/// lattices of `S`'s grid respectively.
pub fn uncertainty_product(s: &GridState, rho: &ProbMeasure1D, nu: &ProbMeasure1D) -> Result<UncertaintyReport> {
    let g = s.grid();
    let pos: Vec<f64> = s.position_density().iter().map(|v| v * g.dx()).collect();
    let mom: Vec<f64> = s.momentum_density().iter().map(|v| v * g.dp()).collect();
    let (_, _, var_e) = convolved_moments(g.x0(), g.dx(), &pos, rho)?;
    let (_, _, var_f) = convolved_moments(g.p(0), g.dp(), &mom, nu)?;
    let var_position = lattice_variance(g.x0(), g.dx(), &pos);
    let var_momentum = lattice_variance(g.p(0), g.dp(), &mom);
    let (var_rho, var_nu) = (rho.variance(), nu.variance());
    let route_gap = (var_e - var_position - var_rho).abs().max((var_f - var_momentum - var_nu).abs());
    let value = var_e * var_f;
    if !value.is_finite() {
        return Err(Error::NonFiniteMoments(value));
    }
    Ok(UncertaintyReport {
        value,
        var_position,
        var_momentum,
        var_rho,
        var_nu,
        var_e,
        var_f,
        route_gap,
        pass: value >= 1.0 - UNCERTAINTY_TOL,
        tol: UNCERTAINTY_TOL,
    })
}

/// `3 − 2√2`.
pub const RESOLUTION_BOUND: f64 = 0.171_572_875_253_809_9;
pub const RESOLUTION_PRODUCT_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionProduct {
    pub gamma_rho: f64,
    pub gamma_nu: f64,
    pub product: f64,
    pub bound: f64,
    pub pass: bool,
    pub tol: f64,
}

/// `γ_{E_ρ}·γ_{F_ν}` against the bound `3 − 2√2`.
pub fn resolution_product(rho: &ProbMeasure1D, nu: &ProbMeasure1D) -> ResolutionProduct {
    let (gamma_rho, gamma_nu) = (resolution_limit(rho).gamma, resolution_limit(nu).gamma);
    let product = gamma_rho * gamma_nu;
    ResolutionProduct {
        gamma_rho,
        gamma_nu,
        product,
        bound: RESOLUTION_BOUND,
        pass: product >= RESOLUTION_BOUND - RESOLUTION_PRODUCT_TOL,
        tol: RESOLUTION_PRODUCT_TOL,
    }
}

/// A pair of intervals `(X, Y)` with `X` for position and `Y` for momentum.
pub type IntervalPair = ((f64, f64), (f64, f64));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub min: f64,
    pub max: f64,
    pub argmin: IntervalPair,
    pub argmax: IntervalPair,
    pub pass: bool,
    pub threshold: f64,
}

pub const NONCOMMUTATIVITY_THRESHOLD: f64 = 1e-4;

/// Extremes of `‖[E_ρ(X), F_ν(Y)]‖` over sampled pairs, on a dense grid.
pub fn noncommutativity_witness(
    rho: &ProbMeasure1D,
    nu: &ProbMeasure1D,
    grid: &Grid1D,
    samples: &[IntervalPair],
) -> Result<WitnessReport> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no interval pairs to sample".into()));
    }
    let e = SmearedObservable::position(rho.clone(), *grid);
    let f = SmearedObservable::momentum(nu.clone(), *grid);
    let mut report = WitnessReport {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin: samples[0],
        argmax: samples[0],
        pass: false,
        threshold: NONCOMMUTATIVITY_THRESHOLD,
    };
    for &(x, y) in samples {
        let a = smeared_effect(&e, &[x])?.to_effect();
        let b = smeared_effect(&f, &[y])?.to_effect();
        let c = commutator_norm(a.op(), b.op())?;
        if c < report.min {
            report.min = c;
            report.argmin = (x, y);
        }
        if c > report.max {
            report.max = c;
            report.argmax = (x, y);
        }
    }
    report.pass = report.max > NONCOMMUTATIVITY_THRESHOLD;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::margins::margins_of_gt;
    use crate::phasespace::states::{gaussian, ground_state, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sharpness_examples() {
        let d = sharpness_test(&ProbMeasure1D::dirac(2.5));
        assert_eq!(d.sharp_at, Some(2.5));
        assert!(d.point_mass && d.full_norm && d.projections);
        let g = ProbMeasure1D::gaussian_on(0.0, 1.0, -10.0, 0.01, 2001).unwrap();
        let r = sharpness_test(&g);
        assert!(r.sharp_at.is_none() && !r.full_norm && !r.projections && r.consistent);
        assert!(window_max(&g, 1e-3) < 1.0);
        let two = ProbMeasure1D::dirac(0.0).mix(0.5, &ProbMeasure1D::dirac(1.0)).unwrap();
        let r = sharpness_test(&two);
        assert!(r.sharp_at.is_none() && r.consistent);
    }

    #[test]
    fn ground_state_equality() {
        let t = ground_state(Grid1D::symmetric(1024, 20.0).unwrap());
        let (rho, nu) = margins_of_gt(&t).unwrap();
        let u = uncertainty_product(&t, &rho, &nu).unwrap();
        assert!((u.value - 1.0).abs() < 1e-6, "{}", u.value);
        assert!((u.var_rho * u.var_nu - 0.25).abs() < 1e-6);
        assert!(u.route_gap < 1e-10);
        assert!(u.pass);
    }

    #[test]
    fn chirped_margins_exceed_the_bound() {
        let g = Grid1D::symmetric(1024, 20.0).unwrap();
        let (a, b) = (1.0, 1.0);
        let t = GridState::pure(gaussian(g, a, b)).unwrap();
        let (rho, nu) = margins_of_gt(&t).unwrap();
        assert!((rho.variance() * nu.variance() - (a * a + b * b) / (4.0 * a * a)).abs() < 1e-8);
        let u = uncertainty_product(&t, &rho, &nu).unwrap();
        assert!(u.value > 1.0 + 0.1);
    }

    #[test]
    fn random_states_respect_uncertainty() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Grid1D::symmetric(512, 20.0).unwrap();
        for _ in 0..10 {
            let t = random_state(&mut rng, g, 3, 5).unwrap();
            let s = random_state(&mut rng, g, 1, 5).unwrap();
            let (rho, nu) = margins_of_gt(&t).unwrap();
            let u = uncertainty_product(&s, &rho, &nu).unwrap();
            assert!(u.pass, "{}", u.value);
            assert!(u.route_gap < 1e-9);
        }
    }

    #[test]
    fn ground_resolution_product() {
        let t = ground_state(Grid1D::symmetric(4096, 20.0).unwrap());
        let (rho, nu) = margins_of_gt(&t).unwrap();
        let r = resolution_product(&rho, &nu);
        let expected = 1.348_979_5 * 0.5f64.sqrt();
        assert!((r.gamma_rho - expected).abs() < 1e-4, "{}", r.gamma_rho);
        // The momentum lattice is coarse (dp ≈ 0.157), which costs accuracy.
        assert!((r.gamma_nu - expected).abs() < 5e-3, "{}", r.gamma_nu);
        assert!((r.product - expected * expected).abs() < 5e-3);
        assert!(r.pass);
        let squeezed = GridState::pure(gaussian(t.grid(), 5.0, 0.0)).unwrap();
        let (rho5, nu5) = margins_of_gt(&squeezed).unwrap();
        let r5 = resolution_product(&rho5, &nu5);
        assert!((r5.gamma_rho * 10f64.sqrt() - expected).abs() < 1e-3);
        assert!((r5.gamma_nu / 10f64.sqrt() - expected).abs() < 1e-3);
        assert!((r5.product - expected * expected).abs() < 1e-3);
    }

    #[test]
    fn noncommuting_localisations() {
        let g = Grid1D::symmetric(128, 8.0).unwrap();
        let d = ProbMeasure1D::dirac(0.0);
        let sharp = noncommutativity_witness(&d, &d, &g, &[((0.0, 1.0), (0.0, 1.0))]).unwrap();
        assert!(sharp.max > 0.1);
        let gauss = ProbMeasure1D::gaussian_on(0.0, 0.5, g.x0(), g.dx(), g.n()).unwrap();
        let nu = ProbMeasure1D::gaussian_on(0.0, 0.5, g.p(0), g.dp(), g.n()).unwrap();
        let samples = [((-1.0, 1.0), (0.0, 2.0)), ((0.5, 3.0), (-1.0, 0.5)), ((f64::NEG_INFINITY, f64::INFINITY), (0.0, 1.0))];
        let w = noncommutativity_witness(&gauss, &nu, &g, &samples).unwrap();
        assert!(w.pass && w.max > 1e-4);
        assert!(w.min < 1e-10);
        assert_eq!(w.argmin.0, (f64::NEG_INFINITY, f64::INFINITY));
    }
}
