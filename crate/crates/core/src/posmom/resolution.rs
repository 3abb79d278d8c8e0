use std::io::Write;

use serde::{Deserialize, Serialize};

use super::measure::ProbMeasure1D;
use crate::{Error, Result};

/// `sup_x ρ([x − α/2, x + α/2])`.
///
/// Between consecutive positions at which a window endpoint meets a cell
/// edge or an atom, the window mass is linear in `x`, so the supremum is
/// attained at one of those positions.
pub fn window_max(rho: &ProbMeasure1D, alpha: f64) -> f64 {
    // Windows are anchored at the breakpoint itself so that an atom there is
    // not lost to rounding in `x ± α/2`.
    rho.breakpoints()
        .iter()
        .flat_map(|&b| [rho.mass_closed(b - alpha, b), rho.mass_closed(b, b + alpha)])
        .fold(0.0, f64::max)
}

/// Whether every effect `E_ρ(X)` on an interval of length `α` is regular,
/// i.e. whether some window of length `α` carries more than half the mass.
pub fn alpha_regular(rho: &ProbMeasure1D, alpha: f64) -> Result<bool> {
    if !(alpha > 0.0) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    Ok(window_max(rho, alpha) > 0.5)
}

/// Limit of resolution with the sampled profile it was read from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    #[serde(with = "extended_real")]
    pub gamma: f64,
    /// `(α, window_max(α))`, increasing in `α`.
    pub alpha_profile: Vec<(f64, f64)>,
    /// Bisection tolerance on `α`.
    pub tol: f64,
}

impl ResolutionReport {
    /// The convention for observables of the form `λ(X)·I`, whose effects
    /// are never regular.
    pub fn trivial() -> Self {
        Self { gamma: f64::INFINITY, alpha_profile: Vec::new(), tol: 0.0 }
    }

    /// `alpha,window_max` rows.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "alpha,window_max")?;
        for (a, m) in &self.alpha_profile {
            writeln!(w, "{a},{m}")?;
        }
        Ok(())
    }
}

/// Bisection tolerance used by [`resolution_limit`].
pub const RESOLUTION_TOL: f64 = 1e-7;
const PROFILE_SAMPLES: usize = 64;

/// `γ = inf{α > 0 : window_max(α) > ½}`.
pub fn resolution_limit(rho: &ProbMeasure1D) -> ResolutionReport {
    let above = |a: f64| window_max(rho, a) > 0.5;
    let gamma = if above(1e-12) {
        0.0
    } else {
        let mut hi = 1.0;
        while !above(hi) {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        while hi - lo > RESOLUTION_TOL {
            let mid = 0.5 * (lo + hi);
            if above(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let top = if gamma > 0.0 { 2.0 * gamma } else { 1.0 };
    let alpha_profile = (1..=PROFILE_SAMPLES)
        .map(|i| top * i as f64 / PROFILE_SAMPLES as f64)
        .map(|a| (a, window_max(rho, a)))
        .collect();
    ResolutionReport { gamma, alpha_profile, tol: RESOLUTION_TOL }
}

/// `ρ = ½δ_x̄ + ½λ` with `x̄` in the support of `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularDecomposition {
    pub x_bar: f64,
    pub lambda: ProbMeasure1D,
    /// `(β, λ([x̄ − β/2, x̄ + β/2]))` for the sampled neighbourhoods.
    pub support_samples: Vec<(f64, f64)>,
}

/// Neighbourhood radii used for the support test, from 1 down to 1e-6.
pub fn support_radii() -> Vec<f64> {
    (0..=12).map(|k| 10f64.powf(-0.5 * k as f64)).collect()
}

/// Finds the decomposition `ρ = ½δ_x̄ + ½λ` with `x̄ ∈ supp λ`, if any.
///
/// Support is tested on the sampled neighbourhoods of [`support_radii`]; a
/// measure whose mass near `x̄` vanishes faster than the smallest radius is
/// reported as having no decomposition.
pub fn regular_decomposition(rho: &ProbMeasure1D, tol: f64) -> Option<RegularDecomposition> {
    let &(x_bar, w) = rho.atoms().iter().max_by(|a, b| a.1.total_cmp(&b.1))?;
    if w < 0.5 - tol {
        return None;
    }
    let atoms = rho
        .atoms()
        .iter()
        .map(|&(x, v)| if x == x_bar { (x, (2.0 * v - 1.0).max(0.0)) } else { (x, 2.0 * v) })
        .collect();
    let density = rho.density().map(|d| super::measure::Density { values: d.values.iter().map(|v| 2.0 * v).collect(), ..d.clone() });
    let (lambda, _) = ProbMeasure1D::normalized(atoms, density).ok()?;
    let support_samples: Vec<(f64, f64)> =
        support_radii().into_iter().map(|b| (b, lambda.mass_closed(x_bar - b / 2.0, x_bar + b / 2.0))).collect();
    if support_samples.iter().all(|&(_, m)| m > 1e-14) {
        Some(RegularDecomposition { x_bar, lambda, support_samples })
    } else {
        None
    }
}

mod extended_real {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Named(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            Repr::Finite(*v).serialize(s)
        } else if *v > 0.0 {
            Repr::Named("inf".into()).serialize(s)
        } else {
            Err(serde::ser::Error::custom(format!("unsupported value {v}")))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Finite(v) => Ok(v),
            Repr::Named(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Named(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}
