use serde::{Deserialize, Serialize};

use super::measure::ProbMeasure1D;
use crate::{Error, Grid1D, Result, C64};

/// Order between two smeared position observables by state distinction
/// power, read off the supports of the measures' Fourier transforms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distinction {
    /// `supp ρ̂₁ ⊊ supp ρ̂₂`: the second observable separates more states.
    Less,
    Greater,
    Equivalent,
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinctionReport {
    pub relation: Distinction,
    /// Support thresholds actually used for `ρ̂₁` and `ρ̂₂`.
    pub thresholds: (f64, f64),
    /// Sizes of the closed numeric supports on the dual grid.
    pub support_sizes: (usize, usize),
}

/// Relative default for the support threshold.
pub const DEFAULT_RELATIVE_THRESHOLD: f64 = 1e-6;

/// `ρ̂` at the momentum nodes of `grid`.
pub fn transform_on(rho: &ProbMeasure1D, grid: &Grid1D) -> Vec<C64> {
    grid.momenta().iter().map(|&xi| rho.characteristic(xi)).collect()
}

fn closed_support(hat: &[C64], eps: f64) -> Vec<bool> {
    let open: Vec<bool> = hat.iter().map(|v| v.norm() > eps).collect();
    let n = open.len();
    (0..n)
        .map(|k| open[k] || (k > 0 && open[k - 1]) || (k + 1 < n && open[k + 1]))
        .collect()
}

/// Compares numeric Fourier supports of `ρ₁` and `ρ₂` on the dual grid.
///
/// Thresholds default to `1e-6·max|ρ̂|` for each measure; each support is
/// closed by one grid step before the inclusion test.
pub fn distinction_compare(
    rho1: &ProbMeasure1D,
    rho2: &ProbMeasure1D,
    grid: &Grid1D,
    thresholds: Option<(f64, f64)>,
) -> Result<DistinctionReport> {
    let (h1, h2) = (transform_on(rho1, grid), transform_on(rho2, grid));
    let default = |h: &[C64]| DEFAULT_RELATIVE_THRESHOLD * h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (e1, e2) = thresholds.unwrap_or((default(&h1), default(&h2)));
    for e in [e1, e2] {
        if !(e > 0.0) {
            return Err(Error::NonPositiveThreshold(e));
        }
    }
    let (s1, s2) = (closed_support(&h1, e1), closed_support(&h2, e2));
    let sub12 = s1.iter().zip(&s2).all(|(a, b)| !a || *b);
    let sub21 = s1.iter().zip(&s2).all(|(a, b)| !b || *a);
    let relation = match (sub12, sub21) {
        (true, true) => Distinction::Equivalent,
        (true, false) => Distinction::Less,
        (false, true) => Distinction::Greater,
        (false, false) => Distinction::Incomparable,
    };
    let count = |s: &[bool]| s.iter().filter(|&&b| b).count();
    Ok(DistinctionReport { relation, thresholds: (e1, e2), support_sizes: (count(&s1), count(&s2)) })
}

/// The Fejér-type measure `|h|²` on `grid`, where `ĥ` is the normalised
/// indicator of `|ξ| ≤ a/2`. Its transform is a triangle supported on
/// `[−a, a]`.
pub fn fejer_measure(grid: &Grid1D, a: f64) -> Result<ProbMeasure1D> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("bandwidth {a}")));
    }
    let band: Vec<C64> = grid
        .momenta()
        .iter()
        .map(|&p| if p.abs() <= a / 2.0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
        .collect();
    if band.iter().all(|v| v.re == 0.0) {
        return Err(Error::InvalidArgument(format!("bandwidth {a} contains no grid frequency")));
    }
    let h = grid.from_momentum(&band);
    ProbMeasure1D::from_density(grid.x0(), grid.dx(), h.iter().map(|v| v.norm_sqr()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::symmetric(64, 20.0).unwrap()
    }

    fn gaussian(g: &Grid1D) -> ProbMeasure1D {
        ProbMeasure1D::gaussian_on(0.0, 1.0, g.x0(), g.dx(), g.n()).unwrap()
    }

    #[test]
    fn identical_measures_are_equivalent() {
        let g = grid();
        let r = distinction_compare(&gaussian(&g), &gaussian(&g), &g, None).unwrap();
        assert_eq!(r.relation, Distinction::Equivalent);
    }

    #[test]
    fn fejer_is_strictly_below_gaussian() {
        let g = grid();
        let f = fejer_measure(&g, 2.0).unwrap();
        let hat = transform_on(&f, &g);
        for (k, v) in hat.iter().enumerate() {
            if g.p(k).abs() > 2.0 + g.dp() {
                assert!(v.norm() < 1e-12, "{}: {}", g.p(k), v.norm());
            }
        }
        let r = distinction_compare(&f, &gaussian(&g), &g, None).unwrap();
        assert_eq!(r.relation, Distinction::Less);
        let r = distinction_compare(&gaussian(&g), &f, &g, None).unwrap();
        assert_eq!(r.relation, Distinction::Greater);
        assert!(r.support_sizes.1 < r.support_sizes.0);
    }

    #[test]
    fn dirac_matches_gaussian() {
        let g = grid();
        let r = distinction_compare(&ProbMeasure1D::dirac(0.7), &gaussian(&g), &g, None).unwrap();
        assert_eq!(r.relation, Distinction::Equivalent);
    }

    #[test]
    fn nested_bands() {
        let g = grid();
        let narrow = fejer_measure(&g, 1.0).unwrap();
        let wide = fejer_measure(&g, 3.0).unwrap();
        assert_eq!(distinction_compare(&narrow, &wide, &g, None).unwrap().relation, Distinction::Less);
        assert!(matches!(distinction_compare(&narrow, &wide, &g, Some((0.0, 1.0))), Err(Error::NonPositiveThreshold(_))));
    }
}
