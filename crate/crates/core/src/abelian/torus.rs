//! Observables on the circle: covariant phase and phase-difference
//! observables, evaluated with closed-form interval integrals.

use std::f64::consts::TAU;

use crate::{CMatrix, CVector, Cell, Effect, Error, Operator, Outcome, Pom, Result, C64};

/// `c_n(θ₁, θ₂) = (1/2π) ∫_{θ₁}^{θ₂} e^{inθ} dθ`.
pub fn interval_coefficient(n: i64, lo: f64, hi: f64) -> C64 {
    if n == 0 {
        C64::new((hi - lo) / TAU, 0.0)
    } else {
        let nf = n as f64;
        (C64::from_polar(1.0, nf * hi) - C64::from_polar(1.0, nf * lo)) / C64::new(0.0, TAU * nf)
    }
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(0.0..TAU + 1e-12).contains(&lo) || !(lo < hi && hi <= TAU + 1e-12) {
        return Err(Error::DegenerateInterval(lo, hi));
    }
    Ok(())
}

fn check_unit(h: &[CVector]) -> Result<usize> {
    let m = h.first().ok_or_else(|| Error::InvalidArgument("empty vector family".into()))?.len();
    for (i, v) in h.iter().enumerate() {
        if v.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: v.len() });
        }
        if (v.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("vector {i} is not a unit vector")));
        }
    }
    Ok(m)
}

/// Effect of the covariant phase observable with generating unit vectors
/// `h_0, …, h_{d−1}` on the arc `[lo, hi)`:
/// entry `(j, k) = c_{j−k}·⟨h_j, h_k⟩`.
pub fn phase_observable_effect(h: &[CVector], lo: f64, hi: f64) -> Result<Effect> {
    check_interval(lo, hi)?;
    check_unit(h)?;
    let d = h.len();
    let m = CMatrix::from_fn(d, d, |j, k| interval_coefficient(j as i64 - k as i64, lo, hi) * h[j].dotc(&h[k]));
    Ok(Effect::new_unchecked(Operator::new(m)?))
}

/// `h_k = (1)` for every `k`: the canonical phase observable.
pub fn canonical_family(d: usize) -> Vec<CVector> {
    vec![CVector::from_element(1, C64::new(1.0, 0.0)); d]
}

/// The standard basis of `C^d`, which makes every effect a multiple of the
/// identity.
pub fn orthogonal_family(d: usize) -> Vec<CVector> {
    (0..d)
        .map(|k| {
            let mut v = CVector::zeros(d);
            v[k] = C64::new(1.0, 0.0);
            v
        })
        .collect()
}

/// Strictly increasing arc endpoints covering the whole circle:
/// `0 = e_0 < … < e_m = 2π`.
pub fn check_partition(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 || edges[0] != 0.0 || (edges[edges.len() - 1] - TAU).abs() > 1e-12 {
        return Err(Error::InvalidArgument("arc partition must run from 0 to 2π".into()));
    }
    if edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OverlappingCells("arc endpoints must increase".into()));
    }
    Ok(())
}

/// `m` equal arcs.
pub fn equal_arcs(m: usize) -> Vec<f64> {
    (0..=m).map(|i| if i == m { TAU } else { TAU * i as f64 / m as f64 }).collect()
}

fn arc_outcomes(edges: &[f64]) -> Vec<Outcome> {
    edges
        .windows(2)
        .enumerate()
        .map(|(i, w)| Outcome::new(format!("arc{i}"), Cell::Interval { lo: w[0], hi: w[1] }))
        .collect()
}

/// Phase POM over the arcs delimited by `edges`.
pub fn phase_pom(h: &[CVector], edges: &[f64]) -> Result<Pom> {
    check_partition(edges)?;
    let effects = edges.windows(2).map(|w| phase_observable_effect(h, w[0], w[1])).collect::<Result<_>>()?;
    Pom::new(format!("phase d={}", h.len()), arc_outcomes(edges), effects)
}

/// The cell whose effect is furthest from a projection, with
/// `‖E² − E‖₂` there.
pub fn sharp_phase_witness(pom: &Pom) -> Result<(usize, f64)> {
    if pom.len() < 2 {
        return Err(Error::TrivialPartition(format!("{} cell(s)", pom.len())));
    }
    if pom.dim().unwrap_or(0) < 2 {
        return Err(Error::InvalidArgument("a single number state gives a classical observable".into()));
    }
    let mut best = (0, 0.0);
    for (i, e) in pom.effects().iter().enumerate() {
        let a = e.op();
        let defect = a.compose(a).distance(a);
        if defect > best.1 {
            best = (i, defect);
        }
    }
    Ok(best)
}

/// Effect of a phase-difference observable on `C^d ⊗ C^d`, basis index
/// `i·d + j` for `e_{i,j}`, with `h` indexed the same way:
/// `⟨e_{l,m}, E e_{i,j}⟩ = [l+m = i+j]·c_{j−m}·⟨h_{l,m}, h_{i,j}⟩`.
pub fn phase_difference_effect(d: usize, h: &[CVector], lo: f64, hi: f64) -> Result<Effect> {
    check_interval(lo, hi)?;
    if h.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: h.len() });
    }
    check_unit(h)?;
    let n = d * d;
    let mut mat = CMatrix::zeros(n, n);
    for l in 0..d {
        for m in 0..d {
            for i in 0..d {
                for j in 0..d {
                    if l + m != i + j {
                        continue;
                    }
                    let (r, s) = (l * d + m, i * d + j);
                    mat[(r, s)] = interval_coefficient(j as i64 - m as i64, lo, hi) * h[r].dotc(&h[s]);
                }
            }
        }
    }
    Ok(Effect::new_unchecked(Operator::new(mat)?))
}

pub fn phase_difference_pom(d: usize, h: &[CVector], edges: &[f64]) -> Result<Pom> {
    check_partition(edges)?;
    let effects = edges
        .windows(2)
        .map(|w| phase_difference_effect(d, h, w[0], w[1]))
        .collect::<Result<_>>()?;
    Pom::new(format!("phase difference d={d}"), arc_outcomes(edges), effects)
}
