use std::f64::consts::TAU;

use crate::abelian::{coset_action, verify_covariance, CovarianceReport, FiniteAbelianGroup, Subgroup};
use crate::hilbert::{Cell, Effect, Outcome, Pom, State};
use crate::{CMatrix, Error, Operator, Result, C64};

/// `W_{ab} = Z^b X^a` on `C^d`, with `(Xψ)(x) = ψ(x−a)` and
/// `(Zψ)(x) = e^{2πibx/d}ψ(x)`.
pub fn weyl_operator(d: usize, a: usize, b: usize) -> Operator {
    let mat = CMatrix::from_fn(d, d, |x, y| {
        if y == (x + d - a % d) % d {
            C64::from_polar(1.0, TAU * (b * x % d) as f64 / d as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Operator::new(mat).expect("square")
}

/// The phase-space group `Z_d × Z_d`; element `a·d + b` is `(a, b)`.
pub fn weyl_group(d: usize) -> Result<FiniteAbelianGroup> {
    FiniteAbelianGroup::new(vec![d, d])
}

/// `E(a,b) = (1/d)·W_{ab} T W_{ab}*` over `Z_d × Z_d`.
pub fn finite_weyl_pom(d: usize, t: &State) -> Result<Pom> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} < 2")));
    }
    if t.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: t.dim() });
    }
    let tr = t.op().trace();
    let defect = (tr - C64::new(1.0, 0.0)).norm();
    if defect > 1e-9 {
        return Err(Error::TraceDefect(defect));
    }
    let mut outcomes = Vec::with_capacity(d * d);
    let mut effects = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let e = t.op().conjugate_by(&weyl_operator(d, a, b)).scaled(1.0 / d as f64);
            outcomes.push(Outcome::new(format!("({a},{b})"), Cell::Group { element: vec![a, b] }));
            effects.push(Effect::new_unchecked(e));
        }
    }
    Pom::new(format!("Z{d}xZ{d}"), outcomes, effects)
}

/// Checks `W_g E(X) W_g* = E(X + g)` for every `g ∈ Z_d × Z_d`.
pub fn verify_weyl_covariance(pom: &Pom, d: usize, tol: f64) -> Result<CovarianceReport> {
    let group = weyl_group(d)?;
    let cosets = Subgroup::trivial(&group).cosets();
    let unitary = |g: usize| {
        let c = group.coords(g);
        weyl_operator(d, c[0], c[1])
    };
    verify_covariance(pom, group.elements(), unitary, coset_action(&group, &cosets), tol)
}
